//! Keccak-f[200]: 8-bit lanes, 18 rounds.
//!
//! Lane `(x, y)` is byte `x + 5y`; state bit `8(x + 5y) + z` is bit `z` of
//! that lane. The circuit keeps θ in place (PLU), relabels for ρ and π,
//! computes χ out of place into 200 fresh wires and clears the old state
//! with the adjoint of an out-of-place χ⁻¹.

use std::sync::OnceLock;

use super::plu::{apply_linear, BitMatrix};
use super::{finish_circuit, CipherCircuit, CipherId, Sections, SimonOpt};
use crate::circuit::{Circuit, Wire};

pub const ROUNDS: usize = 18;

pub const RC: [u8; ROUNDS] = [
    0x01, 0x82, 0x8a, 0x00, 0x8b, 0x01, 0x81, 0x09, 0x8a, 0x88, 0x09, 0x0a, 0x8b, 0x8b, 0x89, 0x03,
    0x02, 0x80,
];

/// ρ offsets modulo the lane size, indexed `[x][y]`.
pub fn rho_offsets() -> [[u32; 5]; 5] {
    let mut r = [[0u32; 5]; 5];
    let (mut x, mut y) = (1usize, 0usize);
    for t in 0..24u32 {
        r[x][y] = ((t + 1) * (t + 2) / 2) % 8;
        (x, y) = (y, (2 * x + 3 * y) % 5);
    }
    r
}

fn lane(x: usize, y: usize) -> usize {
    x % 5 + 5 * (y % 5)
}

fn theta(a: &mut [u8; 25]) {
    let c: [u8; 5] = std::array::from_fn(|x| (0..5).fold(0, |acc, y| acc ^ a[lane(x, y)]));
    for x in 0..5 {
        let d = c[(x + 4) % 5] ^ c[(x + 1) % 5].rotate_left(1);
        for y in 0..5 {
            a[lane(x, y)] ^= d;
        }
    }
}

/// ρ then π: lane `(x, y)` rotated moves to `(y, 2x + 3y)`.
fn rho_pi(a: &[u8; 25]) -> [u8; 25] {
    let r = rho_offsets();
    let mut b = [0u8; 25];
    for x in 0..5 {
        for y in 0..5 {
            b[lane(y, 2 * x + 3 * y)] = a[lane(x, y)].rotate_left(r[x][y]);
        }
    }
    b
}

fn chi(b: &[u8; 25]) -> [u8; 25] {
    std::array::from_fn(|i| {
        let (x, y) = (i % 5, i / 5);
        b[i] ^ (!b[lane(x + 1, y)] & b[lane(x + 2, y)])
    })
}

pub fn round(a: &mut [u8; 25], rc: u8) {
    theta(a);
    *a = chi(&rho_pi(a));
    a[0] ^= rc;
}

pub fn permute(a: &mut [u8; 25]) {
    for &rc in &RC {
        round(a, rc);
    }
}

/// χ on one 5-bit row (bit `x` is lane `x`).
pub fn chi_row(p: u8) -> u8 {
    (0..5).fold(0, |acc, x| {
        let b = |i: usize| p >> (i % 5) & 1;
        acc | (b(x) ^ (!b(x + 1) & 1 & b(x + 2))) << x
    })
}

fn theta_matrix() -> &'static BitMatrix {
    static M: OnceLock<BitMatrix> = OnceLock::new();
    M.get_or_init(|| {
        BitMatrix::from_columns(200, 200, |j| {
            let mut a = [0u8; 25];
            a[j / 8] = 1 << (j % 8);
            theta(&mut a);
            (0..200).map(|i| a[i / 8] >> (i % 8) & 1 == 1).collect()
        })
    })
}

pub fn permute_inverse(a: &mut [u8; 25]) {
    let inv_row: [u8; 32] = {
        let mut t = [0u8; 32];
        for p in 0..32u8 {
            t[chi_row(p) as usize] = p;
        }
        t
    };
    let r = rho_offsets();
    let theta_inv = theta_matrix().inverse().expect("θ is invertible");
    for &rc in RC.iter().rev() {
        a[0] ^= rc;
        let mut b = [0u8; 25];
        for z in 0..8 {
            for y in 0..5 {
                let row = (0..5).fold(0u8, |acc, x| acc | (a[lane(x, y)] >> z & 1) << x);
                let p = inv_row[row as usize];
                for x in 0..5 {
                    b[lane(x, y)] |= (p >> x & 1) << z;
                }
            }
        }
        let mut c = [0u8; 25];
        for x in 0..5 {
            for y in 0..5 {
                c[lane(x, y)] = b[lane(y, 2 * x + 3 * y)].rotate_right(r[x][y]);
            }
        }
        let bits: Vec<bool> = (0..200).map(|i| c[i / 8] >> (i % 8) & 1 == 1).collect();
        let out = theta_inv.apply(&bits);
        *a = std::array::from_fn(|i| (0..8).fold(0u8, |acc, z| acc | (out[8 * i + z] as u8) << z));
    }
}

/// Output positions copied by the truncated circuit.
pub fn output_bits(m: usize) -> Vec<usize> {
    (0..m).collect()
}

/// Appends the out-of-place χ⁻¹ for one row: `q` holds χ(p) and `t` five
/// zero wires; afterwards `t[i]` holds `p_i`. Seven AND, two AND_UNCOMPUTE.
pub fn chi_inverse_row(c: &mut Circuit, q: [Wire; 5], t: [Wire; 5]) {
    // p_i = q_i ⊕ ¬p_{i+1}·p_{i+2}; seed with p0, p1 via c_j = q_j ⊕ ¬q_{j+1}q_{j+2}
    let and_not = |c: &mut Circuit, a: Wire, b: Wire, tgt: Wire| {
        c.x(a);
        c.and(a, b, tgt);
        c.x(a);
    };
    let and_not_u = |c: &mut Circuit, a: Wire, b: Wire, tgt: Wire| {
        c.x(a);
        c.and_uncompute(a, b, tgt);
        c.x(a);
    };
    let [p0, p1, p2, p3, p4] = t;
    let w = p2;
    // c2 into w, p0 = q0 ⊕ ¬q1·c2
    and_not(c, q[3], q[4], w);
    c.cnot(q[2], w);
    and_not(c, q[1], w, p0);
    c.cnot(q[0], p0);
    c.cnot(q[2], w);
    and_not_u(c, q[3], q[4], w);
    // c3 into w, p1 = q1 ⊕ ¬q2·c3
    and_not(c, q[4], q[0], w);
    c.cnot(q[3], w);
    and_not(c, q[2], w, p1);
    c.cnot(q[1], p1);
    c.cnot(q[3], w);
    and_not_u(c, q[4], q[0], w);
    // remaining lanes from consecutive known pairs
    and_not(c, p0, p1, p4);
    c.cnot(q[4], p4);
    and_not(c, p4, p0, p3);
    c.cnot(q[3], p3);
    and_not(c, p3, p4, p2);
    c.cnot(q[2], p2);
}

pub fn build(opt: SimonOpt) -> CipherCircuit {
    let mut c = Circuit::with_width(200);
    let input: Vec<Wire> = (0..200).collect();
    let mut s = input.clone();
    let theta_m = theta_matrix();
    let r = rho_offsets();
    let mut sec = Sections::default();
    let mut out = Vec::new();
    let uncompute = {
        let mut t = Circuit::with_width(10);
        chi_inverse_row(&mut t, [0, 1, 2, 3, 4], [5, 6, 7, 8, 9]);
        t.adjoint()
    };
    for (round_no, &rc) in RC.iter().enumerate() {
        sec.mark(&c, format!("round {}", round_no + 1));
        apply_linear(&mut c, &mut s, theta_m);
        let old = s.clone();
        for x in 0..5 {
            for y in 0..5 {
                for z in 0..8 {
                    let dst = 8 * lane(y, 2 * x + 3 * y) + (z + r[x][y] as usize) % 8;
                    s[dst] = old[8 * lane(x, y) + z];
                }
            }
        }
        let last = round_no + 1 == ROUNDS;
        if last && opt.truncate_last_rounds {
            // only the copied χ outputs are computed; the input stays live
            for &i in &output_bits(opt.m_out) {
                let (l, z) = (i / 8, i % 8);
                let (x, y) = (l % 5, l / 5);
                let t = c.alloc_one();
                let a = s[8 * lane(x + 1, y) + z];
                c.x(a);
                c.and(a, s[8 * lane(x + 2, y) + z], t);
                c.x(a);
                c.cnot(s[i], t);
                if l == 0 && rc >> z & 1 == 1 {
                    c.x(t);
                }
                out.push(t);
            }
            break;
        }
        let new = c.alloc(200);
        for y in 0..5 {
            for z in 0..8 {
                let p: [Wire; 5] = std::array::from_fn(|x| s[8 * lane(x, y) + z]);
                let q: [Wire; 5] = std::array::from_fn(|x| new[8 * lane(x, y) + z]);
                for x in 0..5 {
                    let a = p[(x + 1) % 5];
                    c.x(a);
                    c.and(a, p[(x + 2) % 5], q[x]);
                    c.x(a);
                    c.cnot(p[x], q[x]);
                }
                // clear p from q: adjoint of χ⁻¹ with its targets on p
                let map: Vec<Wire> = q.iter().chain(p.iter()).copied().collect();
                for g in uncompute.gates() {
                    c.push(g.map_wires(|w| map[w]));
                }
            }
        }
        c.free(&s);
        s = new;
        for z in 0..8 {
            if rc >> z & 1 == 1 {
                c.x(s[z]);
            }
        }
    }
    if !opt.truncate_last_rounds {
        out = s[..opt.m_out].to_vec();
    }
    let sections = sec.finish(&c);
    let (circuit, output) = finish_circuit(c, 0, input.clone(), vec![], &[out]);
    let postmap = "y = state bits 0..m_out".into();
    CipherCircuit {
        cipher: CipherId::Keccak200,
        opt,
        circuit,
        input,
        key: vec![],
        output,
        sections,
        postmap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revsim::{run, State};

    #[test]
    fn rho_offsets_match_table() {
        let r = rho_offsets();
        assert_eq!(r[0][0], 0);
        assert_eq!(r[1][0], 1);
        assert_eq!(r[2][0], 62 % 8);
        assert_eq!(r[0][1], 36 % 8);
        assert_eq!(r[4][4], 14 % 8);
    }

    #[test]
    fn chi_inverse_row_is_exact() {
        let mut c = Circuit::with_width(10);
        chi_inverse_row(&mut c, [0, 1, 2, 3, 4], [5, 6, 7, 8, 9]);
        let mut s = State::zeros(10);
        for p in 0..32u8 {
            s.write_u128(&[0, 1, 2, 3, 4], p as usize, chi_row(p) as u128);
        }
        run(&c, &mut s).unwrap();
        for p in 0..32u8 {
            assert_eq!(s.read_u128(&[5, 6, 7, 8, 9], p as usize) as u8, p);
        }
        assert_eq!(c.gate_count(crate::GateKind::And), 7);
        assert_eq!(c.gate_count(crate::GateKind::AndUncompute), 2);
    }

    #[test]
    fn inverse_round_trips() {
        let mut a: [u8; 25] = std::array::from_fn(|i| (i as u8).wrapping_mul(91) ^ 0x3c);
        let orig = a;
        permute(&mut a);
        permute_inverse(&mut a);
        assert_eq!(a, orig);
    }
}
