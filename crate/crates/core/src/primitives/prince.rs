//! PRINCE: FX whitening around a 12-round keyed core.
//!
//! Nibble `j` of a state is bits `4j..4j+4` of the `u64`. ShiftRows is
//! specified on nibbles numbered from the most significant end, so it is
//! applied through [`nibble_msb`].

use super::plu::{apply_linear, BitMatrix};
use super::sbox::{invert, SboxDecomposition, PRINCE_SBOX};
use super::{
    bits_from_u128, bits_to_u128, finish_circuit, Bits, CipherCircuit, CipherId, Sections, SimonOpt,
};
use crate::circuit::{Circuit, Wire};

pub const RC: [u64; 12] = [
    0x0000000000000000,
    0x13198a2e03707344,
    0xa4093822299f31d0,
    0x082efa98ec4e6c89,
    0x452821e638d01377,
    0xbe5466cf34e90c6c,
    0x7ef84f78fd955cb1,
    0x85840851f1ac43aa,
    0xc882d32f25323c54,
    0x64a51195e0e3610d,
    0xd3b5a399ca0c2399,
    0xc0ac29b7c97c50dd,
];

/// ShiftRows on most-significant-first nibble indices: nibble `i` moves to
/// position `SR[i]`.
pub const SR: [usize; 16] = [0, 13, 10, 7, 4, 1, 14, 11, 8, 5, 2, 15, 12, 9, 6, 3];

const M0: [u16; 16] = [
    0x0111, 0x2220, 0x4404, 0x8088, 0x1011, 0x0222, 0x4440, 0x8808, 0x1101, 0x2022, 0x0444, 0x8880,
    0x1110, 0x2202, 0x4044, 0x0888,
];

/// `m1` is `m0` with its columns rotated by twelve.
fn m1() -> [u16; 16] {
    std::array::from_fn(|j| M0[(j + 12) % 16])
}

fn block_mul(x: u16, m: &[u16; 16]) -> u16 {
    (0..16)
        .filter(|&j| x >> j & 1 == 1)
        .fold(0, |a, j| a ^ m[j])
}

/// The involutive diagonal layer `M' = diag(m0, m1, m1, m0)`.
pub fn m_prime(x: u64) -> u64 {
    let m1 = m1();
    let blocks = [&M0, &m1, &m1, &M0];
    (0..4).fold(0, |acc, b| {
        acc | (block_mul((x >> (16 * b)) as u16, blocks[b]) as u64) << (16 * b)
    })
}

fn nibble_msb(x: u64, i: usize) -> u64 {
    x >> (4 * (15 - i)) & 0xf
}

pub fn shift_rows(x: u64) -> u64 {
    (0..16).fold(0, |acc, i| acc | nibble_msb(x, i) << (4 * (15 - SR[i])))
}

pub fn shift_rows_inv(x: u64) -> u64 {
    (0..16).fold(0, |acc, i| acc | nibble_msb(x, SR[i]) << (4 * (15 - i)))
}

fn sbox_layer(x: u64, t: &[u8; 16]) -> u64 {
    (0..16).fold(0, |acc, j| {
        acc | (t[(x >> (4 * j) & 0xf) as usize] as u64) << (4 * j)
    })
}

pub fn m(x: u64) -> u64 {
    shift_rows(m_prime(x))
}

pub fn m_inv(x: u64) -> u64 {
    m_prime(shift_rows_inv(x))
}

/// The keyed core with inner key `k1`.
pub fn core(x: u64, k1: u64) -> u64 {
    let inv = invert(&PRINCE_SBOX);
    let mut s = x ^ k1 ^ RC[0];
    for rc in &RC[1..6] {
        s = m(sbox_layer(s, &PRINCE_SBOX)) ^ rc ^ k1;
    }
    s = sbox_layer(m_prime(sbox_layer(s, &PRINCE_SBOX)), &inv);
    for rc in &RC[6..11] {
        s = sbox_layer(m_inv(s ^ k1 ^ rc), &inv);
    }
    s ^ RC[11] ^ k1
}

/// `K0' = (K0 >>> 1) ⊕ (K0 >> 63)`.
pub fn k0_prime(k0: u64) -> u64 {
    k0.rotate_right(1) ^ (k0 >> 63)
}

pub fn encrypt(x: u64, k0: u64, k1: u64) -> u64 {
    core(x ^ k0, k1) ^ k0_prime(k0)
}

pub fn decrypt(c: u64, k0: u64, k1: u64) -> u64 {
    // the core is an involution up to RC ⊕ α with α = RC[11] ⊕ RC[0]
    core(c ^ k0_prime(k0), k1 ^ RC[11]) ^ k0
}

/// Truncated output: the core output with the final `RC11 ⊕ k1` removed.
pub fn postmap(key: &[bool], output: &[bool]) -> Bits {
    let k1 = bits_to_u128(key) as u64;
    let out = bits_to_u128(output) as u64;
    bits_from_u128((out ^ RC[11] ^ k1) as u128, 64)
}

pub fn matrix_of(f: impl Fn(u64) -> u64) -> BitMatrix {
    BitMatrix::from_columns(64, 64, |j| {
        let y = f(1 << j);
        (0..64).map(|i| y >> i & 1 == 1).collect()
    })
}

/// Applies the rows `rows` of `a` in place on the wires of the columns
/// they read; the remaining outputs are unit rows chosen to keep the map
/// invertible. Returns the wires holding the requested rows, in order.
fn apply_partial(c: &mut Circuit, s: &[Wire], a: &BitMatrix, rows: &[usize]) -> Vec<Wire> {
    let cols: Vec<usize> = (0..a.cols())
        .filter(|&j| rows.iter().any(|&r| a.get(r, j)))
        .collect();
    let k = cols.len();
    let mut sub: Vec<Vec<bool>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&j| a.get(r, j)).collect())
        .collect();
    let mut basis = Vec::new();
    for row in &sub {
        insert(&mut basis, row.clone());
    }
    let mut unit = 0;
    while sub.len() < k {
        let mut e = vec![false; k];
        e[unit] = true;
        unit += 1;
        if insert(&mut basis, e.clone()) {
            sub.push(e);
        }
    }
    let full = BitMatrix::from_columns(k, k, |j| sub.iter().map(|r| r[j]).collect());
    let mut w: Vec<Wire> = cols.iter().map(|&j| s[j]).collect();
    apply_linear(c, &mut w, &full);
    w[..rows.len()].to_vec()
}

/// Adds `v` to an echelon basis; false if already in the span.
fn insert(basis: &mut Vec<Vec<bool>>, mut v: Vec<bool>) -> bool {
    for b in basis.iter() {
        let p = b.iter().position(|&x| x).expect("non-zero basis vector");
        if v[p] {
            v.iter_mut().zip(b).for_each(|(x, &y)| *x ^= y);
        }
    }
    if v.iter().any(|&x| x) {
        basis.push(v);
        true
    } else {
        false
    }
}

fn add_key(c: &mut Circuit, s: &[Wire], k: &[Wire], rc: u64, bits: &[usize]) {
    for &i in bits {
        c.cnot(k[i], s[i]);
        if rc >> i & 1 == 1 {
            c.x(s[i]);
        }
    }
}

fn sbox_nibbles(c: &mut Circuit, s: &mut [Wire], nibbles: &[usize], inverse: bool) {
    let d = SboxDecomposition::prince();
    for &j in nibbles {
        let mut w = [s[4 * j], s[4 * j + 1], s[4 * j + 2], s[4 * j + 3]];
        if inverse {
            d.apply_inverse(c, &mut w);
        } else {
            d.apply(c, &mut w);
        }
        s[4 * j..4 * j + 4].copy_from_slice(&w);
    }
}

/// `M'` in place, one 16×16 block at a time.
fn m_prime_layer(c: &mut Circuit, s: &mut [Wire]) {
    let a = matrix_of(m_prime);
    for b in 0..4 {
        let block = BitMatrix::from_columns(16, 16, |j| {
            (0..16).map(|i| a.get(16 * b + i, 16 * b + j)).collect()
        });
        apply_linear(c, &mut s[16 * b..16 * b + 16], &block);
    }
}

/// Relabels wires for a bit permutation `f` (no gates).
fn permute_wires(s: &mut [Wire], f: impl Fn(u64) -> u64) {
    let old = s.to_vec();
    for j in 0..64 {
        let i = f(1 << j).trailing_zeros() as usize;
        s[i] = old[j];
    }
}

pub fn build(opt: SimonOpt) -> CipherCircuit {
    let mut c = Circuit::with_width(128);
    let input: Vec<Wire> = (0..64).collect();
    let key: Vec<Wire> = (64..128).collect();
    let mut s = input.clone();
    let all: Vec<usize> = (0..64).collect();
    let nibbles: Vec<usize> = (0..16).collect();
    let mut sec = Sections::default();

    sec.mark(&c, "whitening");
    add_key(&mut c, &s, &key, RC[0], &all);
    for r in 1..=5 {
        sec.mark(&c, format!("round {r}"));
        sbox_nibbles(&mut c, &mut s, &nibbles, false);
        m_prime_layer(&mut c, &mut s);
        permute_wires(&mut s, shift_rows);
        add_key(&mut c, &s, &key, RC[r], &all);
    }
    sec.mark(&c, "middle");
    sbox_nibbles(&mut c, &mut s, &nibbles, false);
    m_prime_layer(&mut c, &mut s);
    sbox_nibbles(&mut c, &mut s, &nibbles, true);

    let last_full = if opt.truncate_last_rounds { 8 } else { 10 };
    for r in 6..=last_full {
        sec.mark(&c, format!("round {r}"));
        add_key(&mut c, &s, &key, RC[r], &all);
        permute_wires(&mut s, shift_rows_inv);
        m_prime_layer(&mut c, &mut s);
        sbox_nibbles(&mut c, &mut s, &nibbles, true);
    }
    let out: Vec<Wire> = if opt.truncate_last_rounds {
        // round 10 output block 0 reads 16 bits of its input; round 9 only
        // has to produce the four nibbles holding them
        let minv = matrix_of(m_inv);
        let rows10: Vec<usize> = (0..16).collect();
        let need10: Vec<usize> = (0..64)
            .filter(|&j| rows10.iter().any(|&r| minv.get(r, j)))
            .collect();
        let nib9: Vec<usize> = {
            let mut v: Vec<usize> = need10.iter().map(|&b| b / 4).collect();
            v.dedup();
            v
        };
        let rows9: Vec<usize> = nib9.iter().flat_map(|&j| 4 * j..4 * j + 4).collect();

        sec.mark(&c, "round 9");
        add_key(&mut c, &s, &key, RC[9], &all);
        let w9 = apply_partial(&mut c, &s, &minv, &rows9);
        for (&r, &w) in rows9.iter().zip(&w9) {
            s[r] = w;
        }
        sbox_nibbles(&mut c, &mut s, &nib9, true);

        sec.mark(&c, "round 10");
        add_key(&mut c, &s, &key, RC[10], &need10);
        let mut w10 = apply_partial(&mut c, &s, &minv, &rows10);
        sbox_nibbles(&mut c, &mut w10, &[0, 1, 2, 3], true);
        w10[..opt.m_out.min(16)].to_vec()
    } else {
        sec.mark(&c, "final whitening");
        add_key(&mut c, &s, &key, RC[11], &all);
        s[..opt.m_out].to_vec()
    };
    assert_eq!(
        out.len(),
        opt.m_out,
        "truncated PRINCE copies at most 16 bits"
    );
    let sections = sec.finish(&c);
    let (circuit, output) = finish_circuit(c, 0, input.clone(), key.clone(), &[out]);
    let postmap = if opt.truncate_last_rounds {
        "y = bits 0..m_out of core(x) ^ RC11 ^ k1".into()
    } else {
        "y = bits 0..m_out of core(x)".into()
    };
    CipherCircuit {
        cipher: CipherId::Prince,
        opt,
        circuit,
        input,
        key,
        output,
        sections,
        postmap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_prime_is_involution() {
        for x in [1u64, 0xdead_beef_0123_4567, u64::MAX] {
            assert_eq!(m_prime(m_prime(x)), x);
            assert_eq!(m_inv(m(x)), x);
        }
    }

    #[test]
    fn decrypt_inverts_encrypt() {
        let (k0, k1) = (0x0123_4567_89ab_cdef, 0xfedc_ba98_7654_3210);
        for x in [0u64, 42, u64::MAX] {
            assert_eq!(decrypt(encrypt(x, k0, k1), k0, k1), x);
        }
    }

    #[test]
    fn round_nine_keeps_four_nibbles() {
        let c = build(SimonOpt::attack());
        let r9 = c.sections.iter().find(|s| s.label == "round 9").unwrap();
        assert_eq!(r9.counts[crate::GateKind::Toffoli.index()], 4 * 6);
    }
}
