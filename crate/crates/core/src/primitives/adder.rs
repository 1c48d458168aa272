//! Ripple-carry adder with AND-computed carries and measured uncompute.
//!
//! `t += a (mod 2^w)` with `w − 1` AND gates into borrowed carry wires and
//! `w − 1` AND_UNCOMPUTE gates, so the T count is `4(w − 1)`.

use crate::circuit::{Circuit, Wire};

/// Appends `t += a` over the `w = a.len()` low bits; carries are borrowed
/// and released inside the call.
pub fn add_into(c: &mut Circuit, a: &[Wire], t: &[Wire]) {
    let w = a.len();
    assert_eq!(w, t.len());
    if w == 0 {
        return;
    }
    let carry = c.alloc(w - 1);
    // carry[i] holds the carry into bit i + 1
    for i in 0..w - 1 {
        if i == 0 {
            c.and(a[0], t[0], carry[0]);
        } else {
            let ci = carry[i - 1];
            c.cnot(ci, a[i]);
            c.cnot(ci, t[i]);
            c.and(a[i], t[i], carry[i]);
            c.cnot(ci, carry[i]);
        }
    }
    if w > 1 {
        c.cnot(carry[w - 2], t[w - 1]);
    }
    c.cnot(a[w - 1], t[w - 1]);
    for i in (0..w - 1).rev() {
        if i == 0 {
            c.and_uncompute(a[0], t[0], carry[0]);
            c.cnot(a[0], t[0]);
        } else {
            let ci = carry[i - 1];
            c.cnot(ci, carry[i]);
            c.and_uncompute(a[i], t[i], carry[i]);
            c.cnot(ci, a[i]);
            c.cnot(a[i], t[i]);
        }
    }
    c.free(&carry);
}

/// Standalone `bits`-wide adder over inputs `a` (wires `0..bits`) and
/// `t` (wires `bits..2·bits`).
pub fn build_adder(bits: usize) -> Circuit {
    assert!(bits >= 1);
    let mut c = Circuit::with_width(2 * bits);
    let a: Vec<Wire> = (0..bits).collect();
    let t: Vec<Wire> = (bits..2 * bits).collect();
    add_into(&mut c, &a, &t);
    c.declare_input("a", &a);
    c.declare_output("t", &t);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revsim::{run, State};
    use crate::{estimate, CostModel, GateKind};

    fn add(bits: usize, pairs: &[(u64, u64)]) -> Vec<u64> {
        let c = build_adder(bits);
        let a: Vec<Wire> = (0..bits).collect();
        let t: Vec<Wire> = (bits..2 * bits).collect();
        let mut s = State::for_circuit(&c);
        for (l, &(x, y)) in pairs.iter().enumerate() {
            s.write_u128(&a, l, x as u128);
            s.write_u128(&t, l, y as u128);
        }
        run(&c, &mut s).unwrap();
        (0..pairs.len())
            .map(|l| {
                assert_eq!(s.read_u128(&a, l) as u64, pairs[l].0);
                s.read_u128(&t, l) as u64
            })
            .collect()
    }

    #[test]
    fn small_widths_exhaustive() {
        for bits in 1..=4 {
            let m = 1u64 << bits;
            let pairs: Vec<(u64, u64)> = (0..m).flat_map(|x| (0..m).map(move |y| (x, y))).collect();
            for chunk in pairs.chunks(64) {
                let got = add(bits, chunk);
                for (&(x, y), g) in chunk.iter().zip(got) {
                    assert_eq!(g, (x + y) % m);
                }
            }
        }
    }

    #[test]
    fn wraps_at_32_bits() {
        assert_eq!(add(32, &[(1, 0xffff_ffff)]), vec![0]);
    }

    #[test]
    fn t_count_is_four_per_carry() {
        let c = build_adder(32);
        assert_eq!(c.gate_count(GateKind::And), 31);
        assert_eq!(estimate(&c, &CostModel::default()).t, 124);
        assert_eq!(estimate(&c, &CostModel::default()).measurement, 31);
    }
}
