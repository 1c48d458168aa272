//! In-place 4-bit S-boxes as quadratic decompositions.
//!
//! A decomposition is `x ↦ A(T(A_k(…T(A_1(B(x)))…)))` where each `A_i`, `B`
//! and `A` is affine and `T` toggles bit 2 by the product of bits 0 and 1. In
//! circuit form `T` is one Toffoli and every affine layer is CNOT/X only.

use std::collections::VecDeque;
use std::sync::OnceLock;

use super::plu::{affine_of_table, BitMatrix};
use crate::circuit::{Circuit, Wire};

#[derive(Clone, Debug)]
pub struct SboxDecomposition {
    pub table: [u8; 16],
    pub input: [usize; 16],
    pub inner: Vec<[usize; 16]>,
    pub output: [usize; 16],
}

pub const PRINCE_SBOX: [u8; 16] = [
    0xb, 0xf, 0x3, 0x2, 0xa, 0xc, 0x9, 0x1, 0x6, 0x7, 0x8, 0x0, 0xe, 0x5, 0xd, 0x4,
];
pub const SPONGENT_SBOX: [u8; 16] = [
    0xe, 0xd, 0xb, 0x0, 0x2, 0x1, 0x4, 0xf, 0x7, 0xa, 0x8, 0x5, 0x9, 0xc, 0x3, 0x6,
];

pub fn invert(table: &[u8; 16]) -> [u8; 16] {
    let mut inv = [0u8; 16];
    for (x, &y) in table.iter().enumerate() {
        inv[y as usize] = x as u8;
    }
    inv
}

fn toggle(x: usize) -> usize {
    x ^ ((x & x >> 1 & 1) << 2)
}

/// 4×4 GF(2) matrix packed row-major: bit `4i + j` is entry `(i, j)`.
type Packed = u16;

const IDENTITY4: Packed = 0x8421;

fn pack(m: &BitMatrix) -> Packed {
    (0..16)
        .filter(|&b| m.get(b / 4, b % 4))
        .fold(0, |a, b| a | 1 << b)
}

fn row_xor(m: Packed, ctl: usize, tgt: usize) -> Packed {
    m ^ ((m >> (4 * ctl)) & 0xf) << (4 * tgt)
}

fn permute_rows(m: Packed, p: &[usize; 4]) -> Packed {
    (0..4).fold(0, |a, i| a | ((m >> (4 * p[i])) & 0xf) << (4 * i))
}

/// Breadth-first tree over GL(4, 2) from the identity under row additions:
/// `parent[m] = (previous matrix, ctl, tgt)`.
fn synthesis_tree() -> &'static Vec<Option<(Packed, u8, u8)>> {
    static TREE: OnceLock<Vec<Option<(Packed, u8, u8)>>> = OnceLock::new();
    TREE.get_or_init(|| {
        let mut parent = vec![None; 1 << 16];
        parent[IDENTITY4 as usize] = Some((IDENTITY4, 0, 0));
        let mut queue = VecDeque::from([IDENTITY4]);
        while let Some(m) = queue.pop_front() {
            for ctl in 0..4 {
                for tgt in (0..4).filter(|&t| t != ctl) {
                    let n = row_xor(m, ctl, tgt);
                    if parent[n as usize].is_none() {
                        parent[n as usize] = Some((m, ctl as u8, tgt as u8));
                        queue.push_back(n);
                    }
                }
            }
        }
        parent
    })
}

fn path(tree: &[Option<(Packed, u8, u8)>], mut m: Packed) -> Vec<(usize, usize)> {
    let mut ops = Vec::new();
    while m != IDENTITY4 {
        let (prev, ctl, tgt) = tree[m as usize].expect("invertible");
        ops.push((ctl as usize, tgt as usize));
        m = prev;
    }
    ops.reverse();
    ops
}

/// Fewest-CNOT circuit for `x ↦ A·x` on four wires, output order free.
/// Returns the CNOTs over local indices and `p`: local wire `i` ends up
/// holding output bit `p[i]`.
pub fn min_cnot_linear4(a: &BitMatrix) -> (Vec<(usize, usize)>, [usize; 4]) {
    let tree = synthesis_tree();
    let m = pack(a);
    let mut best: Option<(Vec<(usize, usize)>, [usize; 4])> = None;
    for p in PERMS4 {
        let ops = path(tree, permute_rows(m, &p));
        if best.as_ref().map_or(true, |b| ops.len() < b.0.len()) {
            best = Some((ops, p));
        }
    }
    best.expect("at least one permutation")
}

const PERMS4: [[usize; 4]; 24] = [
    [0, 1, 2, 3],
    [0, 1, 3, 2],
    [0, 2, 1, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
    [0, 3, 2, 1],
    [1, 0, 2, 3],
    [1, 0, 3, 2],
    [1, 2, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 0, 2],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
    [2, 0, 3, 1],
    [2, 1, 0, 3],
    [2, 1, 3, 0],
    [2, 3, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 1, 2],
    [3, 0, 2, 1],
    [3, 1, 0, 2],
    [3, 1, 2, 0],
    [3, 2, 0, 1],
    [3, 2, 1, 0],
];

/// `x ↦ A·x ⊕ k` on a nibble with a fewest-CNOT linear part.
fn apply_affine4(c: &mut Circuit, w: &mut [Wire; 4], a: &BitMatrix, k: &[bool]) {
    let (ops, p) = min_cnot_linear4(a);
    for (ctl, tgt) in ops {
        c.cnot(w[ctl], w[tgt]);
    }
    let old = *w;
    for i in 0..4 {
        w[p[i]] = old[i];
    }
    for (i, &b) in k.iter().enumerate() {
        if b {
            c.x(w[i]);
        }
    }
}

impl SboxDecomposition {
    pub fn prince() -> Self {
        SboxDecomposition {
            table: PRINCE_SBOX,
            input: [9, 1, 15, 7, 12, 4, 10, 2, 11, 3, 13, 5, 14, 6, 8, 0],
            inner: vec![
                [0, 8, 4, 12, 2, 10, 6, 14, 1, 9, 5, 13, 3, 11, 7, 15],
                [0, 8, 2, 10, 5, 13, 7, 15, 1, 9, 3, 11, 4, 12, 6, 14],
                [0, 8, 4, 12, 2, 10, 6, 14, 1, 9, 5, 13, 3, 11, 7, 15],
                [0, 4, 8, 12, 2, 6, 10, 14, 1, 5, 9, 13, 3, 7, 11, 15],
                [0, 8, 5, 13, 2, 10, 7, 15, 1, 9, 4, 12, 3, 11, 6, 14],
                [0, 10, 2, 8, 5, 15, 7, 13, 1, 11, 3, 9, 4, 14, 6, 12],
            ],
            output: [4, 15, 13, 6, 9, 2, 0, 11, 14, 5, 7, 12, 3, 8, 10, 1],
        }
    }

    /// Affine layers chosen to minimize CNOT plus X count under minimal
    /// CNOT synthesis.
    pub fn spongent() -> Self {
        SboxDecomposition {
            table: SPONGENT_SBOX,
            input: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
            inner: vec![
                [0, 8, 9, 1, 5, 13, 12, 4, 2, 10, 11, 3, 7, 15, 14, 6],
                [1, 0, 9, 8, 3, 2, 11, 10, 5, 4, 13, 12, 7, 6, 15, 14],
                [0, 14, 1, 15, 7, 9, 6, 8, 2, 12, 3, 13, 5, 11, 4, 10],
                [0, 1, 8, 9, 2, 3, 10, 11, 12, 13, 4, 5, 14, 15, 6, 7],
            ],
            output: [0, 2, 8, 10, 6, 4, 14, 12, 9, 11, 1, 3, 15, 13, 7, 5],
        }
    }

    pub fn toffolis(&self) -> usize {
        self.inner.len()
    }

    /// Table evaluation of the decomposition itself.
    pub fn eval(&self, x: usize) -> usize {
        let mut y = self.input[x];
        for a in &self.inner {
            y = toggle(a[y]);
        }
        self.output[y]
    }

    /// Affine layers preceding each Toffoli; `B` is folded into `A_1`.
    fn layers(&self) -> Vec<(BitMatrix, Vec<bool>)> {
        let mut first = [0usize; 16];
        for (x, f) in first.iter_mut().enumerate() {
            *f = self.inner[0][self.input[x]];
        }
        std::iter::once(&first)
            .chain(&self.inner[1..])
            .map(|t| affine_of_table(t, 4).expect("affine layer"))
            .collect()
    }

    /// Appends the S-box on the nibble `w` (bit `i` on `w[i]`), reordering
    /// `w` to name the output bits.
    pub fn apply(&self, c: &mut Circuit, w: &mut [Wire; 4]) {
        for (m, k) in &self.layers() {
            apply_affine4(c, w, m, k);
            c.toffoli(w[0], w[1], w[2]);
        }
        let (m, k) = affine_of_table(&self.output, 4).expect("affine layer");
        apply_affine4(c, w, &m, &k);
    }

    /// Appends the inverse S-box: the adjoint of [`apply`](Self::apply),
    /// with `w` naming the input bits on entry and the preimage on exit.
    pub fn apply_inverse(&self, c: &mut Circuit, w: &mut [Wire; 4]) {
        let mut tmp = Circuit::with_width(4);
        let mut local = [0, 1, 2, 3];
        self.apply(&mut tmp, &mut local);
        // local[i] holds output bit i; the adjoint maps it back to input bit i
        let adj = tmp.adjoint();
        let mut map = vec![0; 4];
        for i in 0..4 {
            map[local[i]] = w[i];
        }
        for g in adj.gates() {
            c.push(g.map_wires(|x| map[x]));
        }
        *w = [map[0], map[1], map[2], map[3]];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revsim::{run, State};
    use crate::GateKind;

    fn check(d: &SboxDecomposition, inverse: bool) {
        let mut c = Circuit::with_width(4);
        let mut w = [0, 1, 2, 3];
        if inverse {
            d.apply_inverse(&mut c, &mut w);
        } else {
            d.apply(&mut c, &mut w);
        }
        let want = if inverse { invert(&d.table) } else { d.table };
        let mut s = State::zeros(4);
        for x in 0..16 {
            s.write_u128(&[0, 1, 2, 3], x, x as u128);
        }
        run(&c, &mut s).unwrap();
        for x in 0..16 {
            assert_eq!(s.read_u128(&w, x) as u8, want[x], "x = {x}");
        }
        assert_eq!(c.gate_count(GateKind::Toffoli), d.toffolis());
    }

    #[test]
    fn tables_reproduce() {
        for d in [SboxDecomposition::prince(), SboxDecomposition::spongent()] {
            for x in 0..16 {
                assert_eq!(d.eval(x), d.table[x] as usize);
            }
            check(&d, false);
            check(&d, true);
        }
    }

    #[test]
    fn min_cnot_synthesis_matches_matrix() {
        // the tree spans GL(4, 2); a dense matrix round-trips
        let tree = synthesis_tree();
        assert_eq!(tree.iter().filter(|p| p.is_some()).count(), 20160);
        let (a, _) = affine_of_table(&SboxDecomposition::prince().output, 4).unwrap();
        let (ops, p) = min_cnot_linear4(&a);
        for x in 0..16usize {
            let mut v: Vec<bool> = (0..4).map(|i| x >> i & 1 == 1).collect();
            for &(ctl, tgt) in &ops {
                v[tgt] ^= v[ctl];
            }
            let want = a.apply(&(0..4).map(|i| x >> i & 1 == 1).collect::<Vec<_>>());
            for i in 0..4 {
                assert_eq!(v[i], want[p[i]]);
            }
        }
    }

    #[test]
    fn toffoli_counts() {
        assert_eq!(SboxDecomposition::prince().toffolis(), 6);
        assert_eq!(SboxDecomposition::spongent().toffolis(), 4);
    }
}
