//! GF(2) matrices and their in-place CNOT synthesis via PLU factorization.

use crate::circuit::{Circuit, Wire};

/// Dense square-or-rectangular GF(2) matrix, rows as bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Matrix of a linear map given by its action on unit vectors:
    /// column `j` is `f(e_j)`.
    pub fn from_columns(n_out: usize, n_in: usize, mut f: impl FnMut(usize) -> Vec<bool>) -> Self {
        let mut m = Self::zeros(n_out, n_in);
        for j in 0..n_in {
            let col = f(j);
            assert_eq!(col.len(), n_out);
            for (i, b) in col.into_iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn xor_row(&mut self, dst: usize, src: usize) {
        for k in 0..self.words {
            let s = self.data[src * self.words + k];
            self.data[dst * self.words + k] ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for k in 0..self.words {
            self.data.swap(a * self.words + k, b * self.words + k);
        }
    }

    pub fn apply(&self, x: &[bool]) -> Vec<bool> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| x[c] && self.get(r, c)).count() % 2 == 1)
            .collect()
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    for w in 0..out.words {
                        out.data[r * out.words + w] ^= other.data[k * other.words + w];
                    }
                }
            }
        }
        out
    }

    /// Gauss-Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(n);
        for k in 0..n {
            let p = (k..n).find(|&r| a.get(r, k))?;
            a.swap_rows(p, k);
            inv.swap_rows(p, k);
            for r in 0..n {
                if r != k && a.get(r, k) {
                    a.xor_row(r, k);
                    inv.xor_row(r, k);
                }
            }
        }
        Some(inv)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// `perm · A = L · U` with `L` unit lower and `U` unit upper triangular;
/// row `i` of `perm · A` is row `perm[i]` of `A`.
#[derive(Clone, Debug)]
pub struct Plu {
    pub perm: Vec<usize>,
    pub l: BitMatrix,
    pub u: BitMatrix,
}

/// Factors an invertible square matrix; `None` if singular.
pub fn plu(a: &BitMatrix) -> Option<Plu> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut u = a.clone();
    let mut l = BitMatrix::identity(n);
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let p = (k..n).find(|&r| u.get(r, k))?;
        if p != k {
            u.swap_rows(p, k);
            perm.swap(p, k);
            for j in 0..k {
                let (a, b) = (l.get(k, j), l.get(p, j));
                l.set(k, j, b);
                l.set(p, j, a);
            }
        }
        for r in k + 1..n {
            if u.get(r, k) {
                l.set(r, k, true);
                u.xor_row(r, k);
            }
        }
    }
    Some(Plu { perm, l, u })
}

/// CNOT list `(control, target)` over local indices for `x ↦ L·U·x`, and the
/// position map: after the CNOTs, output bit `perm[i]` of `A·x` sits at
/// local index `i`.
pub fn plu_cnots(a: &BitMatrix) -> Option<(Vec<(usize, usize)>, Vec<usize>)> {
    let f = plu(a)?;
    let n = a.rows;
    let mut ops = Vec::new();
    // U first: row i reads only rows > i, which are still untouched
    for i in 0..n {
        for j in i + 1..n {
            if f.u.get(i, j) {
                ops.push((j, i));
            }
        }
    }
    // then L bottom-up: row i reads only rows < i, still holding U·x
    for i in (0..n).rev() {
        for j in 0..i {
            if f.l.get(i, j) {
                ops.push((j, i));
            }
        }
    }
    Some((ops, f.perm))
}

/// Applies `x ↦ A·x` in place on the logical register `wires` (bit `i` on
/// `wires[i]`), reordering `wires` so that it again names the logical bits.
pub fn apply_linear(c: &mut Circuit, wires: &mut [Wire], a: &BitMatrix) {
    assert_eq!(a.rows(), wires.len());
    let (ops, perm) = plu_cnots(a).expect("linear layer must be invertible");
    for (ctl, tgt) in ops {
        c.cnot(wires[ctl], wires[tgt]);
    }
    let old = wires.to_vec();
    for (i, &p) in perm.iter().enumerate() {
        wires[p] = old[i];
    }
}

/// Affine variant: `x ↦ A·x ⊕ k`.
pub fn apply_affine(c: &mut Circuit, wires: &mut [Wire], a: &BitMatrix, k: &[bool]) {
    apply_linear(c, wires, a);
    for (i, &b) in k.iter().enumerate() {
        if b {
            c.x(wires[i]);
        }
    }
}

/// Splits a 4-bit (or any width) affine table into matrix and constant.
/// Returns `None` if the table is not affine.
pub fn affine_of_table(table: &[usize], bits: usize) -> Option<(BitMatrix, Vec<bool>)> {
    assert_eq!(table.len(), 1 << bits);
    let k = table[0];
    let m = BitMatrix::from_columns(bits, bits, |j| {
        let col = table[1 << j] ^ k;
        (0..bits).map(|i| col >> i & 1 == 1).collect()
    });
    for (x, &y) in table.iter().enumerate() {
        let xb: Vec<bool> = (0..bits).map(|i| x >> i & 1 == 1).collect();
        let v = m
            .apply(&xb)
            .iter()
            .enumerate()
            .fold(0, |a, (i, &b)| a | (b as usize) << i);
        if v ^ k != y {
            return None;
        }
    }
    Some((m, (0..bits).map(|i| k >> i & 1 == 1).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revsim::{run, State};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_invertible(n: usize, rng: &mut impl Rng) -> BitMatrix {
        loop {
            let m = BitMatrix::from_columns(n, n, |_| (0..n).map(|_| rng.gen()).collect());
            if plu(&m).is_some() {
                return m;
            }
        }
    }

    #[test]
    fn factors_recompose() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1, 4, 16, 70] {
            let a = random_invertible(n, &mut rng);
            let f = plu(&a).unwrap();
            let lu = f.l.mul(&f.u);
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(lu.get(i, j), a.get(f.perm[i], j));
                }
            }
        }
    }

    #[test]
    fn singular_is_rejected() {
        let mut m = BitMatrix::identity(3);
        m.set(2, 2, false);
        assert!(plu(&m).is_none());
    }

    #[test]
    fn circuit_matches_matrix_on_unit_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 40;
        let a = random_invertible(n, &mut rng);
        let mut c = Circuit::with_width(n);
        let mut wires: Vec<Wire> = (0..n).collect();
        apply_linear(&mut c, &mut wires, &a);
        let mut s = State::zeros(n);
        for j in 0..n {
            s.set(j, j, true);
        }
        run(&c, &mut s).unwrap();
        for j in 0..n {
            let got: Vec<bool> = wires.iter().map(|&w| s.get(w, j)).collect();
            let mut e = vec![false; n];
            e[j] = true;
            assert_eq!(got, a.apply(&e));
        }
    }

    #[test]
    fn affine_table_split() {
        let t: Vec<usize> = (0..16).map(|x| (x ^ (x << 1 & 0xe)) ^ 5).collect();
        let (m, k) = affine_of_table(&t, 4).unwrap();
        assert_eq!(k, vec![true, false, true, false]);
        assert_eq!(m.nnz(), 7);
        assert!(
            affine_of_table(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 15, 14], 4).is_none()
        );
    }
}
