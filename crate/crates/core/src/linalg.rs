//! Reversible GF(2) linear algebra: triangular basis, rank flag, orthogonal
//! vector and affine-system feasibility, with classical mirrors.
//!
//! Row vectors are `u64` bitmasks; coordinate `i` (0-based) is bit `i`, and the
//! elimination processes coordinates in increasing order, so a triangular row
//! `i` is zero below bit `i` and has bit `i` set.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Wire};

/// Wire map of the triangular-basis circuit.
#[derive(Clone, Debug)]
pub struct LinearLayout {
    pub m: usize,
    pub n: usize,
    /// `x[j][i]`: coordinate `i` of input row `j`.
    pub x: Vec<Vec<Wire>>,
    pub used: Vec<Wire>,
    /// Initialized to 1.
    pub av: Vec<Wire>,
    /// `b[i][k]` for `k > i`; entries `k <= i` are unused and set to `usize::MAX`.
    pub b: Vec<Vec<Wire>>,
    /// Per outer index `i`: copies of `used_j` and of `x_j[i]`, `n-1-i` each.
    pub pool_used: Vec<Vec<Wire>>,
    pub pool_x: Vec<Vec<Wire>>,
}

impl LinearLayout {
    /// `m + n(n+1)/2`.
    pub fn ancillas(&self) -> usize {
        self.m + self.n * (self.n + 1) / 2
    }

    /// `n(n-1)`.
    pub fn fanout_pool(&self) -> usize {
        self.pool_used
            .iter()
            .chain(&self.pool_x)
            .map(Vec::len)
            .sum()
    }

    pub fn b_row(&self, i: usize) -> Vec<Wire> {
        self.b[i][i + 1..].to_vec()
    }
}

fn allocate_layout(c: &mut Circuit, m: usize, n: usize, x: Vec<Vec<Wire>>) -> LinearLayout {
    let used = c.alloc(m);
    let av = c.alloc(n);
    let mut b = vec![vec![usize::MAX; n]; n];
    for (i, row) in b.iter_mut().enumerate() {
        for slot in row.iter_mut().skip(i + 1) {
            *slot = c.alloc_one();
        }
    }
    let pool_used = (0..n).map(|i| c.alloc(n - 1 - i)).collect();
    let pool_x = (0..n).map(|i| c.alloc(n - 1 - i)).collect();
    for &w in &av {
        c.x(w);
    }
    LinearLayout {
        m,
        n,
        x,
        used,
        av,
        b,
        pool_used,
        pool_x,
    }
}

/// One iteration `(i, j)` of the triangular-basis algorithm.
fn iteration(c: &mut Circuit, l: &LinearLayout, i: usize, j: usize) {
    let xj = &l.x[j];
    let (u, av) = (l.used[j], l.av[i]);
    c.toffoli(xj[i], av, u);
    c.toffoli(xj[i], u, av);
    let (pu, px) = (&l.pool_used[i], &l.pool_x[i]);
    c.fanout(u, pu);
    c.fanout(xj[i], px);
    for (t, k) in (i + 1..l.n).enumerate() {
        c.toffoli(pu[t], xj[k], l.b[i][k]);
        c.toffoli(px[t], l.b[i][k], xj[k]);
    }
    c.unfanout(u, pu);
    c.unfanout(xj[i], px);
}

/// Emits all iterations grouped by anti-diagonal `i + j`.
fn emit_basis(c: &mut Circuit, l: &LinearLayout) {
    if l.m == 0 {
        return;
    }
    for d in 0..l.m + l.n - 1 {
        for i in 0..l.n {
            if d >= i && d - i < l.m {
                iteration(c, l, i, d - i);
            }
        }
    }
}

/// Triangular-basis circuit over `m` input rows of `n` bits.
pub fn build_triangular_basis(m: usize, n: usize) -> (Circuit, LinearLayout) {
    let mut c = Circuit::with_width(m * n);
    let x: Vec<Vec<Wire>> = (0..m).map(|j| (j * n..(j + 1) * n).collect()).collect();
    let all: Vec<Wire> = (0..m * n).collect();
    c.declare_input("rows", &all);
    let l = allocate_layout(&mut c, m, n, x);
    emit_basis(&mut c, &l);
    (c, l)
}

/// Same iterations in an arbitrary order within each anti-diagonal.
pub fn build_triangular_basis_permuted(
    m: usize,
    n: usize,
    order: impl Fn(usize, &mut Vec<(usize, usize)>),
) -> (Circuit, LinearLayout) {
    let mut c = Circuit::with_width(m * n);
    let x: Vec<Vec<Wire>> = (0..m).map(|j| (j * n..(j + 1) * n).collect()).collect();
    let l = allocate_layout(&mut c, m, n, x);
    for d in 0..(m + n).saturating_sub(1) {
        let mut cells: Vec<(usize, usize)> = (0..n)
            .filter(|&i| d >= i && d - i < m)
            .map(|i| (i, d - i))
            .collect();
        order(d, &mut cells);
        for (i, j) in cells {
            iteration(&mut c, &l, i, j);
        }
    }
    (c, l)
}

/// Appends `flag = OR(av_i)` via a balanced AND tree over the negated flags.
/// `flag = 1` means rank < n.
pub fn append_rank_check(c: &mut Circuit, l: &LinearLayout) -> Wire {
    let flag = c.alloc_one();
    let n = l.n;
    if n == 1 {
        c.cnot(l.av[0], flag);
        return flag;
    }
    for &w in &l.av {
        c.x(w);
    }
    let mark = c.ops().len();
    let mut level: Vec<Wire> = l.av.clone();
    let mut temps = Vec::new();
    while level.len() > 1 {
        let mut next = Vec::new();
        for pair in level.chunks(2) {
            if pair.len() == 2 {
                let t = c.alloc_one();
                c.and(pair[0], pair[1], t);
                temps.push(t);
                next.push(t);
            } else {
                next.push(pair[0]);
            }
        }
        level = next;
    }
    let compute = c.ops_since(mark);
    c.cnot(level[0], flag);
    c.x(flag);
    c.append_adjoint(&compute);
    for &w in &l.av {
        c.x(w);
    }
    flag
}

/// Appends the orthogonal-vector computation; returns the `out` wires.
pub fn append_orthogonal_vector(c: &mut Circuit, l: &LinearLayout) -> Vec<Wire> {
    let out = c.alloc(l.n);
    for i in (0..l.n).rev() {
        c.cnot(l.av[i], out[i]);
        for j in i + 1..l.n {
            c.toffoli(out[j], l.b[i][j], out[i]);
        }
    }
    out
}

pub fn build_rank_check(m: usize, n: usize) -> (Circuit, LinearLayout, Wire) {
    let (mut c, l) = build_triangular_basis(m, n);
    let f = append_rank_check(&mut c, &l);
    c.declare_output("flag", &[f]);
    (c, l, f)
}

/// Gate counts of [`build_rank_check`] in `GateKind::index` order
/// (X, CNOT, Toffoli, AND, AND_UNCOMPUTE), without building it.
pub fn rank_check_counts(m: u64, n: u64) -> [u64; 5] {
    assert!(n >= 1);
    let basis_x = n;
    let fanout_cnot = 2 * m * n * (n - 1);
    let toffoli = m * (n * n + n);
    if n == 1 {
        return [basis_x, fanout_cnot + 1, toffoli, 0, 0];
    }
    [basis_x + 2 * n + 1, fanout_cnot + 1, toffoli, n - 1, n - 1]
}

/// Peak width of [`build_rank_check`]: rows, `used`, `av`, `b`, the fanout
/// pool, the AND-tree temporaries and the flag.
pub fn rank_check_width(m: u64, n: u64) -> u64 {
    m * n + m + n + n * (n - 1) / 2 + n * (n - 1) + n.saturating_sub(1) + 1
}

pub fn build_orthogonal_vector(m: usize, n: usize) -> (Circuit, LinearLayout, Vec<Wire>) {
    let (mut c, l) = build_triangular_basis(m, n);
    let out = append_orthogonal_vector(&mut c, &l);
    c.declare_output("out", &out);
    (c, l, out)
}

/// Orthogonal-vector block alone, over a live layout (for gate counting).
pub fn orthogonal_vector_block(n: usize) -> Circuit {
    let (c0, l) = build_triangular_basis(0, n);
    let mut c = c0;
    let mark = c.ops().len();
    append_orthogonal_vector(&mut c, &l);
    let mut block = Circuit::with_width(c.span());
    for op in c.ops_since(mark) {
        if let crate::circuit::Op::Gate(g) = op {
            block.push(g);
        }
    }
    block
}

/// Feasibility of `sum_i a_i b_i = eps` for rows `(a, eps)` of `n + 1` bits
/// (eps at coordinate `n`). Flag = `av_n`: 1 iff solvable.
pub fn build_linear_solver_feasibility(m: usize, n: usize) -> (Circuit, LinearLayout, Wire) {
    let (mut c, l) = build_triangular_basis(m, n + 1);
    let f = c.alloc_one();
    c.cnot(l.av[n], f);
    c.declare_output("flag", &[f]);
    (c, l, f)
}

// ----- classical mirrors -----

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangularBasis {
    pub n: usize,
    /// Row `i` is zero or has lowest set bit `i`.
    pub rows: Vec<u64>,
    pub rank: usize,
}

/// Register contents after the triangular-basis algorithm, computed
/// classically with the same update rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisRegisters {
    pub x: Vec<u64>,
    pub used: Vec<bool>,
    pub av: Vec<bool>,
    /// `b[i]` holds bits `k > i` only.
    pub b: Vec<u64>,
}

pub fn mirror_registers(rows: &[u64], n: usize) -> BasisRegisters {
    let m = rows.len();
    let mut x = rows.to_vec();
    let mut used = vec![false; m];
    let mut av = vec![true; n];
    let mut b = vec![0u64; n];
    for i in 0..n {
        let above = !0u64 << (i + 1);
        for j in 0..m {
            let xi = x[j] >> i & 1 == 1;
            used[j] ^= xi && av[i];
            av[i] ^= xi && used[j];
            if used[j] {
                b[i] ^= x[j] & above;
            }
            if xi {
                x[j] ^= b[i];
            }
        }
    }
    BasisRegisters { x, used, av, b }
}

pub fn classical_triangular_basis(rows: &[u64], n: usize) -> TriangularBasis {
    let r = mirror_registers(rows, n);
    let tri: Vec<u64> = (0..n)
        .map(|i| if r.av[i] { 0 } else { 1 << i | r.b[i] })
        .collect();
    let rank = r.av.iter().filter(|&&a| !a).count();
    TriangularBasis { n, rows: tri, rank }
}

/// Rank by plain pivoting, independent of the triangular mirror.
pub fn rank(rows: &[u64]) -> usize {
    let mut piv: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &p in &piv {
            v = v.min(v ^ p);
        }
        if v != 0 {
            piv.push(v);
            piv.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    piv.len()
}

/// The vector produced by the orthogonal-vector algorithm on a triangular basis.
pub fn orthogonal(basis: &TriangularBasis) -> u64 {
    let n = basis.n;
    let mut out = 0u64;
    for i in (0..n).rev() {
        let mut bit = basis.rows[i] == 0;
        for j in i + 1..n {
            bit ^= (out >> j & 1 == 1) && (basis.rows[i] >> j & 1 == 1);
        }
        out |= (bit as u64) << i;
    }
    out
}

/// Whether `sum a_i b_i = eps` is solvable; rows carry eps at bit `n`.
pub fn solvable(rows: &[u64], n: usize) -> bool {
    (0u64..1 << n).any(|s| {
        rows.iter()
            .all(|&r| ((r & s).count_ones() & 1) as u64 == r >> n & 1)
    })
}

#[derive(Serialize)]
pub struct OracleReport {
    pub rank: usize,
    pub rows: Vec<String>,
    pub dual: String,
}

pub fn oracle_report(rows: &[u64], n: usize) -> OracleReport {
    let t = classical_triangular_basis(rows, n);
    let hex = |v: u64| {
        let bits: Vec<bool> = (0..n).map(|i| v >> i & 1 == 1).collect();
        crate::revsim::bits_to_hex(&bits)
    };
    OracleReport {
        rank: t.rank,
        rows: t.rows.iter().map(|&r| hex(r)).collect(),
        dual: hex(orthogonal(&t)),
    }
}
