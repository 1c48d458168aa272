//! Exact Simon-measurement statistics, a statevector cross-check, the
//! Grover-meets-Simon parameter calculator and a toy offline-Simon attack.
//!
//! Bit `i` of an index is input bit `i`; `x · j` is the parity of `x & j`.

use std::collections::HashMap;
use std::f64::consts::{E, PI};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg;
use crate::primitives::gf128;

pub const MAX_TABLE_BITS: usize = 14;
pub const MAX_STATEVECTOR_BITS: usize = 22;
pub const MAX_TOY_BITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimonError {
    #[error("table has {got} entries, expected 2^{n}")]
    TableLength { n: usize, got: usize },
    #[error("output {value:#x} does not fit in {m_out} bits")]
    OutputRange { value: u64, m_out: usize },
    #[error("{what} needs {bits} bits, cap is {cap}")]
    SizeCap {
        what: &'static str,
        bits: usize,
        cap: usize,
    },
    #[error("norm drifted to {norm} after {stage}")]
    Norm { stage: &'static str, norm: f64 },
    #[error("invalid toy configuration: {0}")]
    Config(String),
}

/// Truth table of `f: {0,1}^n -> {0,1}^m_out`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    n: usize,
    m_out: usize,
    table: Vec<u64>,
}

impl FunctionTable {
    pub fn new(n: usize, m_out: usize, table: Vec<u64>) -> Result<Self, SimonError> {
        if n > 30 || table.len() != 1 << n {
            return Err(SimonError::TableLength {
                n,
                got: table.len(),
            });
        }
        if m_out < 64 {
            if let Some(&value) = table.iter().find(|&&v| v >> m_out != 0) {
                return Err(SimonError::OutputRange { value, m_out });
            }
        }
        Ok(Self { n, m_out, table })
    }

    pub fn from_fn(n: usize, m_out: usize, f: impl Fn(u64) -> u64) -> Result<Self, SimonError> {
        Self::new(n, m_out, (0..1u64 << n).map(f).collect())
    }

    /// Uniformly random table.
    pub fn random(n: usize, m_out: usize, rng: &mut impl Rng) -> Self {
        let mask = low_mask(m_out);
        let table = (0..1usize << n).map(|_| rng.gen::<u64>() & mask).collect();
        Self { n, m_out, table }
    }

    /// Random table with `f(x) = f(x ⊕ s)` and no other collisions when
    /// `m_out ≥ n − 1`; `s ≠ 0`.
    pub fn random_periodic(n: usize, m_out: usize, s: u64, rng: &mut impl Rng) -> Self {
        assert!(
            s != 0 && s >> n == 0,
            "period must be a non-zero n-bit value"
        );
        assert!(
            m_out + 1 >= n && m_out < 64,
            "need 2^(n-1) distinct outputs"
        );
        let mut values: Vec<u64> = Vec::with_capacity(1 << (n - 1));
        let mut seen = std::collections::HashSet::new();
        while values.len() < 1 << (n - 1) {
            let v = rng.gen::<u64>() & low_mask(m_out);
            if seen.insert(v) {
                values.push(v);
            }
        }
        let top = 63 - s.leading_zeros();
        let mut table = vec![0u64; 1 << n];
        let mut next = values.into_iter();
        for x in 0..1u64 << n {
            if x >> top & 1 == 0 {
                let v = next.next().expect("one value per coset");
                table[x as usize] = v;
                table[(x ^ s) as usize] = v;
            }
        }
        Self { n, m_out, table }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_out(&self) -> usize {
        self.m_out
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.table[x as usize]
    }

    /// Whether `f(x ⊕ s) = f(x)` for every `x`.
    pub fn has_period(&self, s: u64) -> bool {
        (0..self.table.len()).all(|x| self.table[x] == self.table[x ^ s as usize])
    }
}

fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1 << bits) - 1
    }
}

fn dot(a: u64, b: u64) -> u32 {
    (a & b).count_ones() & 1
}

/// In-place Walsh–Hadamard transform without normalisation.
fn walsh_hadamard(v: &mut [i64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (p, q) in a.iter_mut().zip(b) {
                (*p, *q) = (*p + *q, *p - *q);
            }
        }
        h *= 2;
    }
}

/// Exact measurement distribution of one Simon query.
///
/// `P(j) = 2^{-2n} Σ_d C(d) (−1)^{d·j}` with `C(d) = #{x : f(x) = f(x ⊕ d)}`,
/// which equals the per-output-value sum of squared character sums. Integer
/// arithmetic until the final division, so the result is exact up to one
/// rounding per entry.
pub fn simon_distribution(f: &FunctionTable) -> Result<Vec<f64>, SimonError> {
    let n = f.n;
    if n > MAX_TABLE_BITS {
        return Err(SimonError::SizeCap {
            what: "simon_distribution",
            bits: n,
            cap: MAX_TABLE_BITS,
        });
    }
    let mut classes: HashMap<u64, Vec<u64>> = HashMap::new();
    for (x, &v) in f.table.iter().enumerate() {
        classes.entry(v).or_default().push(x as u64);
    }
    let mut c = vec![0i64; 1 << n];
    for xs in classes.values() {
        for &a in xs {
            for &b in xs {
                c[(a ^ b) as usize] += 1;
            }
        }
    }
    walsh_hadamard(&mut c);
    let scale = (4f64).powi(n as i32);
    Ok(c.into_iter().map(|w| w as f64 / scale).collect())
}

#[derive(Debug, Clone)]
pub struct StatevectorRun {
    /// Marginal over the output register, indexed by `j`.
    pub probabilities: Vec<f64>,
    /// Squared norm after H⊗ⁿ, after the oracle, after the final H⊗ⁿ.
    pub stage_norms: [f64; 3],
}

/// Explicit-amplitude run of Simon's circuit; amplitudes stay real.
/// Index `x + 2^n·y` holds the amplitude of `|x⟩|y⟩`.
pub fn statevector_simon(f: &FunctionTable) -> Result<StatevectorRun, SimonError> {
    let (n, m) = (f.n, f.m_out);
    if n + m > MAX_STATEVECTOR_BITS {
        return Err(SimonError::SizeCap {
            what: "statevector_simon",
            bits: n + m,
            cap: MAX_STATEVECTOR_BITS,
        });
    }
    let mut amp = vec![0f64; 1 << (n + m)];
    amp[0] = 1.0;
    let mut norms = [0f64; 3];
    let check = |amp: &[f64], stage: &'static str| {
        let norm: f64 = amp.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > 1e-12 {
            Err(SimonError::Norm { stage, norm })
        } else {
            Ok(norm)
        }
    };
    hadamard_low(&mut amp, n);
    norms[0] = check(&amp, "first H layer")?;
    let mut next = vec![0f64; amp.len()];
    for (idx, &a) in amp.iter().enumerate() {
        let (x, y) = (idx & ((1 << n) - 1), idx >> n);
        let y2 = y as u64 ^ f.table[x];
        next[x | (y2 as usize) << n] = a;
    }
    amp = next;
    norms[1] = check(&amp, "oracle")?;
    hadamard_low(&mut amp, n);
    norms[2] = check(&amp, "second H layer")?;
    let mut probabilities = vec![0f64; 1 << n];
    for (idx, a) in amp.iter().enumerate() {
        probabilities[idx & ((1 << n) - 1)] += a * a;
    }
    Ok(StatevectorRun {
        probabilities,
        stage_norms: norms,
    })
}

/// H on each of the low `n` qubits.
fn hadamard_low(amp: &mut [f64], n: usize) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for q in 0..n {
        let h = 1 << q;
        for block in amp.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (p, q) in a.iter_mut().zip(b) {
                (*p, *q) = ((*p + *q) * r, (*p - *q) * r);
            }
        }
    }
}

/// `j,probability` lines.
pub fn distribution_csv(p: &[f64]) -> String {
    let mut s = String::from("j,probability\n");
    for (j, v) in p.iter().enumerate() {
        s.push_str(&format!("{j},{v:e}\n"));
    }
    s
}

/// Draws measurement outcomes from an exact distribution.
pub struct SimonSampler {
    index: WeightedIndex<f64>,
}

impl SimonSampler {
    pub fn new(p: &[f64]) -> Self {
        let index = WeightedIndex::new(p).expect("a distribution has positive mass");
        Self { index }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> u64 {
        self.index.sample(rng) as u64
    }

    pub fn samples(&self, m: usize, rng: &mut impl Rng) -> Vec<u64> {
        (0..m).map(|_| self.sample(rng)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RankTestReport {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    /// Fraction of trials where the periodic table gave rank < n.
    pub periodic_low_rank: f64,
    /// Fraction where a fresh random control table reached rank n.
    pub control_full_rank: f64,
    /// Fraction where both held.
    pub joint: f64,
    /// `1 − control_full_rank`: random tables wrongly judged periodic.
    pub false_periodic: f64,
    /// Trials where a periodic sample was not orthogonal to the period.
    pub orthogonality_violations: usize,
}

/// Monte-Carlo rank test: `m` samples of `f_periodic` against `m` samples of
/// a fresh uniformly random table with the same shape, per trial.
pub fn rank_test_success(
    f_periodic: &FunctionTable,
    period: Option<u64>,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<RankTestReport, SimonError> {
    let n = f_periodic.n;
    let sampler = SimonSampler::new(&simon_distribution(f_periodic)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut low, mut full, mut joint, mut violations) = (0usize, 0usize, 0usize, 0usize);
    for _ in 0..trials {
        let ys = sampler.samples(m, &mut rng);
        if period.is_some_and(|s| ys.iter().any(|&j| dot(j, s) == 1)) {
            violations += 1;
        }
        let is_low = linalg::rank(&ys) < n;
        let control = FunctionTable::random(n, f_periodic.m_out, &mut rng);
        let cs = SimonSampler::new(&simon_distribution(&control)?).samples(m, &mut rng);
        let is_full = linalg::rank(&cs) == n;
        low += is_low as usize;
        full += is_full as usize;
        joint += (is_low && is_full) as usize;
    }
    let rate = |c: usize| c as f64 / trials.max(1) as f64;
    Ok(RankTestReport {
        n,
        m,
        trials,
        periodic_low_rank: rate(low),
        control_full_rank: rate(full),
        joint: rate(joint),
        false_periodic: 1.0 - rate(full),
        orthogonality_violations: violations,
    })
}

/// Derived quantities of the Grover-meets-Simon theorem for Simon domain
/// `n`, search bits `k` and slack `α`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SimonParams {
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    /// Simon queries per iteration, `n + k + α + 1`.
    pub m_queries: usize,
    /// `round(π / (4 asin 2^{−k/2}))`, exact for small `k`.
    pub iterations: f64,
    pub iterations_log2: f64,
    pub success_bound: f64,
    /// `log₂(4e(n + k + α + 1))`; the output width must reach it.
    pub m_out_min: f64,
    /// The theorem assumes `k ≥ 7`.
    pub k_in_range: bool,
}

impl SimonParams {
    pub fn m_out_ok(&self, m_out: usize) -> bool {
        m_out as f64 >= self.m_out_min
    }

    /// Smallest integer output width meeting the hypothesis.
    pub fn m_out_required(&self) -> usize {
        self.m_out_min.ceil() as usize
    }

    /// Whether every hypothesis holds for this output width.
    pub fn hypotheses_hold(&self, m_out: usize) -> bool {
        self.k_in_range && self.m_out_ok(m_out)
    }
}

pub fn grover_iterations(k: usize) -> f64 {
    let theta = 2f64.powf(-(k as f64) / 2.0).asin();
    (PI / (4.0 * theta)).round()
}

pub fn theorem14(n: usize, k: usize, alpha: usize) -> SimonParams {
    let m_queries = n + k + alpha + 1;
    let a = alpha as f64;
    let dev = 2f64.powf(-a / 2.0 + 1.0) + 2f64.powf(-a) + 2f64.powf(-(k as f64) / 2.0 + 1.0);
    let iterations = grover_iterations(k);
    SimonParams {
        n,
        k,
        alpha,
        m_queries,
        iterations,
        iterations_log2: iterations.log2(),
        success_bound: 1.0 - 2f64.powf(-a) - dev * dev,
        m_out_min: (4.0 * E * m_queries as f64).log2(),
        k_in_range: k >= 7,
    }
}

/// Toy constructions for the end-to-end emulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ToyConstruction {
    /// `E(x) = P(x ⊕ K1) ⊕ K2` with independent whitening keys.
    EvenMansour,
    /// `E(x) = P(x ⊕ 3K) ⊕ 2K` in GF(2^128); `K` has degree below `n − 1`
    /// so both whitening keys fit the toy block.
    ChaskeyStyle,
    /// `E(x) = P(x ⊕ K') ⊕ K'` with `K' = P(K ‖ 0^PAD)`.
    ElephantStyle,
    /// `E(x) = E_K(x ⊕ K1) ⊕ K2` over a family of random permutations.
    Fx,
}

impl std::str::FromStr for ToyConstruction {
    type Err = SimonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "em" | "even-mansour" => Ok(Self::EvenMansour),
            "chaskey" | "chaskey-style" => Ok(Self::ChaskeyStyle),
            "elephant" | "elephant-style" => Ok(Self::ElephantStyle),
            "fx" => Ok(Self::Fx),
            _ => Err(SimonError::Config(format!("unknown construction `{s}`"))),
        }
    }
}

/// Zero bits appended to the Elephant-style toy key.
pub const ELEPHANT_PAD_BITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ToyConfig {
    pub construction: ToyConstruction,
    /// Block size.
    pub n: usize,
    /// Simon domain; the other `n − u` input bits are fixed to zero.
    pub u: usize,
    /// Inner key bits of the FX toy, zero otherwise.
    pub k: usize,
    pub alpha: usize,
    /// Bits of `E(x‖0) ⊕ P_i(x)` fed to Simon.
    pub m_out: usize,
}

impl ToyConfig {
    /// `α = 9`, `k = 4` for FX, and the smallest output width meeting the
    /// theorem's hypothesis (capped at `n`).
    pub fn new(construction: ToyConstruction, n: usize, u: usize) -> Self {
        let k = if construction == ToyConstruction::Fx {
            4
        } else {
            0
        };
        let mut c = Self {
            construction,
            n,
            u,
            k,
            alpha: 9,
            m_out: n,
        };
        c.m_out = c.params().m_out_required().min(n);
        c
    }

    /// Bits searched by amplitude amplification.
    pub fn search_bits(&self) -> usize {
        self.k + self.n - self.u
    }

    pub fn params(&self) -> SimonParams {
        theorem14(self.u, self.search_bits(), self.alpha)
    }

    pub fn validate(&self) -> Result<(), SimonError> {
        let bad = |m: String| Err(SimonError::Config(m));
        if self.n > MAX_TOY_BITS || self.n < ELEPHANT_PAD_BITS + 2 {
            return bad(format!("block size {} outside 6..=12", self.n));
        }
        if self.u == 0 || self.u > self.n {
            return bad(format!("u = {} outside 1..=n", self.u));
        }
        if self.m_out == 0 || self.m_out > self.n {
            return bad(format!("m_out = {} outside 1..=n", self.m_out));
        }
        if (self.construction == ToyConstruction::Fx) != (self.k > 0) {
            return bad("inner key bits are used by FX only, and FX needs some".into());
        }
        if self.k > 8 || self.search_bits() + self.u > 22 {
            return bad("guess space too large to enumerate".into());
        }
        Ok(())
    }
}

/// Keys of one toy instance; unused fields are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ToyKeys {
    pub master: u64,
    pub inner: u64,
    pub k1: u64,
    pub k2: u64,
}

struct ToyInstance {
    cfg: ToyConfig,
    /// `perms[i]` is `P` (or `E_i` for FX); `inv` inverts `perms[0]`.
    perms: Vec<Vec<u64>>,
    inv: Vec<u64>,
    keys: ToyKeys,
}

impl ToyInstance {
    fn sample(cfg: ToyConfig, rng: &mut impl Rng) -> Self {
        let n = cfg.n;
        let count = 1usize << cfg.k;
        let perms: Vec<Vec<u64>> = (0..count)
            .map(|_| {
                let mut p: Vec<u64> = (0..1u64 << n).collect();
                p.shuffle(rng);
                p
            })
            .collect();
        let mut inv = vec![0u64; 1 << n];
        for (x, &y) in perms[0].iter().enumerate() {
            inv[y as usize] = x as u64;
        }
        let mask = low_mask(n);
        let keys = match cfg.construction {
            ToyConstruction::EvenMansour => ToyKeys {
                master: 0,
                inner: 0,
                k1: rng.gen::<u64>() & mask,
                k2: rng.gen::<u64>() & mask,
            },
            ToyConstruction::ChaskeyStyle => {
                let master = rng.gen::<u64>() & low_mask(n - 1);
                ToyKeys {
                    master,
                    inner: 0,
                    k1: gf128::mul3(master as u128) as u64,
                    k2: gf128::mul2(master as u128) as u64,
                }
            }
            ToyConstruction::ElephantStyle => {
                let master = rng.gen::<u64>() & low_mask(n - ELEPHANT_PAD_BITS);
                let k = perms[0][master as usize];
                ToyKeys {
                    master,
                    inner: 0,
                    k1: k,
                    k2: k,
                }
            }
            ToyConstruction::Fx => ToyKeys {
                master: 0,
                inner: rng.gen_range(0..count as u64),
                k1: rng.gen::<u64>() & mask,
                k2: rng.gen::<u64>() & mask,
            },
        };
        Self {
            cfg,
            perms,
            inv,
            keys,
        }
    }

    fn encrypt(&self, x: u64) -> u64 {
        self.perms[self.keys.inner as usize][(x ^ self.keys.k1) as usize] ^ self.keys.k2
    }

    /// Guess `g` = inner key in the low `k` bits, then the `n − u` fixed bits.
    fn split_guess(&self, g: u64) -> (usize, u64) {
        ((g & low_mask(self.cfg.k)) as usize, g >> self.cfg.k)
    }

    fn true_guess(&self) -> u64 {
        self.keys.inner | (self.keys.k1 >> self.cfg.u) << self.cfg.k
    }

    /// `x ↦ trunc(E(x ‖ 0) ⊕ P_i(x ‖ y))` from the classical table.
    fn simon_function(&self, classical: &[u64], g: u64) -> FunctionTable {
        let (i, y) = self.split_guess(g);
        let p = &self.perms[i];
        let mask = low_mask(self.cfg.m_out);
        let table = (0..1u64 << self.cfg.u)
            .map(|x| (classical[x as usize] ^ p[(x | y << self.cfg.u) as usize]) & mask)
            .collect();
        FunctionTable {
            n: self.cfg.u,
            m_out: self.cfg.m_out,
            table,
        }
    }

    /// Post-processing from the guess and the recovered `K1`.
    fn recover(&self, inner: usize, k1: u64) -> Option<ToyKeys> {
        let n = self.cfg.n;
        let k2 = self.encrypt(0) ^ self.perms[inner][k1 as usize];
        match self.cfg.construction {
            ToyConstruction::EvenMansour | ToyConstruction::Fx => Some(ToyKeys {
                master: 0,
                inner: inner as u64,
                k1,
                k2,
            }),
            ToyConstruction::ChaskeyStyle => {
                let master = gf128::div3(k1 as u128);
                (master >> (n - 1) == 0 && gf128::mul2(master) == k2 as u128).then_some(ToyKeys {
                    master: master as u64,
                    inner: 0,
                    k1,
                    k2,
                })
            }
            ToyConstruction::ElephantStyle => {
                let master = self.inv[k1 as usize];
                (master >> (n - ELEPHANT_PAD_BITS) == 0 && k2 == k1).then_some(ToyKeys {
                    master,
                    inner: 0,
                    k1,
                    k2,
                })
            }
        }
    }

    fn reproduces(&self, keys: &ToyKeys, points: &[u64]) -> bool {
        let p = &self.perms[keys.inner as usize];
        points
            .iter()
            .all(|&x| p[(x ^ keys.k1) as usize] ^ keys.k2 == self.encrypt(x))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyTrialReport {
    pub seed: u64,
    pub config: ToyConfig,
    /// The guess returned by amplitude amplification, if any guess passed.
    pub guess: Option<u64>,
    pub true_guess: u64,
    /// Rank of the chosen guess's sample set.
    pub rank: Option<usize>,
    pub true_guess_rank: usize,
    /// Recovered period `s` (low `u` bits of `K1`).
    pub period: Option<u64>,
    pub recovered_key: Option<String>,
    pub recovered: Option<ToyKeys>,
    pub keys: ToyKeys,
    pub success: bool,
    /// The recovered keys match `E` on 50 fresh random points.
    pub consistent: bool,
    pub passing_guesses: usize,
    pub wrong_guesses: usize,
    pub wrong_guesses_passed: usize,
    /// `sin²((2R+1)θ)` with `θ = asin √(passing / 2^search_bits)`.
    pub amplification_success: f64,
    pub hypotheses_hold: bool,
}

/// Rounds of fresh samples tried when extracting the period.
const PERIOD_ATTEMPTS: usize = 8;

/// One seeded run of the offline attack on a fresh toy instance.
pub fn toy_offline_attack(cfg: ToyConfig, seed: u64) -> Result<ToyTrialReport, SimonError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = ToyInstance::sample(cfg, &mut rng);
    let params = cfg.params();
    let (u, m) = (cfg.u, params.m_queries);
    // classical queries E(x ‖ 0^{n−u}); the only data the attack sees
    let classical: Vec<u64> = (0..1u64 << u).map(|x| inst.encrypt(x)).collect();
    let true_guess = inst.true_guess();
    let mut passing: Vec<(u64, usize, SimonSampler)> = Vec::new();
    let (mut wrong, mut wrong_passed, mut true_rank) = (0usize, 0usize, 0usize);
    for g in 0..1u64 << cfg.search_bits() {
        let f = inst.simon_function(&classical, g);
        let sampler = SimonSampler::new(&simon_distribution(&f)?);
        let rank = linalg::rank(&sampler.samples(m, &mut rng));
        if g == true_guess {
            true_rank = rank;
        } else {
            wrong += 1;
            wrong_passed += (rank < u) as usize;
        }
        if rank < u {
            passing.push((g, rank, sampler));
        }
    }
    let space = (1u64 << cfg.search_bits()) as f64;
    let theta = (passing.len() as f64 / space).sqrt().asin();
    let amp = ((2.0 * params.iterations + 1.0) * theta).sin().powi(2);
    let mut report = ToyTrialReport {
        seed,
        config: cfg,
        guess: None,
        true_guess,
        rank: None,
        true_guess_rank: true_rank,
        period: None,
        recovered_key: None,
        recovered: None,
        keys: inst.keys,
        success: false,
        consistent: false,
        passing_guesses: passing.len(),
        wrong_guesses: wrong,
        wrong_guesses_passed: wrong_passed,
        amplification_success: amp,
        hypotheses_hold: params.hypotheses_hold(cfg.m_out),
    };
    if passing.is_empty() {
        return Ok(report);
    }
    if !rng.gen_bool(amp.clamp(0.0, 1.0)) {
        // the measurement lands on a rejected guess
        let g = loop {
            let g = rng.gen_range(0..1u64 << cfg.search_bits());
            if passing.iter().all(|p| p.0 != g) {
                break g;
            }
        };
        report.guess = Some(g);
        return Ok(report);
    }
    let (g, rank, sampler) = &passing[rng.gen_range(0..passing.len())];
    report.guess = Some(*g);
    report.rank = Some(*rank);
    let period = (0..PERIOD_ATTEMPTS).find_map(|_| {
        let ys = sampler.samples(m, &mut rng);
        let basis = linalg::classical_triangular_basis(&ys, u);
        match basis.rank {
            // a zero period makes the function constant: only j = 0 appears
            0 => Some(0),
            r if r + 1 == u => Some(linalg::orthogonal(&basis)),
            _ => None,
        }
    });
    let Some(s) = period else {
        return Ok(report);
    };
    report.period = Some(s);
    let (inner, y) = inst.split_guess(*g);
    let Some(keys) = inst.recover(inner, s | y << u) else {
        return Ok(report);
    };
    let fresh: Vec<u64> = (0..50)
        .map(|_| rng.gen::<u64>() & low_mask(cfg.n))
        .collect();
    report.consistent = inst.reproduces(&keys, &fresh);
    report.recovered_key = Some(match cfg.construction {
        ToyConstruction::ChaskeyStyle | ToyConstruction::ElephantStyle => {
            format!("{:x}", keys.master)
        }
        ToyConstruction::EvenMansour => format!("{:x}:{:x}", keys.k1, keys.k2),
        ToyConstruction::Fx => format!("{:x}:{:x}:{:x}", keys.inner, keys.k1, keys.k2),
    });
    report.success = keys == inst.keys;
    report.recovered = Some(keys);
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ToySummary {
    pub config: ToyConfig,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub bound: f64,
    pub hypotheses_hold: bool,
    pub wrong_guesses: usize,
    pub wrong_guesses_passed: usize,
}

/// Trials `seed, seed + 1, …` in parallel; reports come back in seed order.
pub fn toy_trials(
    cfg: ToyConfig,
    seed: u64,
    trials: usize,
) -> Result<(Vec<ToyTrialReport>, ToySummary), SimonError> {
    use rayon::prelude::*;
    let reports = (0..trials as u64)
        .into_par_iter()
        .map(|t| toy_offline_attack(cfg, seed.wrapping_add(t)))
        .collect::<Result<Vec<_>, _>>()?;
    let successes = reports.iter().filter(|r| r.success).count();
    let params = cfg.params();
    let summary = ToySummary {
        config: cfg,
        trials,
        successes,
        success_rate: successes as f64 / trials.max(1) as f64,
        bound: params.success_bound,
        hypotheses_hold: params.hypotheses_hold(cfg.m_out),
        wrong_guesses: reports.iter().map(|r| r.wrong_guesses).sum(),
        wrong_guesses_passed: reports.iter().map(|r| r.wrong_guesses_passed).sum(),
    };
    Ok((reports, summary))
}
