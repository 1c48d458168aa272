//! Full attack costs: offline Simon over the data parameter `u`, Grover key
//! search, QROM loading and generic baselines.
//!
//! Counts far beyond `u64` are carried as `f64`. Cipher costs come from
//! scheduling the built circuits; linear-algebra counts come from the exact
//! closed forms in [`crate::linalg`], and its depth from a per-model linear
//! fit over exact schedules.

use std::sync::OnceLock;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cost::{estimate, CostModel, GateCost, Resources};
use crate::linalg;
use crate::primitives::{build_circuit, CipherId, SimonOpt};
use crate::simon::{grover_iterations, theorem14};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EstimatorError {
    #[error("u = {u} outside 1..={max}")]
    URange { u: usize, max: usize },
    #[error("no admissible u for {0}")]
    NoAdmissibleU(String),
}

/// Counts and depths of a (possibly astronomically large) circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Cost {
    pub cnot: f64,
    pub one_qubit_clifford: f64,
    pub t: f64,
    pub measurement: f64,
    pub depth: f64,
    pub t_depth: f64,
}

impl Cost {
    pub fn ops(&self) -> f64 {
        self.cnot + self.one_qubit_clifford + self.t + self.measurement
    }

    pub fn from_resources(r: &Resources) -> Self {
        Cost {
            cnot: r.cnot as f64,
            one_qubit_clifford: r.one_qubit_clifford as f64,
            t: r.t as f64,
            measurement: r.measurement as f64,
            depth: r.depth as f64,
            t_depth: r.t_depth as f64,
        }
    }

    pub fn from_gate(g: &GateCost) -> Self {
        Cost {
            cnot: g.cnot as f64,
            one_qubit_clifford: g.one_qubit_clifford as f64,
            t: g.t as f64,
            measurement: g.measurement as f64,
            depth: g.depth as f64,
            t_depth: g.t_depth as f64,
        }
    }

    /// `k` sequential repetitions.
    pub fn repeat(self, k: f64) -> Self {
        Cost {
            cnot: self.cnot * k,
            one_qubit_clifford: self.one_qubit_clifford * k,
            t: self.t * k,
            measurement: self.measurement * k,
            depth: self.depth * k,
            t_depth: self.t_depth * k,
        }
    }

    /// `k` parallel copies: counts scale, depths do not.
    pub fn copies(self, k: f64) -> Self {
        Cost {
            depth: self.depth,
            t_depth: self.t_depth,
            ..self.repeat(k)
        }
    }

    pub fn then(self, o: Cost) -> Self {
        Cost {
            cnot: self.cnot + o.cnot,
            one_qubit_clifford: self.one_qubit_clifford + o.one_qubit_clifford,
            t: self.t + o.t,
            measurement: self.measurement + o.measurement,
            depth: self.depth + o.depth,
            t_depth: self.t_depth + o.t_depth,
        }
    }

    /// Counts of the gate mix in `GateKind::index` order; depth left zero.
    fn of_counts(model: &CostModel, counts: [u64; 5]) -> Self {
        crate::GateKind::ALL
            .iter()
            .map(|&k| Cost::from_gate(model.cost(k)).copies(counts[k.index()] as f64))
            .fold(Cost::default(), |acc, c| Cost {
                depth: 0.0,
                t_depth: 0.0,
                ..acc.then(c)
            })
    }
}

fn log2_1dp<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64((v * 10.0).round() / 10.0)
}

/// Where the data limit comes from when derived from a bit budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LimitUnit {
    /// Blocks of the permutation width.
    Blocks,
    /// 64-bit words.
    Words64,
}

/// `floor(log₂(2^bits_log2 / unit))`.
pub fn data_limit_from_bits(bits_log2: f64, unit: LimitUnit, n: usize) -> usize {
    let unit_bits = match unit {
        LimitUnit::Blocks => n as f64,
        LimitUnit::Words64 => 64.0,
    };
    (bits_log2 - unit_bits.log2()).floor() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackSpec {
    pub cipher: CipherId,
    pub n: usize,
    /// Inner-key bits guessed by the search (FX only).
    pub k: usize,
    /// Largest admissible `u` (log₂ of classical queries).
    pub data_limit_log2: Option<usize>,
    pub m_out: usize,
    pub alpha: usize,
    /// Key bits for exhaustive search.
    pub key_bits: usize,
    /// Plaintext blocks that make the key unique in exhaustive search.
    pub grover_blocks: usize,
    /// Share of search iterations paying for the extra blocks.
    pub rare_branch_fraction: f64,
    /// Permutation calls per key trial in exhaustive search.
    pub grover_permutations: usize,
}

impl AttackSpec {
    /// Recommended query limits: Chaskey's 2^48 blocks, the same for PRINCE,
    /// and the Elephant budgets as the limited-data estimates count them.
    pub fn for_cipher(cipher: CipherId) -> Self {
        let (k, limit, blocks, perms) = match cipher {
            CipherId::Chaskey8 | CipherId::Chaskey12 => (0, 48, 2, 1),
            CipherId::Prince => (64, 48, 3, 1),
            CipherId::Spongent160 | CipherId::Spongent176 => (0, 47, 1, 2),
            CipherId::Keccak200 => (0, 69, 1, 2),
        };
        AttackSpec {
            cipher,
            n: cipher.n(),
            k,
            data_limit_log2: Some(limit),
            m_out: 11,
            alpha: 9,
            key_bits: 128,
            grover_blocks: blocks,
            rare_branch_fraction: 2f64.powi(-10),
            grover_permutations: perms,
        }
    }

    pub fn unlimited(mut self) -> Self {
        self.data_limit_log2 = None;
        self
    }

    /// Data limit of `2^bits_log2` bits converted with `unit`.
    pub fn with_bit_limit(mut self, bits_log2: f64, unit: LimitUnit) -> Self {
        self.data_limit_log2 = Some(data_limit_from_bits(bits_log2, unit, self.n));
        self
    }

    pub fn search_bits(&self, u: usize) -> usize {
        self.k + self.n - u
    }

    /// Simon queries per iteration; independent of `u`.
    pub fn m_queries(&self) -> usize {
        self.n + self.k + self.alpha + 1
    }

    /// Sweep range `[8, min(n − 8, limit)]`.
    pub fn u_range(&self) -> std::ops::RangeInclusive<usize> {
        let hi = self.n - 8;
        8..=self.data_limit_log2.map_or(hi, |d| d.min(hi))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Breakdown {
    /// Loading and final unloading of the `m` QROM copies.
    pub qrom: Cost,
    /// `2m` cipher evaluations per iteration.
    pub cipher_per_iteration: Cost,
    /// Rank check and its uncompute per iteration.
    pub linalg_per_iteration: Cost,
    /// Hadamard layers, phase flip and diffusion per iteration.
    pub other_per_iteration: Cost,
    pub iterations: f64,
}

impl Breakdown {
    pub fn per_iteration(&self) -> Cost {
        self.cipher_per_iteration
            .then(self.linalg_per_iteration)
            .then(self.other_per_iteration)
    }

    pub fn total(&self) -> Cost {
        self.qrom.then(self.per_iteration().repeat(self.iterations))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub target: String,
    pub mode: String,
    pub u: Option<usize>,
    #[serde(serialize_with = "log2_1dp")]
    pub queries_log2: f64,
    #[serde(serialize_with = "log2_1dp")]
    pub ops_log2: f64,
    #[serde(serialize_with = "log2_1dp")]
    pub t_log2: f64,
    #[serde(serialize_with = "log2_1dp")]
    pub depth_log2: f64,
    #[serde(serialize_with = "log2_1dp")]
    pub t_depth_log2: f64,
    #[serde(serialize_with = "log2_1dp")]
    pub qubits_log2: f64,
    pub qubits: f64,
    pub m_queries: usize,
    pub breakdown: Breakdown,
}

impl CostReport {
    fn new(
        target: &str,
        mode: &str,
        u: Option<usize>,
        queries_log2: f64,
        m: usize,
        qubits: f64,
        b: Breakdown,
    ) -> Self {
        let t = b.total();
        CostReport {
            target: target.into(),
            mode: mode.into(),
            u,
            queries_log2,
            ops_log2: t.ops().log2(),
            t_log2: t.t.log2(),
            depth_log2: t.depth.log2(),
            t_depth_log2: t.t_depth.log2(),
            qubits_log2: qubits.log2(),
            qubits,
            m_queries: m,
            breakdown: b,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

/// QROM over `2^u` addresses with `width` output bits, unary iteration:
/// `2^u − 1` AND computations and measured uncomputes, one control-transfer
/// CNOT per step, and `width/2` data CNOTs per address on average (random
/// data), written as a fanout of depth `⌈log₂(width + 1)⌉`. `copies` run in
/// parallel.
pub fn qrom_cost(model: &CostModel, u: usize, width: usize, copies: f64) -> Cost {
    let l = 2f64.powi(u as i32);
    let and = Cost::from_gate(&model.and);
    let andu = Cost::from_gate(&model.and_uncompute);
    let steps = and.then(andu).repeat(l - 1.0);
    let write_depth = ((width + 1) as f64).log2().ceil();
    let writes = Cost {
        cnot: (l - 1.0) + l * width as f64 / 2.0,
        depth: (l - 1.0) + l * write_depth,
        ..Cost::default()
    };
    steps.then(writes).copies(copies)
}

/// Grover diffusion over `b` qubits: H and X layers around a multi-controlled
/// Z lowered as an AND ladder.
pub fn reflection_cost(model: &CostModel, b: usize) -> Cost {
    let b = b as f64;
    let layers = Cost {
        one_qubit_clifford: 4.0 * b + 2.0,
        depth: 6.0,
        ..Cost::default()
    };
    let ladder = Cost::from_gate(&model.and)
        .then(Cost::from_gate(&model.and_uncompute))
        .repeat((b - 2.0).max(0.0));
    layers.then(ladder).then(Cost {
        cnot: 1.0,
        depth: 1.0,
        ..Cost::default()
    })
}

/// Depth of the rank check as `a·m + b·n`, fitted per model on two exact
/// schedules; `(a, b, ta, tb)`.
fn linalg_depth_fit(model: &CostModel) -> (f64, f64, f64, f64) {
    let sched = |m: usize, n: usize| {
        let (c, _, _) = linalg::build_rank_check(m, n);
        let r = estimate(&c, model);
        (r.depth as f64, r.t_depth as f64)
    };
    // solve [m1 n1; m2 n2] (a, b) = d
    let ((m1, n1), (m2, n2)) = ((96.0, 16.0), (48.0, 32.0));
    let (d1, t1) = sched(96, 16);
    let (d2, t2) = sched(48, 32);
    let det = m1 * n2 - m2 * n1;
    let solve = |y1: f64, y2: f64| ((y1 * n2 - y2 * n1) / det, (m1 * y2 - m2 * y1) / det);
    let (a, b) = solve(d1, d2);
    let (ta, tb) = solve(t1, t2);
    (a, b, ta, tb)
}

/// Rank check on `m` rows of `n` bits: exact counts, fitted depth, width
/// including gate helpers.
pub fn linalg_cost(est: &Estimator, m: usize, n: usize) -> (Cost, f64) {
    let counts = linalg::rank_check_counts(m as u64, n as u64);
    let (a, b, ta, tb) = *est.depth_fit.get_or_init(|| linalg_depth_fit(&est.model));
    let (mf, nf) = (m as f64, n as f64);
    let cost = Cost {
        depth: a * mf + b * nf,
        t_depth: ta * mf + tb * nf,
        ..Cost::of_counts(&est.model, counts)
    };
    let width =
        linalg::rank_check_width(m as u64, n as u64) as f64 + est.model.toffoli.helpers as f64;
    (cost, width)
}

/// Scheduled cipher circuits per cost model, built on first use.
pub struct Estimator {
    pub model: CostModel,
    attack: [OnceLock<CipherCost>; 6],
    full: [OnceLock<CipherCost>; 6],
    depth_fit: OnceLock<(f64, f64, f64, f64)>,
}

/// Resources of one cipher circuit plus its key-register width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CipherCost {
    pub resources: Resources,
    pub key_wires: usize,
}

impl Default for Estimator {
    fn default() -> Self {
        Self::new(CostModel::default_model())
    }
}

fn cipher_index(c: CipherId) -> usize {
    CipherId::ALL.iter().position(|&x| x == c).expect("listed")
}

impl Estimator {
    pub fn new(model: CostModel) -> Self {
        Estimator {
            model,
            attack: Default::default(),
            full: Default::default(),
            depth_fit: OnceLock::new(),
        }
    }

    /// The circuit with every Simon-specific optimization.
    pub fn attack_cipher(&self, c: CipherId) -> CipherCost {
        *self.attack[cipher_index(c)].get_or_init(|| self.schedule(c, SimonOpt::attack()))
    }

    /// Full permutation with full output, as exhaustive search needs it.
    pub fn full_cipher(&self, c: CipherId) -> CipherCost {
        *self.full[cipher_index(c)].get_or_init(|| self.schedule(c, SimonOpt::baseline(c)))
    }

    fn schedule(&self, c: CipherId, opt: SimonOpt) -> CipherCost {
        let cc = build_circuit(c, opt);
        CipherCost {
            resources: estimate(&cc.circuit, &self.model),
            key_wires: cc.key.len(),
        }
    }

    /// Offline Simon at a fixed `u`.
    ///
    /// `m = n + k + α + 1`; per iteration `2m` cipher copies in parallel
    /// (the FX key register is shared, adding `m` CNOT layers per pass), two
    /// Hadamard layers on the `m·u` Simon inputs, the rank check and its
    /// uncompute, a phase flip and the diffusion over `k + n − u` bits.
    /// Qubits are the larger of the cipher phase and the linear-algebra
    /// phase, plus the search register.
    pub fn offline_cost(&self, spec: &AttackSpec, u: usize) -> Result<CostReport, EstimatorError> {
        self.offline_cost_for(spec, self.attack_cipher(spec.cipher), u)
    }

    /// [`Estimator::offline_cost`] with an explicit cipher cost.
    pub fn offline_cost_for(
        &self,
        spec: &AttackSpec,
        cipher: CipherCost,
        u: usize,
    ) -> Result<CostReport, EstimatorError> {
        let max = spec.data_limit_log2.map_or(spec.n, |d| d.min(spec.n));
        if u == 0 || u > max {
            return Err(EstimatorError::URange { u, max });
        }
        let g = spec.search_bits(u);
        let m = spec.m_queries();
        let mf = m as f64;
        let params = theorem14(u, g, spec.alpha);
        debug_assert_eq!(params.m_queries, m);
        let one = Cost::from_resources(&cipher.resources);
        let key_depth = if spec.k > 0 { mf } else { 0.0 };
        let cipher_pass = Cost {
            depth: one.depth + key_depth,
            ..one
        }
        .copies(mf);
        let (linalg, linalg_width) = linalg_cost(self, m, u);
        let hadamards = Cost {
            one_qubit_clifford: mf * u as f64,
            depth: 1.0,
            ..Cost::default()
        };
        let flip = Cost {
            one_qubit_clifford: 1.0,
            depth: 1.0,
            ..Cost::default()
        };
        let other = hadamards
            .repeat(2.0)
            .then(flip)
            .then(reflection_cost(&self.model, g));
        let b = Breakdown {
            qrom: qrom_cost(&self.model, u, spec.m_out, mf).repeat(2.0),
            cipher_per_iteration: cipher_pass.repeat(2.0),
            linalg_per_iteration: linalg.repeat(2.0),
            other_per_iteration: other,
            iterations: params.iterations,
        };
        let shared = if spec.k > 0 { cipher.key_wires } else { 0 };
        let cipher_phase = mf * (cipher.resources.qubits as usize - shared) as f64;
        let linalg_phase = mf * spec.m_out as f64 + linalg_width;
        let qubits = cipher_phase.max(linalg_phase) + g as f64;
        Ok(CostReport::new(
            spec.cipher.name(),
            "offline",
            Some(u),
            u as f64,
            m,
            qubits,
            b,
        ))
    }

    /// Minimum total ops over the sweep range; ties go to the smaller `u`.
    pub fn optimize_u(&self, spec: &AttackSpec) -> Result<CostReport, EstimatorError> {
        self.optimize_u_for(spec, self.attack_cipher(spec.cipher))
    }

    pub fn optimize_u_for(
        &self,
        spec: &AttackSpec,
        cipher: CipherCost,
    ) -> Result<CostReport, EstimatorError> {
        use rayon::prelude::*;
        // fill the cache once instead of racing to fill it
        self.depth_fit.get_or_init(|| linalg_depth_fit(&self.model));
        let reports: Vec<CostReport> = spec
            .u_range()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|u| self.offline_cost_for(spec, cipher, u))
            .collect::<Result<_, _>>()?;
        reports
            .into_iter()
            .reduce(|best, r| if r.ops_log2 < best.ops_log2 { r } else { best })
            .ok_or_else(|| EstimatorError::NoAdmissibleU(spec.cipher.name().into()))
    }

    /// Exhaustive key search over `key_bits` with the full cipher.
    ///
    /// Per iteration: the first block (compute and uncompute of
    /// `grover_permutations` permutation calls), a comparison of the `n`
    /// output bits against the known block, the diffusion over the key, and
    /// the extra blocks in a `rare_branch_fraction` of iterations.
    pub fn grover_key_search(&self, spec: &AttackSpec) -> CostReport {
        let n = spec.n as f64;
        let cipher = self.full_cipher(spec.cipher);
        let one = Cost::from_resources(&cipher.resources);
        let block = one.repeat(spec.grover_permutations as f64);
        let and = Cost::from_gate(&self.model.and).then(Cost::from_gate(&self.model.and_uncompute));
        let compare = Cost {
            one_qubit_clifford: 2.0 * n,
            depth: 2.0,
            ..Cost::default()
        }
        .then(and.repeat(n - 1.0));
        let first = block.repeat(2.0).then(compare);
        let extra = first.repeat((spec.grover_blocks - 1) as f64 * spec.rare_branch_fraction);
        let b = Breakdown {
            qrom: Cost::default(),
            cipher_per_iteration: first.then(extra),
            linalg_per_iteration: Cost::default(),
            other_per_iteration: reflection_cost(&self.model, spec.key_bits),
            iterations: grover_iterations(spec.key_bits),
        };
        // key, one block's working state without its own key copy, and the
        // comparison ladder
        let qubits = spec.key_bits as f64
            + (cipher.resources.qubits as usize - cipher.key_wires) as f64
            + (n - 1.0);
        CostReport::new(
            spec.cipher.name(),
            "grover",
            None,
            (spec.grover_blocks as f64).log2(),
            spec.grover_blocks,
            qubits,
            b,
        )
    }

    /// Per-cipher circuit cost rows: attack circuits, qubits without the output register.
    pub fn table5_rows(&self) -> Vec<(CipherId, Resources)> {
        CipherId::ALL
            .iter()
            .map(|&c| {
                let mut r = self.attack_cipher(c).resources;
                r.qubits -= SimonOpt::attack().m_out as u64;
                (c, r)
            })
            .collect()
    }
}

/// Generic comparison exponents (log₂).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenericBaselines {
    /// Classical Even-Mansour time at `2^d` data: `n − d`.
    pub classical_tradeoff: f64,
    /// Quantum collision search exponents `2n/5` and `3n/7`.
    pub quantum_collision: (f64, f64),
    /// `n/2 − d/6`, the offline collision query cost.
    pub offline_gate_heuristic: f64,
}

pub fn generic_baselines(n: usize, k: usize, d: usize) -> GenericBaselines {
    let (n, d) = ((n + k) as f64, d as f64);
    GenericBaselines {
        classical_tradeoff: n - d,
        quantum_collision: (2.0 * n / 5.0, 3.0 * n / 7.0),
        offline_gate_heuristic: n / 2.0 - d / 6.0,
    }
}
