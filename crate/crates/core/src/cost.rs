//! Clifford+T lowering table and ASAP resource estimation.
//!
//! Each IR gate kind maps to a [`GateCost`]. The default table is derived by
//! scheduling explicit Clifford+T decompositions ([`Micro`] sequences), so the
//! unit depths are those of the decompositions themselves. Depth and T-depth
//! are scheduled at lowered granularity, one micro-step at a time.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind, Op};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCost {
    pub cnot: u64,
    pub one_qubit_clifford: u64,
    pub t: u64,
    pub measurement: u64,
    pub depth: u64,
    pub t_depth: u64,
    /// Borrowed qubits beyond the gate's own wires, returned clean.
    #[serde(default)]
    pub helpers: u64,
}

/// Lowering table. When `micro` holds a decomposition for a gate kind
/// (indexed by [`GateKind::index`]) depth is scheduled per micro-step;
/// otherwise the gate is a rigid block of its `GateCost` depths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub name: String,
    pub x: GateCost,
    pub cnot: GateCost,
    pub toffoli: GateCost,
    pub and: GateCost,
    pub and_uncompute: GateCost,
    #[serde(default)]
    pub micro: Vec<Vec<Micro>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub cnot: u64,
    pub one_qubit_clifford: u64,
    pub t: u64,
    pub measurement: u64,
    pub depth: u64,
    pub t_depth: u64,
    pub qubits: u64,
}

impl Resources {
    /// Total operation count (every lowered gate and measurement).
    pub fn ops(&self) -> u64 {
        self.cnot + self.one_qubit_clifford + self.t + self.measurement
    }

    /// Counts of `self` followed by `other`; depths add, width is the max.
    pub fn then(&self, other: &Resources) -> Resources {
        Resources {
            cnot: self.cnot + other.cnot,
            one_qubit_clifford: self.one_qubit_clifford + other.one_qubit_clifford,
            t: self.t + other.t,
            measurement: self.measurement + other.measurement,
            depth: self.depth + other.depth,
            t_depth: self.t_depth + other.t_depth,
            qubits: self.qubits.max(other.qubits),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

/// One step of a Clifford+T decomposition over local qubits
/// (controls 0 and 1, target 2, helpers from 3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Micro {
    H(usize),
    S(usize),
    T(usize),
    Tdg(usize),
    X(usize),
    Cnot(usize, usize),
    Measure(usize),
}

impl Micro {
    fn max_qubit(self) -> usize {
        match self {
            Micro::Cnot(a, b) => a.max(b),
            Micro::H(q)
            | Micro::S(q)
            | Micro::T(q)
            | Micro::Tdg(q)
            | Micro::X(q)
            | Micro::Measure(q) => q,
        }
    }
}

/// Local qubit count of a micro-circuit.
fn micro_width(seq: &[Micro]) -> usize {
    seq.iter().map(|m| m.max_qubit() + 1).max().unwrap_or(0)
}

/// Per-wire ASAP clocks: `clock` counts all layers, `tclock` only T layers.
#[derive(Default)]
struct Clocks {
    clock: Vec<u64>,
    tclock: Vec<u64>,
}

impl Clocks {
    fn new(n: usize) -> Self {
        Clocks {
            clock: vec![0; n],
            tclock: vec![0; n],
        }
    }

    fn step(&mut self, m: Micro, at: impl Fn(usize) -> usize) {
        match m {
            Micro::Cnot(a, b) => {
                let (a, b) = (at(a), at(b));
                let d = self.clock[a].max(self.clock[b]) + 1;
                let t = self.tclock[a].max(self.tclock[b]);
                self.clock[a] = d;
                self.clock[b] = d;
                self.tclock[a] = t;
                self.tclock[b] = t;
            }
            Micro::T(q) | Micro::Tdg(q) => {
                let q = at(q);
                self.clock[q] += 1;
                self.tclock[q] += 1;
            }
            Micro::H(q) | Micro::S(q) | Micro::X(q) | Micro::Measure(q) => self.clock[at(q)] += 1,
        }
    }

    fn depth(&self) -> u64 {
        self.clock.iter().copied().max().unwrap_or(0)
    }

    fn t_depth(&self) -> u64 {
        self.tclock.iter().copied().max().unwrap_or(0)
    }
}

fn tally(c: &mut GateCost, m: Micro) {
    match m {
        Micro::Cnot(..) => c.cnot += 1,
        Micro::T(_) | Micro::Tdg(_) => c.t += 1,
        Micro::H(_) | Micro::S(_) | Micro::X(_) => c.one_qubit_clifford += 1,
        Micro::Measure(_) => c.measurement += 1,
    }
}

/// Schedules a micro-circuit ASAP and returns its counts and depths.
/// Qubits above the target (index 3 up) are counted as helpers.
pub fn micro_cost(seq: &[Micro]) -> GateCost {
    let n = micro_width(seq);
    let mut clocks = Clocks::new(n);
    let mut c = GateCost {
        helpers: n.saturating_sub(3) as u64,
        ..GateCost::default()
    };
    for &m in seq {
        tally(&mut c, m);
        clocks.step(m, |q| q);
    }
    c.depth = clocks.depth();
    c.t_depth = clocks.t_depth();
    c
}

pub mod decompositions {
    //! Published Clifford+T decompositions used by the lowering tables.
    use super::Micro::{self, *};

    /// Textbook 6-CNOT Toffoli (Nielsen and Chuang, Fig. 4.9).
    pub fn toffoli_textbook() -> Vec<Micro> {
        let (a, b, c) = (0, 1, 2);
        vec![
            H(c),
            Cnot(b, c),
            Tdg(c),
            Cnot(a, c),
            T(c),
            Cnot(b, c),
            Tdg(c),
            Cnot(a, c),
            Tdg(b),
            T(c),
            Cnot(a, b),
            H(c),
            Tdg(b),
            Cnot(a, b),
            T(a),
            S(b),
        ]
    }

    /// T-depth-one Toffoli (Selinger 2013): H-conjugated CCZ whose seven
    /// parities are formed on four borrowed helpers.
    pub fn toffoli_t_depth_one() -> Vec<Micro> {
        let (x, y, z) = (0, 1, 2);
        let (p, q, r, s) = (3, 4, 5, 6);
        let mut v = vec![H(z)];
        let parity = vec![
            Cnot(x, p),
            Cnot(y, r),
            Cnot(z, q),
            Cnot(y, p),
            Cnot(x, q),
            Cnot(z, r),
            Cnot(p, s),
            Cnot(z, s),
        ];
        v.extend(parity.iter().copied());
        v.extend([T(x), T(y), T(z), T(s), Tdg(p), Tdg(q), Tdg(r)]);
        v.extend(parity.iter().rev().copied());
        v.push(H(z));
        v
    }

    /// Four-T AND with a |T> target (Gidney 2018, Fig. 3).
    pub fn and_gidney() -> Vec<Micro> {
        let (a, b, t) = (0, 1, 2);
        vec![
            H(t),
            T(t),
            Cnot(a, t),
            Cnot(b, t),
            Cnot(t, a),
            Cnot(t, b),
            Tdg(a),
            Tdg(b),
            T(t),
            Cnot(t, b),
            Cnot(t, a),
            H(t),
            S(t),
        ]
    }

    /// Four-T AND of T-depth one: the four phase parities of the Gidney AND
    /// are formed simultaneously using one borrowed helper.
    pub fn and_t_depth_one() -> Vec<Micro> {
        let (a, b, t, h) = (0, 1, 2, 3);
        let parity = vec![Cnot(t, h), Cnot(a, t), Cnot(b, t), Cnot(h, a), Cnot(h, b)];
        let mut v = vec![H(t)];
        v.extend(parity.iter().copied());
        v.extend([T(h), T(t), Tdg(a), Tdg(b)]);
        v.extend(parity.iter().rev().copied());
        v.extend([H(t), S(t)]);
        v
    }

    /// Measurement-based AND uncompute (Gidney 2018): X-basis measurement
    /// and a classically controlled CZ, costed as H-conjugated CNOT.
    pub fn and_uncompute_measured() -> Vec<Micro> {
        let (a, b, t) = (0, 1, 2);
        vec![H(t), Measure(t), H(b), Cnot(a, b), H(b)]
    }

    pub fn not() -> Vec<Micro> {
        vec![X(0)]
    }

    pub fn cnot() -> Vec<Micro> {
        vec![Cnot(0, 1)]
    }
}

impl CostModel {
    /// Default lowering: T-depth-one Toffoli and AND with measured uncompute.
    pub fn default_model() -> Self {
        use decompositions::*;
        Self::from_micro(
            "t-depth-one",
            [
                not(),
                cnot(),
                toffoli_t_depth_one(),
                and_t_depth_one(),
                and_uncompute_measured(),
            ],
        )
    }

    /// Textbook Toffoli and the Gidney AND, both without helpers.
    pub fn textbook() -> Self {
        use decompositions::*;
        Self::from_micro(
            "textbook",
            [
                not(),
                cnot(),
                toffoli_textbook(),
                and_gidney(),
                and_uncompute_measured(),
            ],
        )
    }

    /// Model from decompositions in `GateKind::index` order
    /// (X, CNOT, Toffoli, AND, AND_UNCOMPUTE).
    pub fn from_micro(name: &str, micro: [Vec<Micro>; 5]) -> Self {
        let c: Vec<GateCost> = micro.iter().map(|m| micro_cost(m)).collect();
        CostModel {
            name: name.into(),
            x: c[0],
            cnot: c[1],
            toffoli: c[2],
            and: c[3],
            and_uncompute: c[4],
            micro: micro.into(),
        }
    }

    /// Largest helper count over the gate kinds present in `circuit`.
    pub fn helpers_for(&self, circuit: &Circuit) -> u64 {
        let mut seen = [false; 5];
        for g in circuit.gates() {
            seen[g.kind().index()] = true;
        }
        GateKind::ALL
            .iter()
            .filter(|k| seen[k.index()])
            .map(|&k| self.cost(k).helpers)
            .max()
            .unwrap_or(0)
    }

    pub fn cost(&self, kind: GateKind) -> &GateCost {
        match kind {
            GateKind::X => &self.x,
            GateKind::Cnot => &self.cnot,
            GateKind::Toffoli => &self.toffoli,
            GateKind::And => &self.and,
            GateKind::AndUncompute => &self.and_uncompute,
        }
    }
}

impl Default for CostModel {
    fn default() -> Self {
        Self::default_model()
    }
}

/// Exact counts and ASAP depths of `circuit` under `model`.
///
/// With micro decompositions each lowered step is scheduled on the wires it
/// touches and helpers start fresh; otherwise a gate occupies its block
/// depth on every wire. A reused wire keeps its clock, so reuse serializes
/// like a physical qubit. `qubits` is the peak width plus the largest helper
/// count of any gate kind present.
pub fn estimate(circuit: &Circuit, model: &CostModel) -> Resources {
    let n = circuit.span();
    let scratch = model
        .micro
        .iter()
        .map(|m| micro_width(m))
        .max()
        .unwrap_or(0);
    let mut clocks = Clocks::new(n + scratch);
    let mut r = Resources::default();
    let mut ws = [0usize; 3];
    for op in circuit.ops() {
        let Op::Gate(g) = op else { continue };
        let kind = g.kind();
        let c = model.cost(kind);
        r.cnot += c.cnot;
        r.one_qubit_clifford += c.one_qubit_clifford;
        r.t += c.t;
        r.measurement += c.measurement;
        let k = match *g {
            Gate::X(t) => {
                ws[0] = t;
                1
            }
            Gate::Cnot(a, t) => {
                ws[0] = a;
                ws[1] = t;
                2
            }
            Gate::Toffoli(a, b, t) | Gate::And(a, b, t) | Gate::AndUncompute(a, b, t) => {
                ws = [a, b, t];
                3
            }
        };
        let ws = &ws[..k];
        match model.micro.get(kind.index()).filter(|m| !m.is_empty()) {
            Some(seq) => {
                let start = ws.iter().map(|&w| clocks.clock[w]).max().unwrap_or(0);
                let tstart = ws.iter().map(|&w| clocks.tclock[w]).max().unwrap_or(0);
                // helpers are fresh: ready no earlier than the gate's wires
                for h in k..micro_width(seq) {
                    clocks.clock[n + h] = start;
                    clocks.tclock[n + h] = tstart;
                }
                for &m in seq {
                    clocks.step(m, |q| if q < k { ws[q] } else { n + q });
                }
            }
            None => {
                let start = ws.iter().map(|&w| clocks.clock[w]).max().unwrap_or(0);
                let tstart = ws.iter().map(|&w| clocks.tclock[w]).max().unwrap_or(0);
                for &w in ws {
                    clocks.clock[w] = start + c.depth;
                    clocks.tclock[w] = tstart + c.t_depth;
                }
            }
        }
    }
    r.depth = clocks.clock[..n].iter().copied().max().unwrap_or(0);
    r.t_depth = clocks.tclock[..n].iter().copied().max().unwrap_or(0);
    r.qubits = (circuit.peak_width() as u64) + model.helpers_for(circuit);
    r
}
