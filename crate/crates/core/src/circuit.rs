//! Reversible gate IR with a reuse-first wire manager.
//!
//! A [`Circuit`] is an ordered list of gates interleaved with `ALLOC`/`FREE`
//! events. Wires live at the start are the declared inputs; every other wire
//! must be allocated before use. Allocation always hands out the lowest free
//! index, so builders that borrow and release ancillas inside a round keep the
//! peak width flat across rounds.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Wire = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    X(Wire),
    Cnot(Wire, Wire),
    Toffoli(Wire, Wire, Wire),
    /// Target promised zero on entry.
    And(Wire, Wire, Wire),
    /// Target promised equal to the product of the controls on entry; left zero.
    AndUncompute(Wire, Wire, Wire),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    Cnot,
    Toffoli,
    And,
    AndUncompute,
}

impl GateKind {
    pub const ALL: [GateKind; 5] = [
        GateKind::X,
        GateKind::Cnot,
        GateKind::Toffoli,
        GateKind::And,
        GateKind::AndUncompute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::And => "AND",
            GateKind::AndUncompute => "AND_UNCOMPUTE",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::X(_) => GateKind::X,
            Gate::Cnot(..) => GateKind::Cnot,
            Gate::Toffoli(..) => GateKind::Toffoli,
            Gate::And(..) => GateKind::And,
            Gate::AndUncompute(..) => GateKind::AndUncompute,
        }
    }

    pub fn wires(&self) -> Vec<Wire> {
        match *self {
            Gate::X(t) => vec![t],
            Gate::Cnot(c, t) => vec![c, t],
            Gate::Toffoli(a, b, t) | Gate::And(a, b, t) | Gate::AndUncompute(a, b, t) => {
                vec![a, b, t]
            }
        }
    }

    pub fn target(&self) -> Wire {
        match *self {
            Gate::X(t) | Gate::Cnot(_, t) => t,
            Gate::Toffoli(_, _, t) | Gate::And(_, _, t) | Gate::AndUncompute(_, _, t) => t,
        }
    }

    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::And(a, b, t) => Gate::AndUncompute(a, b, t),
            Gate::AndUncompute(a, b, t) => Gate::And(a, b, t),
            g => g,
        }
    }

    pub fn map_wires(&self, f: impl Fn(Wire) -> Wire) -> Gate {
        match *self {
            Gate::X(t) => Gate::X(f(t)),
            Gate::Cnot(c, t) => Gate::Cnot(f(c), f(t)),
            Gate::Toffoli(a, b, t) => Gate::Toffoli(f(a), f(b), f(t)),
            Gate::And(a, b, t) => Gate::And(f(a), f(b), f(t)),
            Gate::AndUncompute(a, b, t) => Gate::AndUncompute(f(a), f(b), f(t)),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind().name())?;
        for w in self.wires() {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

/// CNOT pairs of a balanced fanout tree: every holder copies to one new
/// target per layer.
pub fn fanout_pairs(c: Wire, targets: &[Wire]) -> Vec<(Wire, Wire)> {
    let mut holders = vec![c];
    let mut rest = targets;
    let mut out = Vec::with_capacity(targets.len());
    while !rest.is_empty() {
        let k = holders.len().min(rest.len());
        let (now, later) = rest.split_at(k);
        out.extend(holders.iter().copied().zip(now.iter().copied()));
        holders.extend_from_slice(now);
        rest = later;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Gate(Gate),
    Alloc(Wire),
    Free(Wire),
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Gate(g) => write!(f, "{g}"),
            Op::Alloc(w) => write!(f, "ALLOC {w}"),
            Op::Free(w) => write!(f, "FREE {w}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub label: String,
    pub wires: Vec<Wire>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("unallocated wire {wire} at op {index}")]
    Unallocated { wire: Wire, index: usize },
    #[error("duplicate wire {wire} at op {index}")]
    DuplicateWire { wire: Wire, index: usize },
    #[error("wire {wire} already allocated at op {index}")]
    AlreadyAllocated { wire: Wire, index: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Ordered gate list over indexed wires with allocation events.
///
/// Invariant: every op was validated against the live set when appended, so a
/// stored circuit is always well-formed.
#[derive(Clone, Debug, Default)]
pub struct Circuit {
    ops: Vec<Op>,
    initial: Vec<Wire>,
    live: Vec<bool>,
    free_pool: BTreeSet<Wire>,
    current: usize,
    peak: usize,
    pub inputs: Vec<Register>,
    pub outputs: Vec<Register>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    /// Circuit whose wires `0..n` are live from the start.
    pub fn with_width(n: usize) -> Self {
        let mut c = Self::new();
        c.start_live(&(0..n).collect::<Vec<_>>());
        c
    }

    fn start_live(&mut self, wires: &[Wire]) {
        for &w in wires {
            self.ensure(w);
            if !self.live[w] {
                self.live[w] = true;
                self.initial.push(w);
                self.current += 1;
            }
        }
        let hi = self.live.len();
        self.free_pool = (0..hi).filter(|&w| !self.live[w]).collect();
        self.peak = self.peak.max(self.current);
    }

    fn ensure(&mut self, w: Wire) {
        if w >= self.live.len() {
            self.live.resize(w + 1, false);
        }
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn initial_wires(&self) -> &[Wire] {
        &self.initial
    }

    pub fn live_wires(&self) -> Vec<Wire> {
        (0..self.live.len()).filter(|&w| self.live[w]).collect()
    }

    pub fn is_live(&self, w: Wire) -> bool {
        self.live.get(w).copied().unwrap_or(false)
    }

    /// Number of wire indices ever used.
    pub fn span(&self) -> usize {
        self.live.len()
    }

    pub fn peak_width(&self) -> usize {
        self.peak
    }

    pub fn current_width(&self) -> usize {
        self.current
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.ops.iter().filter_map(|op| match op {
            Op::Gate(g) => Some(g),
            _ => None,
        })
    }

    pub fn gate_count(&self, kind: GateKind) -> usize {
        self.gates().filter(|g| g.kind() == kind).count()
    }

    pub fn declare_input(&mut self, label: &str, wires: &[Wire]) {
        self.inputs.push(Register {
            label: label.into(),
            wires: wires.to_vec(),
        });
    }

    pub fn declare_output(&mut self, label: &str, wires: &[Wire]) {
        self.outputs.push(Register {
            label: label.into(),
            wires: wires.to_vec(),
        });
    }

    pub fn input(&self, label: &str) -> Option<&Register> {
        self.inputs.iter().find(|r| r.label == label)
    }

    pub fn output(&self, label: &str) -> Option<&Register> {
        self.outputs.iter().find(|r| r.label == label)
    }

    /// Allocates `count` wires, lowest free indices first.
    pub fn alloc(&mut self, count: usize) -> Vec<Wire> {
        (0..count).map(|_| self.alloc_one()).collect()
    }

    pub fn alloc_one(&mut self) -> Wire {
        let w = match self.free_pool.pop_first() {
            Some(w) => w,
            None => {
                let w = self.live.len();
                self.ensure(w);
                w
            }
        };
        self.live[w] = true;
        self.current += 1;
        self.peak = self.peak.max(self.current);
        self.ops.push(Op::Alloc(w));
        w
    }

    /// Allocates `count` wires above every index used so far, so that a later
    /// replay of earlier ops can never collide with them.
    pub fn alloc_fresh(&mut self, count: usize) -> Vec<Wire> {
        let base = self.live.len();
        (base..base + count)
            .map(|w| {
                self.try_alloc_exact(w).expect("index above span is free");
                w
            })
            .collect()
    }

    pub fn try_free(&mut self, w: Wire) -> Result<(), CircuitError> {
        if !self.is_live(w) {
            return Err(CircuitError::Unallocated {
                wire: w,
                index: self.ops.len(),
            });
        }
        self.live[w] = false;
        self.current -= 1;
        self.free_pool.insert(w);
        self.ops.push(Op::Free(w));
        Ok(())
    }

    pub fn free(&mut self, wires: &[Wire]) {
        for &w in wires {
            self.try_free(w).expect("free of a dead wire");
        }
    }

    fn try_alloc_exact(&mut self, w: Wire) -> Result<(), CircuitError> {
        let old = self.live.len();
        self.ensure(w);
        self.free_pool.extend(old..self.live.len());
        if self.live[w] {
            return Err(CircuitError::AlreadyAllocated {
                wire: w,
                index: self.ops.len(),
            });
        }
        self.live[w] = true;
        self.free_pool.remove(&w);
        self.current += 1;
        self.peak = self.peak.max(self.current);
        self.ops.push(Op::Alloc(w));
        Ok(())
    }

    pub fn append(&mut self, gate: Gate) -> Result<(), CircuitError> {
        let ws = gate.wires();
        let index = self.ops.len();
        for (i, &w) in ws.iter().enumerate() {
            if ws[..i].contains(&w) {
                return Err(CircuitError::DuplicateWire { wire: w, index });
            }
            if !self.is_live(w) {
                return Err(CircuitError::Unallocated { wire: w, index });
            }
        }
        self.ops.push(Op::Gate(gate));
        Ok(())
    }

    /// Appends a gate; a violation is a builder bug.
    pub fn push(&mut self, gate: Gate) {
        if let Err(e) = self.append(gate) {
            panic!("{e}");
        }
    }

    pub fn x(&mut self, t: Wire) {
        self.push(Gate::X(t));
    }

    pub fn cnot(&mut self, c: Wire, t: Wire) {
        self.push(Gate::Cnot(c, t));
    }

    pub fn toffoli(&mut self, a: Wire, b: Wire, t: Wire) {
        self.push(Gate::Toffoli(a, b, t));
    }

    pub fn and(&mut self, a: Wire, b: Wire, t: Wire) {
        self.push(Gate::And(a, b, t));
    }

    pub fn and_uncompute(&mut self, a: Wire, b: Wire, t: Wire) {
        self.push(Gate::AndUncompute(a, b, t));
    }

    /// XORs the classical constant `value` (bit `i` on `wires[i]`).
    pub fn xor_const(&mut self, wires: &[Wire], value: u128) {
        for (i, &w) in wires.iter().enumerate() {
            if value >> i & 1 == 1 {
                self.x(w);
            }
        }
    }

    /// Copies `c` onto every target with a balanced CNOT tree of depth
    /// `ceil(lg(targets + 1))`.
    pub fn fanout(&mut self, c: Wire, targets: &[Wire]) {
        for (a, b) in fanout_pairs(c, targets) {
            self.cnot(a, b);
        }
    }

    /// Inverse of [`Circuit::fanout`].
    pub fn unfanout(&mut self, c: Wire, targets: &[Wire]) {
        for (a, b) in fanout_pairs(c, targets).into_iter().rev() {
            self.cnot(a, b);
        }
    }

    /// Appends every op of `other`, which must refer to this circuit's wires.
    pub fn extend(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        for op in &other.ops {
            self.replay(*op)?;
        }
        Ok(())
    }

    fn replay(&mut self, op: Op) -> Result<(), CircuitError> {
        match op {
            Op::Gate(g) => self.append(g),
            Op::Alloc(w) => self.try_alloc_exact(w),
            Op::Free(w) => self.try_free(w),
        }
    }

    /// Ops appended after position `mark`, as a standalone circuit sharing
    /// this circuit's live set at `mark`.
    pub fn ops_since(&self, mark: usize) -> Vec<Op> {
        self.ops[mark..].to_vec()
    }

    /// Appends the adjoint of `ops` (reverse order, AND and ALLOC swapped with
    /// their inverses).
    pub fn append_adjoint(&mut self, ops: &[Op]) {
        for op in ops.iter().rev() {
            let inv = match *op {
                Op::Gate(g) => Op::Gate(g.adjoint()),
                Op::Alloc(w) => Op::Free(w),
                Op::Free(w) => Op::Alloc(w),
            };
            self.replay(inv).expect("adjoint replay");
        }
    }

    pub fn adjoint(&self) -> Circuit {
        let mut out = Circuit::new();
        let live = self.live_wires();
        out.start_live(&live);
        out.initial = live;
        out.append_adjoint(&self.ops);
        out.inputs = self.outputs.clone();
        out.outputs = self.inputs.clone();
        if out.inputs.is_empty() {
            out.inputs = self.inputs.clone();
        }
        out
    }

    /// Relabels every wire through `map`; the image must be injective.
    pub fn relabel(&self, map: &[Wire]) -> Circuit {
        let mut out = Circuit::new();
        let init: Vec<Wire> = self.initial.iter().map(|&w| map[w]).collect();
        out.start_live(&init);
        for op in &self.ops {
            let op = match *op {
                Op::Gate(g) => Op::Gate(g.map_wires(|w| map[w])),
                Op::Alloc(w) => Op::Alloc(map[w]),
                Op::Free(w) => Op::Free(map[w]),
            };
            out.replay(op).expect("relabel replay");
        }
        let rl = |r: &Register| Register {
            label: r.label.clone(),
            wires: r.wires.iter().map(|&w| map[w]).collect(),
        };
        out.inputs = self.inputs.iter().map(rl).collect();
        out.outputs = self.outputs.iter().map(rl).collect();
        out
    }

    /// Line-oriented text form: `INPUT`/`OUTPUT` headers then one op per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut init = self.initial.clone();
        init.sort_unstable();
        s.push_str("LIVE");
        for w in &init {
            s.push_str(&format!(" {w}"));
        }
        s.push('\n');
        for (tag, regs) in [("INPUT", &self.inputs), ("OUTPUT", &self.outputs)] {
            for r in regs {
                s.push_str(&format!("{tag} {}", r.label));
                for w in &r.wires {
                    s.push_str(&format!(" {w}"));
                }
                s.push('\n');
            }
        }
        for op in &self.ops {
            s.push_str(&op.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit, CircuitError> {
        let mut c = Circuit::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let line_s = raw.trim();
            if line_s.is_empty() || line_s.starts_with('#') {
                continue;
            }
            let mut it = line_s.split_whitespace();
            let head = it.next().unwrap_or_default();
            let perr = |msg: &str| CircuitError::Parse {
                line,
                msg: msg.into(),
            };
            if head == "INPUT" || head == "OUTPUT" {
                let label = it.next().ok_or_else(|| perr("missing label"))?.to_string();
                let wires = it
                    .map(|t| t.parse::<Wire>().map_err(|_| perr("bad wire")))
                    .collect::<Result<Vec<_>, _>>()?;
                let reg = Register { label, wires };
                if head == "INPUT" {
                    c.inputs.push(reg);
                } else {
                    c.outputs.push(reg);
                }
                continue;
            }
            let args = it
                .map(|t| t.parse::<Wire>().map_err(|_| perr("bad wire")))
                .collect::<Result<Vec<_>, _>>()?;
            let need = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(perr(&format!("{head} takes {n} wires")))
                }
            };
            match head {
                "LIVE" => {
                    if !c.ops.is_empty() {
                        return Err(perr("LIVE after ops"));
                    }
                    c.start_live(&args);
                }
                "ALLOC" => {
                    need(1)?;
                    c.try_alloc_exact(args[0])?;
                }
                "FREE" => {
                    need(1)?;
                    c.try_free(args[0])?;
                }
                "X" => {
                    need(1)?;
                    c.append(Gate::X(args[0]))?;
                }
                "CNOT" => {
                    need(2)?;
                    c.append(Gate::Cnot(args[0], args[1]))?;
                }
                "TOFFOLI" | "AND" | "AND_UNCOMPUTE" => {
                    need(3)?;
                    let (a, b, t) = (args[0], args[1], args[2]);
                    let g = match head {
                        "TOFFOLI" => Gate::Toffoli(a, b, t),
                        "AND" => Gate::And(a, b, t),
                        _ => Gate::AndUncompute(a, b, t),
                    };
                    c.append(g)?;
                }
                other => return Err(perr(&format!("unknown op {other}"))),
            }
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_gate_width_one() {
        let mut c = Circuit::with_width(1);
        c.append(Gate::X(0)).unwrap();
        assert_eq!(c.gates().count(), 1);
        assert_eq!(c.peak_width(), 1);
    }

    #[test]
    fn duplicate_wire_rejected() {
        let mut c = Circuit::with_width(2);
        assert!(matches!(
            c.append(Gate::Cnot(0, 0)),
            Err(CircuitError::DuplicateWire { .. })
        ));
    }

    #[test]
    fn freed_wire_rejected() {
        let mut c = Circuit::with_width(2);
        let w = c.alloc_one();
        assert_eq!(w, 2);
        c.free(&[w]);
        let e = c.append(Gate::Toffoli(0, 1, 2)).unwrap_err();
        assert!(e.to_string().contains("unallocated wire"));
    }

    #[test]
    fn alloc_reuses_lowest() {
        let mut c = Circuit::new();
        assert_eq!(c.alloc(3), vec![0, 1, 2]);
        let mut c = Circuit::new();
        c.alloc(2);
        c.free(&[0]);
        assert_eq!(c.alloc_one(), 0);
    }

    #[test]
    fn per_round_ancillas_do_not_accumulate() {
        let mut c = Circuit::with_width(4);
        for _ in 0..80 {
            let a = c.alloc(10);
            for &w in &a {
                c.cnot(0, w);
                c.cnot(0, w);
            }
            c.free(&a);
        }
        assert_eq!(c.peak_width(), 14);
    }

    #[test]
    fn adjoint_involution() {
        let mut c = Circuit::with_width(3);
        let a = c.alloc_one();
        c.and(0, 1, a);
        c.toffoli(a, 2, 0);
        c.and_uncompute(0, 1, a);
        c.free(&[a]);
        c.x(2);
        let back = c.adjoint().adjoint();
        assert_eq!(back.ops(), c.ops());
        let adj = c.adjoint();
        assert_eq!(adj.ops()[2], Op::Gate(Gate::And(0, 1, 3)));
    }

    #[test]
    fn adjoint_swaps_and() {
        let mut c = Circuit::with_width(3);
        c.and(0, 1, 2);
        assert_eq!(c.adjoint().ops(), &[Op::Gate(Gate::AndUncompute(0, 1, 2))]);
    }

    #[test]
    fn fanout_depth_is_logarithmic() {
        let mut c = Circuit::with_width(8);
        c.fanout(0, &[1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(c.gate_count(GateKind::Cnot), 7);
    }

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::with_width(3);
        c.declare_input("x", &[0, 1, 2]);
        let a = c.alloc_one();
        c.and(0, 1, a);
        c.cnot(a, 2);
        c.and_uncompute(0, 1, a);
        c.free(&[a]);
        let t = c.to_text();
        let d = Circuit::from_text(&t).unwrap();
        assert_eq!(d.ops(), c.ops());
        assert_eq!(d.inputs, c.inputs);
        assert_eq!(d.to_text(), t);
    }

    #[test]
    fn parse_rejects_unknown() {
        assert!(Circuit::from_text("LIVE 0\nH 0\n").is_err());
    }
}
