//! Cipher references and reversible builders for the attacked permutations.
//!
//! Bit order everywhere: index 0 is the least significant bit of word 0
//! (byte 0 for byte-oriented states). Every builder returns a
//! compute/copy/uncompute circuit over an `x` input register, an optional
//! `k` key register and a `y` output register that receives the XOR of the
//! declared output bits.

pub mod adder;
pub mod chaskey;
pub mod elephant;
pub mod gf128;
pub mod keccak;
pub mod plu;
pub mod prince;
pub mod sbox;
pub mod spongent;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateKind, Wire};
use crate::cost::{estimate, CostModel, Resources};

pub type Bits = Vec<bool>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimitiveError {
    #[error("{what}: expected {expected} bits, got {got}")]
    Size {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-zero padding after inverting the expanded key")]
    Padding,
    #[error("unknown cipher `{0}`")]
    UnknownCipher(String),
}

pub fn bits_from_u128(v: u128, n: usize) -> Bits {
    (0..n).map(|i| v >> i & 1 == 1).collect()
}

pub fn bits_to_u128(b: &[bool]) -> u128 {
    assert!(b.len() <= 128);
    b.iter()
        .enumerate()
        .fold(0, |a, (i, &x)| a | (x as u128) << i)
}

pub fn bits_from_bytes(bytes: &[u8]) -> Bits {
    bytes
        .iter()
        .flat_map(|&b| (0..8).map(move |i| b >> i & 1 == 1))
        .collect()
}

pub fn bytes_from_bits(b: &[bool]) -> Vec<u8> {
    b.chunks(8)
        .map(|c| {
            c.iter()
                .enumerate()
                .fold(0u8, |a, (i, &x)| a | (x as u8) << i)
        })
        .collect()
}

pub fn bits_from_words32(w: &[u32]) -> Bits {
    w.iter()
        .flat_map(|&x| (0..32).map(move |i| x >> i & 1 == 1))
        .collect()
}

pub fn words32_from_bits(b: &[bool]) -> Vec<u32> {
    b.chunks(32)
        .map(|c| {
            c.iter()
                .enumerate()
                .fold(0u32, |a, (i, &x)| a | (x as u32) << i)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CipherId {
    Chaskey8,
    Chaskey12,
    Prince,
    Spongent160,
    Spongent176,
    Keccak200,
}

impl CipherId {
    pub const ALL: [CipherId; 6] = [
        CipherId::Chaskey8,
        CipherId::Chaskey12,
        CipherId::Prince,
        CipherId::Spongent160,
        CipherId::Spongent176,
        CipherId::Keccak200,
    ];

    /// Block (state) size in bits.
    pub fn n(self) -> usize {
        match self {
            CipherId::Chaskey8 | CipherId::Chaskey12 => 128,
            CipherId::Prince => 64,
            CipherId::Spongent160 => 160,
            CipherId::Spongent176 => 176,
            CipherId::Keccak200 => 200,
        }
    }

    pub fn rounds(self) -> usize {
        match self {
            CipherId::Chaskey8 => 8,
            CipherId::Chaskey12 => 12,
            CipherId::Prince => 12,
            CipherId::Spongent160 => 80,
            CipherId::Spongent176 => 90,
            CipherId::Keccak200 => 18,
        }
    }

    /// Key bits the quantum search must guess in full (FX inner key).
    pub fn inner_key_bits(self) -> usize {
        match self {
            CipherId::Prince => 64,
            _ => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CipherId::Chaskey8 => "chaskey-8",
            CipherId::Chaskey12 => "chaskey-12",
            CipherId::Prince => "prince",
            CipherId::Spongent160 => "elephant-160",
            CipherId::Spongent176 => "elephant-176",
            CipherId::Keccak200 => "elephant-200",
        }
    }
}

impl fmt::Display for CipherId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CipherId {
    type Err = PrimitiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let k: String = s
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        Ok(match k.as_str() {
            "chaskey8" | "chaskey" => CipherId::Chaskey8,
            "chaskey12" => CipherId::Chaskey12,
            "prince" => CipherId::Prince,
            "spongent160" | "elephant160" => CipherId::Spongent160,
            "spongent176" | "elephant176" => CipherId::Spongent176,
            "keccak200" | "keccak" | "elephant200" => CipherId::Keccak200,
            _ => return Err(PrimitiveError::UnknownCipher(s.into())),
        })
    }
}

/// Simon-specific relaxations of the cipher circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimonOpt {
    pub m_out: usize,
    pub truncate_last_rounds: bool,
    pub fixed_input_precompute: bool,
}

impl SimonOpt {
    /// The configuration used by the attack estimates.
    pub fn attack() -> Self {
        SimonOpt {
            m_out: 11,
            truncate_last_rounds: true,
            fixed_input_precompute: true,
        }
    }

    /// Full permutation, full output, no input precompute.
    pub fn baseline(cipher: CipherId) -> Self {
        SimonOpt {
            m_out: cipher.n(),
            truncate_last_rounds: false,
            fixed_input_precompute: false,
        }
    }
}

/// Gate counts of one labelled section of the compute pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionCount {
    pub label: String,
    pub counts: [usize; 5],
}

/// Records op-index marks while a compute pass is being built.
#[derive(Default)]
pub(crate) struct Sections {
    marks: Vec<(String, usize)>,
}

impl Sections {
    pub(crate) fn mark(&mut self, c: &Circuit, label: impl Into<String>) {
        self.marks.push((label.into(), c.ops().len()));
    }

    pub(crate) fn finish(self, c: &Circuit) -> Vec<SectionCount> {
        let end = c.ops().len();
        let mut out = Vec::new();
        for (i, (label, start)) in self.marks.iter().enumerate() {
            let stop = self.marks.get(i + 1).map_or(end, |m| m.1);
            let mut counts = [0; 5];
            for op in &c.ops()[*start..stop] {
                if let crate::circuit::Op::Gate(g) = op {
                    counts[g.kind().index()] += 1;
                }
            }
            out.push(SectionCount {
                label: label.clone(),
                counts,
            });
        }
        out
    }
}

/// A built compute/copy/uncompute circuit with its register map.
#[derive(Clone, Debug)]
pub struct CipherCircuit {
    pub cipher: CipherId,
    pub opt: SimonOpt,
    pub circuit: Circuit,
    pub input: Vec<Wire>,
    pub key: Vec<Wire>,
    pub output: Vec<Wire>,
    /// Per-section gate counts of the compute pass (indexed by `GateKind::index`).
    pub sections: Vec<SectionCount>,
    /// Human-readable description of the affine output map.
    pub postmap: String,
}

/// Wraps a compute pass: declares registers, copies `out` into a fresh
/// output register and appends the adjoint of everything after `mark`.
pub(crate) fn finish_circuit(
    mut c: Circuit,
    mark: usize,
    input: Vec<Wire>,
    key: Vec<Wire>,
    out: &[Vec<Wire>],
) -> (Circuit, Vec<Wire>) {
    let m = out[0].len();
    let compute = c.ops_since(mark);
    // the adjoint re-allocates wires freed during compute; keep y clear of them
    let y = c.alloc_fresh(m);
    for group in out {
        assert_eq!(group.len(), m);
        for (i, &w) in group.iter().enumerate() {
            c.cnot(w, y[i]);
        }
    }
    c.append_adjoint(&compute);
    c.declare_input("x", &input);
    if !key.is_empty() {
        c.declare_input("k", &key);
    }
    c.declare_output("y", &y);
    (c, y)
}

/// Classical reference. `key` is the FX inner key for PRINCE and empty for
/// the permutations.
pub fn reference(cipher: CipherId, key: &[bool], input: &[bool]) -> Result<Bits, PrimitiveError> {
    let n = cipher.n();
    if input.len() != n {
        return Err(PrimitiveError::Size {
            what: "input",
            expected: n,
            got: input.len(),
        });
    }
    let kb = cipher.inner_key_bits();
    if key.len() != kb {
        return Err(PrimitiveError::Size {
            what: "key",
            expected: kb,
            got: key.len(),
        });
    }
    Ok(match cipher {
        CipherId::Chaskey8 | CipherId::Chaskey12 => {
            let v = words32_from_bits(input);
            let out = chaskey::permute([v[0], v[1], v[2], v[3]], cipher.rounds());
            bits_from_words32(&out)
        }
        CipherId::Prince => {
            let out = prince::core(bits_to_u128(input) as u64, bits_to_u128(key) as u64);
            bits_from_u128(out as u128, 64)
        }
        CipherId::Spongent160 | CipherId::Spongent176 => {
            let mut s = bytes_from_bits(input);
            spongent::permute(&mut s);
            bits_from_bytes(&s)
        }
        CipherId::Keccak200 => {
            let mut s: [u8; 25] = bytes_from_bits(input).try_into().expect("25 bytes");
            keccak::permute(&mut s);
            bits_from_bytes(&s)
        }
    })
}

pub fn build_circuit(cipher: CipherId, opt: SimonOpt) -> CipherCircuit {
    assert!(
        opt.m_out >= 1 && opt.m_out <= cipher.n(),
        "m_out out of range"
    );
    match cipher {
        CipherId::Chaskey8 | CipherId::Chaskey12 => chaskey::build(cipher, opt),
        CipherId::Prince => prince::build(opt),
        CipherId::Spongent160 | CipherId::Spongent176 => spongent::build(cipher, opt),
        CipherId::Keccak200 => keccak::build(opt),
    }
}

/// The value the circuit's input register must hold for plaintext `input`:
/// identity unless the fixed-input part is precomputed (the map `g`).
pub fn circuit_input(cipher: CipherId, opt: SimonOpt, input: &[bool]) -> Bits {
    if !opt.fixed_input_precompute {
        return input.to_vec();
    }
    match cipher {
        CipherId::Chaskey8 | CipherId::Chaskey12 => chaskey::precompute(input),
        _ => input.to_vec(),
    }
}

/// The declared affine output map applied to a reference output, restricted
/// to `m_out` bits. For PRINCE the map also absorbs the final key addition.
pub fn postmap(cipher: CipherId, opt: SimonOpt, key: &[bool], output: &[bool]) -> Bits {
    let full = if opt.truncate_last_rounds {
        match cipher {
            CipherId::Chaskey8 | CipherId::Chaskey12 => chaskey::postmap(output),
            CipherId::Prince => prince::postmap(key, output),
            _ => output.to_vec(),
        }
    } else {
        output.to_vec()
    };
    let sel = output_selection(cipher, opt);
    sel.iter().map(|&i| full[i]).collect()
}

/// Indices (into the postmapped output) that the circuit copies out.
pub fn output_selection(cipher: CipherId, opt: SimonOpt) -> Vec<usize> {
    if !opt.truncate_last_rounds {
        return (0..opt.m_out).collect();
    }
    match cipher {
        CipherId::Chaskey8 | CipherId::Chaskey12 => chaskey::OUTPUT_BITS.take(opt.m_out).collect(),
        CipherId::Spongent160 | CipherId::Spongent176 => spongent::output_bits(cipher, opt.m_out),
        CipherId::Keccak200 => keccak::output_bits(opt.m_out),
        CipherId::Prince => (0..opt.m_out).collect(),
    }
}

/// Percent reductions of the optimized circuit against the baseline.
#[derive(Clone, Debug, Serialize)]
pub struct SavingsReport {
    pub cipher: CipherId,
    pub baseline: Resources,
    pub optimized: Resources,
    pub ops_pct: f64,
    pub t_pct: f64,
    pub depth_pct: f64,
}

impl SavingsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct")
    }
}

fn pct(base: u64, opt: u64) -> f64 {
    if base == 0 {
        0.0
    } else {
        100.0 * (base as f64 - opt as f64) / base as f64
    }
}

pub fn apply_optimizations(cipher: CipherId, opt: SimonOpt, model: &CostModel) -> SavingsReport {
    let base = estimate(
        &build_circuit(cipher, SimonOpt::baseline(cipher)).circuit,
        model,
    );
    let optimized = estimate(&build_circuit(cipher, opt).circuit, model);
    SavingsReport {
        cipher,
        baseline: base,
        optimized,
        ops_pct: pct(base.ops(), optimized.ops()),
        t_pct: pct(base.t, optimized.t),
        depth_pct: pct(base.depth, optimized.depth),
    }
}

impl CipherCircuit {
    /// Nonlinear gates (Toffoli + AND) in the compute pass.
    pub fn nonlinear_gates(&self) -> usize {
        self.sections
            .iter()
            .map(|s| s.counts[GateKind::Toffoli.index()] + s.counts[GateKind::And.index()])
            .sum()
    }
}
