//! Bit-exact classical execution of circuits.
//!
//! State is bit-sliced: each wire holds a `u64` whose bit `l` is the wire's
//! value in lane `l`, so one pass evaluates 64 independent inputs. AND gates
//! are strict: a violated precondition in any lane is an error naming the op.

use thiserror::Error;

use crate::circuit::{Circuit, Gate, Op, Wire};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("AND target non-zero at op {index}")]
    AndTargetNonZero { index: usize },
    #[error("AND_UNCOMPUTE target inconsistent at op {index}")]
    AndUncomputeMismatch { index: usize },
    #[error("FREE of non-zero wire {wire} at op {index}")]
    FreeNonZero { wire: Wire, index: usize },
    #[error("input register {0} not restored")]
    InputNotRestored(String),
    #[error("no output register {0}")]
    MissingRegister(String),
}

/// Bit-sliced classical state over 64 lanes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub lanes: Vec<u64>,
}

impl State {
    pub fn zeros(width: usize) -> Self {
        State {
            lanes: vec![0; width],
        }
    }

    pub fn for_circuit(c: &Circuit) -> Self {
        Self::zeros(c.span())
    }

    pub fn get(&self, w: Wire, lane: usize) -> bool {
        self.lanes[w] >> lane & 1 == 1
    }

    pub fn set(&mut self, w: Wire, lane: usize, v: bool) {
        if v {
            self.lanes[w] |= 1 << lane;
        } else {
            self.lanes[w] &= !(1 << lane);
        }
    }

    /// Writes `bits` (bit `i` on `wires[i]`) into one lane.
    pub fn write(&mut self, wires: &[Wire], lane: usize, bits: &[bool]) {
        for (&w, &b) in wires.iter().zip(bits) {
            self.set(w, lane, b);
        }
    }

    pub fn read(&self, wires: &[Wire], lane: usize) -> Vec<bool> {
        wires.iter().map(|&w| self.get(w, lane)).collect()
    }

    pub fn write_u128(&mut self, wires: &[Wire], lane: usize, v: u128) {
        for (i, &w) in wires.iter().enumerate() {
            self.set(w, lane, v >> i & 1 == 1);
        }
    }

    pub fn read_u128(&self, wires: &[Wire], lane: usize) -> u128 {
        wires
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &w)| acc | (self.get(w, lane) as u128) << i)
    }
}

/// Runs `circuit` in place on `state`.
pub fn run(circuit: &Circuit, state: &mut State) -> Result<(), SimError> {
    if state.lanes.len() < circuit.span() {
        state.lanes.resize(circuit.span(), 0);
    }
    let s = &mut state.lanes;
    for (index, op) in circuit.ops().iter().enumerate() {
        match *op {
            Op::Gate(Gate::X(t)) => s[t] = !s[t],
            Op::Gate(Gate::Cnot(c, t)) => s[t] ^= s[c],
            Op::Gate(Gate::Toffoli(a, b, t)) => s[t] ^= s[a] & s[b],
            Op::Gate(Gate::And(a, b, t)) => {
                if s[t] != 0 {
                    return Err(SimError::AndTargetNonZero { index });
                }
                s[t] = s[a] & s[b];
            }
            Op::Gate(Gate::AndUncompute(a, b, t)) => {
                if s[t] != s[a] & s[b] {
                    return Err(SimError::AndUncomputeMismatch { index });
                }
                s[t] = 0;
            }
            Op::Alloc(w) => s[w] = 0,
            Op::Free(w) => {
                if s[w] != 0 {
                    return Err(SimError::FreeNonZero { wire: w, index });
                }
            }
        }
    }
    Ok(())
}

/// Runs a compute-copy-uncompute circuit and returns the lane values XORed
/// into output register `output`, checking that every input register is
/// restored.
pub fn run_xor_out(
    circuit: &Circuit,
    state: &mut State,
    output: &str,
) -> Result<Vec<u64>, SimError> {
    let out = circuit
        .output(output)
        .ok_or_else(|| SimError::MissingRegister(output.into()))?
        .wires
        .clone();
    let before_out: Vec<u64> = out.iter().map(|&w| state.lanes[w]).collect();
    let before_in: Vec<(String, Vec<u64>)> = circuit
        .inputs
        .iter()
        .map(|r| {
            (
                r.label.clone(),
                r.wires.iter().map(|&w| state.lanes[w]).collect(),
            )
        })
        .collect();
    run(circuit, state)?;
    for (label, vals) in before_in {
        let r = circuit.input(&label).expect("declared");
        if r.wires
            .iter()
            .zip(&vals)
            .any(|(&w, &v)| state.lanes[w] != v)
        {
            return Err(SimError::InputNotRestored(label));
        }
    }
    Ok(out
        .iter()
        .zip(before_out)
        .map(|(&w, b)| state.lanes[w] ^ b)
        .collect())
}

/// Hex rendering of a bit vector, least-significant wire first: bit `i` is
/// bit `i % 4` of hex digit `i / 4`, digits written in wire order.
pub fn bits_to_hex(bits: &[bool]) -> String {
    bits.chunks(4)
        .map(|c| {
            let v = c
                .iter()
                .enumerate()
                .fold(0u32, |a, (i, &b)| a | (b as u32) << i);
            char::from_digit(v, 16).expect("nibble")
        })
        .collect()
}

pub fn hex_to_bits(hex: &str, len: usize) -> Option<Vec<bool>> {
    let mut out = Vec::with_capacity(len);
    for ch in hex.chars() {
        let v = ch.to_digit(16)?;
        for i in 0..4 {
            out.push(v >> i & 1 == 1);
        }
    }
    if out.len() < len {
        return None;
    }
    if out[len..].iter().any(|&b| b) {
        return None;
    }
    out.truncate(len);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_lane(c: &Circuit, bits: &[bool]) -> Result<Vec<bool>, SimError> {
        let mut s = State::for_circuit(c);
        let ws: Vec<Wire> = (0..bits.len()).collect();
        s.write(&ws, 0, bits);
        run(c, &mut s)?;
        Ok(s.read(&ws, 0))
    }

    #[test]
    fn toffoli_truth_table() {
        let mut c = Circuit::with_width(3);
        c.toffoli(0, 1, 2);
        assert_eq!(
            one_lane(&c, &[true, true, false]).unwrap(),
            vec![true, true, true]
        );
        assert_eq!(
            one_lane(&c, &[true, false, false]).unwrap(),
            vec![true, false, false]
        );
    }

    #[test]
    fn and_on_nonzero_target_fails() {
        let mut c = Circuit::with_width(3);
        c.x(2);
        c.and(0, 1, 2);
        let e = one_lane(&c, &[true, true, false]).unwrap_err();
        assert_eq!(e, SimError::AndTargetNonZero { index: 1 });
        assert!(e.to_string().contains("AND target non-zero"));
    }

    #[test]
    fn and_uncompute_checks_product() {
        let mut c = Circuit::with_width(3);
        c.and_uncompute(0, 1, 2);
        assert!(one_lane(&c, &[true, true, false]).is_err());
        assert!(one_lane(&c, &[true, true, true]).is_ok());
    }

    #[test]
    fn free_requires_zero() {
        let mut c = Circuit::with_width(1);
        let a = c.alloc_one();
        c.cnot(0, a);
        c.free(&[a]);
        assert!(matches!(
            one_lane(&c, &[true]),
            Err(SimError::FreeNonZero { index: 2, .. })
        ));
        assert!(one_lane(&c, &[false]).is_ok());
    }

    #[test]
    fn xor_out_twice_returns_zero() {
        let mut c = Circuit::with_width(3);
        c.declare_input("x", &[0, 1]);
        c.declare_output("y", &[2]);
        c.toffoli(0, 1, 2);
        let mut s = State::for_circuit(&c);
        s.lanes[0] = 0b1100;
        s.lanes[1] = 0b1010;
        let d = run_xor_out(&c, &mut s, "y").unwrap();
        assert_eq!(d, vec![0b1000]);
        run_xor_out(&c, &mut s, "y").unwrap();
        assert_eq!(s.lanes[2], 0);
    }

    #[test]
    fn hex_is_lsb_first() {
        let bits = [true, false, false, false, false, true, false, false];
        assert_eq!(bits_to_hex(&bits), "12");
        assert_eq!(hex_to_bits("12", 8).unwrap(), bits);
        assert!(hex_to_bits("f", 2).is_none());
    }
}
