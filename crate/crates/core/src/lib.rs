//! Reversible circuits, bit-exact execution and resource estimation for
//! offline Simon attacks on Even-Mansour and FX constructions.

pub mod circuit;
pub mod cost;
pub mod estimator;
pub mod linalg;
pub mod primitives;
pub mod revsim;
pub mod simon;
pub mod verify;

pub use circuit::{Circuit, CircuitError, Gate, GateKind, Op, Wire};
pub use cost::{estimate, CostModel, GateCost, Resources};
pub use revsim::{run, run_xor_out, SimError, State};
