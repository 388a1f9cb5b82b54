//! Non-adiabatic geometric gates on exciton qubits: Hamiltonian models,
//! pulse sequences, propagation, Bloch-sphere geometry and gate synthesis.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod gates;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod propagate;
pub mod pulses;
pub mod simulate;

pub use error::{Error, ErrorKind, Result};
pub use gates::{run_gate, GateReport};
pub use linalg::{Operator, StateVector, C64};
pub use models::HamiltonianModel;
pub use pulses::{PulseSegment, PulseSequence};
pub use simulate::{simulate, Settings, Simulation};
