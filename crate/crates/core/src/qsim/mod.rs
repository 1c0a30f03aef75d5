//! Dense statevector simulation of the data-encoding ansatz and the
//! compute-uncompute overlap circuit.

mod ansatz;
mod circuit;
mod gate;
mod state;

pub use ansatz::{ansatz_gate_counts, build_ansatz_circuit, build_overlap_circuit, AnsatzParams};
pub use circuit::{run_circuit, run_with_tangents, Circuit, GateCounts, ParamBinding};
pub use gate::{GateOp, Pauli};
pub use state::{apply_gate, zero_probability, StateVector};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 12;
