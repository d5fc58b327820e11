//! Small-register quantum simulation: dense pure states and density
//! operators, Pauli operators and the one-time pad, Bell measurements,
//! channels with their Choi matrices, and a sparse state for protocols whose
//! registers carry classical labels.

pub mod channel;
pub mod density;
pub mod gates;
pub mod pauli;
pub mod random;
pub mod sparse;
pub mod state;

pub use channel::{build_vf, BlockChoi, QChannel};
pub use density::{fidelity, trace_distance, DensityOp};
pub use num_complex::Complex64 as C64;
pub use pauli::{pad_average, pad_key, pauli_pad, Pauli, PauliString};
pub use sparse::SparseState;
pub use state::{BellBranch, MeasureMode, PureState, Register};

/// Largest number of qubits (log2 of the total dimension) a dense state may span.
pub const QUBIT_BUDGET: u32 = 14;

/// Tolerance for norms and traces.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance for Hermiticity, isometry and eigenvalue-sign checks.
pub const MATRIX_TOL: f64 = 1e-10;
/// Branches below this probability are dropped.
pub const BRANCH_CUTOFF: f64 = 1e-14;
