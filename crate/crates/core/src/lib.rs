//! Compilers and exact verifiers for two-party information-theoretic
//! protocols: conditional disclosure of secrets (CDS), private simultaneous
//! messages (PSM), decomposable randomized encodings, their quantum
//! counterparts (CDQS, PSQM) and f-routing, along with the garden-hose,
//! span-program and branching-program models they are compiled from.

pub mod algebra;
pub mod boolfn;
pub mod classical;
pub mod descriptor;
pub mod error;
pub mod gardenhose;
pub mod nlqc;
pub mod quantum;

pub use boolfn::BoolFn;
pub use error::{Error, Result};
