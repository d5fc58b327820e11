//! Quantum protocols for non-local computation: conditional disclosure of
//! quantum secrets (CDQS), f-routing and private simultaneous quantum
//! messages (PSQM), the compilers between them and their simulation-based
//! verifiers.
//!
//! A qubit secret `Q` starts maximally entangled with a reference `Ref`.
//! Correctness compares the decoded pair `(Ref, Q')` with `|Phi+>`;
//! security measures how far the adversary's view is from decoupled from `Ref`.

pub mod cdqs;
pub mod psqm;
pub mod purified;
pub mod routing;
pub mod verify;

use serde::{Deserialize, Serialize};

use crate::boolfn::BoolFn;
use crate::classical::Cds;
use crate::classical::Psm;
use crate::descriptor::{KeyPolicy, Source};
use crate::gardenhose::{GhStrategy, Side};

pub use cdqs::{cdqs_from_cds, cdqs_from_cds_with_key};
pub use psqm::{cdqs_from_psqm, psqm_from_psm, TwoSidedPsmCds};
pub use purified::{cdqs_from_frouting, frouting_from_cdqs, otp_reconstruct_left, MessageBound};
pub use routing::{frouting_constant, frouting_from_gh, pauli_frame, BellSite};
pub use verify::{verify_cdqs, verify_frouting, verify_psqm, InputVerdict, QKind, QVerificationReport, QVerifyOptions};

/// Resource block of a quantum protocol.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QResources {
    pub epr_pairs: u64,
    pub key_bits: u64,
    /// Every message register counted in qubits, classical bits included.
    pub message_qubits: u64,
    /// Classical random bits (shared and private) beyond the key.
    pub random_bits: u64,
    /// Qubits of entangled resource state once shared randomness is made coherent.
    pub resource_qubits: u64,
}

#[derive(Clone, Debug)]
pub enum CdqsKind {
    /// Alice pads `Q` with a 2-bit key that a CDS discloses to the referee.
    OneTimePad { cds: Cds, key: KeyPolicy },
    /// The referee receives everything Bob holds after the routing round.
    Routing(Box<FRouting>),
}

#[derive(Clone, Debug)]
pub struct CdqsProtocol {
    pub function: BoolFn,
    pub kind: CdqsKind,
    pub source: Source,
    pub resources: QResources,
}

#[derive(Clone, Debug)]
pub enum FRoutingKind {
    /// Teleportation along the water path of a garden-hose strategy.
    GardenHose { strategy: GhStrategy },
    /// A pad-based CDQS with its randomness held coherently: Bob receives
    /// the referee's registers, Alice receives the purification.
    Purified { cdqs: CdqsProtocol },
    /// Always sends `Q` to one side, whatever `f` says.
    Constant(Side),
}

#[derive(Clone, Debug)]
pub struct FRouting {
    pub function: BoolFn,
    pub kind: FRoutingKind,
    pub source: Source,
    pub resources: QResources,
    /// Message accounting against `4 (n_M + n_E)` for routings built from a CDQS.
    pub bound: Option<MessageBound>,
}

/// Classical messages carried as computational-basis states.
#[derive(Clone, Debug)]
pub struct PsqmProtocol {
    pub function: BoolFn,
    pub psm: Psm,
    pub source: Source,
    pub resources: QResources,
}

/// The side that must end up holding `Q`: Bob (right) iff `f(x, y) = 1`.
pub fn target_side(value: bool) -> Side {
    if value {
        Side::Right
    } else {
        Side::Left
    }
}
