//! Finite fields, span programs, branching programs and the linear secret
//! sharing schemes they induce.

pub mod branching;
pub mod field;
pub mod linalg;
pub mod lsss;
pub mod span;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use branching::{BranchingProgram, EdgeLabel};
pub use field::{euler_qr, is_prime, PrimeField};
pub use linalg::in_span;
pub use lsss::LsssScheme;
pub use span::SpanProgram;

/// Input literal `z_var = bit`, with variables numbered from 1.
///
/// For a two-party function variables `1..=n_x` are the bits of `x`
/// (least significant first) and `n_x+1..=n_x+n_y` the bits of `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: u32,
    #[serde(serialize_with = "ser_bit", deserialize_with = "de_bit")]
    pub bit: bool,
}

impl Literal {
    pub fn new(var: u32, bit: bool) -> Self {
        Self { var, bit }
    }

    pub fn holds(&self, z: &[bool]) -> bool {
        z[self.var as usize - 1] == self.bit
    }
}

fn ser_bit<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u8(*b as u8)
}

fn de_bit<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
    match u8::deserialize(d)? {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(serde::de::Error::custom(format!("bit must be 0 or 1, got {other}"))),
    }
}

/// Spreads a two-party input into the variable string `z_1 .. z_{n_x+n_y}`.
pub fn literal_string(x: u64, y: u64, n_x: u32, n_y: u32) -> Vec<bool> {
    (0..n_x).map(|k| (x >> k) & 1 == 1).chain((0..n_y).map(|k| (y >> k) & 1 == 1)).collect()
}
