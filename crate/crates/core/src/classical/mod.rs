//! Classical CDS, PSM and decomposable randomized encodings: protocol
//! interfaces, the compilers between them, and exhaustive verifiers.
//!
//! Randomness is a list of independent uniform coins with explicit radices,
//! so every verifier can walk the full joint distribution.

pub mod cds;
pub mod dre;
pub mod psm;
mod ratio;
pub mod verify;

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::boolfn::BoolFn;
use crate::descriptor::Source;

pub use ratio::Ratio;
pub use verify::{verify_cds, verify_dre, verify_psm, VerificationReport, VerifyOptions};

/// A protocol message: a short string of symbols.
pub type Msg = SmallVec<[u32; 8]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinOwner {
    /// Known to both parties.
    Shared,
    /// Known to Alice only.
    Alice,
}

/// A uniform random value in `0..radix`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coin {
    pub radix: u64,
    pub owner: CoinOwner,
}

impl Coin {
    pub fn shared(radix: u64) -> Self {
        Self { radix, owner: CoinOwner::Shared }
    }

    pub fn private(radix: u64) -> Self {
        Self { radix, owner: CoinOwner::Alice }
    }

    pub fn bits(&self) -> u64 {
        bits_for(self.radix)
    }
}

/// `ceil(log2(n))`, the bits needed to name one of `n` values.
pub fn bits_for(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

/// Number of joint coin states, or `None` on overflow.
pub fn coin_states(coins: &[Coin]) -> Option<u64> {
    coins.iter().try_fold(1u64, |acc, c| acc.checked_mul(c.radix))
}

/// Calls `visit` on every joint coin value, first coin fastest.
pub fn for_each_coins(coins: &[Coin], mut visit: impl FnMut(&[u64])) {
    if coins.iter().any(|c| c.radix == 0) {
        return;
    }
    let mut current = vec![0u64; coins.len()];
    loop {
        visit(&current);
        let mut k = 0;
        loop {
            if k == coins.len() {
                return;
            }
            current[k] += 1;
            if current[k] == coins[k].radix {
                current[k] = 0;
                k += 1;
            } else {
                break;
            }
        }
    }
}

/// Which parties know the secret.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Holder {
    Alice,
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Resources {
    pub shared_random_bits: u64,
    pub private_random_bits: u64,
    pub alice_message_bits: u64,
    pub bob_message_bits: u64,
    pub secret_bits: u64,
}

impl Resources {
    pub fn from_coins(coins: &[Coin]) -> Self {
        let mut r = Resources::default();
        for c in coins {
            match c.owner {
                CoinOwner::Shared => r.shared_random_bits += c.bits(),
                CoinOwner::Alice => r.private_random_bits += c.bits(),
            }
        }
        r
    }

    pub fn communication_bits(&self) -> u64 {
        self.alice_message_bits + self.bob_message_bits
    }
}

/// Conditional disclosure of secrets: the referee learns `s` iff `f(x, y) = 1`.
pub trait CdsScheme: Debug + Send + Sync {
    fn function(&self) -> &BoolFn;

    fn in_domain(&self, _x: u64, _y: u64) -> bool {
        true
    }

    /// Number of secret values; secrets are `0..secret_values()`.
    fn secret_values(&self) -> u64;

    fn holder(&self) -> Holder;

    fn coins(&self) -> &[Coin];

    fn alice_message(&self, x: u64, s: u64, coins: &[u64]) -> Msg;

    /// Must not depend on Alice's private coins, nor on `s` when only Alice
    /// holds the secret; the verifier checks both.
    fn bob_message(&self, y: u64, s: u64, coins: &[u64]) -> Msg;

    fn decode(&self, x: u64, y: u64, m0: &Msg, m1: &Msg) -> u64;

    fn resources(&self) -> Resources;

    fn source(&self) -> Source;
}

/// Private simultaneous messages: the referee learns `output(x, y)` and
/// nothing else. All coins are shared.
pub trait PsmScheme: Debug + Send + Sync {
    fn function(&self) -> &BoolFn;

    fn in_domain(&self, _x: u64, _y: u64) -> bool {
        true
    }

    fn output(&self, x: u64, y: u64) -> u64 {
        self.function().at(x, y) as u64
    }

    fn coins(&self) -> &[Coin];

    fn alice_message(&self, x: u64, coins: &[u64]) -> Msg;

    fn bob_message(&self, y: u64, coins: &[u64]) -> Msg;

    fn decode(&self, m0: &Msg, m1: &Msg) -> u64;

    fn resources(&self) -> Resources;

    fn source(&self) -> Source;
}

/// A randomized encoding split into an `x` part and a `y` part.
pub trait DreScheme: Debug + Send + Sync {
    fn function(&self) -> &BoolFn;

    fn in_domain(&self, _x: u64, _y: u64) -> bool {
        true
    }

    fn coins(&self) -> &[Coin];

    fn encode_x(&self, x: u64, coins: &[u64]) -> Msg;

    fn encode_y(&self, y: u64, coins: &[u64]) -> Msg;

    fn decode(&self, ex: &Msg, ey: &Msg) -> u64;

    fn resources(&self) -> Resources;

    fn source(&self) -> Source;
}

pub type Cds = Arc<dyn CdsScheme>;
pub type Psm = Arc<dyn PsmScheme>;
pub type Dre = Arc<dyn DreScheme>;
