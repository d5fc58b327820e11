//! PSM protocols: the one-time-table baseline and the wrapper around a
//! decomposable randomized encoding.

use std::sync::Arc;

use smallvec::smallvec;

use super::{bits_for, Coin, Dre, Msg, Psm, PsmScheme, Resources};
use crate::boolfn::BoolFn;
use crate::descriptor::Source;
use crate::error::{budget, Result};

/// Largest `|Y|` for which the permutation coin is enumerated.
pub const MAX_TABLE_COLUMNS: u64 = 8;

/// Shared randomness is a permutation `pi` of Bob's inputs and a mask `m` of
/// `|Y|` bits. Alice sends `c[j] = f(x, pi^-1(j)) ^ m[j]` for every `j`, Bob
/// sends `(pi(y), m[pi(y)])`, and the referee reads off `c[pi(y)] ^ m[pi(y)]`.
#[derive(Debug)]
pub struct TablePsm {
    f: BoolFn,
    coins: Vec<Coin>,
}

pub fn psm_generic_table(f: &BoolFn) -> Result<Psm> {
    let cols = f.y_count();
    if cols > MAX_TABLE_COLUMNS {
        return Err(budget(format!(
            "table PSM enumerates {cols}! permutations; at most {MAX_TABLE_COLUMNS} columns supported"
        )));
    }
    let perms: u64 = (1..=cols).product();
    Ok(Arc::new(TablePsm { f: f.clone(), coins: vec![Coin::shared(perms), Coin::shared(1 << cols)] }))
}

/// Decodes a Lehmer index into `pi` with `pi[y]` the position of `y`.
fn permutation(mut index: u64, n: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let fact: u64 = (1..k as u64).product();
        let pick = (index / fact) as usize;
        index %= fact;
        order.push(pool.remove(pick));
    }
    // order[j] = pi^-1(j)
    let mut pi = vec![0; n];
    for (j, &y) in order.iter().enumerate() {
        pi[y] = j;
    }
    pi
}

impl PsmScheme for TablePsm {
    fn function(&self) -> &BoolFn {
        &self.f
    }

    fn coins(&self) -> &[Coin] {
        &self.coins
    }

    fn alice_message(&self, x: u64, r: &[u64]) -> Msg {
        let n = self.f.y_count() as usize;
        let pi = permutation(r[0], n);
        let mut c: Msg = smallvec![0; n];
        for (y, &j) in pi.iter().enumerate() {
            c[j] = (self.f.at(x, y as u64) as u32) ^ ((r[1] >> j) & 1) as u32;
        }
        c
    }

    fn bob_message(&self, y: u64, r: &[u64]) -> Msg {
        let j = permutation(r[0], self.f.y_count() as usize)[y as usize];
        smallvec![j as u32, ((r[1] >> j) & 1) as u32]
    }

    fn decode(&self, m0: &Msg, m1: &Msg) -> u64 {
        (m0[m1[0] as usize] ^ m1[1]) as u64
    }

    fn resources(&self) -> Resources {
        let cols = self.f.y_count();
        Resources {
            shared_random_bits: bits_for(self.coins[0].radix) + cols,
            alice_message_bits: cols,
            bob_message_bits: self.f.n_y() as u64 + 1,
            ..Resources::default()
        }
    }

    fn source(&self) -> Source {
        Source::PsmTable
    }
}

/// Alice sends the `x` part of the encoding, Bob the `y` part; same coins,
/// same message sizes.
#[derive(Debug)]
pub struct DrePsm {
    dre: Dre,
}

pub fn psm_from_dre(dre: Dre) -> Psm {
    Arc::new(DrePsm { dre })
}

impl PsmScheme for DrePsm {
    fn function(&self) -> &BoolFn {
        self.dre.function()
    }

    fn in_domain(&self, x: u64, y: u64) -> bool {
        self.dre.in_domain(x, y)
    }

    fn coins(&self) -> &[Coin] {
        self.dre.coins()
    }

    fn alice_message(&self, x: u64, r: &[u64]) -> Msg {
        self.dre.encode_x(x, r)
    }

    fn bob_message(&self, y: u64, r: &[u64]) -> Msg {
        self.dre.encode_y(y, r)
    }

    fn decode(&self, m0: &Msg, m1: &Msg) -> u64 {
        self.dre.decode(m0, m1)
    }

    fn resources(&self) -> Resources {
        self.dre.resources()
    }

    fn source(&self) -> Source {
        Source::PsmFromDre { dre: Box::new(self.dre.source()) }
    }
}

type MsgFn = dyn Fn(u64, &[u64]) -> Msg + Send + Sync;
type DecodeFn = dyn Fn(&Msg, &Msg) -> u64 + Send + Sync;

/// A hand-written PSM given by closures.
pub struct ClosurePsm {
    pub name: String,
    pub f: BoolFn,
    pub coins: Vec<Coin>,
    pub alice: Box<MsgFn>,
    pub bob: Box<MsgFn>,
    pub decode: Box<DecodeFn>,
    pub resources: Resources,
}

impl std::fmt::Debug for ClosurePsm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosurePsm").field("name", &self.name).finish_non_exhaustive()
    }
}

impl PsmScheme for ClosurePsm {
    fn function(&self) -> &BoolFn {
        &self.f
    }

    fn coins(&self) -> &[Coin] {
        &self.coins
    }

    fn alice_message(&self, x: u64, r: &[u64]) -> Msg {
        (self.alice)(x, r)
    }

    fn bob_message(&self, y: u64, r: &[u64]) -> Msg {
        (self.bob)(y, r)
    }

    fn decode(&self, m0: &Msg, m1: &Msg) -> u64 {
        (self.decode)(m0, m1)
    }

    fn resources(&self) -> Resources {
        self.resources
    }

    fn source(&self) -> Source {
        Source::Custom { name: self.name.clone() }
    }
}
