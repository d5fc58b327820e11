//! Garden-hose strategies: water-flow evaluation, verification, the generic
//! construction and exhaustive minimal-pipe search.
//!
//! Pipes are 0-indexed internally and 1-indexed in JSON.

mod json;
pub mod search;

use serde::{Deserialize, Serialize};

use crate::boolfn::BoolFn;
use crate::error::{invalid, Result};

pub use search::gh_search;

/// A set of disjoint pipe pairs on one side of the fence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    partner: Vec<Option<u32>>,
}

impl Matching {
    pub fn empty(pipes: u32) -> Self {
        Self { partner: vec![None; pipes as usize] }
    }

    pub fn from_pairs(pipes: u32, pairs: &[(u32, u32)]) -> Result<Self> {
        let mut m = Self::empty(pipes);
        for &(a, b) in pairs {
            if a >= pipes || b >= pipes {
                return Err(invalid(format!("pipe pair ({}, {}) outside 1..={pipes}", a + 1, b + 1)));
            }
            if a == b {
                return Err(invalid(format!("pipe {} connected to itself", a + 1)));
            }
            for end in [a, b] {
                if m.partner[end as usize].is_some() {
                    return Err(invalid(format!("pipe {} has two hoses on one side", end + 1)));
                }
            }
            m.partner[a as usize] = Some(b);
            m.partner[b as usize] = Some(a);
        }
        Ok(m)
    }

    pub fn pipes(&self) -> u32 {
        self.partner.len() as u32
    }

    pub fn partner(&self, pipe: u32) -> Option<u32> {
        self.partner[pipe as usize]
    }

    /// Pairs `(i, j)` with `i < j`, in increasing order of `i`.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.partner
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.filter(|&j| (i as u32) < j).map(|j| (i as u32, j)))
            .collect()
    }

    /// Pipes whose end on this side is free.
    pub fn unused(&self) -> Vec<u32> {
        (0..self.pipes()).filter(|&i| self.partner[i as usize].is_none()).collect()
    }

    fn padded(&self, pipes: u32) -> Self {
        let mut partner = self.partner.clone();
        partner.resize(pipes as usize, None);
        Self { partner }
    }
}

/// Alice's configuration for one input: tap pipe plus left-side hoses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AliceConfig {
    pub tap: u32,
    pub matching: Matching,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhStrategy {
    pipes: u32,
    alice: Vec<AliceConfig>,
    bob: Vec<Matching>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Direction of travel through a pipe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Dir {
    /// From Alice's end to Bob's end.
    ToBob,
    ToAlice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Hop {
    pub pipe: u32,
    pub dir: Dir,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhOutcome {
    pub side: Side,
    pub exit_pipe: u32,
    pub path: Vec<Hop>,
}

impl GhStrategy {
    pub fn new(pipes: u32, alice: Vec<AliceConfig>, bob: Vec<Matching>) -> Result<Self> {
        if pipes == 0 {
            return Err(invalid("a strategy needs at least one pipe"));
        }
        if !alice.len().is_power_of_two() || !bob.len().is_power_of_two() {
            return Err(invalid("strategy must list 2^n_x Alice and 2^n_y Bob configurations"));
        }
        for (x, a) in alice.iter().enumerate() {
            if a.tap >= pipes || a.matching.pipes() != pipes {
                return Err(invalid(format!("Alice configuration {x} does not fit {pipes} pipes")));
            }
            if a.matching.partner(a.tap).is_some() {
                return Err(invalid(format!("Alice configuration {x} hoses the tap pipe {}", a.tap + 1)));
            }
        }
        if let Some(y) = bob.iter().position(|b| b.pipes() != pipes) {
            return Err(invalid(format!("Bob configuration {y} does not fit {pipes} pipes")));
        }
        Ok(Self { pipes, alice, bob })
    }

    pub fn pipes(&self) -> u32 {
        self.pipes
    }

    pub fn n_x(&self) -> u32 {
        self.alice.len().trailing_zeros()
    }

    pub fn n_y(&self) -> u32 {
        self.bob.len().trailing_zeros()
    }

    pub fn alice(&self, x: u64) -> &AliceConfig {
        &self.alice[x as usize]
    }

    pub fn bob(&self, y: u64) -> &Matching {
        &self.bob[y as usize]
    }

    pub fn eval(&self, x: u64, y: u64) -> Result<GhOutcome> {
        let a =
            self.alice.get(x as usize).ok_or_else(|| crate::error::domain(format!("x = {x} outside the strategy")))?;
        let b =
            self.bob.get(y as usize).ok_or_else(|| crate::error::domain(format!("y = {y} outside the strategy")))?;
        Ok(flow(a, b))
    }

    /// First input where the spill side disagrees with `f`, if any.
    pub fn counterexample(&self, f: &BoolFn) -> Result<Option<(u64, u64)>> {
        if self.n_x() != f.n_x() || self.n_y() != f.n_y() {
            return Err(invalid(format!(
                "strategy is for {}+{} bits, function for {}+{}",
                self.n_x(),
                self.n_y(),
                f.n_x(),
                f.n_y()
            )));
        }
        Ok(f.inputs().find(|&(x, y)| (flow(self.alice(x), self.bob(y)).side == Side::Right) != f.at(x, y)))
    }

    pub fn verify(&self, f: &BoolFn) -> bool {
        matches!(self.counterexample(f), Ok(None))
    }

    /// The same strategy with `extra` untouched pipes appended.
    pub fn padded(&self, extra: u32) -> Self {
        let pipes = self.pipes + extra;
        Self {
            pipes,
            alice: self.alice.iter().map(|a| AliceConfig { tap: a.tap, matching: a.matching.padded(pipes) }).collect(),
            bob: self.bob.iter().map(|b| b.padded(pipes)).collect(),
        }
    }
}

/// Water enters the tap pipe at Alice's end; each end either continues
/// through a hose into its partner pipe or spills.
pub fn flow(a: &AliceConfig, bob: &Matching) -> GhOutcome {
    let m = bob.pipes() as usize;
    let mut path = Vec::with_capacity(2 * m);
    let mut pipe = a.tap;
    loop {
        path.push(Hop { pipe, dir: Dir::ToBob });
        match bob.partner(pipe) {
            None => return GhOutcome { side: Side::Right, exit_pipe: pipe, path },
            Some(next) => pipe = next,
        }
        path.push(Hop { pipe, dir: Dir::ToAlice });
        match a.matching.partner(pipe) {
            Some(next) if pipe != a.tap => pipe = next,
            _ => return GhOutcome { side: Side::Left, exit_pipe: pipe, path },
        }
        debug_assert!(path.len() <= 2 * m, "water path revisits a pipe end");
    }
}

/// The `2^(n_x+1)`-pipe strategy: pipes `i` and `2^n_x + i` form a pair,
/// Alice taps pipe `x`, Bob joins pair `i` exactly when `f(i, y) = 0`.
pub fn gh_generic(f: &BoolFn) -> Result<GhStrategy> {
    if f.n_x() > 16 {
        return Err(crate::error::budget("generic strategy needs 2^(n_x+1) pipes"));
    }
    let half = 1u32 << f.n_x();
    let pipes = 2 * half;
    let alice = (0..half).map(|x| AliceConfig { tap: x, matching: Matching::empty(pipes) }).collect();
    let bob = (0..f.y_count())
        .map(|y| {
            let pairs: Vec<(u32, u32)> = (0..half).filter(|&i| !f.at(i as u64, y)).map(|i| (i, half + i)).collect();
            Matching::from_pairs(pipes, &pairs)
        })
        .collect::<Result<_>>()?;
    GhStrategy::new(pipes, alice, bob)
}

/// Hand-written 3-pipe strategies for the one-bit AND and XOR functions.
pub mod library {
    use super::*;

    fn alice(tap: u32) -> AliceConfig {
        AliceConfig { tap: tap - 1, matching: Matching::empty(3) }
    }

    fn bob(pairs: &[(u32, u32)]) -> Matching {
        let zero: Vec<(u32, u32)> = pairs.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        Matching::from_pairs(3, &zero).expect("library matchings are valid")
    }

    /// `x=0` taps pipe 2, `x=1` taps pipe 1; `y=0` joins 1-2, `y=1` joins 2-3.
    pub fn and1() -> GhStrategy {
        GhStrategy::new(3, vec![alice(2), alice(1)], vec![bob(&[(1, 2)]), bob(&[(2, 3)])]).expect("valid strategy")
    }

    /// `x` taps pipe `x+1`; `y=0` joins 1-3, `y=1` joins 2-3.
    pub fn xor1() -> GhStrategy {
        GhStrategy::new(3, vec![alice(1), alice(2)], vec![bob(&[(1, 3)]), bob(&[(2, 3)])]).expect("valid strategy")
    }
}
