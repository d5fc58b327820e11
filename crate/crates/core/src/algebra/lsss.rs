use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::PrimeField;
use super::linalg::in_span;
use super::span::SpanProgram;
use crate::error::{budget, invalid, Result};

/// Enumeration cap for exact privacy checks.
pub const PRIVACY_BUDGET: u64 = 1 << 24;

/// Linear secret sharing induced by a span program: the dealer picks `u` with
/// `<t, u> = s` and row `i` receives `<M_i, u>`.
///
/// `u` is parameterized by the coordinates other than the first `j` with
/// `t_j != 0`; those are uniform and `u_j` is solved for.
#[derive(Clone, Debug)]
pub struct LsssScheme {
    program: SpanProgram,
    pivot: usize,
}

impl LsssScheme {
    pub fn new(program: SpanProgram) -> Self {
        let pivot = program.target().iter().position(|&v| v != 0).expect("span program targets are nonzero");
        Self { program, pivot }
    }

    pub fn program(&self) -> &SpanProgram {
        &self.program
    }

    pub fn field(&self) -> PrimeField {
        self.program.field()
    }

    /// Free coordinates of `u`.
    pub fn free_dims(&self) -> usize {
        self.program.width() - 1
    }

    /// `p^(e-1)`, or `None` on overflow.
    pub fn randomness_states(&self) -> Option<u64> {
        self.field().p().checked_pow(self.free_dims() as u32)
    }

    /// Bits of one share times the number of rows.
    pub fn total_share_bits(&self) -> u64 {
        self.program.size() as u64 * self.field().element_bits() as u64
    }

    /// The dealer vector for secret `s` and free coordinates `free`.
    pub fn dealer_vector(&self, s: u64, free: &[u64]) -> Vec<u64> {
        let f = self.field();
        let t = self.program.target();
        let mut u = Vec::with_capacity(t.len());
        let mut rest = f.reduce(s);
        let mut it = free.iter();
        for (k, &tk) in t.iter().enumerate() {
            if k == self.pivot {
                u.push(0);
            } else {
                let v = f.reduce(*it.next().expect("free coordinate count matches"));
                rest = f.sub(rest, f.mul(tk, v));
                u.push(v);
            }
        }
        u[self.pivot] = f.mul(rest, f.inv(t[self.pivot]).expect("pivot is nonzero"));
        u
    }

    /// Free coordinates for the `index`-th randomness state (base-`p` digits).
    pub fn free_from_index(&self, mut index: u64) -> Vec<u64> {
        let p = self.field().p();
        (0..self.free_dims())
            .map(|_| {
                let d = index % p;
                index /= p;
                d
            })
            .collect()
    }

    pub fn shares_with(&self, s: u64, free: &[u64]) -> Vec<u64> {
        let u = self.dealer_vector(s, free);
        let f = self.field();
        self.program.rows().iter().map(|r| f.dot(r, &u)).collect()
    }

    /// Shares of `s` with randomness drawn from a generator seeded by `seed`.
    pub fn share(&self, s: u64, seed: u64) -> Result<Vec<u64>> {
        let p = self.field().p();
        if s >= p {
            return Err(crate::error::domain(format!("secret {s} outside Z_{p}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let free: Vec<u64> = (0..self.free_dims()).map(|_| rng.random_range(0..p)).collect();
        Ok(self.shares_with(s, &free))
    }

    /// Recombination coefficients for `subset`, if it is authorized.
    pub fn recombination(&self, subset: &[usize]) -> Option<Vec<u64>> {
        let rows: Vec<Vec<u64>> = subset.iter().map(|&i| self.program.rows()[i].clone()).collect();
        in_span(&self.field(), &rows, self.program.target())
    }

    /// Recovers the secret from the shares of `subset` (listed in the same order).
    pub fn reconstruct(&self, subset: &[usize], shares: &[u64]) -> Result<Option<u64>> {
        if subset.len() != shares.len() {
            return Err(invalid(format!("{} rows but {} shares", subset.len(), shares.len())));
        }
        if let Some(&i) = subset.iter().find(|&&i| i >= self.program.size()) {
            return Err(invalid(format!("row {i} outside the scheme")));
        }
        Ok(self.recombination(subset).map(|l| self.field().dot(&l, shares)))
    }

    /// True iff the joint distribution of the shares in `subset` is the same
    /// for every secret, decided by enumerating all randomness.
    pub fn privacy_check(&self, subset: &[usize]) -> Result<bool> {
        let p = self.field().p();
        let states = self
            .randomness_states()
            .filter(|n| n.saturating_mul(p) <= PRIVACY_BUDGET)
            .ok_or_else(|| budget(format!("privacy check over Z_{p} needs more than {PRIVACY_BUDGET} states")))?;
        let histogram = |s: u64| {
            let mut h: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
            for idx in 0..states {
                let all = self.shares_with(s, &self.free_from_index(idx));
                *h.entry(subset.iter().map(|&i| all[i]).collect()).or_default() += 1;
            }
            h
        };
        let reference = histogram(0);
        Ok((1..p).all(|s| histogram(s) == reference))
    }
}
