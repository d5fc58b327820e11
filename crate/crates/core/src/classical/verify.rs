//! Exhaustive verification of classical protocols.
//!
//! Correctness is the exact worst-case decoding failure probability. Security
//! is measured pairwise: `delta_pair` is the largest L1 distance between the
//! referee's view under two secrets (CDS) or two inputs with the same output
//! (PSM/DRE). The best simulator's error lies in `[delta_pair / 2, delta_pair]`;
//! the uniform mixture of the compared views is evaluated as a concrete
//! simulator and must land inside that bracket.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use smallvec::SmallVec;

use super::dre::psm_from_dre;
use super::{coin_states, for_each_coins, CoinOwner, Dre, Holder, Msg, Ratio, Resources};
use super::{CdsScheme, PsmScheme};
use crate::error::{budget, Result};

/// Default cap on `|X| * |Y| * |secrets| * |coin states|`.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Secret { x: u64, y: u64, s: u64 },
    SecretPair { x: u64, y: u64, s: u64, s2: u64 },
    Input { x: u64, y: u64 },
    InputPair { x: u64, y: u64, x2: u64, y2: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalKind {
    Cds,
    Psm,
    Dre,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kind: ClassicalKind,
    pub function: String,
    pub eps_hat: Ratio,
    pub correctness_witness: Option<Witness>,
    pub delta_pair: Ratio,
    pub security_witness: Option<Witness>,
    /// `[delta_pair / 2, delta_pair]`.
    pub delta_bracket: [f64; 2],
    /// Error of the uniform-mixture simulator.
    pub midpoint_delta: Ratio,
    pub midpoint_within_pair: bool,
    /// Bob's message ignores what he must not see (CDS only).
    pub bob_view_ok: bool,
    pub bob_view_witness: Option<Witness>,
    pub resources: Resources,
    pub randomness_states: u64,
    pub states_enumerated: u64,
}

impl VerificationReport {
    pub fn is_perfect(&self) -> bool {
        self.eps_hat.is_zero() && self.delta_pair.is_zero() && self.bob_view_ok && self.midpoint_within_pair
    }
}

type Key = SmallVec<[u32; 16]>;
type Histogram = Vec<(Key, u64)>;

fn joint_key(m0: &Msg, m1: &Msg) -> Key {
    let mut k = Key::with_capacity(m0.len() + m1.len() + 1);
    k.push(m0.len() as u32);
    k.extend_from_slice(m0);
    k.extend_from_slice(m1);
    k
}

fn histogram(mut keys: Vec<Key>) -> Histogram {
    keys.sort_unstable();
    let mut out: Histogram = Vec::new();
    for k in keys {
        match out.last_mut() {
            Some((last, n)) if *last == k => *n += 1,
            _ => out.push((k, 1)),
        }
    }
    out
}

/// `sum_m |a(m) - b(m)|` over raw counts.
fn l1_counts(a: &Histogram, b: &Histogram) -> u64 {
    let (mut i, mut j, mut total) = (0, 0, 0u64);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                total += a[i].1;
                i += 1;
            }
            Ordering::Greater => {
                total += b[j].1;
                j += 1;
            }
            Ordering::Equal => {
                total += a[i].1.abs_diff(b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    total
}

/// Largest pairwise distance `(count, i, j)` and the mixture simulator's worst
/// distance `(count, denominator scale)` for a group of histograms.
struct GroupStats {
    pair: (u64, usize, usize),
    mid: u64,
    k: u64,
}

fn group_stats(hists: &[&Histogram]) -> GroupStats {
    let mut pair = (0, 0, 0);
    for i in 0..hists.len() {
        for j in (i + 1)..hists.len() {
            let d = l1_counts(hists[i], hists[j]);
            if d > pair.0 {
                pair = (d, i, j);
            }
        }
    }
    let k = hists.len() as u64;
    let mut table: BTreeMap<&Key, Vec<u64>> = BTreeMap::new();
    for (i, h) in hists.iter().enumerate() {
        for (key, n) in h.iter() {
            table.entry(key).or_insert_with(|| vec![0; hists.len()])[i] = *n;
        }
    }
    let mid = (0..hists.len())
        .map(|i| {
            table
                .values()
                .map(|counts| {
                    let sum: u64 = counts.iter().sum();
                    sum.abs_diff(k * counts[i])
                })
                .sum::<u64>()
        })
        .max()
        .unwrap_or(0);
    GroupStats { pair, mid, k }
}

fn check_budget(what: &str, states: Option<u64>, options: &VerifyOptions) -> Result<u64> {
    states
        .filter(|&n| n <= options.budget)
        .ok_or_else(|| budget(format!("{what} needs more than {} enumerated states", options.budget)))
}

struct CdsInputResult {
    failures: Option<(u64, u64)>,
    pair: Option<(u64, u64, u64)>,
    mid: Option<(u64, u64)>,
}

pub fn verify_cds(p: &dyn CdsScheme, options: &VerifyOptions) -> Result<VerificationReport> {
    let f = p.function();
    let coins = p.coins();
    let n_secrets = p.secret_values();
    let r_states = coin_states(coins);
    let total = r_states.and_then(|r| r.checked_mul(n_secrets)).and_then(|n| n.checked_mul(f.x_count() * f.y_count()));
    let total = check_budget("CDS verification", total, options)?;
    let r_states = r_states.expect("checked above");

    let inputs: Vec<(u64, u64)> = f.inputs().filter(|&(x, y)| p.in_domain(x, y)).collect();
    let per_input: Vec<CdsInputResult> = inputs
        .par_iter()
        .map(|&(x, y)| {
            if f.at(x, y) {
                let mut worst = (0u64, 0u64);
                for s in 0..n_secrets {
                    let mut failures = 0;
                    for_each_coins(coins, |r| {
                        let m0 = p.alice_message(x, s, r);
                        let m1 = p.bob_message(y, s, r);
                        failures += (p.decode(x, y, &m0, &m1) != s) as u64;
                    });
                    if failures > worst.0 {
                        worst = (failures, s);
                    }
                }
                CdsInputResult { failures: Some(worst), pair: None, mid: None }
            } else {
                let hists: Vec<Histogram> = (0..n_secrets)
                    .map(|s| {
                        let mut keys = Vec::with_capacity(r_states as usize);
                        for_each_coins(coins, |r| {
                            keys.push(joint_key(&p.alice_message(x, s, r), &p.bob_message(y, s, r)));
                        });
                        histogram(keys)
                    })
                    .collect();
                let refs: Vec<&Histogram> = hists.iter().collect();
                let g = group_stats(&refs);
                CdsInputResult {
                    failures: None,
                    pair: Some((g.pair.0, g.pair.1 as u64, g.pair.2 as u64)),
                    mid: Some((g.mid, g.k)),
                }
            }
        })
        .collect();

    let mut eps = (0u64, None);
    let mut delta = (0u64, None);
    let mut mid = Ratio::zero();
    for (&(x, y), res) in inputs.iter().zip(&per_input) {
        if let Some((n, s)) = res.failures {
            if n > eps.0 {
                eps = (n, Some(Witness::Secret { x, y, s }));
            }
        }
        if let Some((d, s, s2)) = res.pair {
            if d > delta.0 {
                delta = (d, Some(Witness::SecretPair { x, y, s, s2 }));
            }
        }
        if let Some((m, k)) = res.mid {
            let r = Ratio::new(m, k * r_states);
            if r.cmp_exact(&mid) == Ordering::Greater {
                mid = r;
            }
        }
    }

    let (bob_view_ok, bob_view_witness) = check_bob_view(p);
    let delta_pair = Ratio::new(delta.0, r_states);
    Ok(VerificationReport {
        kind: ClassicalKind::Cds,
        function: f.label(),
        eps_hat: Ratio::new(eps.0, r_states),
        correctness_witness: eps.1,
        delta_bracket: [delta_pair.half().value(), delta_pair.value()],
        midpoint_within_pair: mid.cmp_exact(&delta_pair) != Ordering::Greater,
        delta_pair,
        security_witness: delta.1,
        midpoint_delta: mid,
        bob_view_ok,
        bob_view_witness,
        resources: p.resources(),
        randomness_states: r_states,
        states_enumerated: total,
    })
}

/// Bob's message may not change with Alice's private coins, nor with the
/// secret unless Bob holds it too.
fn check_bob_view(p: &dyn CdsScheme) -> (bool, Option<Witness>) {
    let f = p.function();
    let coins = p.coins();
    let secret_free = p.holder() == Holder::Alice;
    for y in 0..f.y_count() {
        let mut bad = None;
        for_each_coins(coins, |r| {
            if bad.is_some() {
                return;
            }
            let blind: Vec<u64> =
                r.iter().zip(coins).map(|(&v, c)| if c.owner == CoinOwner::Alice { 0 } else { v }).collect();
            for s in 0..p.secret_values() {
                let reference_s = if secret_free { 0 } else { s };
                if p.bob_message(y, s, r) != p.bob_message(y, reference_s, &blind) {
                    bad = Some(Witness::Secret { x: 0, y, s });
                    return;
                }
            }
        });
        if bad.is_some() {
            return (false, bad);
        }
    }
    (true, None)
}

pub fn verify_psm(p: &dyn PsmScheme, options: &VerifyOptions) -> Result<VerificationReport> {
    verify_psm_as(p, options, ClassicalKind::Psm)
}

pub fn verify_dre(d: &Dre, options: &VerifyOptions) -> Result<VerificationReport> {
    let psm = psm_from_dre(d.clone());
    let mut report = verify_psm_as(psm.as_ref(), options, ClassicalKind::Dre)?;
    report.resources = d.resources();
    Ok(report)
}

fn verify_psm_as(p: &dyn PsmScheme, options: &VerifyOptions, kind: ClassicalKind) -> Result<VerificationReport> {
    let f = p.function();
    let coins = p.coins();
    let r_states = coin_states(coins);
    let total = r_states.and_then(|r| r.checked_mul(f.x_count() * f.y_count()));
    let total = check_budget("PSM verification", total, options)?;
    let r_states = r_states.expect("checked above");

    let inputs: Vec<(u64, u64)> = f.inputs().filter(|&(x, y)| p.in_domain(x, y)).collect();
    let per_input: Vec<(u64, Histogram)> = inputs
        .par_iter()
        .map(|&(x, y)| {
            let want = p.output(x, y);
            let mut failures = 0;
            let mut keys = Vec::with_capacity(r_states as usize);
            for_each_coins(coins, |r| {
                let m0 = p.alice_message(x, r);
                let m1 = p.bob_message(y, r);
                failures += (p.decode(&m0, &m1) != want) as u64;
                keys.push(joint_key(&m0, &m1));
            });
            (failures, histogram(keys))
        })
        .collect();

    let mut eps = (0u64, None);
    for (&(x, y), (n, _)) in inputs.iter().zip(&per_input) {
        if *n > eps.0 {
            eps = (*n, Some(Witness::Input { x, y }));
        }
    }

    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, &(x, y)) in inputs.iter().enumerate() {
        groups.entry(p.output(x, y)).or_default().push(i);
    }
    let mut delta = (0u64, None);
    let mut mid = Ratio::zero();
    for members in groups.values() {
        let hists: Vec<&Histogram> = members.iter().map(|&i| &per_input[i].1).collect();
        let g = group_stats(&hists);
        if g.pair.0 > delta.0 {
            let (a, b) = (inputs[members[g.pair.1]], inputs[members[g.pair.2]]);
            delta = (g.pair.0, Some(Witness::InputPair { x: a.0, y: a.1, x2: b.0, y2: b.1 }));
        }
        let r = Ratio::new(g.mid, g.k * r_states);
        if r.cmp_exact(&mid) == Ordering::Greater {
            mid = r;
        }
    }

    let delta_pair = Ratio::new(delta.0, r_states);
    Ok(VerificationReport {
        kind,
        function: f.label(),
        eps_hat: Ratio::new(eps.0, r_states),
        correctness_witness: eps.1,
        delta_bracket: [delta_pair.half().value(), delta_pair.value()],
        midpoint_within_pair: mid.cmp_exact(&delta_pair) != Ordering::Greater,
        delta_pair,
        security_witness: delta.1,
        midpoint_delta: mid,
        bob_view_ok: true,
        bob_view_witness: None,
        resources: p.resources(),
        randomness_states: r_states,
        states_enumerated: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use smallvec::smallvec;

    fn h(entries: &[(&[u32], u64)]) -> Histogram {
        entries.iter().map(|(k, n)| (Key::from_slice(k), *n)).collect()
    }

    #[test]
    fn l1_merges_sorted_supports() {
        let a = h(&[(&[0], 2), (&[1], 2)]);
        let b = h(&[(&[1], 1), (&[2], 3)]);
        assert_eq!(l1_counts(&a, &b), 2 + 1 + 3);
        assert_eq!(l1_counts(&a, &a), 0);
    }

    #[test]
    fn mixture_simulator_sits_in_bracket() {
        let a = h(&[(&[0], 4)]);
        let b = h(&[(&[1], 4)]);
        let g = group_stats(&[&a, &b]);
        assert_eq!(g.pair.0, 8);
        // mixture is half/half: distance 1 from each point mass
        assert_eq!(Ratio::new(g.mid, g.k * 4), Ratio::new(1, 1));
    }

    #[test]
    fn joint_key_separates_boundaries() {
        let a: Msg = smallvec![1, 2];
        let b: Msg = smallvec![3];
        let c: Msg = smallvec![1];
        let d: Msg = smallvec![2, 3];
        assert_ne!(joint_key(&a, &b), joint_key(&c, &d));
    }
}
