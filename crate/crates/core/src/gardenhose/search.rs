//! Exhaustive search for a strategy with the fewest pipes.
//!
//! Bob's configuration for `y = 0` is fixed up to pipe relabeling (only the
//! number of hoses matters), the remaining Bob configurations are enumerated
//! in full, and for each such tuple every `x` just needs some Alice
//! configuration whose spill pattern across `y` equals the row `f(x, .)`.

use rayon::prelude::*;

use super::{flow, AliceConfig, GhStrategy, Matching, Side};
use crate::boolfn::BoolFn;
use crate::error::{budget, Result};

/// Largest number of Bob configuration tuples examined at one pipe count.
pub const SEARCH_BUDGET: u64 = 1 << 24;

/// All partial matchings on `points`, in a fixed recursive order.
fn matchings(pipes: u32, points: &[u32]) -> Vec<Matching> {
    fn go(pipes: u32, rest: &[u32], acc: &mut Vec<(u32, u32)>, out: &mut Vec<Matching>) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(Matching::from_pairs(pipes, acc).expect("generated pairs are disjoint"));
            return;
        };
        go(pipes, tail, acc, out);
        for (k, &other) in tail.iter().enumerate() {
            let mut remaining = tail.to_vec();
            remaining.remove(k);
            acc.push((first, other));
            go(pipes, &remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(pipes, points, &mut Vec::new(), &mut out);
    out
}

fn alice_configs(pipes: u32) -> Vec<AliceConfig> {
    (0..pipes)
        .flat_map(|tap| {
            let others: Vec<u32> = (0..pipes).filter(|&p| p != tap).collect();
            matchings(pipes, &others).into_iter().map(move |matching| AliceConfig { tap, matching })
        })
        .collect()
}

/// Smallest `m <= max_pipes` admitting a strategy for `f`, with the first
/// strategy found at that `m` in enumeration order.
pub fn gh_search(f: &BoolFn, max_pipes: u32) -> Result<Option<GhStrategy>> {
    for m in 1..=max_pipes {
        if let Some(s) = search_at(f, m)? {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Whether any `m`-pipe strategy computes `f`.
pub fn search_at(f: &BoolFn, m: u32) -> Result<Option<GhStrategy>> {
    let ys = f.y_count() as usize;
    let alice = alice_configs(m);
    let all: Vec<u32> = (0..m).collect();
    let bob = matchings(m, &all);
    let canonical: Vec<usize> = (0..=m / 2)
        .map(|k| {
            let pairs: Vec<(u32, u32)> = (0..k).map(|i| (2 * i, 2 * i + 1)).collect();
            let target = Matching::from_pairs(m, &pairs).expect("canonical pairs are disjoint");
            bob.iter().position(|b| *b == target).expect("canonical matching is enumerated")
        })
        .collect();

    let radix = bob.len() as u64;
    let tail = radix
        .checked_pow(ys as u32 - 1)
        .filter(|t| t.saturating_mul(canonical.len() as u64) <= SEARCH_BUDGET)
        .ok_or_else(|| budget(format!("garden-hose search at {m} pipes exceeds {SEARCH_BUDGET} Bob tuples")))?;
    let total = tail * canonical.len() as u64;

    // right[a][b]: water spills on Bob's side
    let right: Vec<Vec<bool>> =
        alice.iter().map(|a| bob.iter().map(|b| flow(a, b).side == Side::Right).collect()).collect();
    let rows: Vec<u64> =
        (0..f.x_count()).map(|x| (0..ys as u64).fold(0, |acc, y| acc | (f.at(x, y) as u64) << y)).collect();

    let found = (0..total).into_par_iter().find_map_first(|idx| {
        let mut tuple = Vec::with_capacity(ys);
        tuple.push(canonical[(idx / tail) as usize]);
        let mut rest = idx % tail;
        let mut digits = vec![0usize; ys - 1];
        for d in digits.iter_mut().rev() {
            *d = (rest % radix) as usize;
            rest /= radix;
        }
        tuple.extend(digits);
        let mut picks = Vec::with_capacity(rows.len());
        for &row in &rows {
            let a = (0..alice.len())
                .find(|&a| tuple.iter().enumerate().all(|(y, &b)| right[a][b] == (row >> y & 1 == 1)))?;
            picks.push(a);
        }
        Some((picks, tuple))
    });

    found
        .map(|(picks, tuple)| {
            GhStrategy::new(
                m,
                picks.into_iter().map(|a| alice[a].clone()).collect(),
                tuple.into_iter().map(|b| bob[b].clone()).collect(),
            )
        })
        .transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{and, xor, BoolFn};

    #[test]
    fn matching_counts_are_telephone_numbers() {
        let counts: Vec<usize> = (0..=6u32).map(|m| matchings(m, &(0..m).collect::<Vec<_>>()).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 10, 26, 76]);
        assert_eq!(alice_configs(3).len(), 6);
    }

    #[test]
    fn and_and_xor_need_three_pipes() {
        for f in [and(1), xor(1)] {
            assert!(search_at(&f, 2).unwrap().is_none());
            assert!(search_at(&f, 1).unwrap().is_none());
            let s = gh_search(&f, 3).unwrap().unwrap();
            assert_eq!(s.pipes(), 3);
            assert!(s.verify(&f));
        }
    }

    #[test]
    fn constants() {
        let one = BoolFn::constant(1, 1, true).unwrap();
        assert_eq!(gh_search(&one, 1).unwrap().unwrap().pipes(), 1);
        let zero = BoolFn::constant(1, 1, false).unwrap();
        assert!(gh_search(&zero, 1).unwrap().is_none());
        assert_eq!(gh_search(&zero, 2).unwrap().unwrap().pipes(), 2);
    }

    #[test]
    fn search_is_deterministic() {
        let f = BoolFn::from_bits(1, 1, 0b0100).unwrap();
        assert_eq!(gh_search(&f, 3).unwrap(), gh_search(&f, 3).unwrap());
    }

    #[test]
    fn every_one_bit_function_fits_three_pipes() {
        for bits in 0..16 {
            let f = BoolFn::from_bits(1, 1, bits).unwrap();
            let s = gh_search(&f, 3).unwrap().expect("three pipes suffice");
            assert!(s.verify(&f));
            // a strategy at m also exists at m+1
            assert!(search_at(&f, s.pipes() + 1).unwrap().is_some());
        }
    }
}
