use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::cdqs::pad_protocol;
use super::verify::QVerifyOptions;
use super::{CdqsProtocol, PsqmProtocol, QResources};
use crate::boolfn::{find_zero_input_where, BoolFn};
use crate::classical::cds::{cds_parallel, TrivialCds};
use crate::classical::verify::Witness;
use crate::classical::{coin_states, for_each_coins, Cds, CdsScheme, Coin, Holder, Msg, Psm, Resources};
use crate::descriptor::{KeyPolicy, Source};
use crate::error::{budget, Result};

/// Sends the PSM messages as computational-basis states; the referee's
/// decoder computes the classical output into a fresh register and measures it.
pub fn psqm_from_psm(psm: Psm) -> PsqmProtocol {
    let r = psm.resources();
    PsqmProtocol {
        function: psm.function().clone(),
        source: Source::PsqmFromPsm { psm: Box::new(psm.source()) },
        resources: QResources {
            message_qubits: r.alice_message_bits + r.bob_message_bits,
            random_bits: r.shared_random_bits + r.private_random_bits,
            ..QResources::default()
        },
        psm,
    }
}

pub(crate) struct PsqmScores {
    /// `(x, y, f(x, y), 1 - Pr[decoded output = f(x, y)])`.
    pub correctness: Vec<(u64, u64, bool, f64)>,
    /// Trace distance of the message states for every pair of inputs with equal output.
    pub pairs: Vec<(f64, Witness)>,
}

type Density = BTreeMap<(Msg, Msg), u64>;

/// The message state of a PSM is diagonal, so trace distances are half the
/// L1 distance of the message distributions.
pub(crate) fn psqm_scores(p: &PsqmProtocol, opts: &QVerifyOptions) -> Result<PsqmScores> {
    let psm = &p.psm;
    let n = coin_states(psm.coins())
        .filter(|&n| n <= opts.budget)
        .ok_or_else(|| budget(format!("PSM randomness exceeds the budget of {} states", opts.budget)))?;
    let f = &p.function;
    let inputs: Vec<(u64, u64)> = f.inputs().filter(|&(x, y)| psm.in_domain(x, y)).collect();
    let states: Vec<(u64, u64, u64, Density, f64)> = inputs
        .par_iter()
        .map(|&(x, y)| {
            let want = psm.output(x, y);
            let mut rho = Density::new();
            let mut wrong = 0u64;
            for_each_coins(psm.coins(), |r| {
                let m0 = psm.alice_message(x, r);
                let m1 = psm.bob_message(y, r);
                if psm.decode(&m0, &m1) != want {
                    wrong += 1;
                }
                *rho.entry((m0, m1)).or_insert(0) += 1;
            });
            (x, y, want, rho, wrong as f64 / n as f64)
        })
        .collect();
    let correctness = states.iter().map(|(x, y, want, _, e)| (*x, *y, *want == 1, *e)).collect();
    let mut pairs = Vec::new();
    for (i, a) in states.iter().enumerate() {
        for b in &states[i + 1..] {
            if a.2 == b.2 {
                let gap = half_l1(&a.3, &b.3) / n as f64;
                pairs.push((gap, Witness::InputPair { x: a.0, y: a.1, x2: b.0, y2: b.1 }));
            }
        }
    }
    Ok(PsqmScores { correctness, pairs })
}

fn half_l1(a: &Density, b: &Density) -> f64 {
    let mut total = 0u64;
    for (k, &va) in a {
        total += va.abs_diff(b.get(k).copied().unwrap_or(0));
    }
    for (k, &vb) in b {
        if !a.contains_key(k) {
            total += vb;
        }
    }
    total as f64 / 2.0
}

/// One-bit CDS with a secret known to both parties: run the PSM on
/// `(x, y)` when `s = 1` and on a fixed zero `(x*, y*)` when `s = 0`, so the
/// referee's output is `s f(x, y)`.
#[derive(Debug)]
pub struct TwoSidedPsmCds {
    f: BoolFn,
    psm: Psm,
    zero: (u64, u64),
}

impl CdsScheme for TwoSidedPsmCds {
    fn function(&self) -> &BoolFn {
        &self.f
    }

    fn in_domain(&self, x: u64, y: u64) -> bool {
        self.psm.in_domain(x, y)
    }

    fn secret_values(&self) -> u64 {
        2
    }

    fn holder(&self) -> Holder {
        Holder::Both
    }

    fn coins(&self) -> &[Coin] {
        self.psm.coins()
    }

    fn alice_message(&self, x: u64, s: u64, r: &[u64]) -> Msg {
        self.psm.alice_message(if s & 1 == 1 { x } else { self.zero.0 }, r)
    }

    fn bob_message(&self, y: u64, s: u64, r: &[u64]) -> Msg {
        self.psm.bob_message(if s & 1 == 1 { y } else { self.zero.1 }, r)
    }

    fn decode(&self, _x: u64, _y: u64, m0: &Msg, m1: &Msg) -> u64 {
        self.psm.decode(m0, m1) & 1
    }

    fn resources(&self) -> Resources {
        Resources { secret_bits: 1, ..self.psm.resources() }
    }

    fn source(&self) -> Source {
        Source::Custom { name: "two_sided_psm".into() }
    }
}

/// Two parallel runs of the PSQM on masked inputs disclose the 2-bit pad key
/// exactly when `f(x, y) = 1`. Functions constant on the domain get the
/// trivial protocol.
pub fn cdqs_from_psqm(p: &PsqmProtocol) -> Result<CdqsProtocol> {
    let f = p.function.clone();
    let psm = p.psm.clone();
    let domain = |x, y| psm.in_domain(x, y);
    let has_one = f.inputs().any(|(x, y)| domain(x, y) && f.at(x, y));
    let one_bit: Cds = match find_zero_input_where(&f, domain) {
        Some(zero) if has_one => Arc::new(TwoSidedPsmCds { f: f.clone(), psm, zero }),
        Some(_) => Arc::new(TrivialCds::new(f.clone(), false)),
        None => Arc::new(TrivialCds::new(f.clone(), true)),
    };
    let cds = cds_parallel(one_bit, 2)?;
    Ok(pad_protocol(cds, KeyPolicy::Uniform, Source::CdqsFromPsqm { psqm: Box::new(p.source.clone()) }))
}
