use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::verify::{InputRun, QVerifyOptions};
use super::{CdqsKind, CdqsProtocol, QResources};
use crate::classical::{coin_states, for_each_coins, Cds, Msg};
use crate::descriptor::{KeyPolicy, Source};
use crate::error::{budget, invalid, Result};
use crate::quantum::channel::BlockChoi;
use crate::quantum::gates::{identity, kron};
use crate::quantum::pauli::{key_bits, pad_key};
use crate::quantum::state::bell_vector;
use crate::quantum::C64;

/// Pads `Q` with a uniform 2-bit key and discloses the key through `cds`.
pub fn cdqs_from_cds(cds: Cds) -> Result<CdqsProtocol> {
    cdqs_from_cds_with_key(cds, KeyPolicy::Uniform)
}

pub fn cdqs_from_cds_with_key(cds: Cds, key: KeyPolicy) -> Result<CdqsProtocol> {
    if cds.secret_values() != 4 {
        return Err(invalid(format!(
            "the pad key needs a CDS hiding 2 bits (4 values), got {} values; compose with cds_parallel",
            cds.secret_values()
        )));
    }
    if let KeyPolicy::Fixed(k) = key {
        if k > 3 {
            return Err(invalid(format!("fixed key {k} is not a 2-bit value")));
        }
    }
    let source = Source::CdqsFromCds { cds: Box::new(cds.source()), key };
    Ok(pad_protocol(cds, key, source))
}

pub(crate) fn pad_protocol(cds: Cds, key: KeyPolicy, source: Source) -> CdqsProtocol {
    let r = cds.resources();
    let resources = QResources {
        epr_pairs: 0,
        key_bits: 2,
        message_qubits: 1 + r.alice_message_bits + r.bob_message_bits,
        random_bits: r.shared_random_bits + r.private_random_bits,
        resource_qubits: 0,
    };
    CdqsProtocol { function: cds.function().clone(), kind: CdqsKind::OneTimePad { cds, key }, source, resources }
}

/// `(key, probability)` pairs with nonzero probability.
pub(crate) fn key_support(key: KeyPolicy) -> Vec<(u64, f64)> {
    match key {
        KeyPolicy::Uniform => (0..4).map(|s| (s, 0.25)).collect(),
        KeyPolicy::Fixed(k) => vec![(k as u64, 1.0)],
    }
}

pub(crate) fn check_budget(cds: &Cds, keys: usize, opts: &QVerifyOptions) -> Result<u64> {
    let states = coin_states(cds.coins())
        .and_then(|n| n.checked_mul(keys as u64))
        .filter(|&n| n <= opts.budget)
        .ok_or_else(|| budget(format!("CDS randomness exceeds the budget of {} states", opts.budget)))?;
    Ok(states)
}

/// Mixture simulation of the pad protocol on one input. The referee's view
/// is `(P^s Q, m0, m1)`; since the messages are classical, its Choi state is
/// block diagonal with blocks `sum_s w_l(s) |Phi_s><Phi_s|`.
pub(crate) fn pad_run(
    cds: &Cds,
    key: KeyPolicy,
    x: u64,
    y: u64,
    value: bool,
    opts: &QVerifyOptions,
) -> Result<InputRun> {
    let keys = key_support(key);
    let states = check_budget(cds, keys.len(), opts)?;
    let coin_weight = 1.0 / coin_states(cds.coins()).unwrap_or(1) as f64;
    let mut labels: BTreeMap<(Msg, Msg), [f64; 4]> = BTreeMap::new();
    for &(s, p) in &keys {
        for_each_coins(cds.coins(), |r| {
            let m0 = cds.alice_message(x, s, r);
            let m1 = cds.bob_message(y, s, r);
            labels.entry((m0, m1)).or_insert([0.0; 4])[s as usize] += p * coin_weight;
        });
    }
    let bells: Vec<_> = (0..4).map(|s| bell_vector(key_bits(s))).collect();
    let mut run = InputRun { branches: states, ..InputRun::default() };
    if value {
        let mut j = DMatrix::zeros(4, 4);
        for ((m0, m1), w) in &labels {
            let guess = cds.decode(x, y, m0, m1) & 3;
            let undo = kron(&identity(2), &pad_key(key_bits(guess)));
            for (s, &ws) in w.iter().enumerate() {
                if ws > 0.0 {
                    let v = &undo * &bells[s];
                    j += &v * v.adjoint() * C64::new(ws, 0.0);
                }
            }
        }
        run.recovered = Some(j);
    } else {
        let mut view = BlockChoi::new(2);
        for (index, w) in labels.values().enumerate() {
            let mut b = DMatrix::zeros(4, 4);
            for (s, &ws) in w.iter().enumerate() {
                if ws > 0.0 {
                    b += &bells[s] * bells[s].adjoint() * C64::new(ws, 0.0);
                }
            }
            view.add(vec![index as u64], b)?;
        }
        run.view = Some(view);
    }
    Ok(run)
}
