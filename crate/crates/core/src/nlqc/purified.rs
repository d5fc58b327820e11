use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::cdqs::{check_budget, key_support};
use super::verify::{InputRun, Perspective, QVerifyOptions};
use super::{CdqsKind, CdqsProtocol, FRouting, FRoutingKind, QResources};
use crate::classical::{for_each_coins, Cds, CoinOwner, Holder, Msg};
use crate::descriptor::{KeyPolicy, Source};
use crate::error::{budget, invalid, Result};
use crate::quantum::channel::BlockChoi;
use crate::quantum::pauli::{key_bits, pad_key};
use crate::quantum::sparse::SparseState;
use crate::quantum::state::{bell_vector, Register};
use crate::quantum::C64;

/// Message accounting of a routing built from a CDQS: `used <= 4 (n_M + n_E)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageBound {
    /// Message size of the CDQS, in qubits.
    pub n_m: u64,
    /// Resource size once all randomness (key included) is held coherently.
    pub n_e: u64,
    pub limit: u64,
    /// Qubits actually sent in the routing round.
    pub used: u64,
    pub ok: bool,
}

/// Purifies a pad-based CDQS into an f-routing; a CDQS that came from a
/// routing gives that routing back.
pub fn frouting_from_cdqs(p: &CdqsProtocol) -> Result<FRouting> {
    let cds = match &p.kind {
        CdqsKind::Routing(r) => return Ok((**r).clone()),
        CdqsKind::OneTimePad { cds, .. } => cds,
    };
    let r = cds.resources();
    let both = cds.holder() == Holder::Both;
    let key_copy = if both { 2 } else { 0 };
    let shared_bits: u64 = cds.coins().iter().filter(|c| c.owner == CoinOwner::Shared).map(|c| c.bits()).sum();
    let coin_bits: u64 = cds.coins().iter().map(|c| c.bits()).sum();
    let used = 1 + r.alice_message_bits + r.bob_message_bits + 2 + key_copy + coin_bits + shared_bits;
    let n_m = p.resources.message_qubits;
    let n_e = 2 * (p.resources.key_bits + p.resources.random_bits);
    let limit = 4 * (n_m + n_e);
    let bound = MessageBound { n_m, n_e, limit, used, ok: used <= limit };
    let resources = QResources {
        epr_pairs: 0,
        key_bits: 2,
        message_qubits: used,
        random_bits: p.resources.random_bits,
        resource_qubits: 2 * (shared_bits + key_copy),
    };
    Ok(FRouting {
        function: p.function.clone(),
        kind: FRoutingKind::Purified { cdqs: p.clone() },
        source: Source::FroutingFromCdqs { cdqs: Box::new(p.source.clone()) },
        resources,
        bound: Some(bound),
    })
}

/// The referee of the new CDQS receives everything Bob holds after the round.
pub fn cdqs_from_frouting(r: &FRouting) -> CdqsProtocol {
    CdqsProtocol {
        function: r.function.clone(),
        kind: CdqsKind::Routing(Box::new(r.clone())),
        source: Source::CdqsFromFrouting { routing: Box::new(r.source.clone()) },
        resources: r.resources,
    }
}

/// Maps the key register `|s1, s2>` on `(a1, a2)` to the Bell state
/// `(I (x) P^s)|Phi+>`. On `1/2 sum_s |s> P^s |psi>_Q` this leaves `|psi>` in
/// `a2` and `(a1, Q)` in `|Phi+>`.
pub fn otp_reconstruct_left(state: &mut SparseState, a1: &str, a2: &str) -> Result<()> {
    let mut u = DMatrix::zeros(4, 4);
    for s in 0..4 {
        u.set_column(s, &bell_vector(key_bits(s as u64)));
    }
    state.apply(&u, &[a1, a2])
}

struct Tables {
    m0: BTreeMap<Msg, u32>,
    m1: BTreeMap<Msg, u32>,
    /// `(key, coins) -> (joint message label, rank within its (key, label) class)`.
    relabel: HashMap<(u64, Vec<u64>), (u32, u32)>,
    class_max: u32,
}

fn bob_inputs(cds: &Cds, s: u64, coins: &[u64]) -> (u64, Vec<u64>) {
    let s_b = if cds.holder() == Holder::Both { s } else { 0 };
    let r_b = coins.iter().zip(cds.coins()).map(|(&v, c)| if c.owner == CoinOwner::Shared { v } else { 0 }).collect();
    (s_b, r_b)
}

fn tables(cds: &Cds, key: KeyPolicy, x: u64, y: u64) -> Result<Tables> {
    let mut m0 = BTreeMap::new();
    let mut m1 = BTreeMap::new();
    let mut all = Vec::new();
    for (s, _) in key_support(key) {
        for_each_coins(cds.coins(), |r| {
            let a = cds.alice_message(x, s, r);
            let (s_b, r_b) = bob_inputs(cds, s, r);
            let b = cds.bob_message(y, s_b, &r_b);
            let n0 = m0.len() as u32;
            m0.entry(a.clone()).or_insert(n0);
            let n1 = m1.len() as u32;
            m1.entry(b.clone()).or_insert(n1);
            all.push((s, r.to_vec(), a, b));
        });
    }
    let width = m1.len() as u64;
    if (m0.len() as u64).saturating_mul(width) > u32::MAX as u64 {
        return Err(budget("too many message pairs to label"));
    }
    let mut counts: HashMap<(u64, u32), u32> = HashMap::new();
    let mut relabel = HashMap::with_capacity(all.len());
    let mut class_max = 1;
    for (s, r, a, b) in all {
        let label = (m0[&a] as u64 * width + m1[&b] as u64) as u32;
        let rank = counts.entry((s, label)).or_insert(0);
        relabel.insert((s, r), (label, *rank));
        *rank += 1;
        class_max = class_max.max(*rank);
    }
    Ok(Tables { m0, m1, relabel, class_max })
}

/// Register names of one purified run.
struct Layout {
    both: bool,
    coins: Vec<(String, Option<String>)>,
}

fn purify(cds: &Cds, key: KeyPolicy, x: u64, y: u64, t: &Tables) -> Result<(SparseState, Layout)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut st = SparseState::from_terms(
        vec![Register::qubit("Ref"), Register::qubit("Q")],
        vec![(vec![0, 0], C64::new(h, 0.0)), (vec![1, 1], C64::new(h, 0.0))],
    )?;
    let (w1, w2) = match key {
        KeyPolicy::Uniform => ([0.5, 0.5], [0.5, 0.5]),
        KeyPolicy::Fixed(k) => {
            let (a, b) = key_bits(k as u64);
            let one_hot = |v: u8| if v == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
            (one_hot(a), one_hot(b))
        }
    };
    st.add_weighted(Register::qubit("k1"), &w1)?;
    st.add_weighted(Register::qubit("k2"), &w2)?;
    let both = cds.holder() == Holder::Both;
    if both {
        st.add_register(Register::qubit("kb1"))?;
        st.add_register(Register::qubit("kb2"))?;
        let (k1, k2) = (st.position("k1")?, st.position("k2")?);
        st.apply_classical(&["kb1", "kb2"], |d| Ok(vec![d[k1], d[k2]]))?;
    }
    let mut coins = Vec::new();
    for (i, c) in cds.coins().iter().enumerate() {
        if c.radix > u32::MAX as u64 {
            return Err(budget("coin radix too large for a register"));
        }
        let name = format!("c{i}");
        st.add_uniform(Register::new(name.clone(), c.radix as usize))?;
        let copy = if c.owner == CoinOwner::Shared {
            let cb = format!("cb{i}");
            st.add_register(Register::new(cb.clone(), c.radix as usize))?;
            let p = st.position(&name)?;
            st.apply_classical(&[cb.as_str()], |d| Ok(vec![d[p]]))?;
            Some(cb)
        } else {
            None
        };
        coins.push((name, copy));
    }
    let layout = Layout { both, coins };
    let (k1, k2) = (st.position("k1")?, st.position("k2")?);
    st.apply_conditional(&["Q"], |d| Some(pad_key((d[k1] as u8, d[k2] as u8))))?;

    st.add_register(Register::new("m0", t.m0.len().max(1)))?;
    st.add_register(Register::new("m1", t.m1.len().max(1)))?;
    let cpos: Vec<usize> = layout.coins.iter().map(|(c, _)| st.position(c)).collect::<Result<_>>()?;
    let bpos: Vec<Option<usize>> =
        layout.coins.iter().map(|(_, b)| b.as_ref().map(|b| st.position(b)).transpose()).collect::<Result<_>>()?;
    let kb = if both { Some((st.position("kb1")?, st.position("kb2")?)) } else { None };
    let missing = || invalid("message outside the enumerated table");
    st.apply_classical(&["m0"], |d| {
        let s = 2 * d[k1] as u64 + d[k2] as u64;
        let r: Vec<u64> = cpos.iter().map(|&p| d[p] as u64).collect();
        let m = cds.alice_message(x, s, &r);
        Ok(vec![*t.m0.get(&m).ok_or_else(missing)?])
    })?;
    st.apply_classical(&["m1"], |d| {
        // Bob sees only his copies of the shared values
        let s_b = kb.map_or(0, |(a, b)| 2 * d[a] as u64 + d[b] as u64);
        let r_b: Vec<u64> = bpos.iter().map(|p| p.map_or(0, |p| d[p] as u64)).collect();
        let m = cds.bob_message(y, s_b, &r_b);
        Ok(vec![*t.m1.get(&m).ok_or_else(missing)?])
    })?;
    Ok((st, layout))
}

/// Bob holds `(Q, m0, m1)` and runs the referee's decoder.
fn bob_decode(cds: &Cds, x: u64, y: u64, t: &Tables, mut st: SparseState) -> Result<DMatrix<C64>> {
    let inv0: Vec<&Msg> = invert(&t.m0);
    let inv1: Vec<&Msg> = invert(&t.m1);
    st.add_register(Register::new("sd", 4))?;
    let (p0, p1) = (st.position("m0")?, st.position("m1")?);
    st.apply_classical(&["sd"], |d| {
        let guess = cds.decode(x, y, inv0[d[p0] as usize], inv1[d[p1] as usize]) & 3;
        Ok(vec![guess as u32])
    })?;
    let sd = st.position("sd")?;
    st.apply_conditional(&["Q"], |d| Some(pad_key(key_bits(d[sd] as u64))))?;
    Ok(st.reduced(&["Ref", "Q"])?.matrix().clone())
}

fn invert(table: &BTreeMap<Msg, u32>) -> Vec<&Msg> {
    let mut out = vec![table.keys().next().expect("nonempty table"); table.len()];
    for (m, &i) in table {
        out[i as usize] = m;
    }
    out
}

/// Alice holds the purification: she clears Bob's copies, relabels her
/// coins by the message they produced and applies the Bell-basis reconstruction.
fn alice_decode(cds: &Cds, t: &Tables, layout: &Layout, mut st: SparseState) -> Result<DMatrix<C64>> {
    let (k1, k2) = (st.position("k1")?, st.position("k2")?);
    if layout.both {
        let (b1, b2) = (st.position("kb1")?, st.position("kb2")?);
        st.apply_classical(&["kb1", "kb2"], |d| Ok(vec![d[b1] ^ d[k1], d[b2] ^ d[k2]]))?;
        st.remove_constant("kb1")?;
        st.remove_constant("kb2")?;
    }
    for (i, (c, copy)) in layout.coins.iter().enumerate() {
        if let Some(cb) = copy {
            let radix = cds.coins()[i].radix as u32;
            let (pc, pb) = (st.position(c)?, st.position(cb)?);
            st.apply_classical(&[cb.as_str()], |d| Ok(vec![(d[pb] + radix - d[pc]) % radix]))?;
            st.remove_constant(cb)?;
        }
    }
    let labels = t.m0.len().max(1) * t.m1.len().max(1);
    st.add_register(Register::new("am", labels))?;
    st.add_register(Register::new("aj", t.class_max as usize))?;
    let (k1, k2) = (st.position("k1")?, st.position("k2")?);
    let cpos: Vec<usize> = layout.coins.iter().map(|(c, _)| st.position(c)).collect::<Result<_>>()?;
    let mut targets: Vec<&str> = layout.coins.iter().map(|(c, _)| c.as_str()).collect();
    targets.extend(["am", "aj"]);
    st.apply_classical(&targets, |d| {
        let s = 2 * d[k1] as u64 + d[k2] as u64;
        let r: Vec<u64> = cpos.iter().map(|&p| d[p] as u64).collect();
        let &(label, rank) =
            t.relabel.get(&(s, r)).ok_or_else(|| invalid("coin value outside the enumerated table"))?;
        let mut out = vec![0; cpos.len()];
        out.extend([label, rank]);
        Ok(out)
    })?;
    for (c, _) in &layout.coins {
        st.remove_constant(c)?;
    }
    otp_reconstruct_left(&mut st, "k1", "k2")?;
    Ok(st.reduced(&["Ref", "k2"])?.matrix().clone())
}

/// The registers on Alice's side after the round.
fn alice_view(st: &SparseState, layout: &Layout) -> Option<BlockChoi> {
    let mut keep: Vec<&str> = vec!["Ref", "k1", "k2"];
    if layout.both {
        keep.extend(["kb1", "kb2"]);
    }
    for (c, copy) in &layout.coins {
        keep.push(c);
        if let Some(cb) = copy {
            keep.push(cb);
        }
    }
    let rho = st.reduced(&keep).ok()?;
    let mut view = BlockChoi::new(2);
    view.add(Vec::new(), rho.matrix().clone()).ok()?;
    Some(view)
}

fn bob_view(st: &SparseState) -> Result<BlockChoi> {
    let mut view = BlockChoi::new(2);
    for (label, block) in st.reduced_blocks(&["m0", "m1"], &["Ref", "Q"])? {
        view.add(label, block)?;
    }
    Ok(view)
}

pub(crate) fn purified_run(
    p: &CdqsProtocol,
    x: u64,
    y: u64,
    value: bool,
    perspective: Perspective,
    opts: &QVerifyOptions,
) -> Result<InputRun> {
    let CdqsKind::OneTimePad { cds, key } = &p.kind else {
        return Err(invalid("only pad-based CDQS protocols can be purified"));
    };
    let states = check_budget(cds, key_support(*key).len(), opts)?;
    let t = tables(cds, *key, x, y)?;
    let (st, layout) = purify(cds, *key, x, y, &t)?;
    let mut run = InputRun { branches: states, ..InputRun::default() };
    match (perspective, value) {
        (Perspective::Referee, true) => run.recovered = Some(bob_decode(cds, x, y, &t, st)?),
        (Perspective::Referee, false) => run.view = Some(bob_view(&st)?),
        (Perspective::Routing, true) => {
            run.side = Some(crate::gardenhose::Side::Right);
            run.view = alice_view(&st, &layout);
            run.recovered = Some(bob_decode(cds, x, y, &t, st)?);
        }
        (Perspective::Routing, false) => {
            run.side = Some(crate::gardenhose::Side::Left);
            run.view = Some(bob_view(&st)?);
            run.recovered = Some(alice_decode(cds, &t, &layout, st)?);
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::gates::c;
    use crate::quantum::state::PureState;

    fn padded_key_state(psi: (C64, C64), correlated: bool) -> SparseState {
        let mut regs = vec![Register::qubit("a1"), Register::qubit("a2"), Register::qubit("Q")];
        if correlated {
            regs.push(Register::new("msg", 4));
        }
        let mut terms = Vec::new();
        for s in 0..4u64 {
            let (s1, s2) = key_bits(s);
            let p = pad_key((s1, s2));
            for q in 0..2 {
                let amp = (p[(q, 0)] * psi.0 + p[(q, 1)] * psi.1) * 0.5;
                let mut d = vec![s1 as u32, s2 as u32, q as u32];
                if correlated {
                    d.push(s as u32);
                }
                terms.push((d, amp));
            }
        }
        SparseState::from_terms(regs, terms).unwrap()
    }

    fn a2_fidelity(st: &SparseState, psi: (C64, C64)) -> f64 {
        let target = PureState::qubit("a2", psi.0, psi.1).unwrap();
        st.reduced(&["a2"]).unwrap().expectation(&target).unwrap()
    }

    #[test]
    fn reconstruction_recovers_the_secret() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for psi in [(c(1., 0.), c(0., 0.)), (c(h, 0.), c(0., h)), (c(0.6, 0.), c(0., -0.8))] {
            let mut st = padded_key_state(psi, false);
            otp_reconstruct_left(&mut st, "a1", "a2").unwrap();
            assert!(a2_fidelity(&st, psi) >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn reconstruction_fails_when_the_key_leaked() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = (c(h, 0.), c(0., h));
        let mut st = padded_key_state(psi, true);
        otp_reconstruct_left(&mut st, "a1", "a2").unwrap();
        assert!((a2_fidelity(&st, psi) - 0.5).abs() < 1e-9);
    }
}
