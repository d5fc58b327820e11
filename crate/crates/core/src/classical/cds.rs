//! CDS compilers: from garden-hose strategies, span programs and PSM
//! protocols, plus parallel repetition.

use std::sync::Arc;

use smallvec::smallvec;

use super::{bits_for, Cds, CdsScheme, Coin, Holder, Msg, Psm, Resources};
use crate::algebra::literal_string;
use crate::algebra::lsss::LsssScheme;
use crate::algebra::span::SpanProgram;
use crate::boolfn::{find_zero_input_where, BoolFn};
use crate::descriptor::Source;
use crate::error::{invalid, Result};
use crate::gardenhose::{flow, Dir, GhStrategy, Side};

/// One shared bit per pipe. Alice sends `s ^ b_tap` and `b_i ^ b_j` for each
/// of her hoses; Bob sends `b_i ^ b_j` for each of his hoses and `b_k` for
/// every pipe he leaves open. The referee XORs along the water's path.
#[derive(Debug)]
pub struct GhCds {
    f: BoolFn,
    strategy: GhStrategy,
    coins: Vec<Coin>,
}

/// Compiles a verified strategy; an unverified one is a validation error.
pub fn cds_from_gh(strategy: &GhStrategy, f: &BoolFn) -> Result<Cds> {
    if let Some((x, y)) = strategy.counterexample(f)? {
        return Err(invalid(format!("strategy disagrees with {} at ({x}, {y})", f.label())));
    }
    Ok(Arc::new(GhCds::new_unchecked(strategy.clone(), f.clone())?))
}

impl GhCds {
    /// Skips the semantic check so a corrupted strategy surfaces in verification.
    pub fn new_unchecked(strategy: GhStrategy, f: BoolFn) -> Result<Self> {
        if strategy.n_x() != f.n_x() || strategy.n_y() != f.n_y() {
            return Err(invalid("strategy and function input widths differ"));
        }
        let coins = vec![Coin::shared(2); strategy.pipes() as usize];
        Ok(Self { f, strategy, coins })
    }

    pub fn strategy(&self) -> &GhStrategy {
        &self.strategy
    }
}

impl CdsScheme for GhCds {
    fn function(&self) -> &BoolFn {
        &self.f
    }

    fn secret_values(&self) -> u64 {
        2
    }

    fn holder(&self) -> Holder {
        Holder::Alice
    }

    fn coins(&self) -> &[Coin] {
        &self.coins
    }

    fn alice_message(&self, x: u64, s: u64, b: &[u64]) -> Msg {
        let a = self.strategy.alice(x);
        let mut m: Msg = smallvec![(s ^ b[a.tap as usize]) as u32];
        m.extend(a.matching.pairs().into_iter().map(|(i, j)| (b[i as usize] ^ b[j as usize]) as u32));
        m
    }

    fn bob_message(&self, y: u64, _s: u64, b: &[u64]) -> Msg {
        let bob = self.strategy.bob(y);
        let mut m: Msg = bob.pairs().into_iter().map(|(i, j)| (b[i as usize] ^ b[j as usize]) as u32).collect();
        m.extend(bob.unused().into_iter().map(|k| b[k as usize] as u32));
        m
    }

    fn decode(&self, x: u64, y: u64, m0: &Msg, m1: &Msg) -> u64 {
        let a = self.strategy.alice(x);
        let bob = self.strategy.bob(y);
        let out = flow(a, bob);
        if out.side == Side::Left {
            return 0;
        }
        let alice_pairs = a.matching.pairs();
        let bob_pairs = bob.pairs();
        let bob_unused = bob.unused();
        let pair_slot = |pairs: &[(u32, u32)], pipe: u32| {
            pairs.iter().position(|&(i, j)| i == pipe || j == pipe).expect("hosed pipe is listed")
        };
        let mut acc = m0[0] as u64;
        // each hop's far end either crosses a hose (one XOR) or is the exit
        for hop in &out.path {
            match hop.dir {
                Dir::ToBob => match bob.partner(hop.pipe) {
                    Some(_) => acc ^= m1[pair_slot(&bob_pairs, hop.pipe)] as u64,
                    None => {
                        let k = bob_unused.iter().position(|&u| u == hop.pipe).expect("open pipe is listed");
                        acc ^= m1[bob_pairs.len() + k] as u64;
                    }
                },
                Dir::ToAlice => acc ^= m0[1 + pair_slot(&alice_pairs, hop.pipe)] as u64,
            }
        }
        acc
    }

    fn resources(&self) -> Resources {
        let m = self.strategy.pipes() as u64;
        let alice =
            (0..self.f.x_count()).map(|x| self.strategy.alice(x).matching.pairs().len() as u64 + 1).max().unwrap_or(1);
        let bob = (0..self.f.y_count()).map(|y| m - self.strategy.bob(y).pairs().len() as u64).max().unwrap_or(m);
        Resources {
            shared_random_bits: m,
            alice_message_bits: alice,
            bob_message_bits: bob,
            secret_bits: 1,
            ..Resources::default()
        }
    }

    fn source(&self) -> Source {
        Source::CdsFromGh { strategy: self.strategy.to_json_value() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanVariant {
    /// Both parties derive every share from shared randomness and send the
    /// shares of their satisfied literals; the secret is known to both.
    CommOpt,
    /// Alice deals the shares with private randomness and masks Bob's rows;
    /// Bob reveals a mask exactly when his literal holds.
    RandOpt,
}

#[derive(Debug)]
pub struct SpanCds {
    f: BoolFn,
    lsss: LsssScheme,
    variant: SpanVariant,
    coins: Vec<Coin>,
    /// Rows labeled by a bit of `y`, in row order.
    bob_rows: Vec<usize>,
}

pub fn cds_from_span(program: &SpanProgram, f: &BoolFn, variant: SpanVariant) -> Result<Cds> {
    if let Some((x, y)) = program.disagreement(f)? {
        return Err(invalid(format!("span program disagrees with {} at ({x}, {y})", f.label())));
    }
    Ok(Arc::new(SpanCds::new_unchecked(program.clone(), f.clone(), variant)?))
}

impl SpanCds {
    pub fn new_unchecked(program: SpanProgram, f: BoolFn, variant: SpanVariant) -> Result<Self> {
        if program.n_vars() != f.n_x() + f.n_y() {
            return Err(invalid(format!(
                "span program has {} variables but the function has {} input bits",
                program.n_vars(),
                f.n_x() + f.n_y()
            )));
        }
        let p = program.field().p();
        let free = program.width() - 1;
        let bob_rows: Vec<usize> = (0..program.size()).filter(|&i| program.labels()[i].var > f.n_x()).collect();
        let coins = match variant {
            SpanVariant::CommOpt => vec![Coin::shared(p); free],
            SpanVariant::RandOpt => std::iter::repeat_n(Coin::private(p), free)
                .chain(std::iter::repeat_n(Coin::shared(p), bob_rows.len()))
                .collect(),
        };
        Ok(Self { f, lsss: LsssScheme::new(program), variant, coins, bob_rows })
    }

    fn program(&self) -> &SpanProgram {
        self.lsss.program()
    }

    fn satisfied(&self, x: u64, y: u64) -> Vec<bool> {
        literal_string(x, y, self.f.n_x(), self.f.n_y())
    }

    /// Rows owned by Alice whose literal holds for `x`, in row order.
    fn alice_rows(&self, x: u64) -> Vec<usize> {
        let z = self.satisfied(x, 0);
        (0..self.program().size())
            .filter(|&i| {
                let l = self.program().labels()[i];
                l.var <= self.f.n_x() && l.holds(&z)
            })
            .collect()
    }

    fn bob_live_rows(&self, y: u64) -> Vec<usize> {
        let z = self.satisfied(0, y);
        self.bob_rows.iter().copied().filter(|&i| self.program().labels()[i].holds(&z)).collect()
    }

    fn free_coins<'a>(&self, r: &'a [u64]) -> &'a [u64] {
        &r[..self.lsss.free_dims()]
    }
}

impl CdsScheme for SpanCds {
    fn function(&self) -> &BoolFn {
        &self.f
    }

    fn secret_values(&self) -> u64 {
        2
    }

    fn holder(&self) -> Holder {
        match self.variant {
            SpanVariant::CommOpt => Holder::Both,
            SpanVariant::RandOpt => Holder::Alice,
        }
    }

    fn coins(&self) -> &[Coin] {
        &self.coins
    }

    fn alice_message(&self, x: u64, s: u64, r: &[u64]) -> Msg {
        let shares = self.lsss.shares_with(s, self.free_coins(r));
        let mut m: Msg = self.alice_rows(x).into_iter().map(|i| shares[i] as u32).collect();
        if self.variant == SpanVariant::RandOpt {
            let field = self.lsss.field();
            let masks = &r[self.lsss.free_dims()..];
            m.extend(self.bob_rows.iter().zip(masks).map(|(&i, &mask)| field.add(shares[i], mask) as u32));
        }
        m
    }

    fn bob_message(&self, y: u64, s: u64, r: &[u64]) -> Msg {
        match self.variant {
            SpanVariant::CommOpt => {
                let shares = self.lsss.shares_with(s, self.free_coins(r));
                self.bob_live_rows(y).into_iter().map(|i| shares[i] as u32).collect()
            }
            SpanVariant::RandOpt => {
                let masks = &r[self.lsss.free_dims()..];
                self.bob_rows
                    .iter()
                    .zip(masks)
                    .filter(|(&i, _)| self.bob_live_rows(y).contains(&i))
                    .map(|(_, &mask)| mask as u32)
                    .collect()
            }
        }
    }

    fn decode(&self, x: u64, y: u64, m0: &Msg, m1: &Msg) -> u64 {
        let field = self.lsss.field();
        let alice_rows = self.alice_rows(x);
        let bob_rows = self.bob_live_rows(y);
        let mut rows = alice_rows.clone();
        let mut shares: Vec<u64> = m0[..alice_rows.len()].iter().map(|&v| v as u64).collect();
        rows.extend(&bob_rows);
        match self.variant {
            SpanVariant::CommOpt => shares.extend(m1.iter().map(|&v| v as u64)),
            SpanVariant::RandOpt => {
                let masked = &m0[alice_rows.len()..];
                for (&row, &mask) in bob_rows.iter().zip(m1.iter()) {
                    let slot = self.bob_rows.iter().position(|&b| b == row).expect("bob row");
                    shares.push(field.sub(masked[slot] as u64, mask as u64));
                }
            }
        }
        self.lsss.reconstruct(&rows, &shares).ok().flatten().unwrap_or(0)
    }

    fn resources(&self) -> Resources {
        let bits = self.lsss.field().element_bits() as u64;
        let alice_rows = (0..self.f.x_count()).map(|x| self.alice_rows(x).len()).max().unwrap_or(0) as u64;
        let bob_live = (0..self.f.y_count()).map(|y| self.bob_live_rows(y).len()).max().unwrap_or(0) as u64;
        let mut r = Resources::from_coins(&self.coins);
        r.secret_bits = 1;
        match self.variant {
            SpanVariant::CommOpt => {
                r.alice_message_bits = alice_rows * bits;
                r.bob_message_bits = bob_live * bits;
            }
            SpanVariant::RandOpt => {
                r.alice_message_bits = (alice_rows + self.bob_rows.len() as u64) * bits;
                r.bob_message_bits = bob_live * bits;
            }
        }
        r
    }

    fn source(&self) -> Source {
        Source::CdsFromSpan { program: self.program().to_spec(), variant: self.variant }
    }
}

impl SpanCds {
    /// Total size of all LSSS shares in bits.
    pub fn total_share_bits(&self) -> u64 {
        self.lsss.total_share_bits()
    }
}

/// CDS from a PSM for `f`. An extra shared bit `t` acts as a two-sided secret:
/// the PSM runs on `(x, y)` when `t = 1` and on a fixed zero input otherwise,
/// so its output is `t * f(x, y)`; Alice also sends `s ^ t`.
#[derive(Debug)]
pub struct PsmCds {
    f: BoolFn,
    psm: Psm,
    zero: (u64, u64),
    coins: Vec<Coin>,
}

/// Constant functions get a fixed protocol: reveal `s` for constant 1,
/// send nothing for constant 0.
#[derive(Debug)]
pub struct TrivialCds {
    f: BoolFn,
    reveal: bool,
}

pub fn cds_from_psm(psm: Psm) -> Result<Cds> {
    let f = psm.function().clone();
    let domain = |x, y| psm.in_domain(x, y);
    let has_one = f.inputs().any(|(x, y)| domain(x, y) && f.at(x, y));
    match find_zero_input_where(&f, domain) {
        Some(zero) if has_one => {
            let mut coins = psm.coins().to_vec();
            coins.push(Coin::shared(2));
            Ok(Arc::new(PsmCds { f, psm, zero, coins }))
        }
        Some(_) => Ok(Arc::new(TrivialCds { f, reveal: false })),
        None => Ok(Arc::new(TrivialCds { f, reveal: true })),
    }
}

pub fn cds_trivial(f: &BoolFn) -> Result<Cds> {
    match f.is_constant() {
        Some(reveal) => Ok(Arc::new(TrivialCds { f: f.clone(), reveal })),
        None => Err(invalid(format!("{} is not constant", f.label()))),
    }
}

impl PsmCds {
    fn split<'a>(&self, r: &'a [u64]) -> (&'a [u64], u64) {
        let (inner, last) = r.split_at(r.len() - 1);
        (inner, last[0])
    }
}

impl CdsScheme for PsmCds {
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
        Holder::Alice
    }

    fn coins(&self) -> &[Coin] {
        &self.coins
    }

    fn alice_message(&self, x: u64, s: u64, r: &[u64]) -> Msg {
        let (inner, t) = self.split(r);
        let x_in = if t == 1 { x } else { self.zero.0 };
        let mut m = self.psm.alice_message(x_in, inner);
        m.push((s ^ t) as u32);
        m
    }

    fn bob_message(&self, y: u64, _s: u64, r: &[u64]) -> Msg {
        let (inner, t) = self.split(r);
        let y_in = if t == 1 { y } else { self.zero.1 };
        self.psm.bob_message(y_in, inner)
    }

    fn decode(&self, _x: u64, _y: u64, m0: &Msg, m1: &Msg) -> u64 {
        let (masked, psm_part) = m0.split_last().expect("message carries the masked secret");
        let z = self.psm.decode(&Msg::from_slice(psm_part), m1);
        (*masked as u64 ^ z) & 1
    }

    fn resources(&self) -> Resources {
        let inner = self.psm.resources();
        Resources {
            shared_random_bits: inner.shared_random_bits + 1,
            alice_message_bits: inner.alice_message_bits + 1,
            bob_message_bits: inner.bob_message_bits,
            secret_bits: 1,
            ..Resources::default()
        }
    }

    fn source(&self) -> Source {
        Source::CdsFromPsm { psm: Box::new(self.psm.source()) }
    }
}

impl TrivialCds {
    pub fn new(f: BoolFn, reveal: bool) -> Self {
        Self { f, reveal }
    }
}

impl CdsScheme for TrivialCds {
    fn function(&self) -> &BoolFn {
        &self.f
    }

    fn secret_values(&self) -> u64 {
        2
    }

    fn holder(&self) -> Holder {
        Holder::Alice
    }

    fn coins(&self) -> &[Coin] {
        &[]
    }

    fn alice_message(&self, _x: u64, s: u64, _r: &[u64]) -> Msg {
        if self.reveal {
            smallvec![s as u32]
        } else {
            Msg::new()
        }
    }

    fn bob_message(&self, _y: u64, _s: u64, _r: &[u64]) -> Msg {
        Msg::new()
    }

    fn decode(&self, _x: u64, _y: u64, m0: &Msg, _m1: &Msg) -> u64 {
        m0.first().copied().unwrap_or(0) as u64
    }

    fn resources(&self) -> Resources {
        Resources { alice_message_bits: self.reveal as u64, secret_bits: 1, ..Resources::default() }
    }

    fn source(&self) -> Source {
        Source::CdsTrivial { reveal: self.reveal }
    }
}

/// `copies` independent runs hiding one secret digit each; messages are
/// length-prefixed and concatenated.
#[derive(Debug)]
pub struct ParallelCds {
    inner: Cds,
    copies: u32,
    coins: Vec<Coin>,
    base: u64,
}

pub fn cds_parallel(inner: Cds, copies: u32) -> Result<Cds> {
    if copies == 0 {
        return Err(invalid("parallel composition needs at least one copy"));
    }
    let base = inner.secret_values();
    base.checked_pow(copies).ok_or_else(|| invalid("secret space overflows"))?;
    let coins = (0..copies).flat_map(|_| inner.coins().iter().copied()).collect();
    Ok(Arc::new(ParallelCds { inner, copies, coins, base }))
}

impl ParallelCds {
    fn digit(&self, s: u64, k: u32) -> u64 {
        s / self.base.pow(k) % self.base
    }

    fn chunk<'a>(&self, r: &'a [u64], k: u32) -> &'a [u64] {
        let n = self.inner.coins().len();
        &r[k as usize * n..(k as usize + 1) * n]
    }

    fn join(parts: impl Iterator<Item = Msg>) -> Msg {
        let mut out = Msg::new();
        for p in parts {
            out.push(p.len() as u32);
            out.extend_from_slice(&p);
        }
        out
    }

    fn unjoin(m: &Msg) -> Vec<Msg> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < m.len() {
            let len = m[i] as usize;
            let end = (i + 1 + len).min(m.len());
            out.push(Msg::from_slice(&m[i + 1..end]));
            i = end;
        }
        out
    }
}

impl CdsScheme for ParallelCds {
    fn function(&self) -> &BoolFn {
        self.inner.function()
    }

    fn in_domain(&self, x: u64, y: u64) -> bool {
        self.inner.in_domain(x, y)
    }

    fn secret_values(&self) -> u64 {
        self.base.pow(self.copies)
    }

    fn holder(&self) -> Holder {
        self.inner.holder()
    }

    fn coins(&self) -> &[Coin] {
        &self.coins
    }

    fn alice_message(&self, x: u64, s: u64, r: &[u64]) -> Msg {
        Self::join((0..self.copies).map(|k| self.inner.alice_message(x, self.digit(s, k), self.chunk(r, k))))
    }

    fn bob_message(&self, y: u64, s: u64, r: &[u64]) -> Msg {
        Self::join((0..self.copies).map(|k| self.inner.bob_message(y, self.digit(s, k), self.chunk(r, k))))
    }

    fn decode(&self, x: u64, y: u64, m0: &Msg, m1: &Msg) -> u64 {
        let a = Self::unjoin(m0);
        let b = Self::unjoin(m1);
        let empty = Msg::new();
        (0..self.copies as usize).rev().fold(0, |acc, k| {
            let d = self.inner.decode(x, y, a.get(k).unwrap_or(&empty), b.get(k).unwrap_or(&empty));
            acc * self.base + d.min(self.base - 1)
        })
    }

    fn resources(&self) -> Resources {
        let r = self.inner.resources();
        let c = self.copies as u64;
        Resources {
            shared_random_bits: r.shared_random_bits * c,
            private_random_bits: r.private_random_bits * c,
            alice_message_bits: r.alice_message_bits * c,
            bob_message_bits: r.bob_message_bits * c,
            secret_bits: bits_for(self.secret_values()),
        }
    }

    fn source(&self) -> Source {
        Source::CdsParallel { inner: Box::new(self.inner.source()), copies: self.copies }
    }
}

type AliceFn = dyn Fn(u64, u64, &[u64]) -> Msg + Send + Sync;
type BobFn = dyn Fn(u64, u64, &[u64]) -> Msg + Send + Sync;
type DecodeFn = dyn Fn(u64, u64, &Msg, &Msg) -> u64 + Send + Sync;

/// A hand-written CDS given by closures; used for reference protocols and
/// deliberately broken ones.
pub struct ClosureCds {
    pub name: String,
    pub f: BoolFn,
    pub secrets: u64,
    pub holder: Holder,
    pub coins: Vec<Coin>,
    pub alice: Box<AliceFn>,
    pub bob: Box<BobFn>,
    pub decode: Box<DecodeFn>,
    pub resources: Resources,
}

impl std::fmt::Debug for ClosureCds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClosureCds").field("name", &self.name).finish_non_exhaustive()
    }
}

impl CdsScheme for ClosureCds {
    fn function(&self) -> &BoolFn {
        &self.f
    }

    fn secret_values(&self) -> u64 {
        self.secrets
    }

    fn holder(&self) -> Holder {
        self.holder
    }

    fn coins(&self) -> &[Coin] {
        &self.coins
    }

    fn alice_message(&self, x: u64, s: u64, r: &[u64]) -> Msg {
        (self.alice)(x, s, r)
    }

    fn bob_message(&self, y: u64, s: u64, r: &[u64]) -> Msg {
        (self.bob)(y, s, r)
    }

    fn decode(&self, x: u64, y: u64, m0: &Msg, m1: &Msg) -> u64 {
        (self.decode)(x, y, m0, m1)
    }

    fn resources(&self) -> Resources {
        self.resources
    }

    fn source(&self) -> Source {
        Source::Custom { name: self.name.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::span::library as spans;
    use crate::boolfn::{and, eq, or, threshold, xor};
    use crate::classical::psm::psm_generic_table;
    use crate::classical::verify::{verify_cds, VerifyOptions};
    use crate::gardenhose::{gh_generic, library as strategies};

    fn perfect(p: &dyn CdsScheme) -> bool {
        let r = verify_cds(p, &VerifyOptions::default()).unwrap();
        r.is_perfect()
    }

    #[test]
    fn reference_protocols() {
        // XOR: m0 = s ^ r_x, m1 = r_{1-y}
        let xor_cds = ClosureCds {
            name: "xor-two-bit".into(),
            f: xor(1),
            secrets: 2,
            holder: Holder::Alice,
            coins: vec![Coin::shared(2), Coin::shared(2)],
            alice: Box::new(|x, s, r| smallvec![(s ^ r[x as usize]) as u32]),
            bob: Box::new(|y, _, r| smallvec![r[1 - y as usize] as u32]),
            decode: Box::new(|_, _, a, b| (a[0] ^ b[0]) as u64),
            resources: Resources::default(),
        };
        assert!(perfect(&xor_cds));

        // AND: Alice sends r iff x = 1, Bob sends s ^ r iff y = 1
        let and_cds = ClosureCds {
            name: "and-additive".into(),
            f: and(1),
            secrets: 2,
            holder: Holder::Both,
            coins: vec![Coin::shared(2)],
            alice: Box::new(|x, _, r| if x == 1 { smallvec![r[0] as u32] } else { Msg::new() }),
            bob: Box::new(|y, s, r| if y == 1 { smallvec![(s ^ r[0]) as u32] } else { Msg::new() }),
            decode: Box::new(|_, _, a, b| match (a.first(), b.first()) {
                (Some(p), Some(q)) => (p ^ q) as u64,
                _ => 0,
            }),
            resources: Resources::default(),
        };
        assert!(perfect(&and_cds));
    }

    #[test]
    fn broken_protocol_has_full_distance() {
        let leaky = ClosureCds {
            name: "leaky".into(),
            f: and(1),
            secrets: 2,
            holder: Holder::Both,
            coins: vec![Coin::shared(2)],
            alice: Box::new(|_, _, _| Msg::new()),
            bob: Box::new(|_, s, r| smallvec![(s ^ r[0]) as u32, r[0] as u32]),
            decode: Box::new(|_, _, _, b| (b[0] ^ b[1]) as u64),
            resources: Resources::default(),
        };
        let r = verify_cds(&leaky, &VerifyOptions::default()).unwrap();
        assert_eq!(r.delta_pair, crate::classical::Ratio::new(2, 1));
        assert!(r.eps_hat.is_zero());
        assert!(r.midpoint_within_pair);
    }

    #[test]
    fn bob_seeing_alice_only_secret_is_flagged() {
        let cheat = ClosureCds {
            name: "cheat".into(),
            f: xor(1),
            secrets: 2,
            holder: Holder::Alice,
            coins: vec![],
            alice: Box::new(|_, _, _| Msg::new()),
            bob: Box::new(|y, s, _| if y == 1 { smallvec![s as u32] } else { Msg::new() }),
            decode: Box::new(|_, _, _, b| b.first().copied().unwrap_or(0) as u64),
            resources: Resources::default(),
        };
        let r = verify_cds(&cheat, &VerifyOptions::default()).unwrap();
        assert!(!r.bob_view_ok);
        assert!(!r.is_perfect());
    }

    #[test]
    fn gh_compiled_protocols_are_perfect() {
        for (s, f) in [(strategies::and1(), and(1)), (strategies::xor1(), xor(1))] {
            let p = cds_from_gh(&s, &f).unwrap();
            assert!(perfect(p.as_ref()));
            assert_eq!(p.resources().shared_random_bits, 3);
        }
        let g = gh_generic(&and(1)).unwrap();
        let p = cds_from_gh(&g, &and(1)).unwrap();
        assert!(perfect(p.as_ref()));
        assert_eq!(p.resources().shared_random_bits, 4);
        assert!(cds_from_gh(&strategies::and1(), &xor(1)).is_err());
    }

    #[test]
    fn span_compiled_protocols_are_perfect() {
        let cases = [
            (spans::and1(), and(1)),
            (spans::or1(), or(1)),
            (spans::eq1(), eq(1)),
            (spans::threshold_2_of_3(2).unwrap(), threshold(1, 2, 2)),
            (spans::threshold_2_of_3(3).unwrap(), threshold(1, 2, 2)),
        ];
        for (program, f) in cases {
            for variant in [SpanVariant::CommOpt, SpanVariant::RandOpt] {
                let p = cds_from_span(&program, &f, variant).unwrap();
                assert!(perfect(p.as_ref()), "{} {variant:?}", f.label());
                let total = program.size() as u64 * program.field().element_bits() as u64;
                let r = p.resources();
                match variant {
                    SpanVariant::CommOpt => assert!(r.communication_bits() <= total),
                    SpanVariant::RandOpt => assert!(r.shared_random_bits <= total),
                }
            }
        }
        assert!(cds_from_span(&spans::and1(), &xor(1), SpanVariant::CommOpt).is_err());
    }

    #[test]
    fn psm_compiled_protocols_are_perfect() {
        for f in [and(1), xor(1), eq(1)] {
            let p = cds_from_psm(psm_generic_table(&f).unwrap()).unwrap();
            assert!(perfect(p.as_ref()), "{}", f.label());
        }
        let zero = BoolFn::constant(1, 1, false).unwrap();
        let p = cds_from_psm(psm_generic_table(&zero).unwrap()).unwrap();
        let r = verify_cds(p.as_ref(), &VerifyOptions::default()).unwrap();
        assert!(r.delta_pair.is_zero() && r.is_perfect());
        let one = BoolFn::constant(1, 1, true).unwrap();
        assert!(perfect(cds_from_psm(psm_generic_table(&one).unwrap()).unwrap().as_ref()));
    }

    #[test]
    fn parallel_composition() {
        let base = cds_from_gh(&strategies::and1(), &and(1)).unwrap();
        let two = cds_parallel(base.clone(), 2).unwrap();
        assert_eq!(two.secret_values(), 4);
        assert!(perfect(two.as_ref()));
        let (r1, r2) = (base.resources(), two.resources());
        assert_eq!(r2.shared_random_bits, 2 * r1.shared_random_bits);
        assert_eq!(r2.communication_bits(), 2 * r1.communication_bits());
    }

    #[test]
    fn parallel_composition_bounds_noise() {
        // decoder fails on one of four coin values for every 1-input
        let noisy: Cds = Arc::new(ClosureCds {
            name: "noisy-and".into(),
            f: and(1),
            secrets: 2,
            holder: Holder::Both,
            coins: vec![Coin::shared(2), Coin::shared(2)],
            alice: Box::new(|x, _, r| if x == 1 { smallvec![r[0] as u32] } else { Msg::new() }),
            bob: Box::new(
                |y, s, r| if y == 1 { smallvec![(s ^ r[0]) as u32, r[1] as u32] } else { smallvec![r[1] as u32] },
            ),
            // fails exactly when r0 = r1 = 1
            decode: Box::new(|_, _, a, b| match (a.first(), b.len()) {
                (Some(&p), 2) => ((p ^ b[0]) ^ (p & b[1])) as u64,
                _ => 0,
            }),
            resources: Resources::default(),
        });
        let opts = VerifyOptions::default();
        let one = verify_cds(noisy.as_ref(), &opts).unwrap();
        assert_eq!(one.eps_hat, crate::classical::Ratio::new(1, 4));
        let two = verify_cds(cds_parallel(noisy, 2).unwrap().as_ref(), &opts).unwrap();
        assert!(two.eps_hat.value() <= 0.5);
        assert!(two.delta_pair.is_zero());
    }
}
