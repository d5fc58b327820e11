//! Decomposable randomized encodings.

use std::sync::Arc;

use smallvec::smallvec;

use super::{bits_for, Coin, Dre, DreScheme, Msg, Resources};
use crate::algebra::field::{euler_qr, PrimeField};
use crate::boolfn::{qr_split, xor, BitSplit, BoolFn};
use crate::descriptor::Source;
use crate::error::{domain, invalid, Result};

pub use super::psm::psm_from_dre;

/// Encodes `a = sum_i a_i 2^(i-1)` as `y_i = a_i r^2 2^(i-1) + s_i mod p` with
/// `r` uniform in `Z_p^*` and `s` uniform subject to `sum_i s_i = 0`. The sum
/// of all `y_i` is `r^2 a`, whose residuosity is that of `a`. Inputs are
/// restricted to `a` in `Z_p^*`.
#[derive(Debug)]
pub struct QrDre {
    f: BoolFn,
    field: PrimeField,
    split: BitSplit,
    coins: Vec<Coin>,
}

pub fn dre_qr(p: u64, split: Option<BitSplit>) -> Result<Dre> {
    Ok(Arc::new(QrDre::new(p, split)?))
}

impl QrDre {
    pub fn new(p: u64, split: Option<BitSplit>) -> Result<Self> {
        if p < 3 {
            return Err(invalid(format!("QR encoding needs an odd prime, got {p}")));
        }
        let field = PrimeField::new(p)?;
        let f = qr_split(p, split)?;
        let split = match f.name() {
            Some(crate::boolfn::NamedFn::QrSplit { split, .. }) => split.clone(),
            _ => unreachable!("qr_split names its output"),
        };
        let mut coins = vec![Coin::shared(p - 1)];
        coins.extend(std::iter::repeat_n(Coin::shared(p), split.n as usize - 1));
        Ok(Self { f, field, split, coins })
    }

    pub fn split(&self) -> &BitSplit {
        &self.split
    }

    fn mask(&self, i: u32, r: &[u64]) -> u64 {
        let n = self.split.n;
        if i < n {
            r[i as usize]
        } else {
            let sum = r[1..n as usize].iter().fold(0, |acc, &v| self.field.add(acc, v));
            self.field.neg(sum)
        }
    }

    fn part(&self, positions: &[u32], bits: u64, r: &[u64]) -> Msg {
        let rr = r[0] + 1;
        let r2 = self.field.mul(rr, rr);
        positions
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                let a_i = (bits >> j) & 1;
                let weight = self.field.pow(2, (i - 1) as u64);
                let term = self.field.mul(a_i * r2 % self.field.p(), weight);
                self.field.add(term, self.mask(i, r)) as u32
            })
            .collect()
    }

    /// The full encoding `(y_1, .., y_n)` of `a` under coins `r`
    /// (`r[0] + 1` is the multiplier, `r[1..]` the free masks).
    pub fn encode(&self, a: u64, r: &[u64]) -> Result<Vec<u64>> {
        let p = self.field.p();
        if a == 0 || a >= p {
            return Err(domain(format!("QR encoding needs 0 < a < {p}, got {a}")));
        }
        let all: Vec<u32> = (1..=self.split.n).collect();
        Ok(self.part(&all, a, r).into_iter().map(u64::from).collect())
    }
}

impl DreScheme for QrDre {
    fn function(&self) -> &BoolFn {
        &self.f
    }

    fn in_domain(&self, x: u64, y: u64) -> bool {
        let a = self.split.assemble(x, y);
        a != 0 && a < self.field.p()
    }

    fn coins(&self) -> &[Coin] {
        &self.coins
    }

    fn encode_x(&self, x: u64, r: &[u64]) -> Msg {
        self.part(&self.split.alice, x, r)
    }

    fn encode_y(&self, y: u64, r: &[u64]) -> Msg {
        self.part(&self.split.bob(), y, r)
    }

    fn decode(&self, ex: &Msg, ey: &Msg) -> u64 {
        let sum = ex.iter().chain(ey).fold(0, |acc, &v| self.field.add(acc, v as u64));
        // zero never occurs on the domain; it is a square by convention
        euler_qr(sum, self.field.p()).unwrap_or(true) as u64
    }

    fn resources(&self) -> Resources {
        let p = self.field.p();
        let bits = bits_for(p);
        Resources {
            shared_random_bits: bits_for(p - 1) + (self.split.n as u64 - 1) * bits,
            alice_message_bits: self.split.n_x() as u64 * bits,
            bob_message_bits: self.split.n_y() as u64 * bits,
            ..Resources::default()
        }
    }

    fn source(&self) -> Source {
        Source::DreQr { p: self.field.p(), alice_bits: self.split.alice.clone() }
    }
}

/// `(x ^ r, y ^ r)` with one shared bit; decodes by XOR.
#[derive(Debug)]
pub struct XorDre {
    f: BoolFn,
    coins: Vec<Coin>,
}

pub fn dre_xor() -> Dre {
    Arc::new(XorDre { f: xor(1), coins: vec![Coin::shared(2)] })
}

impl DreScheme for XorDre {
    fn function(&self) -> &BoolFn {
        &self.f
    }

    fn coins(&self) -> &[Coin] {
        &self.coins
    }

    fn encode_x(&self, x: u64, r: &[u64]) -> Msg {
        smallvec![(x ^ r[0]) as u32]
    }

    fn encode_y(&self, y: u64, r: &[u64]) -> Msg {
        smallvec![(y ^ r[0]) as u32]
    }

    fn decode(&self, ex: &Msg, ey: &Msg) -> u64 {
        (ex[0] ^ ey[0]) as u64
    }

    fn resources(&self) -> Resources {
        Resources { shared_random_bits: 1, alice_message_bits: 1, bob_message_bits: 1, ..Resources::default() }
    }

    fn source(&self) -> Source {
        Source::DreXor
    }
}
