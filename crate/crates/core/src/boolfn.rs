//! Two-party Boolean functions as explicit truth tables.
//!
//! Inputs are packed with Alice's input in the high bits: the table entry for
//! `(x, y)` lives at index `(x << n_y) | y`. Individual input bits are numbered
//! from the least significant bit, so "bit `k` of `x`" is `(x >> k) & 1`.
//!
//! The hex form of a table reads the table as one integer whose bit `i` is the
//! entry at index `i`, written most significant digit first.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::field::is_prime;
use crate::error::{domain, invalid, Result};

/// Largest total input width accepted for a truth table.
pub const MAX_INPUT_BITS: u32 = 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolFn {
    n_x: u32,
    n_y: u32,
    table: Vec<bool>,
    name: Option<NamedFn>,
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoolFn")
            .field("n_x", &self.n_x)
            .field("n_y", &self.n_y)
            .field("table", &self.to_hex())
            .field("name", &self.name)
            .finish()
    }
}

impl BoolFn {
    pub fn from_table(n_x: u32, n_y: u32, table: Vec<bool>) -> Result<Self> {
        check_width(n_x, n_y)?;
        let expected = 1usize << (n_x + n_y);
        if table.len() != expected {
            return Err(invalid(format!(
                "truth table has {} entries, expected 2^{} = {expected}",
                table.len(),
                n_x + n_y
            )));
        }
        Ok(Self { n_x, n_y, table, name: None })
    }

    pub fn from_fn(n_x: u32, n_y: u32, mut f: impl FnMut(u64, u64) -> bool) -> Result<Self> {
        check_width(n_x, n_y)?;
        let mut table = Vec::with_capacity(1 << (n_x + n_y));
        for x in 0..1u64 << n_x {
            for y in 0..1u64 << n_y {
                table.push(f(x, y));
            }
        }
        Ok(Self { n_x, n_y, table, name: None })
    }

    /// Builds the function whose table is the low `2^(n_x+n_y)` bits of `bits`.
    pub fn from_bits(n_x: u32, n_y: u32, bits: u64) -> Result<Self> {
        if n_x + n_y > 6 {
            return Err(invalid("from_bits supports at most 6 input bits"));
        }
        Self::from_fn(n_x, n_y, |x, y| (bits >> ((x << n_y) | y)) & 1 == 1)
    }

    pub fn constant(n_x: u32, n_y: u32, value: bool) -> Result<Self> {
        let mut f = Self::from_fn(n_x, n_y, |_, _| value)?;
        f.name = Some(NamedFn::Const { value });
        Ok(f)
    }

    pub fn n_x(&self) -> u32 {
        self.n_x
    }

    pub fn n_y(&self) -> u32 {
        self.n_y
    }

    pub fn x_count(&self) -> u64 {
        1 << self.n_x
    }

    pub fn y_count(&self) -> u64 {
        1 << self.n_y
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn name(&self) -> Option<&NamedFn> {
        self.name.as_ref()
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.label(self.n_x, self.n_y),
            None => format!("table:{}:{}:{}", self.n_x, self.n_y, self.to_hex()),
        }
    }

    pub fn eval(&self, x: u64, y: u64) -> Result<bool> {
        if x >= self.x_count() || y >= self.y_count() {
            return Err(domain(format!("input ({x}, {y}) outside {{0,1}}^{} x {{0,1}}^{}", self.n_x, self.n_y)));
        }
        Ok(self.at(x, y))
    }

    /// Unchecked evaluation; callers guarantee the inputs are in range.
    #[inline]
    pub fn at(&self, x: u64, y: u64) -> bool {
        self.table[((x << self.n_y) | y) as usize]
    }

    pub fn is_constant(&self) -> Option<bool> {
        let first = self.table[0];
        self.table.iter().all(|&b| b == first).then_some(first)
    }

    /// Every input pair in lexicographic order.
    pub fn inputs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let ny = self.y_count();
        (0..self.x_count()).flat_map(move |x| (0..ny).map(move |y| (x, y)))
    }

    pub fn to_hex(&self) -> String {
        let digits = self.table.len().div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                if self.table.get(d * 4 + b).copied().unwrap_or(false) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(n_x: u32, n_y: u32, hex: &str) -> Result<Self> {
        check_width(n_x, n_y)?;
        let len = 1usize << (n_x + n_y);
        let body = hex.strip_prefix("0x").unwrap_or(hex);
        if body.is_empty() {
            return Err(invalid("empty hex table"));
        }
        let mut table = vec![false; len];
        for (pos, ch) in body.chars().rev().enumerate() {
            let nibble = ch.to_digit(16).ok_or_else(|| invalid(format!("invalid hex digit {ch:?}")))?;
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    let idx = pos * 4 + b;
                    if idx >= len {
                        return Err(invalid("hex table has bits beyond 2^(n_x+n_y)"));
                    }
                    table[idx] = true;
                }
            }
        }
        Ok(Self { n_x, n_y, table, name: None })
    }
}

fn check_width(n_x: u32, n_y: u32) -> Result<()> {
    if n_x + n_y > MAX_INPUT_BITS {
        return Err(invalid(format!("n_x + n_y = {} exceeds the {MAX_INPUT_BITS}-bit table limit", n_x + n_y)));
    }
    Ok(())
}

/// How the bits `a_1 .. a_n` of an integer (weight `2^(i-1)`) are split between
/// the two parties. Alice's `x` carries her positions in the listed order,
/// Bob's `y` carries the remaining positions in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitSplit {
    pub n: u32,
    pub alice: Vec<u32>,
}

impl BitSplit {
    pub fn new(n: u32, alice: Vec<u32>) -> Result<Self> {
        if n == 0 || n > MAX_INPUT_BITS {
            return Err(invalid(format!("bit split width {n} out of range")));
        }
        let mut seen = vec![false; n as usize + 1];
        for &i in &alice {
            if i == 0 || i > n || std::mem::replace(&mut seen[i as usize], true) {
                return Err(invalid(format!("bad or repeated bit position {i} in split of {n} bits")));
            }
        }
        Ok(Self { n, alice })
    }

    /// Alice receives the low half (rounded up) of the bit positions.
    pub fn balanced(n: u32) -> Result<Self> {
        Self::new(n, (1..=n.div_ceil(2)).collect())
    }

    pub fn bob(&self) -> Vec<u32> {
        (1..=self.n).filter(|i| !self.alice.contains(i)).collect()
    }

    pub fn n_x(&self) -> u32 {
        self.alice.len() as u32
    }

    pub fn n_y(&self) -> u32 {
        self.n - self.n_x()
    }

    pub fn assemble(&self, x: u64, y: u64) -> u64 {
        let mut a = 0;
        for (j, &pos) in self.alice.iter().enumerate() {
            a |= ((x >> j) & 1) << (pos - 1);
        }
        for (j, pos) in self.bob().into_iter().enumerate() {
            a |= ((y >> j) & 1) << (pos - 1);
        }
        a
    }

    pub fn split(&self, a: u64) -> (u64, u64) {
        let mut x = 0;
        for (j, &pos) in self.alice.iter().enumerate() {
            x |= ((a >> (pos - 1)) & 1) << j;
        }
        let mut y = 0;
        for (j, pos) in self.bob().into_iter().enumerate() {
            y |= ((a >> (pos - 1)) & 1) << j;
        }
        (x, y)
    }
}

/// The library of named instances.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum NamedFn {
    /// All bits of `x` and `y` are one.
    And,
    /// Some bit of `x` or `y` is one.
    Or,
    /// Parity of all input bits.
    Xor,
    /// `x == y`.
    Eq,
    /// Inner product of `x` and `y` mod 2.
    Ip,
    /// Bit `x` of the `2^n_x`-bit string `y`.
    Index,
    /// At least `k` of all input bits are one.
    Threshold {
        k: u32,
    },
    /// `a mod p` is a square mod `p`, where `a` is reassembled from both inputs.
    QrSplit {
        p: u64,
        split: BitSplit,
    },
    Const {
        value: bool,
    },
}

impl NamedFn {
    pub fn label(&self, n_x: u32, n_y: u32) -> String {
        match self {
            NamedFn::And => format!("and{n_x}x{n_y}"),
            NamedFn::Or => format!("or{n_x}x{n_y}"),
            NamedFn::Xor => format!("xor{n_x}x{n_y}"),
            NamedFn::Eq => format!("eq{n_x}"),
            NamedFn::Ip => format!("ip{n_x}"),
            NamedFn::Index => format!("index{n_x}"),
            NamedFn::Threshold { k } => format!("thr{k}of{}", n_x + n_y),
            NamedFn::QrSplit { p, .. } => format!("qr{p}"),
            NamedFn::Const { value } => format!("const{}", *value as u8),
        }
    }

    /// Builds the truth table, validating parameters against the input widths.
    pub fn build(&self, n_x: u32, n_y: u32) -> Result<BoolFn> {
        let mut f = match self {
            NamedFn::And => BoolFn::from_fn(n_x, n_y, |x, y| x == (1 << n_x) - 1 && y == (1 << n_y) - 1),
            NamedFn::Or => BoolFn::from_fn(n_x, n_y, |x, y| x != 0 || y != 0),
            NamedFn::Xor => BoolFn::from_fn(n_x, n_y, |x, y| (x.count_ones() + y.count_ones()) % 2 == 1),
            NamedFn::Eq => {
                if n_x != n_y {
                    return Err(invalid("EQ needs n_x == n_y"));
                }
                BoolFn::from_fn(n_x, n_y, |x, y| x == y)
            }
            NamedFn::Ip => {
                if n_x != n_y {
                    return Err(invalid("IP needs n_x == n_y"));
                }
                BoolFn::from_fn(n_x, n_y, |x, y| (x & y).count_ones() % 2 == 1)
            }
            NamedFn::Index => {
                if n_x >= 6 || n_y != 1 << n_x {
                    return Err(invalid("INDEX needs n_y = 2^n_x"));
                }
                BoolFn::from_fn(n_x, n_y, |x, y| (y >> x) & 1 == 1)
            }
            NamedFn::Threshold { k } => BoolFn::from_fn(n_x, n_y, |x, y| x.count_ones() + y.count_ones() >= *k),
            NamedFn::QrSplit { p, split } => {
                if *p < 3 || !is_prime(*p) {
                    return Err(invalid(format!("QR_SPLIT modulus {p} is not an odd prime")));
                }
                if split.n_x() != n_x || split.n_y() != n_y {
                    return Err(invalid("QR_SPLIT bit split disagrees with n_x/n_y"));
                }
                let squares = square_table(*p);
                BoolFn::from_fn(n_x, n_y, |x, y| squares[(split.assemble(x, y) % p) as usize])
            }
            NamedFn::Const { value } => BoolFn::from_fn(n_x, n_y, |_, _| *value),
        }?;
        f.name = Some(self.clone());
        Ok(f)
    }
}

/// `squares[a]` is true iff `a = b^2 mod p` for some `b` (0 counts as a square).
fn square_table(p: u64) -> Vec<bool> {
    let mut squares = vec![false; p as usize];
    for b in 0..p {
        squares[(b * b % p) as usize] = true;
    }
    squares
}

pub fn and(n: u32) -> BoolFn {
    NamedFn::And.build(n, n).expect("AND is total")
}

pub fn or(n: u32) -> BoolFn {
    NamedFn::Or.build(n, n).expect("OR is total")
}

pub fn xor(n: u32) -> BoolFn {
    NamedFn::Xor.build(n, n).expect("XOR is total")
}

pub fn eq(n: u32) -> BoolFn {
    NamedFn::Eq.build(n, n).expect("EQ is total")
}

pub fn ip(n: u32) -> BoolFn {
    NamedFn::Ip.build(n, n).expect("IP is total")
}

pub fn index(n_x: u32) -> Result<BoolFn> {
    NamedFn::Index.build(n_x, 1 << n_x)
}

pub fn threshold(n_x: u32, n_y: u32, k: u32) -> BoolFn {
    NamedFn::Threshold { k }.build(n_x, n_y).expect("threshold is total")
}

/// QR over `Z_p` with the bits of `a` split by `split` (balanced by default).
pub fn qr_split(p: u64, split: Option<BitSplit>) -> Result<BoolFn> {
    if p < 3 || !is_prime(p) {
        return Err(invalid(format!("QR_SPLIT modulus {p} is not an odd prime")));
    }
    let n = 64 - p.leading_zeros();
    let split = match split {
        Some(s) if s.n != n => {
            return Err(invalid(format!("split covers {} bits, p needs {n}", s.n)));
        }
        Some(s) => s,
        None => BitSplit::balanced(n)?,
    };
    let (n_x, n_y) = (split.n_x(), split.n_y());
    NamedFn::QrSplit { p, split }.build(n_x, n_y)
}

/// Lexicographically smallest `(x, y)` with `f(x, y) = 0`.
pub fn find_zero_input(f: &BoolFn) -> Option<(u64, u64)> {
    find_zero_input_where(f, |_, _| true)
}

/// As [`find_zero_input`], restricted to inputs accepted by `domain`.
pub fn find_zero_input_where(f: &BoolFn, domain: impl Fn(u64, u64) -> bool) -> Option<(u64, u64)> {
    f.inputs().find(|&(x, y)| domain(x, y) && !f.at(x, y))
}

/// JSON function spec: either a named instance or a hex truth table.
///
/// `{"name": "and", "n_x": 1, "n_y": 1}`,
/// `{"name": "qr_split", "n_x": 2, "n_y": 1, "params": {"p": 7, "alice_bits": [1, 2]}}`,
/// `{"table": "9", "n_x": 1, "n_y": 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FnSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    pub n_x: u32,
    pub n_y: u32,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl FnSpec {
    pub fn from_fn(f: &BoolFn) -> Self {
        let mut params = serde_json::Map::new();
        let name = f.name.as_ref().map(|n| match n {
            NamedFn::And => "and",
            NamedFn::Or => "or",
            NamedFn::Xor => "xor",
            NamedFn::Eq => "eq",
            NamedFn::Ip => "ip",
            NamedFn::Index => "index",
            NamedFn::Threshold { k } => {
                params.insert("k".into(), (*k).into());
                "threshold"
            }
            NamedFn::QrSplit { p, split } => {
                params.insert("p".into(), (*p).into());
                params.insert("alice_bits".into(), split.alice.clone().into());
                "qr_split"
            }
            NamedFn::Const { value } => {
                params.insert("value".into(), (*value).into());
                "const"
            }
        });
        Self { name: name.map(str::to_owned), table: Some(f.to_hex()), n_x: f.n_x, n_y: f.n_y, params }
    }

    pub fn build(&self) -> Result<BoolFn> {
        let named = self.name.as_deref().map(|n| self.named(n)).transpose()?;
        let from_table = self.table.as_deref().map(|t| BoolFn::from_hex(self.n_x, self.n_y, t)).transpose()?;
        match (named, from_table) {
            (Some(n), Some(t)) if n.table != t.table => {
                Err(invalid(format!("table {} disagrees with named function {}", t.to_hex(), n.label())))
            }
            (Some(n), _) => Ok(n),
            (None, Some(t)) => Ok(t),
            (None, None) => Err(invalid("function spec needs a name or a table")),
        }
    }

    fn named(&self, name: &str) -> Result<BoolFn> {
        let param_u64 = |key: &str| -> Result<u64> {
            self.params
                .get(key)
                .and_then(|v| v.as_u64())
                .ok_or_else(|| invalid(format!("{name} needs integer param {key:?}")))
        };
        let named = match name {
            "and" => NamedFn::And,
            "or" => NamedFn::Or,
            "xor" => NamedFn::Xor,
            "eq" => NamedFn::Eq,
            "ip" => NamedFn::Ip,
            "index" => NamedFn::Index,
            "threshold" => {
                NamedFn::Threshold { k: u32::try_from(param_u64("k")?).map_err(|_| invalid("k too large"))? }
            }
            "const" => NamedFn::Const {
                value: self
                    .params
                    .get("value")
                    .and_then(|v| v.as_bool())
                    .ok_or_else(|| invalid("const needs boolean param \"value\""))?,
            },
            "qr_split" => {
                let p = param_u64("p")?;
                if !(3..=1 << MAX_INPUT_BITS).contains(&p) {
                    return Err(invalid(format!("QR_SPLIT modulus {p} out of range")));
                }
                let n = 64 - p.leading_zeros();
                let split = match self.params.get("alice_bits") {
                    Some(v) => {
                        let bits: Vec<u32> = serde_json::from_value(v.clone())?;
                        BitSplit::new(n, bits)?
                    }
                    None => BitSplit::balanced(n)?,
                };
                NamedFn::QrSplit { p, split }
            }
            other => return Err(invalid(format!("unknown function name {other:?}"))),
        };
        named.build(self.n_x, self.n_y)
    }
}

impl BoolFn {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: FnSpec = serde_json::from_str(text)?;
        spec.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&FnSpec::from_fn(self)).expect("function spec serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert!(and(1).eval(1, 1).unwrap());
        assert!(!xor(1).eval(0, 0).unwrap());
        assert!(!ip(2).eval(0b11, 0b11).unwrap());
    }

    #[test]
    fn eval_out_of_range_is_domain_error() {
        assert!(matches!(and(1).eval(2, 0), Err(crate::Error::Domain(_))));
        assert!(matches!(and(1).eval(0, 5), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn eq_table_ordering() {
        assert_eq!(eq(1).table(), &[true, false, false, true]);
        assert_eq!(eq(1).to_hex(), "9");
        assert_eq!(and(1).to_hex(), "8");
    }

    #[test]
    fn index_picks_bit_x_of_d() {
        let f = index(1).unwrap();
        for x in 0..2 {
            for d in 0..4 {
                assert_eq!(f.at(x, d), (d >> x) & 1 == 1);
            }
        }
        assert!(index(1).is_ok());
        assert!(NamedFn::Index.build(1, 3).is_err());
    }

    #[test]
    fn qr_split_p7() {
        let f = qr_split(7, None).unwrap();
        let split = BitSplit::balanced(3).unwrap();
        let val = |a: u64| {
            let (x, y) = split.split(a);
            f.at(x, y)
        };
        assert!(val(2));
        assert!(!val(3));
        assert!(val(0));
        // the balanced split and a scattered split agree on every value of a
        let other = qr_split(7, Some(BitSplit::new(3, vec![3, 1]).unwrap())).unwrap();
        let other_split = BitSplit::new(3, vec![3, 1]).unwrap();
        for a in 0..8 {
            let (x, y) = other_split.split(a);
            assert_eq!(other.at(x, y), val(a), "a = {a}");
        }
    }

    #[test]
    fn qr_split_rejects_composite() {
        assert!(qr_split(9, None).is_err());
        let spec = FnSpec {
            name: Some("qr_split".into()),
            table: None,
            n_x: 2,
            n_y: 2,
            params: serde_json::json!({"p": 15}).as_object().unwrap().clone(),
        };
        assert!(matches!(spec.build(), Err(crate::Error::Validation(_))));
    }

    #[test]
    fn zero_inputs() {
        assert_eq!(find_zero_input(&and(1)), Some((0, 0)));
        assert_eq!(find_zero_input(&xor(1)), Some((0, 0)));
        assert_eq!(find_zero_input(&BoolFn::constant(1, 1, true).unwrap()), None);
        assert_eq!(find_zero_input(&or(1)), Some((0, 0)));
        assert_eq!(find_zero_input(&BoolFn::from_bits(1, 1, 0b0111).unwrap()), Some((1, 1)));
    }

    #[test]
    fn hex_round_trip_and_rejects_overflow() {
        let f = ip(2);
        let g = BoolFn::from_hex(2, 2, &f.to_hex()).unwrap();
        assert_eq!(f.table(), g.table());
        assert!(BoolFn::from_hex(1, 1, "10").is_err());
        assert!(BoolFn::from_hex(1, 1, "0x08").is_ok());
        assert!(BoolFn::from_hex(1, 1, "g").is_err());
    }

    #[test]
    fn json_spec_named_and_table() {
        let f = BoolFn::from_json(r#"{"name":"and","n_x":1,"n_y":1}"#).unwrap();
        assert_eq!(f.table(), and(1).table());
        let g = BoolFn::from_json(r#"{"table":"6","n_x":1,"n_y":1}"#).unwrap();
        assert_eq!(g.table(), xor(1).table());
        assert!(BoolFn::from_json(r#"{"name":"and","table":"6","n_x":1,"n_y":1}"#).is_err());
        let q = qr_split(7, None).unwrap();
        assert_eq!(BoolFn::from_json(&q.to_json()).unwrap(), q);
    }

    #[test]
    fn bit_split_round_trip() {
        let s = BitSplit::new(4, vec![4, 2]).unwrap();
        for a in 0..16 {
            let (x, y) = s.split(a);
            assert_eq!(s.assemble(x, y), a);
        }
    }
}
