use num_integer::Integer;
use serde::Serialize;

/// An exact fraction reported alongside its floating-point value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
    pub value: OrderedValue,
}

/// `f64` wrapper so reports stay `Eq`; compared through the exact fraction.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(transparent)]
pub struct OrderedValue(pub f64);

impl PartialEq for OrderedValue {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for OrderedValue {}

impl std::hash::Hash for OrderedValue {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        Self { num, den, value: OrderedValue(num as f64 / den as f64) }
    }

    pub fn zero() -> Self {
        Self::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn value(&self) -> f64 {
        self.value.0
    }

    /// Exact comparison by cross-multiplication.
    pub fn cmp_exact(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }

    pub fn half(&self) -> Self {
        Self::new(self.num, self.den * 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_compares() {
        let a = Ratio::new(2, 8);
        assert_eq!((a.num, a.den), (1, 4));
        assert_eq!(a.value(), 0.25);
        assert_eq!(a.cmp_exact(&Ratio::new(1, 3)), std::cmp::Ordering::Less);
        assert!(Ratio::new(0, 5).is_zero());
        assert_eq!(Ratio::new(3, 2).half(), Ratio::new(3, 4));
    }
}
