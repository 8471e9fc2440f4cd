//! Exact rational arithmetic and the small amount of elementary number theory
//! the rest of the crate leans on.
//!
//! `Rational` keeps an `i128` numerator and denominator in lowest terms. Every
//! operation is checked: the `checked_*` methods report [`Overflow`], and the
//! operator impls panic with the same message rather than wrap.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Greatest common divisor, always nonnegative; `gcd(0, 0) == 0`.
pub fn gcd(a: i64, b: i64) -> i64 {
    gcd_u128(a.unsigned_abs() as u128, b.unsigned_abs() as u128) as i64
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `i mod m`, normalized into `[0, m)`.
///
/// Panics if `m <= 0`.
pub fn mod_reduce(i: i64, m: i64) -> i64 {
    assert!(m > 0, "mod_reduce: modulus must be positive, got {m}");
    i.rem_euclid(m)
}

/// Residue of an integer modulo 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even = 0,
    Odd = 1,
}

impl Parity {
    pub fn value(self) -> i64 {
        self as i64
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// `n mod 2`.
pub fn theta(n: i64) -> Parity {
    if n.rem_euclid(2) == 0 {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// `1 - theta(n)`.
pub fn theta_bar(n: i64) -> Parity {
    theta(n).flip()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("rational arithmetic overflowed 128-bit range")]
pub struct Overflow;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error(transparent)]
    Overflow(#[from] Overflow),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// An exact fraction in lowest terms with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Rational, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den)?)
    }

    /// Builds `num/den` from small integers. Panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Rational {
        Self::new(num as i128, den as i128).expect("Rational::frac with zero denominator")
    }

    pub fn from_int(n: i64) -> Rational {
        Rational { num: n as i128, den: 1 }
    }

    fn reduce(num: i128, den: i128) -> Result<Rational, Overflow> {
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = n.checked_neg().ok_or(Overflow)?;
            d = d.checked_neg().ok_or(Overflow)?;
        }
        Ok(Rational { num: n, den: d })
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// The integer value, if the denominator is 1.
    pub fn to_integer(&self) -> Option<i128> {
        self.is_integer().then_some(self.num)
    }

    pub fn checked_add(self, rhs: Rational) -> Result<Rational, Overflow> {
        if self.den == rhs.den {
            return Self::reduce(self.num.checked_add(rhs.num).ok_or(Overflow)?, self.den);
        }
        let g = gcd_u128(self.den as u128, rhs.den as u128) as i128;
        let l = self.den / g;
        let r = rhs.den / g;
        let num = self
            .num
            .checked_mul(r)
            .and_then(|a| rhs.num.checked_mul(l).and_then(|b| a.checked_add(b)))
            .ok_or(Overflow)?;
        let den = l.checked_mul(rhs.den).ok_or(Overflow)?;
        Self::reduce(num, den)
    }

    pub fn checked_sub(self, rhs: Rational) -> Result<Rational, Overflow> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_neg(self) -> Result<Rational, Overflow> {
        Ok(Rational { num: self.num.checked_neg().ok_or(Overflow)?, den: self.den })
    }

    pub fn checked_mul(self, rhs: Rational) -> Result<Rational, Overflow> {
        // cross-cancel first to keep intermediates small
        let g1 = gcd_u128(self.num.unsigned_abs(), rhs.den as u128).max(1) as i128;
        let g2 = gcd_u128(rhs.num.unsigned_abs(), self.den as u128).max(1) as i128;
        let num = (self.num / g1).checked_mul(rhs.num / g2).ok_or(Overflow)?;
        let den = (self.den / g2).checked_mul(rhs.den / g1).ok_or(Overflow)?;
        Self::reduce(num, den)
    }

    pub fn checked_div(self, rhs: Rational) -> Result<Rational, RationalError> {
        if rhs.num == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        let inv = Self::reduce(rhs.den, rhs.num)?;
        Ok(self.checked_mul(inv)?)
    }

    pub fn abs(self) -> Rational {
        if self.num < 0 {
            -self
        } else {
            self
        }
    }

    /// Approximate value, for display only.
    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

macro_rules! checked_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$checked(rhs).expect("rational arithmetic overflowed 128-bit range")
            }
        }
        impl $tr<i64> for Rational {
            type Output = Rational;
            fn $method(self, rhs: i64) -> Rational {
                self.$checked(Rational::from_int(rhs)).expect("rational arithmetic overflowed 128-bit range")
            }
        }
    };
}

checked_op!(Add, add, checked_add);
checked_op!(Sub, sub, checked_sub);
checked_op!(Mul, mul, checked_mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        match self.checked_div(rhs) {
            Ok(v) => v,
            Err(e) => panic!("rational division failed: {e}"),
        }
    }
}

impl Div<i64> for Rational {
    type Output = Rational;
    fn div(self, rhs: i64) -> Rational {
        self / Rational::from_int(rhs)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.checked_neg().expect("rational arithmetic overflowed 128-bit range")
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        // sign of a/b - c/d is the sign of the reduced difference
        match self.checked_sub(*other) {
            Ok(d) => d.num.cmp(&0),
            Err(_) => (self.to_f64()).partial_cmp(&other.to_f64()).unwrap_or(Ordering::Equal),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || RationalError::Parse(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i128 = n.trim().parse().map_err(|_| bad())?;
                let d: i128 = d.trim().parse().map_err(|_| bad())?;
                Rational::new(n, d)
            }
            None => Ok(Rational { num: s.parse().map_err(|_| bad())?, den: 1 }),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(6, 4), 2);
        assert_eq!(gcd(0, 7), 7);
        assert_eq!(gcd(17, 5), 1);
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(gcd(-12, 18), 6);
    }

    #[test]
    fn mod_reduce_examples() {
        assert_eq!(mod_reduce(-1, 7), 6);
        assert_eq!(mod_reduce(8, 7), 1);
        assert_eq!(mod_reduce(0, 5), 0);
    }

    #[test]
    #[should_panic]
    fn mod_reduce_rejects_zero_modulus() {
        mod_reduce(3, 0);
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(7), Parity::Odd);
        assert_eq!(theta(0), Parity::Even);
        assert_eq!(theta(-3), Parity::Odd);
        assert_eq!(theta_bar(7).value(), 0);
    }

    #[test]
    fn lowest_terms_and_sign() {
        let r = Rational::new(6, -8).unwrap();
        assert_eq!((r.numer(), r.denom()), (-3, 4));
        assert_eq!(Rational::new(1, 0), Err(RationalError::ZeroDenominator));
        assert_eq!(Rational::frac(0, -5), Rational::ZERO);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("-3/4".parse::<Rational>().unwrap(), Rational::frac(-3, 4));
        assert_eq!("4/2".parse::<Rational>().unwrap(), Rational::from_int(2));
        assert_eq!(Rational::frac(-2, 5).to_string(), "-2/5");
        assert_eq!(Rational::from_int(0).to_string(), "0");
        assert!("1/x".parse::<Rational>().is_err());
        let json = serde_json::to_string(&Rational::frac(9, 14)).unwrap();
        assert_eq!(json, "\"9/14\"");
        assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), Rational::frac(9, 14));
    }

    #[test]
    fn overflow_is_reported() {
        let big = Rational::new(i128::MAX, 1).unwrap();
        assert_eq!(big.checked_add(Rational::ONE), Err(Overflow));
        let tiny = Rational::new(1, i128::MAX).unwrap();
        assert_eq!(tiny.checked_mul(Rational::new(1, 3).unwrap()), Err(Overflow));
    }

    #[test]
    #[should_panic(expected = "overflowed")]
    fn operator_overflow_panics() {
        let big = Rational::new(i128::MAX, 1).unwrap();
        let _ = big + Rational::ONE;
    }

    fn rat() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, 1i64..5_000).prop_map(|(n, d)| Rational::frac(n, d))
    }

    proptest! {
        #[test]
        fn field_axioms(a in rat(), b in rat(), c in rat()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a - a, Rational::ZERO);
            if !a.is_zero() {
                prop_assert_eq!(a / a, Rational::ONE);
            }
        }

        #[test]
        fn always_lowest_terms(a in rat(), b in rat()) {
            for v in [a + b, a - b, a * b] {
                prop_assert!(v.denom() > 0);
                prop_assert_eq!(gcd_u128(v.numer().unsigned_abs(), v.denom() as u128).max(1), 1);
            }
        }

        #[test]
        fn ordering_matches_cross_multiplication(a in rat(), b in rat()) {
            let expected = (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()));
            prop_assert_eq!(a.cmp(&b), expected);
        }

        #[test]
        fn mod_reduce_is_canonical(i in any::<i32>(), m in 1i64..100_000) {
            let r = mod_reduce(i as i64, m);
            prop_assert!((0..m).contains(&r));
            prop_assert_eq!((i as i64 - r) % m, 0);
        }

        #[test]
        fn theta_complement(n in any::<i32>()) {
            prop_assert_eq!(theta(n as i64).value() + theta_bar(n as i64).value(), 1);
        }
    }
}
