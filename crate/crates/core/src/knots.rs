//! Alexander polynomials of torus knots and their cables, torsion
//! coefficients, and the correction terms of L-space surgeries.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lens::{self, LensError};
use crate::numtheory::{gcd, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("torus knot T({p},{q}) needs p > q >= 2 and gcd(p, q) = 1")]
    BadTorus { p: i64, q: i64 },
    #[error("cable [{m},{n};..] needs winding number n >= 2, m >= 1 and gcd(m, n) = 1")]
    BadCable { m: i64, n: i64 },
    #[error("cannot parse knot spec {0:?}; expected T(p,q) or [p1,q1;p2,q2]")]
    Parse(String),
    #[error("Laurent polynomial is not a normalized Alexander polynomial: {0}")]
    NotAlexander(&'static str),
    #[error(transparent)]
    Torsion(#[from] TorsionError),
    #[error(transparent)]
    Lens(#[from] LensError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorsionViolation {
    Negative,
    Increasing,
    DropsByMoreThanOne,
    NonzeroTail,
    Empty,
}

impl fmt::Display for TorsionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorsionViolation::Negative => "t_s < 0",
            TorsionViolation::Increasing => "t_{s+1} > t_s",
            TorsionViolation::DropsByMoreThanOne => "t_{s+1} < t_s - 1",
            TorsionViolation::NonzeroTail => "last entry is not 0",
            TorsionViolation::Empty => "sequence is empty",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("torsion sequence violates {violation} at index {index}")]
pub struct TorsionError {
    pub index: usize,
    pub violation: TorsionViolation,
}

/// A symmetric Laurent polynomial `sum a_i t^i` with `Delta(1) = 1`.
///
/// Stored as `a_0, a_1, ..., a_g`; negative exponents mirror the positive ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlexPoly {
    half: Vec<i64>,
}

impl AlexPoly {
    pub fn unknot() -> AlexPoly {
        AlexPoly { half: vec![1] }
    }

    /// From the full coefficient list of `t^{-g}, ..., t^g`.
    pub fn from_laurent(coeffs: &[i64]) -> Result<AlexPoly, KnotError> {
        if coeffs.len().is_multiple_of(2) {
            return Err(KnotError::NotAlexander("even number of coefficients"));
        }
        if coeffs.iter().ne(coeffs.iter().rev()) {
            return Err(KnotError::NotAlexander("not symmetric"));
        }
        if coeffs.iter().sum::<i64>() != 1 {
            return Err(KnotError::NotAlexander("Delta(1) != 1"));
        }
        let g = coeffs.len() / 2;
        let mut half = coeffs[g..].to_vec();
        while half.len() > 1 && *half.last().unwrap() == 0 {
            half.pop();
        }
        Ok(AlexPoly { half })
    }

    pub fn degree(&self) -> usize {
        self.half.len() - 1
    }

    /// `a_i` for any integer exponent.
    pub fn coeff(&self, i: i64) -> i64 {
        self.half.get(i.unsigned_abs() as usize).copied().unwrap_or(0)
    }

    /// Coefficients of `t^{-g}, ..., t^g`.
    pub fn laurent(&self) -> Vec<i64> {
        let g = self.degree() as i64;
        (-g..=g).map(|i| self.coeff(i)).collect()
    }

    pub fn eval_at_one(&self) -> i64 {
        self.laurent().iter().sum()
    }

    /// `Delta(t^n)`.
    pub fn substitute_power(&self, n: usize) -> AlexPoly {
        let mut half = vec![0; self.degree() * n + 1];
        for (i, &a) in self.half.iter().enumerate() {
            half[i * n] = a;
        }
        AlexPoly { half }
    }

    pub fn mul(&self, other: &AlexPoly) -> AlexPoly {
        let prod = poly_mul(&self.laurent(), &other.laurent());
        AlexPoly::from_laurent(&prod).expect("product of Alexander polynomials")
    }
}

impl fmt::Display for AlexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.degree() as i64;
        let mut first = true;
        for e in (-g..=g).rev() {
            let a = self.coeff(e);
            if a == 0 {
                continue;
            }
            let sign = if a < 0 { "-" } else { "+" };
            if first {
                if a < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = a.abs();
            match e {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1 {
                        write!(f, "{mag}")?;
                    }
                    if e == 1 {
                        f.write_str("t")?;
                    } else {
                        write!(f, "t^{e}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Serialize for AlexPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.laurent().serialize(serializer)
    }
}

/// Ordinary polynomial product on coefficient vectors (lowest degree first).
pub(crate) fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division of integer polynomials by a monic divisor.
fn poly_div_exact(num: &[i64], den: &[i64]) -> Option<Vec<i64>> {
    let dn = den.len();
    debug_assert_eq!(den.last(), Some(&1));
    if num.len() < dn {
        return None;
    }
    let mut rem = num.to_vec();
    let mut quot = vec![0; num.len() - dn + 1];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dn - 1];
        quot[k] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[k + j] -= c * d;
            }
        }
    }
    rem.iter().all(|&x| x == 0).then_some(quot)
}

fn t_power_minus_one(n: usize) -> Vec<i64> {
    let mut v = vec![0; n + 1];
    v[0] = -1;
    v[n] = 1;
    v
}

/// Alexander polynomial of `T(p, q)`:
/// `(t^{pq} - 1)(t - 1) / ((t^p - 1)(t^q - 1))`, symmetrized.
pub fn alex_torus(p: i64, q: i64) -> Result<AlexPoly, KnotError> {
    if !(q >= 2 && p > q && gcd(p, q) == 1) {
        return Err(KnotError::BadTorus { p, q });
    }
    let (pu, qu) = (p as usize, q as usize);
    let num = poly_mul(&t_power_minus_one(pu * qu), &t_power_minus_one(1));
    let den = poly_mul(&t_power_minus_one(pu), &t_power_minus_one(qu));
    let quot = poly_div_exact(&num, &den).expect("torus knot quotient is exact");
    AlexPoly::from_laurent(&quot)
}

/// A torus knot `T(p, q)` or the `(m, n)` cable (winding number `n`) of one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KnotSpec {
    Torus { p: i64, q: i64 },
    Cable { m: i64, n: i64, p: i64, q: i64 },
}

impl KnotSpec {
    pub fn torus(p: i64, q: i64) -> Result<KnotSpec, KnotError> {
        alex_torus(p, q)?;
        Ok(KnotSpec::Torus { p, q })
    }

    pub fn cable(m: i64, n: i64, p: i64, q: i64) -> Result<KnotSpec, KnotError> {
        if n < 2 || m < 1 || gcd(m, n) != 1 {
            return Err(KnotError::BadCable { m, n });
        }
        alex_torus(p, q)?;
        Ok(KnotSpec::Cable { m, n, p, q })
    }

    pub fn alexander(&self) -> Result<AlexPoly, KnotError> {
        match *self {
            KnotSpec::Torus { p, q } => alex_torus(p, q),
            KnotSpec::Cable { .. } => alex_cable(self),
        }
    }

    /// Torsion coefficients, checked as those of an L-space knot.
    pub fn torsion(&self) -> Result<TorsionSeq, KnotError> {
        Ok(lspace_torsion(&self.alexander()?)?)
    }

    /// Top degree of the Alexander polynomial.
    pub fn genus(&self) -> i64 {
        match *self {
            KnotSpec::Torus { p, q } => (p - 1) * (q - 1) / 2,
            KnotSpec::Cable { m, n, p, q } => n * ((p - 1) * (q - 1) / 2) + (m - 1) * (n - 1) / 2,
        }
    }
}

impl fmt::Display for KnotSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KnotSpec::Torus { p, q } => write!(f, "T({p},{q})"),
            KnotSpec::Cable { m, n, p, q } => write!(f, "[{m},{n};{p},{q}]"),
        }
    }
}

impl FromStr for KnotSpec {
    type Err = KnotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || KnotError::Parse(s.to_string());
        let ints = |body: &str, sep: &[char]| -> Result<Vec<i64>, KnotError> {
            body.split(sep).map(|x| x.parse::<i64>().map_err(|_| bad())).collect()
        };
        if let Some(body) = compact.strip_prefix("T(").and_then(|r| r.strip_suffix(')')) {
            match ints(body, &[','])?[..] {
                [p, q] => KnotSpec::torus(p, q),
                _ => Err(bad()),
            }
        } else if let Some(body) = compact.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let (outer, inner) = body.split_once(';').ok_or_else(bad)?;
            match (&ints(outer, &[','])?[..], &ints(inner, &[','])?[..]) {
                (&[m, n], &[p, q]) => KnotSpec::cable(m, n, p, q),
                _ => Err(bad()),
            }
        } else {
            Err(bad())
        }
    }
}

impl Serialize for KnotSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `Delta_{T(p,q)}(t^n) * Delta_{T(m,n)}(t)` for the cable `[m,n;p,q]`.
pub fn alex_cable(spec: &KnotSpec) -> Result<AlexPoly, KnotError> {
    match *spec {
        KnotSpec::Cable { m, n, p, q } => {
            if n < 2 || m < 1 || gcd(m, n) != 1 {
                return Err(KnotError::BadCable { m, n });
            }
            let companion = alex_torus(p, q)?.substitute_power(n as usize);
            // T(1, n) is the unknot
            let pattern = if m == 1 {
                AlexPoly::unknot()
            } else if m > n {
                alex_torus(m, n)?
            } else {
                alex_torus(n, m)?
            };
            Ok(companion.mul(&pattern))
        }
        KnotSpec::Torus { .. } => Err(KnotError::Parse(spec.to_string())),
    }
}

/// Torsion coefficients `(t_0, ..., t_N)` of an L-space knot: nonnegative,
/// each step down by 0 or 1, ending in 0. Entries past the end are 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TorsionSeq(Vec<i64>);

impl TorsionSeq {
    /// Trailing zeros collapse to a single 0.
    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, s: usize) -> i64 {
        self.0.get(s).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_unknot(&self) -> bool {
        self.0 == [0]
    }
}

impl fmt::Display for TorsionSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Accepts `t` iff every entry is nonnegative, `t_s >= t_{s+1} >= t_s - 1`
/// and the last entry is 0.
pub fn validate_torsion(t: &[i64]) -> Result<TorsionSeq, TorsionError> {
    let Some(&last) = t.last() else {
        return Err(TorsionError { index: 0, violation: TorsionViolation::Empty });
    };
    for (s, &v) in t.iter().enumerate() {
        if v < 0 {
            return Err(TorsionError { index: s, violation: TorsionViolation::Negative });
        }
        if let Some(&next) = t.get(s + 1) {
            if next > v {
                return Err(TorsionError { index: s + 1, violation: TorsionViolation::Increasing });
            }
            if next < v - 1 {
                return Err(TorsionError { index: s + 1, violation: TorsionViolation::DropsByMoreThanOne });
            }
        }
    }
    if last != 0 {
        return Err(TorsionError { index: t.len() - 1, violation: TorsionViolation::NonzeroTail });
    }
    let keep = t.iter().rposition(|&v| v != 0).map_or(0, |k| k + 1);
    let mut v = t[..keep].to_vec();
    v.push(0);
    Ok(TorsionSeq(v))
}

/// `t_i = sum_{j >= 1} j * a_{i+j}` for `0 <= i <= g`.
pub fn torsion_from_alex(delta: &AlexPoly) -> Vec<i64> {
    let g = delta.degree() as i64;
    (0..=g).map(|i| (1..=g - i).map(|j| j * delta.coeff(i + j)).sum()).collect()
}

/// [`torsion_from_alex`] for an Alexander polynomial asserted to come from an
/// L-space knot, so the result must be a valid torsion sequence.
pub fn lspace_torsion(delta: &AlexPoly) -> Result<TorsionSeq, TorsionError> {
    validate_torsion(&torsion_from_alex(delta))
}

/// Inverts [`torsion_from_alex`]: `a_i = t_{i-1} - 2t_i + t_{i+1}` for
/// `i > 0`, and `a_0` from `Delta(1) = 1`.
pub fn alex_from_torsion(t: &TorsionSeq) -> AlexPoly {
    let n = t.len();
    let mut half = vec![0i64; n + 1];
    for (i, a) in half.iter_mut().enumerate().skip(1) {
        *a = t.get(i - 1) - 2 * t.get(i) + t.get(i + 1);
    }
    half[0] = 1 - 2 * half[1..].iter().sum::<i64>();
    while half.len() > 1 && *half.last().unwrap() == 0 {
        half.pop();
    }
    AlexPoly { half }
}

/// `d(S^3_K(p/q), i) = d(L(p,q), i) - 2 max(t_{floor(i/q)}, t_{floor((p+q-1-i)/q)})`
/// for an L-space surgery with torsion coefficients `t`.
pub fn d_surgery(t: &TorsionSeq, p: i64, q: i64, i: i64) -> Result<Rational, KnotError> {
    let l = lens::LensSpace::new(p, q)?;
    if !(0..p).contains(&i) {
        return Err(LensError::IndexOutOfRange { i, bound: p }.into());
    }
    Ok(l.d(i)? - 2 * surgery_shift(t, p, q, i))
}

pub(crate) fn surgery_shift(t: &TorsionSeq, p: i64, q: i64, i: i64) -> i64 {
    let lo = (i / q) as usize;
    let hi = ((p + q - 1 - i) / q) as usize;
    t.get(lo).max(t.get(hi))
}

/// Knots known to admit half-integral surgeries to T- or I-type manifolds.
pub fn catalog() -> Vec<KnotSpec> {
    ["T(3,2)", "T(5,2)", "[11,2;3,2]", "[13,2;3,2]", "[19,2;5,2]", "[21,2;5,2]", "[17,3;3,2]", "[19,3;3,2]"]
        .iter()
        .map(|s| s.parse().expect("catalog entry"))
        .collect()
}
