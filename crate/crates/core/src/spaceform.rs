//! T- and I-type spherical space forms, realized as Dehn fillings `T(p/q)` of
//! the right-handed trefoil exterior with `|p - 6q|` equal to 3 or 5.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lens::{self, LensError};
use crate::numtheory::{gcd, Rational};

/// An orientation or offset sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-1")]
    Minus,
    #[serde(rename = "+1")]
    Plus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceFormError {
    #[error("empty range [{0}, {1}]")]
    EmptyRange(i64, i64),
    #[error("({p}, {q}) is not a trefoil filling with |p - 6q| in {{3, 5}} and gcd(q, r) = 1")]
    NotAFilling { p: i64, q: i64 },
    #[error(transparent)]
    Lens(#[from] LensError),
}

/// `T(p/q)` with `p = 6q + zeta * r`, `r` in {3, 5}, `gcd(q, r) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrefoilFilling {
    pub p: i64,
    pub q: i64,
    pub zeta: Sign,
    pub r: i64,
}

impl TrefoilFilling {
    pub fn new(p: i64, q: i64) -> Result<TrefoilFilling, SpaceFormError> {
        if p <= 0 || q <= 0 {
            return Err(SpaceFormError::NotAFilling { p, q });
        }
        let offset = p - 6 * q;
        let (zeta, r) = match offset {
            3 | 5 => (Sign::Plus, offset),
            -3 | -5 => (Sign::Minus, -offset),
            _ => return Err(SpaceFormError::NotAFilling { p, q }),
        };
        if gcd(q, r) != 1 {
            return Err(SpaceFormError::NotAFilling { p, q });
        }
        // follows from the two conditions above
        assert_eq!(gcd(p, q), 1, "trefoil filling ({p}, {q}) not coprime");
        Ok(TrefoilFilling { p, q, zeta, r })
    }

    /// `q mod r`.
    pub fn s(&self) -> i64 {
        self.q % self.r
    }

    pub fn d(&self, i: i64) -> Result<Rational, SpaceFormError> {
        Ok(d_trefoil(self.p, self.q, i)?)
    }
}

impl fmt::Display for TrefoilFilling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "𝕋({}/{})", self.p, self.q)
    }
}

/// Every trefoil filling with odd `p` in `[p_min, p_max]`, sorted by `(p, q)`.
pub fn enumerate_space_forms(p_min: i64, p_max: i64) -> Result<Vec<TrefoilFilling>, SpaceFormError> {
    if p_min < 1 || p_min > p_max {
        return Err(SpaceFormError::EmptyRange(p_min, p_max));
    }
    let mut out = Vec::new();
    let first_odd = if p_min % 2 == 0 { p_min + 1 } else { p_min };
    for p in (first_odd..=p_max).step_by(2) {
        let mut here: Vec<TrefoilFilling> = [-5i64, -3, 3, 5]
            .iter()
            .filter_map(|&off| {
                let rest = p - off;
                (rest > 0 && rest % 6 == 0).then_some(rest / 6)
            })
            .filter_map(|q| TrefoilFilling::new(p, q).ok())
            .collect();
        here.sort();
        out.extend(here);
    }
    Ok(out)
}

/// `1` on `[0, q)`, `0` elsewhere.
pub fn chi(q: i64, i: i64) -> i64 {
    i64::from((0..q).contains(&i))
}

/// `d(T(p/q), i) = d(L(p, q), i) - 2 chi_[0,q)(i)` for `i` in `[0, p)`.
pub fn d_trefoil(p: i64, q: i64, i: i64) -> Result<Rational, LensError> {
    let l = lens::LensSpace::new(p, q)?;
    if !(0..p).contains(&i) {
        return Err(LensError::IndexOutOfRange { i, bound: p });
    }
    Ok(l.d(i)? - 2 * chi(q, i))
}

pub(crate) fn d_trefoil_unchecked(p: i64, q: i64, i: i64) -> Rational {
    lens::descend(p, q, i) - 2 * chi(q, i)
}
