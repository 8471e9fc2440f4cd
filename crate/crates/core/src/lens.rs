//! Correction terms of lens spaces and the conjugation action on their
//! Spin^c structures.
//!
//! Spin^c structures on `L(p, q)` are labelled by residues mod `p`. The
//! recursion itself accepts labels in `[0, p + q)`; everything exported at
//! module boundaries is canonicalized to `[0, p)`.

use thiserror::Error;

use crate::numtheory::{gcd, mod_reduce, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LensError {
    #[error("p and q must be positive (got p={p}, q={q})")]
    NonPositive { p: i64, q: i64 },
    #[error("p and q must be coprime (gcd({p}, {q}) = {g})")]
    NotCoprime { p: i64, q: i64, g: i64 },
    #[error("Spin^c index {i} out of range [0, {bound})")]
    IndexOutOfRange { i: i64, bound: i64 },
    #[error("p must be odd for a unique conjugation fixed point (got p={0})")]
    EvenOrder(i64),
}

/// `L(p, q)`: `p/q` surgery on the unknot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LensSpace {
    p: i64,
    q: i64,
}

impl LensSpace {
    pub fn new(p: i64, q: i64) -> Result<LensSpace, LensError> {
        check_pair(p, q)?;
        Ok(LensSpace { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `d(L(p, q), i)` for `i` in `[0, p + q)`.
    pub fn d(&self, i: i64) -> Result<Rational, LensError> {
        if !(0..self.p + self.q).contains(&i) {
            return Err(LensError::IndexOutOfRange { i, bound: self.p + self.q });
        }
        Ok(descend(self.p, self.q, i))
    }

    /// Correction terms for every canonical index `0..p`.
    pub fn d_vector(&self) -> Vec<Rational> {
        (0..self.p).map(|i| descend(self.p, self.q, i)).collect()
    }

    pub fn conj(&self, i: i64) -> SpinIdx {
        SpinIdx(mod_reduce(self.p + self.q - 1 - i, self.p))
    }
}

/// Canonical representative in `[0, p)` of a Spin^c label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpinIdx(pub i64);

impl SpinIdx {
    pub fn new(i: i64, p: i64) -> SpinIdx {
        SpinIdx(mod_reduce(i, p))
    }

    pub fn get(self) -> i64 {
        self.0
    }
}

fn check_pair(p: i64, q: i64) -> Result<(), LensError> {
    if p <= 0 || q <= 0 {
        return Err(LensError::NonPositive { p, q });
    }
    let g = gcd(p, q);
    if g != 1 {
        return Err(LensError::NotCoprime { p, q, g });
    }
    Ok(())
}

/// `d(L(p, q), i)` by the Euclidean recursion
/// `d(L(p,q), i) = -1/4 + (2i+1-p-q)^2 / (4pq) - d(L(q, p mod q), i mod q)`,
/// bottoming out at `d(S^3, 0) = 0` when `p = 1`.
pub fn d_lens(p: i64, q: i64, i: i64) -> Result<Rational, LensError> {
    LensSpace::new(p, q)?.d(i)
}

/// Unchecked descent. Callers guarantee coprimality and `0 <= i < p + q`.
pub(crate) fn descend(mut p: i64, mut q: i64, mut i: i64) -> Rational {
    if q > p && p > 1 {
        q %= p;
        i %= p;
    }
    // sum of alternating terms (2i+1-p-q)^2/(4pq) - 1/4 along the chain
    let mut acc = Rational::ZERO;
    let mut positive = true;
    while p > 1 {
        let c = (2 * i + 1 - p - q) as i128;
        let term = Rational::new(c * c - (p as i128) * (q as i128), 4 * (p as i128) * (q as i128))
            .expect("positive denominator");
        acc = if positive { acc + term } else { acc - term };
        positive = !positive;
        let r = p % q;
        i %= q;
        p = q;
        q = r;
    }
    acc
}

/// Number of recursion levels `descend` walks before reaching `S^3`.
pub fn chain_length(mut p: i64, mut q: i64) -> usize {
    if q > p && p > 1 {
        q %= p;
    }
    let mut n = 0;
    while p > 1 {
        n += 1;
        let r = p % q;
        p = q;
        q = r;
    }
    n
}

/// `d(L(p, 1), i) = -1/4 + (2i - p)^2 / (4p)`.
pub fn d_lens_closed_q1(p: i64, i: i64) -> Result<Rational, LensError> {
    check_pair(p, 1)?;
    if !(0..p + 1).contains(&i) {
        return Err(LensError::IndexOutOfRange { i, bound: p + 1 });
    }
    let c = (2 * i - p) as i128;
    Ok(Rational::new(c * c, 4 * p as i128).unwrap() - Rational::frac(1, 4))
}

/// `d(L(p, 2), i) = (2i - p - 1)^2 / (8p) - (1 + (-1)^i) / 4`, for odd `p`.
pub fn d_lens_closed_q2(p: i64, i: i64) -> Result<Rational, LensError> {
    check_pair(p, 2)?;
    if !(0..p + 2).contains(&i) {
        return Err(LensError::IndexOutOfRange { i, bound: p + 2 });
    }
    Ok(closed_q2(p, i))
}

pub(crate) fn closed_q2(p: i64, i: i64) -> Rational {
    let c = (2 * i - p - 1) as i128;
    let sq = Rational::new(c * c, 8 * p as i128).unwrap();
    if i % 2 == 0 {
        sq - Rational::frac(1, 2)
    } else {
        sq
    }
}

/// The conjugate label `p + q - 1 - i`, reduced mod `p`.
pub fn conj(p: i64, q: i64, i: i64) -> Result<SpinIdx, LensError> {
    Ok(LensSpace::new(p, q)?.conj(i))
}

/// The unique fixed point of conjugation on `Z/pZ` for odd `p`:
/// `(p + q - 1)/2` when `q` is even, `(q - 1)/2` when `q` is odd.
pub fn center(p: i64, q: i64) -> Result<SpinIdx, LensError> {
    check_pair(p, q)?;
    if p % 2 == 0 {
        return Err(LensError::EvenOrder(p));
    }
    Ok(SpinIdx(center_unchecked(p, q)))
}

pub(crate) fn center_unchecked(p: i64, q: i64) -> i64 {
    let c = if q % 2 == 0 { (p + q - 1) / 2 } else { (q - 1) / 2 };
    mod_reduce(c, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn row(p: i64, q: i64) -> Vec<Rational> {
        LensSpace::new(p, q).unwrap().d_vector()
    }

    #[test]
    fn small_tables() {
        assert_eq!(row(3, 1), vec![r(1, 2), r(-1, 6), r(-1, 6)]);
        assert_eq!(row(3, 2), vec![r(1, 6), r(1, 6), r(-1, 2)]);
        assert_eq!(row(5, 1), vec![r(1, 1), r(1, 5), r(-1, 5), r(-1, 5), r(1, 5)]);
        assert_eq!(row(5, 2), vec![r(2, 5), r(2, 5), r(-2, 5), r(0, 1), r(-2, 5)]);
        assert_eq!(row(5, 3), vec![r(2, 5), r(0, 1), r(2, 5), r(-2, 5), r(-2, 5)]);
        assert_eq!(row(5, 4), vec![r(-1, 5), r(1, 5), r(1, 5), r(-1, 5), r(-1, 1)]);
    }

    #[test]
    fn base_case_and_closed_forms() {
        assert_eq!(d_lens(1, 1, 0).unwrap(), Rational::ZERO);
        assert_eq!(d_lens_closed_q1(1, 0).unwrap(), Rational::ZERO);
        assert_eq!(d_lens_closed_q2(7, 0).unwrap(), r(9, 14));
        let expected = [r(9, 14), r(9, 14), r(-3, 14), r(1, 14), r(-1, 2), r(1, 14), r(-3, 14)];
        assert_eq!(row(7, 2), expected);
    }

    #[test]
    fn contract_violations() {
        assert!(matches!(d_lens(4, 2, 0), Err(LensError::NotCoprime { g: 2, .. })));
        assert!(matches!(d_lens(5, 2, 7), Err(LensError::IndexOutOfRange { .. })));
        assert!(matches!(d_lens(5, 2, -1), Err(LensError::IndexOutOfRange { .. })));
        assert!(matches!(d_lens(0, 1, 0), Err(LensError::NonPositive { .. })));
        assert_eq!(center(8, 3), Err(LensError::EvenOrder(8)));
    }

    #[test]
    fn conj_and_center_examples() {
        assert_eq!(conj(7, 2, 0).unwrap(), SpinIdx(1));
        assert_eq!(conj(7, 2, 4).unwrap(), SpinIdx(4));
        assert_eq!(conj(5, 3, 2).unwrap(), SpinIdx(0));
        assert_eq!(center(7, 2).unwrap(), SpinIdx(4));
        assert_eq!(center(7, 3).unwrap(), SpinIdx(1));
        assert_eq!(center(43, 8).unwrap(), SpinIdx(25));
        let fixed: Vec<i64> = (0..43).filter(|&i| conj(43, 8, i).unwrap().get() == i).collect();
        assert_eq!(fixed, vec![25]);
    }

    #[test]
    fn wide_labels_agree_with_their_residue() {
        // labels in [p, p+q) name the same Spin^c structure as their residue
        for p in 2..60 {
            for q in 1..p {
                if gcd(p, q) != 1 {
                    continue;
                }
                for i in p..p + q {
                    assert_eq!(d_lens(p, q, i).unwrap(), d_lens(p, q, i - p).unwrap(), "L({p},{q}) i={i}");
                }
            }
        }
    }

    #[test]
    fn chain_is_logarithmic() {
        for p in 2..2000i64 {
            for q in 1..p {
                if gcd(p, q) == 1 {
                    let bound = 2.0 * (p as f64).log2() + 2.0;
                    assert!(chain_length(p, q) as f64 <= bound, "L({p},{q})");
                }
            }
        }
    }

    #[test]
    fn q_larger_than_p_reduces() {
        assert_eq!(d_lens(5, 7, 3).unwrap(), d_lens(5, 2, 3).unwrap());
    }
}
