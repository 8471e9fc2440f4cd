//! Test-only reference implementations, written without the library's
//! arithmetic so they can check it.
#![allow(dead_code)]

use hfsurg::Rational;

/// A bare fraction over i128, reduced on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac(pub i128, pub i128);

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    pub fn new(n: i128, d: i128) -> Frac {
        assert!(d != 0);
        let s = if d < 0 { -1 } else { 1 };
        let g = gcd(n, d).max(1);
        Frac(s * n / g, s * d / g)
    }

    pub fn int(n: i128) -> Frac {
        Frac(n, 1)
    }

    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }

    pub fn sub(self, o: Frac) -> Frac {
        self.add(Frac(-o.0, o.1))
    }

    pub fn scale(self, k: i128) -> Frac {
        Frac::new(self.0 * k, self.1)
    }

    pub fn matches(self, r: Rational) -> bool {
        self.0 == r.numer() && self.1 == r.denom()
    }
}

/// Plain recursive correction term of `L(p, q)`, with `i` taken mod `p`.
pub fn d_lens(p: i64, q: i64, i: i64) -> Frac {
    if p == 1 {
        return Frac::int(0);
    }
    let (p, q, i) = (p as i128, (q % p) as i128, (i.rem_euclid(p)) as i128);
    let c = 2 * i + 1 - p - q;
    let here = Frac::new(c * c, 4 * p * q).sub(Frac::new(1, 4));
    here.sub(d_lens(q as i64, (p % q) as i64, (i % q) as i64))
}

pub fn d_trefoil(p: i64, q: i64, i: i64) -> Frac {
    let i = i.rem_euclid(p);
    let bump = if i < q { 2 } else { 0 };
    d_lens(p, q, i).sub(Frac::int(bump))
}

/// `p/2` surgery on an L-space knot with torsion coefficients `t`.
pub fn d_half_surgery(t: &[i64], p: i64, i: i64) -> Frac {
    let get = |s: i64| t.get(s as usize).copied().unwrap_or(0);
    let shift = get(i / 2).max(get((p + 1 - i) / 2));
    d_lens(p, 2, i).sub(Frac::int(2 * shift as i128))
}

/// `a (i - C(p, 2)) + C(p, q)` mod `p`.
pub fn phi(p: i64, q: i64, a: i64, i: i64) -> i64 {
    let center = |q: i64| if q % 2 == 0 { (p + q - 1) / 2 } else { (q - 1) / 2 };
    (a * (i - center(2)) + center(q)).rem_euclid(p)
}

pub fn gcd64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd64(b, a % b)
    }
}
