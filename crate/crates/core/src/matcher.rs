//! Matching correction terms of half-integral surgeries against those of
//! trefoil fillings.
//!
//! For a filling `T(p/q)`, an orientation `eps` and a multiplier `a`, the
//! affine map `phi_a(i) = a (i - C(p,2)) + C(p,q)` proposes an identification
//! of Spin^c structures. The difference
//! `delta(i) = d(L(p,2), i) - eps * d(T(p/q), phi_a(i))` must then equal
//! `2 t_{s(i)}` with `s(i) = min(floor(i/2), floor((p+1-i)/2))` for some
//! torsion sequence `t`. [`try_match`] decides this exactly and [`run_search`]
//! sweeps every filling, orientation and admissible `a`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::knots::{self, AlexPoly, KnotSpec, TorsionError, TorsionSeq};
use crate::lens::{self, LensError, SpinIdx};
use crate::numtheory::{gcd, mod_reduce, theta, theta_bar, Rational};
use crate::spaceform::{self, chi, Sign, SpaceFormError, TrefoilFilling};

/// Largest `p` searched unless the caller raises the ceiling.
pub const DEFAULT_CEILING: i64 = 6000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("p must be odd (got {0})")]
    EvenP(i64),
    #[error("gcd({p}, {a}) != 1")]
    MultiplierNotUnit { p: i64, a: i64 },
    #[error("multiplier a={a} must satisfy 0 < a < p/2 for p={p}")]
    MultiplierOutOfRange { p: i64, a: i64 },
    #[error("r must be 3 or 5 (got {0})")]
    BadR(i64),
    #[error("search range [{p_min}, {p_max}] invalid or above ceiling {ceiling}")]
    BadRange { p_min: i64, p_max: i64, ceiling: i64 },
    #[error("certification failed for {target} at a={a}, i={i}")]
    CertificationFailed { target: String, a: i64, i: i64 },
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Lens(#[from] LensError),
    #[error(transparent)]
    SpaceForm(#[from] SpaceFormError),
}

/// `phi_a(i) = a (i - C(p, 2)) + C(p, q)` reduced mod `p`.
pub fn phi(p: i64, q: i64, a: i64, i: i64) -> Result<SpinIdx, MatchError> {
    if p % 2 == 0 {
        return Err(MatchError::EvenP(p));
    }
    lens::LensSpace::new(p, q)?;
    if gcd(p, a) != 1 {
        return Err(MatchError::MultiplierNotUnit { p, a });
    }
    Ok(SpinIdx(phi_unchecked(p, q, a, i)))
}

fn phi_unchecked(p: i64, q: i64, a: i64, i: i64) -> i64 {
    let c2 = lens::center_unchecked(p, 2);
    let cq = lens::center_unchecked(p, q);
    mod_reduce(a * (i - c2) + cq, p)
}

/// `delta^eps_a(i) = d(L(p,2), i) - eps * d(T(p/q), phi_a(i))`.
pub fn delta(p: i64, q: i64, eps: Sign, a: i64, i: i64) -> Result<Rational, MatchError> {
    phi(p, q, a, i)?;
    if !(0..p).contains(&i) {
        return Err(LensError::IndexOutOfRange { i, bound: p }.into());
    }
    Ok(delta_unchecked(p, q, eps, a, i))
}

fn delta_unchecked(p: i64, q: i64, eps: Sign, a: i64, i: i64) -> Rational {
    let j = phi_unchecked(p, q, a, i);
    let t = spaceform::d_trefoil_unchecked(p, q, j);
    let l2 = lens::closed_q2(p, i);
    match eps {
        Sign::Plus => l2 - t,
        Sign::Minus => l2 + t,
    }
}

/// `min(floor(i/2), floor((p+1-i)/2))`.
pub fn fiber(p: i64, i: i64) -> usize {
    (i / 2).min((p + 1 - i) / 2) as usize
}

/// Largest fiber index, `floor((p+1)/4)`.
pub fn top_fiber(p: i64) -> usize {
    ((p + 1) / 4) as usize
}

/// Order in which [`try_match`] inspects Spin^c structures: the two central
/// ones first, then the rest by increasing fiber.
pub fn visit_order(p: i64) -> Vec<i64> {
    let c0 = (p + 1) / 2;
    let mut head: Vec<i64> = [c0, c0 + 1].into_iter().filter(|&i| i < p).collect();
    let mut rest: Vec<i64> = (0..p).filter(|i| !head.contains(i)).collect();
    rest.sort_by_key(|&i| (fiber(p, i), i));
    head.extend(rest);
    head
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    NonInteger(Rational),
    Odd(i128),
    Negative(i128),
    FiberInconsistent { fiber: usize, expected: i64, found: i64 },
    Torsion(TorsionError),
    NonzeroTail(i64),
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::NonInteger(v) => write!(f, "delta = {v} is not an integer"),
            RejectReason::Odd(v) => write!(f, "delta = {v} is odd"),
            RejectReason::Negative(v) => write!(f, "delta = {v} is negative"),
            RejectReason::FiberInconsistent { fiber, expected, found } => {
                write!(f, "fiber {fiber} already has t = {expected}, found {found}")
            }
            RejectReason::Torsion(e) => write!(f, "{e}"),
            RejectReason::NonzeroTail(v) => write!(f, "top torsion coefficient is {v}, not 0"),
        }
    }
}

/// Why a candidate failed, and at which Spin^c structure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rejected at i={i}: {reason}")]
pub struct Rejection {
    pub i: i64,
    pub reason: RejectReason,
}

/// Lazily filled `d(T(p/q), j)` values for one filling. Purely a speedup.
pub struct TrefoilMemo {
    p: i64,
    q: i64,
    values: Vec<Option<Rational>>,
}

impl TrefoilMemo {
    pub fn new(p: i64, q: i64) -> TrefoilMemo {
        TrefoilMemo { p, q, values: vec![None; p as usize] }
    }

    fn get(&mut self, j: i64) -> Rational {
        let (p, q) = (self.p, self.q);
        *self.values[j as usize].get_or_insert_with(|| spaceform::d_trefoil_unchecked(p, q, j))
    }
}

fn delta_memo(memo: Option<&mut TrefoilMemo>, p: i64, q: i64, eps: Sign, a: i64, i: i64) -> Rational {
    let j = phi_unchecked(p, q, a, i);
    let t = match memo {
        Some(m) => m.get(j),
        None => spaceform::d_trefoil_unchecked(p, q, j),
    };
    let l2 = lens::closed_q2(p, i);
    match eps {
        Sign::Plus => l2 - t,
        Sign::Minus => l2 + t,
    }
}

fn validate_context(p: i64, q: i64, a: i64) -> Result<(), MatchError> {
    if p % 2 == 0 {
        return Err(MatchError::EvenP(p));
    }
    lens::LensSpace::new(p, q)?;
    if !(a > 0 && 2 * a < p) {
        return Err(MatchError::MultiplierOutOfRange { p, a });
    }
    if gcd(p, a) != 1 {
        return Err(MatchError::MultiplierNotUnit { p, a });
    }
    Ok(())
}

/// Decides whether `delta^eps_a` is twice a torsion sequence read through the
/// fibers, returning that sequence.
pub fn try_match(p: i64, q: i64, eps: Sign, a: i64) -> Result<Result<TorsionSeq, Rejection>, MatchError> {
    validate_context(p, q, a)?;
    Ok(match_with(&mut None, &visit_order(p), p, q, eps, a))
}

fn match_with(
    memo: &mut Option<TrefoilMemo>,
    order: &[i64],
    p: i64,
    q: i64,
    eps: Sign,
    a: i64,
) -> Result<TorsionSeq, Rejection> {
    let top = top_fiber(p);
    let mut t: Vec<Option<i64>> = vec![None; top + 1];
    for &i in order {
        let v = delta_memo(memo.as_mut(), p, q, eps, a, i);
        let reject = |reason| Err(Rejection { i, reason });
        let Some(n) = v.to_integer() else {
            return reject(RejectReason::NonInteger(v));
        };
        if n < 0 {
            return reject(RejectReason::Negative(n));
        }
        if n % 2 != 0 {
            return reject(RejectReason::Odd(n));
        }
        let half = (n / 2) as i64;
        let s = fiber(p, i);
        if s == top && half != 0 {
            return reject(RejectReason::NonzeroTail(half));
        }
        match t[s] {
            Some(prev) if prev != half => {
                return reject(RejectReason::FiberInconsistent { fiber: s, expected: prev, found: half })
            }
            _ => t[s] = Some(half),
        }
    }
    let seq: Vec<i64> = t.into_iter().map(|v| v.expect("every fiber is visited")).collect();
    knots::validate_torsion(&seq).map_err(|e| Rejection { i: e.index as i64, reason: RejectReason::Torsion(e) })
}

/// The `m` in {0,1,2,3} with `0 <= a - mq + (theta_bar(q) zeta r + q - 1)/2 < q`.
pub fn window_m(f: &TrefoilFilling, a: i64) -> Option<i64> {
    let c = window_offset(f);
    let x = a + c;
    if x < 0 {
        return None;
    }
    let m = x / f.q;
    (0..=3).contains(&m).then_some(m)
}

fn window_offset(f: &TrefoilFilling) -> i64 {
    (theta_bar(f.q).value() * f.zeta.value() * f.r + f.q - 1) / 2
}

/// `|a - mp/6| < sqrt(4rp/3)`, compared as `3 (6a - mp)^2 < 144 r p`.
pub fn within_window(f: &TrefoilFilling, a: i64, m: i64) -> bool {
    let dev = (6 * a - m * f.p) as i128;
    3 * dev * dev < 144 * (f.r as i128) * (f.p as i128)
}

/// Multipliers `0 < a < p/2` coprime to `p`.
pub fn all_a_candidates(p: i64) -> Vec<i64> {
    (1..=(p - 1) / 2).filter(|&a| gcd(a, p) == 1).collect()
}

/// Multipliers surviving the window test. Those with no `m` in {0,1,2,3}
/// (only possible for tiny `q`) are kept.
pub fn prune_a_candidates(f: &TrefoilFilling) -> Vec<i64> {
    all_a_candidates(f.p).into_iter().filter(|&a| window_m(f, a).is_none_or(|m| within_window(f, a, m))).collect()
}

/// `192 r (36 r + 2)^2`, the `p` beyond which no filling with offset `r` can match.
pub fn prop41_bound(r: i64) -> Result<i64, MatchError> {
    if r != 3 && r != 5 {
        return Err(MatchError::BadR(r));
    }
    Ok(192 * r * (36 * r + 2) * (36 * r + 2))
}

/// `0 <= k < (p - 13r + 6) / (48 sqrt(3rp)) - 1/6`, i.e.
/// `p - 13r + 6 > 0` and `192 r p (6k+1)^2 < (p - 13r + 6)^2`.
pub fn k_in_range(p: i64, r: i64, k: i64) -> bool {
    let head = (p - 13 * r + 6) as i128;
    let lin = (6 * k + 1) as i128;
    k >= 0 && head > 0 && 192 * (r as i128) * (p as i128) * lin * lin < head * head
}

/// Number of admissible `k` (they form `0..count`).
pub fn k_count(p: i64, r: i64) -> i64 {
    let mut k = 0;
    while k_in_range(p, r, k) {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Lemma43Error {
    #[error(transparent)]
    Context(#[from] MatchError),
    #[error("a={a} has no window index m in {{0,1,2,3}}")]
    NoWindow { a: i64 },
    #[error("a={a} lies outside the window |a - mp/6| < sqrt(4rp/3) for m={m}")]
    OutsideWindow { a: i64, m: i64 },
    #[error("k={k} outside the admissible range 0..{count} for p={p}, r={r}")]
    KOutOfRange { k: i64, count: i64, p: i64, r: i64 },
    #[error("identity failed: lhs {} != Ak+B+C_k = {}", .0.lhs, .0.rhs)]
    IdentityFailed(Box<Lemma43Data>),
}

/// Both sides of
/// `delta((p+1)/2 + 6k + 1) - delta((p+1)/2 + 6k) = A k + B + C_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma43Data {
    pub p: i64,
    pub q: i64,
    pub eps: Sign,
    pub a: i64,
    pub k: i64,
    pub m: i64,
    pub i_k: i64,
    pub j_k: i64,
    #[serde(rename = "A")]
    pub a_coef: Rational,
    #[serde(rename = "B")]
    pub b: Rational,
    #[serde(rename = "C_k")]
    pub c_k: Rational,
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

/// `A = eps zeta 2 (6a - mp)^2 / (pr) + 6/p`.
pub fn lemma43_a(f: &TrefoilFilling, eps: Sign, a: i64, m: i64) -> Rational {
    let dev = 6 * a - m * f.p;
    let sign = (eps * f.zeta).value();
    Rational::frac(sign * 2 * dev * dev, f.p * f.r) + Rational::frac(6, f.p)
}

/// `B = eps (zeta (6a - mp)^2 / (6pr) - (m^2 - 6 m theta(q)) / 6)`.
pub fn lemma43_b(f: &TrefoilFilling, eps: Sign, a: i64, m: i64) -> Rational {
    let dev = 6 * a - m * f.p;
    let inner = Rational::frac(f.zeta.value() * dev * dev, 6 * f.p * f.r)
        - Rational::frac(m * m - 6 * m * theta(f.q).value(), 6);
    inner * eps.value()
}

/// Evaluates both sides of the `Ak + B + C_k` identity exactly.
pub fn lemma43_check(p: i64, q: i64, eps: Sign, a: i64, k: i64) -> Result<Lemma43Data, Lemma43Error> {
    let f = TrefoilFilling::new(p, q).map_err(MatchError::from)?;
    validate_context(p, q, a)?;
    let m = window_m(&f, a).ok_or(Lemma43Error::NoWindow { a })?;
    if !within_window(&f, a, m) {
        return Err(Lemma43Error::OutsideWindow { a, m });
    }
    if !k_in_range(p, f.r, k) {
        return Err(Lemma43Error::KOutOfRange { k, count: k_count(p, f.r), p, r: f.r });
    }
    let (r, s) = (f.r, f.s());
    let e = eps.value();
    let tb = theta_bar(q).value();
    let i_k = (tb * p + q - 1) / 2 + 6 * k * a - k * m * p;
    let j_k = (tb * f.zeta.value() * r + q - 1) / 2 + 6 * k * a - k * m * p;

    let d_rs = |x: i64| lens::descend(r, s, mod_reduce(x, r));
    let chi_p = |x: i64| chi(q, mod_reduce(x, p));
    let c_k =
        (d_rs(j_k) - d_rs(j_k + a - m * q)) * (eps * f.zeta).value() + Rational::frac(1, 2 * p) + Rational::frac(1, 2)
            - theta((p + 1) / 2).value()
            + 2 * e * (chi_p(i_k + a) - chi_p(i_k));

    let a_coef = lemma43_a(&f, eps, a, m);
    let b = lemma43_b(&f, eps, a, m);
    let base = (p + 1) / 2 + 6 * k;
    let lhs = delta_unchecked(p, q, eps, a, base + 1) - delta_unchecked(p, q, eps, a, base);
    let rhs = a_coef * Rational::from_int(k) + b + c_k;
    let data = Lemma43Data { p, q, eps, a, k, m, i_k, j_k, a_coef, b, c_k, lhs, rhs, holds: lhs == rhs };
    if data.holds {
        Ok(data)
    } else {
        Err(Lemma43Error::IdentityFailed(Box::new(data)))
    }
}

/// A valid `(p, q, eps, a, k)` input for [`lemma43_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lemma43Tuple {
    pub p: i64,
    pub q: i64,
    pub eps: Sign,
    pub a: i64,
    pub k: i64,
}

/// Draws `n` seeded tuples with `p <= p_max`, each inside the window and
/// `k` ranges. Empty if no filling up to `p_max` admits any `k`.
pub fn sample_lemma43_tuples(n: usize, seed: u64, p_max: i64) -> Vec<Lemma43Tuple> {
    use rand::{Rng, SeedableRng};
    let Ok(fillings) = spaceform::enumerate_space_forms(1, p_max.max(1)) else {
        return Vec::new();
    };
    let usable: Vec<(TrefoilFilling, Vec<i64>, i64)> = fillings
        .into_iter()
        .filter_map(|f| {
            let count = k_count(f.p, f.r);
            let good: Vec<i64> = all_a_candidates(f.p)
                .into_iter()
                .filter(|&a| window_m(&f, a).is_some_and(|m| within_window(&f, a, m)))
                .collect();
            (count > 0 && !good.is_empty()).then_some((f, good, count))
        })
        .collect();
    if usable.is_empty() {
        return Vec::new();
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (f, good, count) = &usable[rng.gen_range(0..usable.len())];
            Lemma43Tuple {
                p: f.p,
                q: f.q,
                eps: if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus },
                a: good[rng.gen_range(0..good.len())],
                k: rng.gen_range(0..*count),
            }
        })
        .collect()
}

/// A half-integral surgery whose correction terms match those of `eps T(p/q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    pub filling: TrefoilFilling,
    pub eps: Sign,
    /// Every multiplier `a < p/2` whose `phi_a` realizes the match.
    pub witnesses: Vec<i64>,
    pub tseq: TorsionSeq,
    pub alex: AlexPoly,
    /// `None` when the torsion sequence matches no catalog knot.
    pub knot: Option<KnotSpec>,
}

impl MatchResult {
    pub fn p(&self) -> i64 {
        self.filling.p
    }

    pub fn q(&self) -> i64 {
        self.filling.q
    }

    pub fn slope(&self) -> String {
        format!("{}/2", self.filling.p)
    }

    /// `eps T(p/q)`, e.g. `-𝕋(17/2)`.
    pub fn target(&self) -> String {
        let sign = if self.eps == Sign::Minus { "-" } else { "" };
        format!("{sign}{}", self.filling)
    }

    pub fn knot_label(&self) -> String {
        self.knot.map_or_else(|| "unidentified".to_string(), |k| k.to_string())
    }

    /// Recomputes `d(S^3_K(p/2), i) = eps d(T(p/q), phi_a(i))` for every `i`
    /// and every witness.
    pub fn certify(&self) -> Result<(), MatchError> {
        let (p, q) = (self.p(), self.q());
        for &a in &self.witnesses {
            for i in 0..p {
                let lhs = knots::d_surgery(&self.tseq, p, 2, i).map_err(|e| match e {
                    knots::KnotError::Lens(l) => MatchError::Lens(l),
                    _ => MatchError::CertificationFailed { target: self.target(), a, i },
                })?;
                let rhs = spaceform::d_trefoil(p, q, phi(p, q, a, i)?.get())? * self.eps.value();
                if lhs != rhs {
                    return Err(MatchError::CertificationFailed { target: self.target(), a, i });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub prune: bool,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
    pub ceiling: i64,
    /// Fillings with `p` above this are evaluated without memoization.
    pub cache_cap: i64,
    pub catalog: Vec<KnotSpec>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { prune: true, jobs: 1, ceiling: DEFAULT_CEILING, cache_cap: i64::MAX, catalog: knots::catalog() }
    }
}

/// Counters from one filling, summed over a search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub fillings: usize,
    pub candidates: usize,
}

/// Searches every trefoil filling with `p` in `[p_min, p_max]`.
pub fn run_search(p_min: i64, p_max: i64, opts: &SearchOptions) -> Result<Vec<MatchResult>, MatchError> {
    run_search_with_stats(p_min, p_max, opts).map(|(r, _)| r)
}

pub fn run_search_with_stats(
    p_min: i64,
    p_max: i64,
    opts: &SearchOptions,
) -> Result<(Vec<MatchResult>, SearchStats), MatchError> {
    if p_min < 1 || p_min > p_max || p_max > opts.ceiling {
        return Err(MatchError::BadRange { p_min, p_max, ceiling: opts.ceiling });
    }
    let fillings = spaceform::enumerate_space_forms(p_min, p_max)?;
    let catalog: Vec<(KnotSpec, TorsionSeq)> =
        opts.catalog.iter().filter_map(|k| k.torsion().ok().map(|t| (*k, t))).collect();

    let per_filling = |f: &TrefoilFilling| search_filling(f, opts, &catalog);
    let outcomes: Vec<Result<(Vec<MatchResult>, usize), MatchError>> = if opts.jobs <= 1 {
        fillings.iter().map(per_filling).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| MatchError::Pool(e.to_string()))?;
        pool.install(|| fillings.par_iter().map(per_filling).collect())
    };

    let mut results = Vec::new();
    let mut stats = SearchStats { fillings: fillings.len(), candidates: 0 };
    for o in outcomes {
        let (found, n) = o?;
        stats.candidates += n;
        results.extend(found);
    }
    results.sort_by(|x, y| (x.p(), x.q(), x.eps, &x.tseq).cmp(&(y.p(), y.q(), y.eps, &y.tseq)));
    Ok((results, stats))
}

fn search_filling(
    f: &TrefoilFilling,
    opts: &SearchOptions,
    catalog: &[(KnotSpec, TorsionSeq)],
) -> Result<(Vec<MatchResult>, usize), MatchError> {
    let (p, q) = (f.p, f.q);
    let mut memo = (p <= opts.cache_cap).then(|| TrefoilMemo::new(p, q));
    let order = visit_order(p);
    let candidates = if opts.prune { prune_a_candidates(f) } else { all_a_candidates(p) };
    let mut grouped: BTreeMap<(Sign, TorsionSeq), Vec<i64>> = BTreeMap::new();
    for eps in Sign::BOTH {
        for &a in &candidates {
            if let Ok(t) = match_with(&mut memo, &order, p, q, eps, a) {
                grouped.entry((eps, t)).or_default().push(a);
            }
        }
    }
    let mut out = Vec::new();
    for ((eps, tseq), witnesses) in grouped {
        let knot = catalog.iter().find(|(_, t)| *t == tseq).map(|(k, _)| *k);
        let result = MatchResult { filling: *f, eps, witnesses, alex: knots::alex_from_torsion(&tseq), tseq, knot };
        result.certify()?;
        out.push(result);
    }
    Ok((out, candidates.len() * 2))
}
