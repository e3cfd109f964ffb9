//! Exact continued-fraction arithmetic and Brjuno-type sums.
//!
//! Rotation numbers enter either as floats, as exact quadratic irrationals
//! `(p + q√d)/r`, or as explicit partial-quotient lists. Expansions from an
//! exact source are computed by integer recurrences with no floating drift;
//! convergent numerators and denominators are arbitrary-precision since the
//! denominators outgrow 64 bits after a handful of large quotients.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Residual below which a float remainder is treated as exactly rational.
pub const RESIDUAL_EPS: f64 = 9.094947017729282e-13; // 2^-40

/// Default quotient size beyond which a float input is declared rational.
pub const DEFAULT_RATIONAL_CUTOFF: u64 = 1_000_000;

/// A single Brjuno-sum term larger than this sets the divergence flag.
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1.0e4;

#[derive(Debug, Error)]
pub enum ArithmeticError {
    #[error("rotation number must lie in (0,1), got {0}")]
    OutOfRange(f64),
    #[error("quadratic irrational (p+q\u{221a}d)/r needs r != 0")]
    ZeroDenominator,
    #[error("quadratic irrational needs d >= 0, got {0}")]
    NegativeDiscriminant(i64),
    #[error("partial quotient lists require every entry >= 1")]
    ZeroQuotient,
    #[error("partial quotient list is empty")]
    EmptyQuotients,
    #[error("max_terms must be >= 1")]
    NoTermsRequested,
    #[error("term count must be >= 1")]
    InvalidTermCount,
    #[error("depth must be >= 1")]
    InvalidDepth,
    #[error("rational value detected: {p}/{q}")]
    RationalDetected { p: BigInt, q: BigInt },
}

/// How a rotation number was specified.
#[derive(Debug, Clone)]
pub enum Source {
    /// A plain double; expansions run the Gauss map at float precision.
    Float(f64),
    /// `(p + q√d)/r` with integer entries; expansions are exact.
    Quadratic { p: i64, q: i64, r: i64, d: i64 },
    /// A prefix of partial quotients of an (unspecified) irrational.
    Quotients(Vec<BigUint>),
}

/// A rotation number in (0,1) together with its provenance.
#[derive(Debug, Clone)]
pub struct RotationNumber {
    value: f64,
    source: Source,
}

impl RotationNumber {
    pub fn from_f64(x: f64) -> Result<Self, ArithmeticError> {
        if !(x > 0.0 && x < 1.0) {
            return Err(ArithmeticError::OutOfRange(x));
        }
        Ok(Self { value: x, source: Source::Float(x) })
    }

    /// Exact quadratic irrational `(p + q√d)/r`. Also admits rationals
    /// (take `q = 0` or a perfect-square `d`).
    pub fn quadratic(p: i64, q: i64, r: i64, d: i64) -> Result<Self, ArithmeticError> {
        if r == 0 {
            return Err(ArithmeticError::ZeroDenominator);
        }
        if d < 0 {
            return Err(ArithmeticError::NegativeDiscriminant(d));
        }
        let value = (p as f64 + q as f64 * (d as f64).sqrt()) / r as f64;
        if !(value > 0.0 && value < 1.0) {
            return Err(ArithmeticError::OutOfRange(value));
        }
        Ok(Self { value, source: Source::Quadratic { p, q, r, d } })
    }

    /// Exact rational `p/q` in (0,1).
    pub fn rational(p: i64, q: i64) -> Result<Self, ArithmeticError> {
        Self::quadratic(p, 0, q, 0)
    }

    /// A prefix of partial quotients `a_1, a_2, ...`, all >= 1.
    pub fn from_quotients(quotients: Vec<BigUint>) -> Result<Self, ArithmeticError> {
        if quotients.is_empty() {
            return Err(ArithmeticError::EmptyQuotients);
        }
        if quotients.iter().any(|a| a.is_zero()) {
            return Err(ArithmeticError::ZeroQuotient);
        }
        // Backward evaluation of [0; a_1, ..., a_m]; giant entries saturate
        // to +inf and contribute 0, which is the right limit.
        let mut t = 0.0_f64;
        for a in quotients.iter().rev() {
            t = 1.0 / (a.to_f64().unwrap_or(f64::INFINITY) + t);
        }
        Ok(Self { value: t, source: Source::Quotients(quotients) })
    }

    pub fn from_quotients_u64(quotients: &[u64]) -> Result<Self, ArithmeticError> {
        Self::from_quotients(quotients.iter().map(|&a| BigUint::from(a)).collect())
    }

    /// The golden mean `(√5 − 1)/2` as an exact quadratic irrational.
    pub fn golden() -> Self {
        Self::quadratic(-1, 1, 2, 5).expect("golden mean is in (0,1)")
    }

    /// `√2 − 1` as an exact quadratic irrational.
    pub fn sqrt2_minus_1() -> Self {
        Self::quadratic(-1, 1, 1, 2).expect("sqrt2 - 1 is in (0,1)")
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    /// The reduced `p/q` when the source is exactly rational.
    ///
    /// Float inputs are never exact, and quotient lists are prefixes of an
    /// irrational rather than finite expansions, so both give `None`.
    pub fn exact_rational(&self) -> Option<(BigInt, BigInt)> {
        match self.source {
            Source::Quadratic { p, q, r, d } => {
                let num = if q == 0 {
                    BigInt::from(p)
                } else {
                    let s = BigInt::from(d).sqrt();
                    if &s * &s != BigInt::from(d) {
                        return None;
                    }
                    BigInt::from(p) + BigInt::from(q) * s
                };
                let mut num = num;
                let mut den = BigInt::from(r);
                if den.is_negative() {
                    num = -num;
                    den = -den;
                }
                let g = num.gcd(&den);
                Some((num / &g, den / g))
            }
            _ => None,
        }
    }
}

/// Partial quotients and exact convergents of a rotation number.
///
/// Convergents are stored from the zeroth pair `(0, 1)` on, so the pair at
/// 1-based position `n` has `q_1 = 1`, `q_2 = a_1`, and consecutive pairs
/// satisfy `p_n q_{n-1} - p_{n-1} q_n = (-1)^n` exactly.
#[derive(Debug, Clone)]
pub struct ContinuedFractionExpansion {
    quotients: Vec<BigUint>,
    convergents: Vec<(BigInt, BigInt)>,
    terminated: bool,
}

impl ContinuedFractionExpansion {
    fn new(quotients: Vec<BigUint>, terminated: bool) -> Self {
        let convergents = build_convergents(&quotients);
        Self { quotients, convergents, terminated }
    }

    pub fn quotients(&self) -> &[BigUint] {
        &self.quotients
    }

    pub fn convergents(&self) -> &[(BigInt, BigInt)] {
        &self.convergents
    }

    /// True iff the input was detected rational.
    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Convergent at 1-based position `n` (so `convergent(1) = (0, 1)`).
    pub fn convergent(&self, n: usize) -> &(BigInt, BigInt) {
        &self.convergents[n - 1]
    }

    /// Value reconstructed from the deepest convergent.
    pub fn value_f64(&self) -> f64 {
        let (p, q) = self.convergents.last().expect("at least (0,1)");
        big_ratio_f64(p, q)
    }

    /// The Brjuno-sum terms `ln(q_{n+1})/q_n` for every available position.
    pub fn brjuno_terms(&self) -> Vec<f64> {
        self.convergents
            .windows(2)
            .map(|w| ln_big(&w[1].1) / big_f64(&w[0].1))
            .collect()
    }
}

fn build_convergents(quotients: &[BigUint]) -> Vec<(BigInt, BigInt)> {
    let mut prev = (BigInt::one(), BigInt::zero());
    let mut cur = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(quotients.len() + 1);
    out.push(cur.clone());
    for a in quotients {
        let a = BigInt::from(a.clone());
        let next = (&a * &cur.0 + &prev.0, &a * &cur.1 + &prev.1);
        prev = cur;
        cur = next;
        out.push(cur.clone());
    }
    out
}

/// Natural log of a big integer, accurate to f64 precision at any size.
pub fn ln_big(x: &BigInt) -> f64 {
    debug_assert!(x.is_positive());
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().expect("fits f64").ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().expect("53 bits fit");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn big_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

fn big_ratio_f64(p: &BigInt, q: &BigInt) -> f64 {
    let (pf, qf) = (big_f64(p), big_f64(q));
    if pf.is_finite() && qf.is_finite() {
        pf / qf
    } else if p.is_zero() {
        0.0
    } else {
        (ln_big(p) - ln_big(q)).exp()
    }
}

/// Continued fraction of `x` with at most `max_terms` quotients.
///
/// Exact sources use integer recurrences; float inputs run the Gauss map and
/// stop (setting `terminated`) once the residual drops below [`RESIDUAL_EPS`]
/// or a quotient exceeds `rational_cutoff`. Hitting `max_terms` first is not
/// an error: the expansion is returned as far as it got.
pub fn continued_fraction(
    x: &RotationNumber,
    max_terms: usize,
    rational_cutoff: u64,
) -> Result<ContinuedFractionExpansion, ArithmeticError> {
    if max_terms == 0 {
        return Err(ArithmeticError::NoTermsRequested);
    }
    if let Some((p, q)) = x.exact_rational() {
        return Ok(rational_cf(&p, &q, max_terms));
    }
    match &x.source {
        Source::Quadratic { p, q, r, d } => Ok(quadratic_cf(*p, *q, *r, *d, max_terms)),
        Source::Quotients(list) => {
            let taken: Vec<BigUint> = list.iter().take(max_terms).cloned().collect();
            Ok(ContinuedFractionExpansion::new(taken, false))
        }
        Source::Float(v) => Ok(float_cf(*v, max_terms, rational_cutoff)),
    }
}

fn rational_cf(p: &BigInt, q: &BigInt, max_terms: usize) -> ContinuedFractionExpansion {
    // x = p/q in (0,1): Euclid on (q, p) yields the quotients of 1/x.
    let mut num = p.clone();
    let mut den = q.clone();
    let mut quotients = Vec::new();
    let mut terminated = false;
    while quotients.len() < max_terms {
        if num.is_zero() {
            terminated = true;
            break;
        }
        let (a, rem) = den.div_rem(&num);
        quotients.push(a.to_biguint().expect("positive quotient"));
        den = num;
        num = rem;
    }
    if num.is_zero() {
        terminated = true;
    }
    ContinuedFractionExpansion::new(quotients, terminated)
}

/// Exact expansion of `(p + q√d)/r` with d not a perfect square.
///
/// Runs the classical surd recurrence on `(P + √D)/Q` with the invariant
/// `Q | D − P²`, entirely in big-integer arithmetic.
fn quadratic_cf(p: i64, q: i64, r: i64, d: i64, max_terms: usize) -> ContinuedFractionExpansion {
    // Normalize the radical coefficient to +1: (p + q√d)/r = (P + √(q²d))/Q.
    let (mut pp, mut qq) = if q >= 0 {
        (BigInt::from(p), BigInt::from(r))
    } else {
        (BigInt::from(-p), BigInt::from(-r))
    };
    let mut dd = BigInt::from(q) * BigInt::from(q) * BigInt::from(d);
    // Enforce Q | D − P².
    let rem = (&dd - &pp * &pp) % &qq;
    if !rem.is_zero() {
        let qa = qq.abs();
        pp *= &qa;
        dd *= &qq * &qq;
        qq *= qa;
    }
    let isqrt = dd.sqrt();
    let mut quotients = Vec::with_capacity(max_terms);
    // First iteration yields floor(x) = 0, which is dropped: x is in (0,1).
    let mut first = true;
    while quotients.len() < max_terms {
        let u = &pp + &isqrt;
        let a = if qq.is_positive() {
            u.div_floor(&qq)
        } else {
            (u + BigInt::one()).div_floor(&qq)
        };
        let p_next = &a * &qq - &pp;
        let q_next = (&dd - &p_next * &p_next) / &qq;
        if first {
            debug_assert!(a.is_zero(), "input not in (0,1)?");
            first = false;
        } else {
            quotients.push(a.to_biguint().expect("positive quotient"));
        }
        pp = p_next;
        qq = q_next;
    }
    ContinuedFractionExpansion::new(quotients, false)
}

fn float_cf(value: f64, max_terms: usize, rational_cutoff: u64) -> ContinuedFractionExpansion {
    let mut y = value;
    let mut quotients = Vec::new();
    let mut terminated = false;
    while quotients.len() < max_terms {
        let inv = 1.0 / y;
        let a = inv.floor();
        if a > rational_cutoff as f64 {
            terminated = true;
            break;
        }
        quotients.push(BigUint::from(a as u64));
        let frac = inv - a;
        if frac < RESIDUAL_EPS {
            terminated = true;
            break;
        }
        y = frac;
    }
    ContinuedFractionExpansion::new(quotients, terminated)
}

/// Truncated Brjuno sum with its divergence diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct BrjunoValue {
    /// `Σ_{n=1}^{terms_used} ln(q_{n+1})/q_n`, in nats.
    pub partial_sum: f64,
    pub terms_used: usize,
    /// Set when the input was rational or some term exceeded the blowup
    /// threshold; the partial sum is still finite over the terms used.
    pub divergence_flag: bool,
}

/// Partial Brjuno sum `Σ_{n=1}^{N} ln(q_{n+1})/q_n` over exact denominators.
pub fn brjuno_sum(
    cf: &ContinuedFractionExpansion,
    n_terms: usize,
) -> Result<BrjunoValue, ArithmeticError> {
    brjuno_sum_with(cf, n_terms, DEFAULT_BLOWUP_THRESHOLD)
}

pub fn brjuno_sum_with(
    cf: &ContinuedFractionExpansion,
    n_terms: usize,
    blowup_threshold: f64,
) -> Result<BrjunoValue, ArithmeticError> {
    if n_terms == 0 {
        return Err(ArithmeticError::InvalidTermCount);
    }
    let terms = cf.brjuno_terms();
    let used = n_terms.min(terms.len());
    let mut sum = 0.0;
    let mut blowup = false;
    for &t in &terms[..used] {
        sum += t;
        if t > blowup_threshold {
            blowup = true;
        }
    }
    Ok(BrjunoValue {
        partial_sum: sum,
        terms_used: used,
        divergence_flag: blowup || cf.terminated(),
    })
}

/// Depth-truncated Brjuno recursion `Φ(x) = −ln x + x Φ({1/x})`.
///
/// An independent cross-check of [`brjuno_sum`]: it runs the Gauss map at
/// float precision rather than summing over exact convergents. The two stay
/// within a uniform constant of each other on bounded-quotient inputs.
pub fn brjuno_function(x: &RotationNumber, depth: usize) -> Result<f64, ArithmeticError> {
    if depth == 0 {
        return Err(ArithmeticError::InvalidDepth);
    }
    let mut levels = Vec::with_capacity(depth);
    let mut y = x.value();
    // Convergent tracking so a detected rational can be reported as p/q.
    let mut prev = (BigInt::one(), BigInt::zero());
    let mut cur = (BigInt::zero(), BigInt::one());
    for level in 0..depth {
        if y < RESIDUAL_EPS {
            return Err(ArithmeticError::RationalDetected { p: cur.0, q: cur.1 });
        }
        levels.push(y);
        if level + 1 == depth {
            break;
        }
        let inv = 1.0 / y;
        let a = inv.floor();
        if a > DEFAULT_RATIONAL_CUTOFF as f64 {
            return Err(ArithmeticError::RationalDetected { p: cur.0, q: cur.1 });
        }
        let ab = BigInt::from(a as u64);
        let next = (&ab * &cur.0 + &prev.0, &ab * &cur.1 + &prev.1);
        prev = cur;
        cur = next;
        y = inv - a;
    }
    let mut acc = -levels[depth - 1].ln();
    for &xk in levels[..depth - 1].iter().rev() {
        acc = -xk.ln() + xk * acc;
    }
    Ok(acc)
}

/// Truncated-heuristic arithmetic class of a rotation number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Rational,
    BrjunoLike,
    NonBrjunoLike,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::Rational => write!(f, "rational"),
            Classification::BrjunoLike => write!(f, "brjuno-like (truncated heuristic)"),
            Classification::NonBrjunoLike => write!(f, "non-brjuno-like (truncated heuristic)"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig {
    pub max_terms: usize,
    pub rational_cutoff: u64,
    /// A recent term `ln(q_{n+1})/q_n` at or above this marks the input
    /// non-Brjuno-like. Terms of a convergent sum decay to zero; terms of the
    /// classical divergent constructions stay bounded away from it.
    pub term_threshold: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { max_terms: 40, rational_cutoff: DEFAULT_RATIONAL_CUTOFF, term_threshold: 1.0 }
    }
}

/// Classify `x` from the growth of its truncated Brjuno terms.
///
/// Finite truncation cannot prove Brjuno or non-Brjuno status; this is a
/// labeled heuristic over the available terms, nothing more.
pub fn classify(x: &RotationNumber, cfg: &ClassifyConfig) -> Classification {
    let cf = continued_fraction(x, cfg.max_terms.max(1), cfg.rational_cutoff)
        .expect("max_terms >= 1");
    if cf.terminated() {
        return Classification::Rational;
    }
    let terms = cf.brjuno_terms();
    if terms.is_empty() {
        return Classification::BrjunoLike;
    }
    let tail_start = terms.len() / 2;
    let tail_max = terms[tail_start..].iter().cloned().fold(f64::MIN, f64::max);
    if tail_max >= cfg.term_threshold {
        Classification::NonBrjunoLike
    } else {
        Classification::BrjunoLike
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib_denominators(count: usize) -> Vec<u64> {
        // q_1, q_2, ... = 1, 1, 2, 3, 5, ... for the golden mean.
        let mut v = vec![1u64, 1];
        while v.len() < count {
            let n = v.len();
            v.push(v[n - 1] + v[n - 2]);
        }
        v.truncate(count);
        v
    }

    #[test]
    fn golden_mean_quotients_and_denominators() {
        let g = RotationNumber::golden();
        let cf = continued_fraction(&g, 30, DEFAULT_RATIONAL_CUTOFF).unwrap();
        assert!(!cf.terminated());
        assert!(cf.quotients().iter().all(|a| a == &BigUint::from(1u32)));
        let fibs = fib_denominators(31);
        for (i, (_, q)) in cf.convergents().iter().enumerate() {
            assert_eq!(q, &BigInt::from(fibs[i]));
        }
    }

    #[test]
    fn one_third_terminates() {
        let x = RotationNumber::rational(1, 3).unwrap();
        let cf = continued_fraction(&x, 10, DEFAULT_RATIONAL_CUTOFF).unwrap();
        assert!(cf.terminated());
        assert_eq!(cf.quotients(), &[BigUint::from(3u32)]);
    }

    #[test]
    fn one_third_as_float_terminates() {
        let x = RotationNumber::from_f64(1.0 / 3.0).unwrap();
        let cf = continued_fraction(&x, 10, DEFAULT_RATIONAL_CUTOFF).unwrap();
        assert!(cf.terminated());
        assert_eq!(cf.quotients()[0], BigUint::from(3u32));
    }

    #[test]
    fn sqrt2_minus_one_quotients() {
        let x = RotationNumber::sqrt2_minus_1();
        let cf = continued_fraction(&x, 20, DEFAULT_RATIONAL_CUTOFF).unwrap();
        assert!(cf.quotients().iter().all(|a| a == &BigUint::from(2u32)));
        let dens: Vec<i64> =
            cf.convergents().iter().take(5).map(|(_, q)| q.to_i64().unwrap()).collect();
        assert_eq!(dens, vec![1, 2, 5, 12, 29]);
    }

    #[test]
    fn determinant_identity_for_quadratic_source() {
        let g = RotationNumber::quadratic(-1, 1, 3, 7).unwrap(); // (√7−1)/3
        let cf = continued_fraction(&g, 40, DEFAULT_RATIONAL_CUTOFF).unwrap();
        let conv = cf.convergents();
        for n in 2..=conv.len() {
            let (pn, qn) = &conv[n - 1];
            let (pm, qm) = &conv[n - 2];
            let det = pn * qm - pm * qn;
            let expect = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            assert_eq!(det, expect, "position {n}");
        }
    }

    #[test]
    fn convergents_approximate_quadratic_value() {
        let x = RotationNumber::quadratic(-2, 1, 4, 15).unwrap(); // (√15−2)/4
        let cf = continued_fraction(&x, 25, DEFAULT_RATIONAL_CUTOFF).unwrap();
        let conv = cf.convergents();
        for w in conv.windows(2) {
            let (p, q) = &w[0];
            let (_, q_next) = &w[1];
            let approx = big_ratio_f64(p, q);
            let bound = 1.0 / (big_f64(q) * big_f64(q_next));
            assert!((x.value() - approx).abs() < bound + 1e-15);
        }
    }

    #[test]
    fn golden_brjuno_sum_regression() {
        // Independent oracle: direct summation over exact Fibonacci integers.
        let fibs = fib_denominators(42);
        let mut oracle = 0.0;
        for n in 1..=40 {
            oracle += (fibs[n] as f64).ln() / fibs[n - 1] as f64;
        }
        let cf = continued_fraction(&RotationNumber::golden(), 41, DEFAULT_RATIONAL_CUTOFF)
            .unwrap();
        let b = brjuno_sum(&cf, 40).unwrap();
        assert_eq!(b.terms_used, 40);
        assert!(!b.divergence_flag);
        assert!((b.partial_sum - oracle).abs() < 1e-12);
        // Frozen from the oracle above.
        assert!((b.partial_sum - GOLDEN_BRJUNO_40).abs() < 1e-12);
    }

    /// Σ_{n=1}^{40} ln(F_{n+1})/F_n over Fibonacci denominators.
    const GOLDEN_BRJUNO_40: f64 = 3.286129382114853;

    #[test]
    fn brjuno_sum_single_term() {
        let x = RotationNumber::sqrt2_minus_1();
        let cf = continued_fraction(&x, 10, DEFAULT_RATIONAL_CUTOFF).unwrap();
        let b = brjuno_sum(&cf, 1).unwrap();
        // ln(q_2)/q_1 = ln(a_1)/1.
        assert!((b.partial_sum - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn brjuno_sum_rational_flags_divergence() {
        let x = RotationNumber::rational(1, 3).unwrap();
        let cf = continued_fraction(&x, 10, DEFAULT_RATIONAL_CUTOFF).unwrap();
        let b = brjuno_sum(&cf, 5).unwrap();
        assert!(b.divergence_flag);
        assert!(b.partial_sum.is_finite());
    }

    #[test]
    fn brjuno_sum_monotone_in_terms() {
        let cf = continued_fraction(&RotationNumber::golden(), 41, DEFAULT_RATIONAL_CUTOFF)
            .unwrap();
        let mut last = 0.0;
        for n in 1..=40 {
            let s = brjuno_sum(&cf, n).unwrap().partial_sum;
            assert!(s >= last);
            last = s;
        }
    }

    #[test]
    fn brjuno_function_depth_one_is_minus_ln() {
        let x = RotationNumber::from_f64(0.375).unwrap();
        let v = brjuno_function(&x, 1).unwrap();
        assert!((v - (-0.375f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn brjuno_function_detects_rational() {
        let x = RotationNumber::from_f64(1.0 / 3.0).unwrap();
        match brjuno_function(&x, 10) {
            Err(ArithmeticError::RationalDetected { p, q }) => {
                assert_eq!((p, q), (BigInt::one(), BigInt::from(3)));
            }
            other => panic!("expected rational detection, got {other:?}"),
        }
    }

    #[test]
    fn brjuno_function_tracks_brjuno_sum_on_golden() {
        let g = RotationNumber::golden();
        let phi = brjuno_function(&g, 30).unwrap();
        let cf = continued_fraction(&g, 31, DEFAULT_RATIONAL_CUTOFF).unwrap();
        let sum = brjuno_sum(&cf, 30).unwrap().partial_sum;
        assert!((phi - sum).abs() <= 3.0, "phi={phi} sum={sum}");
    }

    #[test]
    fn classify_examples() {
        let cfg = ClassifyConfig::default();
        assert_eq!(classify(&RotationNumber::rational(1, 3).unwrap(), &cfg), Classification::Rational);
        assert_eq!(classify(&RotationNumber::golden(), &cfg), Classification::BrjunoLike);
        // Liouville-like prefix: a_n = 3^{q_n} keeps every term
        // ln(q_{n+1})/q_n at or above ln 3 > 1.
        let quotients = vec![
            BigUint::from(3u32),
            BigUint::from(27u32),
            BigUint::from(3u32).pow(82),
        ];
        let x = RotationNumber::from_quotients(quotients).unwrap();
        let cf = continued_fraction(&x, 10, DEFAULT_RATIONAL_CUTOFF).unwrap();
        for t in cf.brjuno_terms() {
            assert!(t >= 1.0, "term {t} not bounded below by 1");
        }
        assert_eq!(classify(&x, &cfg), Classification::NonBrjunoLike);
    }

    #[test]
    fn value_reconstruction_from_quotient_prefix() {
        let x = RotationNumber::from_quotients_u64(&[2, 1, 4, 1, 6]).unwrap();
        let cf = continued_fraction(&x, 10, DEFAULT_RATIONAL_CUTOFF).unwrap();
        assert!(!cf.terminated());
        assert!((cf.value_f64() - x.value()).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(RotationNumber::from_f64(0.0).is_err());
        assert!(RotationNumber::from_f64(1.0).is_err());
        assert!(RotationNumber::quadratic(3, 0, 2, 0).is_err());
    }
}
