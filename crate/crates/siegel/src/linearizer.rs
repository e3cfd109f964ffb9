//! Power-series linearization of `P(z) = e^{2πiα} z + z²` and conformal
//! radius estimates.
//!
//! Matching powers of `z` in `P(L(z)) = L(λz)` with `L(0) = 0`, `L'(0) = 1`
//! gives the coefficient recursion
//!
//! ```text
//! c_n (λ^n − λ) = Σ_{j=1}^{n−1} c_j c_{n−j},   c_1 = 1.
//! ```
//!
//! Since `|c_n|` grows like `r^{−n}` (with `r` the conformal radius of the
//! Siegel disk), the computation carries the rescaled coefficients
//! `d_n = c_n σ^n`, which obey the same recursion with `d_1 = σ`. A σ near
//! `r` keeps the whole series within floating range; the builder re-derives
//! the series with a better σ whenever a coefficient leaves it.
//!
//! At rational α the small divisor `λ^n − λ` vanishes at `n = q + 1`; the
//! series stops there and the conformal radius is exactly zero.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::arithmetic::RotationNumber;

/// Divisor magnitude below which a float-precision build declares resonance.
pub const DEFAULT_DIVISOR_FLOOR: f64 = 1.0e-14;

/// Coefficients outside `[RANGE_MIN, RANGE_MAX]` trigger a σ re-derivation.
const RANGE_MIN: f64 = 1.0e-300;
const RANGE_MAX: f64 = 1.0e300;

const MAX_RESCALE_ATTEMPTS: usize = 16;

/// Minimum usable coefficients for a radius fit.
pub const MIN_FIT_COEFFS: usize = 64;

#[derive(Debug, Error)]
pub enum LinearizerError {
    #[error("series is resonant at order {0}")]
    ResonanceAtOrder(usize),
    #[error("requested order {requested} exceeds series order {available}")]
    OrderExceedsSeries { requested: usize, available: usize },
    #[error("radius fit needs at least {need} coefficients, series has {have}")]
    TooFewCoefficients { have: usize, need: usize },
    #[error("series evaluation overflowed at |z/sigma| = {0}")]
    EvaluationOverflow(f64),
}

/// Resonance record: the order n > 1 with `λ^n = λ` (within the divisor
/// floor) and the divisor magnitude seen there.
#[derive(Debug, Clone, Copy)]
pub struct Resonance {
    pub order: usize,
    pub divisor_magnitude: f64,
}

/// Rescaled truncated Taylor series of the linearizing map.
///
/// `coeffs[k]` holds `d_{k+1} = c_{k+1} σ^{k+1}`; the true coefficients are
/// recovered as `c_n = d_n σ^{−n}`.
#[derive(Debug, Clone)]
pub struct LinearizerSeries {
    alpha: RotationNumber,
    lambda: Complex64,
    sigma: f64,
    coeffs: Vec<Complex64>,
    resonance: Option<Resonance>,
}

impl LinearizerSeries {
    pub fn alpha(&self) -> &RotationNumber {
        &self.alpha
    }

    /// The multiplier `e^{2πiα}`.
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Truncation order N: the number of coefficients actually built.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Rescaled coefficients `d_1 ... d_N` (`coeffs()[0]` is `d_1 = σ`).
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn resonance(&self) -> Option<Resonance> {
        self.resonance
    }

    /// `ln |c_n|` for the 1-based order `n`.
    pub fn ln_coeff(&self, n: usize) -> f64 {
        self.coeffs[n - 1].norm().ln() - n as f64 * self.sigma.ln()
    }

    /// Assemble a series from explicit rescaled coefficients.
    ///
    /// For calibrating the radius estimators against synthetic growth laws;
    /// no recursion is run and no resonance scan is performed.
    pub fn synthetic(alpha: RotationNumber, sigma: f64, coeffs: Vec<Complex64>) -> Self {
        let lambda = unit_phase(alpha.value());
        Self { alpha, lambda, sigma, coeffs, resonance: None }
    }
}

fn unit_phase(turns: f64) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * turns;
    Complex64::new(angle.cos(), angle.sin())
}

enum BuildOutcome {
    Complete(Vec<Complex64>),
    Resonant { coeffs: Vec<Complex64>, resonance: Resonance },
    Clamped { coeffs: Vec<Complex64> },
}

/// One build pass at fixed σ.
fn build_pass(
    alpha_value: f64,
    exact_q: Option<u64>,
    lambda: Complex64,
    order: usize,
    sigma: f64,
    divisor_floor: f64,
) -> BuildOutcome {
    let mut coeffs = Vec::with_capacity(order);
    coeffs.push(Complex64::new(sigma, 0.0));
    let mut theta = alpha_value;
    for n in 2..=order {
        theta += alpha_value;
        theta -= theta.floor();
        let lambda_n = unit_phase(theta);
        let divisor = lambda_n - lambda;
        let resonant = match exact_q {
            Some(q) => (n as u64) % q == 1 % q,
            None => divisor.norm() < divisor_floor,
        };
        if resonant {
            let resonance = Resonance { order: n, divisor_magnitude: divisor.norm() };
            return BuildOutcome::Resonant { coeffs, resonance };
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 1..=(n - 1) / 2 {
            sum += coeffs[j - 1] * coeffs[n - j - 1];
        }
        sum *= 2.0;
        if n % 2 == 0 {
            let half = coeffs[n / 2 - 1];
            sum += half * half;
        }
        let d_n = sum / divisor;
        let mag = d_n.norm();
        if !(RANGE_MIN..=RANGE_MAX).contains(&mag) {
            return BuildOutcome::Clamped { coeffs };
        }
        coeffs.push(d_n);
    }
    BuildOutcome::Complete(coeffs)
}

/// Fresh σ from the growth of a partial build: the slope of `ln |d_n|`
/// re-centers the rescaled series around unit magnitude.
fn rescaled_sigma(sigma: f64, coeffs: &[Complex64]) -> f64 {
    if coeffs.len() >= 8 {
        let lo = coeffs.len() / 2;
        let slope = (coeffs.last().unwrap().norm().ln() - coeffs[lo].norm().ln())
            / (coeffs.len() - 1 - lo) as f64;
        let next = sigma * (-slope).exp();
        if next.is_finite() && next > 0.0 {
            return next;
        }
    }
    // Too little data to fit: nudge in the right direction.
    if coeffs.last().map_or(false, |d| d.norm() > 1.0) {
        sigma * 0.5
    } else {
        sigma * 2.0
    }
}

fn exact_denominator(alpha: &RotationNumber) -> Option<u64> {
    alpha.exact_rational().and_then(|(_, q)| q.to_u64())
}

/// Build the rescaled linearizer series for `alpha` to order `n` with the
/// default divisor floor.
pub fn linearizer_coeffs(alpha: &RotationNumber, n: usize, sigma: f64) -> LinearizerSeries {
    linearizer_coeffs_with(alpha, n, sigma, DEFAULT_DIVISOR_FLOOR)
}

pub fn linearizer_coeffs_with(
    alpha: &RotationNumber,
    n: usize,
    sigma: f64,
    divisor_floor: f64,
) -> LinearizerSeries {
    assert!(n >= 1, "series order must be >= 1");
    assert!(sigma > 0.0 && sigma.is_finite(), "sigma must be positive");
    let lambda = unit_phase(alpha.value());
    let exact_q = exact_denominator(alpha);
    let mut sigma = sigma;
    let mut last_clamped: Option<(f64, Vec<Complex64>)> = None;
    for _ in 0..MAX_RESCALE_ATTEMPTS {
        match build_pass(alpha.value(), exact_q, lambda, n, sigma, divisor_floor) {
            BuildOutcome::Complete(coeffs) => {
                return LinearizerSeries {
                    alpha: alpha.clone(),
                    lambda,
                    sigma,
                    coeffs,
                    resonance: None,
                };
            }
            BuildOutcome::Resonant { coeffs, resonance } => {
                return LinearizerSeries {
                    alpha: alpha.clone(),
                    lambda,
                    sigma,
                    coeffs,
                    resonance: Some(resonance),
                };
            }
            BuildOutcome::Clamped { coeffs } => {
                let next = rescaled_sigma(sigma, &coeffs);
                last_clamped = Some((sigma, coeffs));
                sigma = next;
            }
        }
    }
    // Rescaling failed to settle; return the longest in-range prefix.
    let (sigma, coeffs) = last_clamped.expect("at least one clamped pass");
    LinearizerSeries { alpha: alpha.clone(), lambda, sigma, coeffs, resonance: None }
}

/// Residual of the functional equation up to order `m`, by direct
/// composition.
///
/// Squares the truncated polynomial afresh and compares
/// `λ L̃(u) + L̃(u)²` against `L̃(λu)` coefficient by coefficient in the
/// rescaled variable — an independent path from the build recursion. The
/// result is the maximum coefficient mismatch normalized by
/// `max(1, max_n |d_n|)`.
pub fn verify_conjugacy(series: &LinearizerSeries, m: usize) -> Result<f64, LinearizerError> {
    if let Some(res) = series.resonance() {
        if res.order <= m {
            return Err(LinearizerError::ResonanceAtOrder(res.order));
        }
    }
    if m > series.order() {
        return Err(LinearizerError::OrderExceedsSeries {
            requested: m,
            available: series.order(),
        });
    }
    let d = &series.coeffs()[..m];
    let lambda = series.lambda();
    // Full polynomial square, truncated at total degree m.
    let mut square = vec![Complex64::new(0.0, 0.0); m + 1];
    for (j, dj) in d.iter().enumerate() {
        let nj = j + 1;
        for (k, dk) in d.iter().enumerate() {
            let deg = nj + k + 1;
            if deg > m {
                break;
            }
            square[deg] += dj * dk;
        }
    }
    let scale = d.iter().map(|c| c.norm()).fold(1.0_f64, f64::max);
    let mut lambda_pow = Complex64::new(1.0, 0.0);
    let mut worst = 0.0_f64;
    for n in 1..=m {
        lambda_pow *= lambda;
        let lhs = lambda * d[n - 1] + square[n];
        let rhs = d[n - 1] * lambda_pow;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst / scale)
}

/// Which growth-rate reading of the coefficients to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    /// Robust least-squares slope of `ln |d_n|` over the fit window.
    HadamardFit,
    /// Largest pairwise slope `(ln|d_n| − ln|d_m|)/(n − m)` over well
    /// separated pairs in the window — the limsup reading of the same data.
    TailSlope,
}

/// A conformal-radius estimate with its provenance.
#[derive(Debug, Clone, Copy)]
pub struct RadiusEstimate {
    pub value: f64,
    pub method: RadiusMethod,
    /// 1-based coefficient orders used by the fit; `None` for resonant zeros.
    pub window: Option<(usize, usize)>,
    /// Absolute difference between the two estimators on the same window.
    pub uncertainty: f64,
    pub resonant_zero: bool,
}

/// Estimate the conformal radius from coefficient growth.
///
/// A resonant series short-circuits to the exact answer 0. Otherwise both
/// estimators run over the trailing `window_fraction` of the coefficients
/// and their disagreement is reported as the uncertainty.
pub fn conformal_radius(
    series: &LinearizerSeries,
    method: RadiusMethod,
    window_fraction: f64,
) -> Result<RadiusEstimate, LinearizerError> {
    if series.resonance().is_some() {
        return Ok(RadiusEstimate {
            value: 0.0,
            method,
            window: None,
            uncertainty: 0.0,
            resonant_zero: true,
        });
    }
    let n_total = series.order();
    if n_total < MIN_FIT_COEFFS {
        return Err(LinearizerError::TooFewCoefficients { have: n_total, need: MIN_FIT_COEFFS });
    }
    let frac = window_fraction.clamp(0.05, 1.0);
    let start = (n_total - (n_total as f64 * frac) as usize).max(2);
    let points: Vec<(f64, f64)> = (start..=n_total)
        .map(|n| (n as f64, series.coeffs()[n - 1].norm().ln()))
        .filter(|(_, y)| y.is_finite())
        .collect();
    if points.len() < 8 {
        return Err(LinearizerError::TooFewCoefficients { have: points.len(), need: 8 });
    }
    let sigma = series.sigma();
    let hadamard = sigma * (-crate::fit::robust_slope(&points, 0.95)).exp();
    let tail = sigma * (-max_pair_slope(&points)).exp();
    let uncertainty = (hadamard - tail).abs();
    let value = match method {
        RadiusMethod::HadamardFit => hadamard,
        RadiusMethod::TailSlope => tail,
    };
    Ok(RadiusEstimate {
        value,
        method,
        window: Some((start, n_total)),
        uncertainty,
        resonant_zero: false,
    })
}

/// Largest slope over pairs separated by at least a quarter of the window.
fn max_pair_slope(points: &[(f64, f64)]) -> f64 {
    let min_gap = (points.len() / 4).max(1);
    let mut best = f64::NEG_INFINITY;
    for i in 0..points.len() {
        for j in (i + min_gap)..points.len() {
            let s = (points[j].1 - points[i].1) / (points[j].0 - points[i].0);
            if s > best {
                best = s;
            }
        }
    }
    best
}

/// Evaluate the truncated series at `z` by Horner on the rescaled variable.
pub fn evaluate_linearizer(
    series: &LinearizerSeries,
    z: Complex64,
) -> Result<Complex64, LinearizerError> {
    let u = z / series.sigma();
    let mut acc = Complex64::new(0.0, 0.0);
    for d in series.coeffs().iter().rev() {
        acc = acc * u + d;
    }
    let value = acc * u;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(LinearizerError::EvaluationOverflow(u.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::RotationNumber;

    const SIGMA: f64 = 0.25;

    #[test]
    fn second_coefficient_matches_closed_form() {
        let alpha = RotationNumber::from_f64(0.37).unwrap();
        let series = linearizer_coeffs(&alpha, 8, SIGMA);
        let lambda = series.lambda();
        let expected = SIGMA * SIGMA / (lambda * lambda - lambda);
        let got = series.coeffs()[1];
        assert!((got - expected).norm() < 1e-15);
    }

    #[test]
    fn half_resonates_at_order_three() {
        let alpha = RotationNumber::rational(1, 2).unwrap();
        let series = linearizer_coeffs(&alpha, 64, SIGMA);
        let res = series.resonance().expect("1/2 must resonate");
        assert_eq!(res.order, 3);
        assert_eq!(series.order(), 2);
        // c_2 = d_2 / σ² = 1/(λ²−λ) = 1/2 at λ = −1.
        let c2 = series.coeffs()[1] / Complex64::new(SIGMA * SIGMA, 0.0);
        assert!((c2 - Complex64::new(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn float_rationals_resonate_via_divisor_floor() {
        for (p, q) in [(1u64, 3u64), (2, 5), (3, 7), (3, 8)] {
            let alpha = RotationNumber::from_f64(p as f64 / q as f64).unwrap();
            let series = linearizer_coeffs(&alpha, 64, SIGMA);
            let res = series.resonance().expect("rational float must resonate");
            assert_eq!(res.order as u64, q + 1, "p/q = {p}/{q}");
        }
    }

    #[test]
    fn recursion_residual_is_tiny() {
        let series = linearizer_coeffs(&RotationNumber::golden(), 512, SIGMA);
        let lambda = series.lambda();
        let d = series.coeffs();
        let scale = d.iter().map(|c| c.norm()).fold(f64::MIN, f64::max);
        let mut lambda_pow = lambda;
        for n in 2..=series.order() {
            lambda_pow *= lambda;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 1..n {
                sum += d[j - 1] * d[n - j - 1];
            }
            let lhs = d[n - 1] * (lambda_pow - lambda);
            assert!((lhs - sum).norm() / scale < 1e-12, "order {n}");
        }
    }

    #[test]
    fn sigma_equivariance() {
        let alpha = RotationNumber::golden();
        let a = linearizer_coeffs(&alpha, 512, 0.2);
        let b = linearizer_coeffs(&alpha, 512, 0.2 * 1.7);
        let mut ratio_expect = 1.0_f64;
        for n in 1..=512 {
            ratio_expect *= 1.7;
            let got = (b.coeffs()[n - 1] / a.coeffs()[n - 1]).norm();
            assert!(
                (got - ratio_expect).abs() / ratio_expect < 1e-10,
                "order {n}: {got} vs {ratio_expect}"
            );
        }
    }

    #[test]
    fn conjugacy_residual_examples() {
        let series = linearizer_coeffs(&RotationNumber::golden(), 128, SIGMA);
        assert_eq!(verify_conjugacy(&series, 1).unwrap(), 0.0);
        assert!(verify_conjugacy(&series, 50).unwrap() < 1e-10);

        let half = linearizer_coeffs(&RotationNumber::rational(1, 2).unwrap(), 16, SIGMA);
        match verify_conjugacy(&half, 3) {
            Err(LinearizerError::ResonanceAtOrder(3)) => {}
            other => panic!("expected resonance error, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_geometric_radius_recovered() {
        let alpha = RotationNumber::golden();
        for rho in [0.1_f64, 0.25, 0.5] {
            // σ must sit near ρ or the geometric law leaves floating range
            // long before n = 1024.
            let sigma = 0.8 * rho;
            let coeffs: Vec<Complex64> = (1..=1024)
                .map(|n| {
                    let ln_d = n as f64 * sigma.ln() - (n - 1) as f64 * rho.ln();
                    Complex64::new(ln_d.exp(), 0.0)
                })
                .collect();
            let series = LinearizerSeries::synthetic(alpha.clone(), sigma, coeffs);
            for method in [RadiusMethod::HadamardFit, RadiusMethod::TailSlope] {
                let est = conformal_radius(&series, method, 0.5).unwrap();
                assert!(
                    (est.value - rho).abs() / rho < 1e-3,
                    "{method:?} rho={rho}: {}",
                    est.value
                );
            }
        }
    }

    #[test]
    fn resonant_radius_is_exactly_zero() {
        let series = linearizer_coeffs(&RotationNumber::rational(1, 2).unwrap(), 16, SIGMA);
        let est = conformal_radius(&series, RadiusMethod::HadamardFit, 0.5).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.resonant_zero);
    }

    #[test]
    fn short_series_rejected_by_radius_fit() {
        let series = linearizer_coeffs(&RotationNumber::golden(), 32, SIGMA);
        assert!(matches!(
            conformal_radius(&series, RadiusMethod::HadamardFit, 0.5),
            Err(LinearizerError::TooFewCoefficients { .. })
        ));
    }

    #[test]
    fn evaluation_basics() {
        let series = linearizer_coeffs(&RotationNumber::golden(), 1024, SIGMA);
        let zero = evaluate_linearizer(&series, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(zero, Complex64::new(0.0, 0.0));

        let h = 1e-8;
        let lh = evaluate_linearizer(&series, Complex64::new(h, 0.0)).unwrap();
        assert!((lh / h - Complex64::new(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn pointwise_functional_equation_at_golden() {
        let series = linearizer_coeffs(&RotationNumber::golden(), 1024, SIGMA);
        let lambda = series.lambda();
        let z = Complex64::new(0.1, 0.0);
        let lz = evaluate_linearizer(&series, z).unwrap();
        let left = lambda * lz + lz * lz;
        let right = evaluate_linearizer(&series, lambda * z).unwrap();
        assert!((left - right).norm() < 1e-9);
    }

    #[test]
    fn deep_series_rescales_to_full_length() {
        let series = linearizer_coeffs(&RotationNumber::golden(), 16384, SIGMA);
        assert_eq!(series.order(), 16384);
        assert!(series.coeffs().iter().all(|d| {
            let m = d.norm();
            (1e-300..=1e300).contains(&m)
        }));
    }
}
