//! Semicontinuity machinery over the radius function `α ↦ r_α`.
//!
//! The radius function is upper semicontinuous and vanishes on a dense set,
//! so hitting a prescribed value is a matter of structure, not smoothness:
//! near any parameter there are rationals whose resonance dips the radius all
//! the way to zero, and the dip flanks sweep continuously through every
//! intermediate value. The staged search exploits exactly that. Each stage
//! shrinks its neighborhood by more than a factor of ten, certifies an upper
//! semicontinuity margin on a sampled neighborhood, and then steers the
//! sampled radius to the midpoint between the current value and the target
//! with an infimum-style intermediate value search.
//!
//! Everything here works on the computable surrogate: truncated series,
//! their growth-rate radius estimates, and the compact-uniform distance
//! between truncated linearizers on a closed disk.

use dashmap::DashMap;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arithmetic::RotationNumber;
use crate::linearizer::{
    conformal_radius, evaluate_linearizer, linearizer_coeffs, LinearizerSeries, RadiusEstimate,
    RadiusMethod,
};

/// Oracle cache resolution: α is quantized to multiples of 2⁻⁴⁸.
pub const ALPHA_QUANTUM_BITS: u32 = 48;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("distance radius {r} exceeds 0.95 x min series radius {limit}")]
    DistanceRadiusTooLarge { r: f64, limit: f64 },
    #[error("distance grid must have at least 8 points, got {0}")]
    DistanceGridTooSmall(usize),
    #[error("series evaluation failed during distance computation")]
    DistanceEvaluation(#[from] crate::linearizer::LinearizerError),
    #[error(
        "oracle values at the bracket ends do not straddle the target: h(a)={h_a}, h(b)={h_b}, x={x}"
    )]
    NoStraddle { h_a: f64, h_b: f64, x: f64 },
    #[error("ivt budget exhausted: bracket [{lo}, {hi}], best |h-x| = {best_gap}")]
    IvtBudget { lo: f64, hi: f64, best_gap: f64 },
    #[error("target radius {r_target} is not strictly between 0 and the initial radius {r0}")]
    TargetNotBracketed { r0: f64, r_target: f64 },
    #[error("delta and tol must be positive")]
    BadTolerances,
    #[error(
        "stage {stage}: usc margin could not be certified within budget (worst sample {worst}, bound {bound})"
    )]
    MarginUncertified { stage: usize, worst: f64, bound: f64, trace: SearchTrace },
    #[error("stage {stage}: no radius crossing found for midpoint {midpoint} within the stage window")]
    NoCrossing { stage: usize, midpoint: f64, trace: SearchTrace },
    #[error("stage {stage}: ivt search failed: {message}")]
    StageIvt { stage: usize, message: String, trace: SearchTrace },
    #[error("stage budget of {max_stages} exhausted before reaching the target")]
    StageBudget { max_stages: usize, trace: SearchTrace },
}

/// Configuration of the radius oracle: how series are built and read.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Series truncation order for oracle queries.
    pub order: usize,
    /// Initial rescale σ handed to the series builder.
    pub sigma: f64,
    pub method: RadiusMethod,
    pub window_fraction: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            order: 2048,
            sigma: 0.25,
            method: RadiusMethod::HadamardFit,
            window_fraction: 0.5,
        }
    }
}

/// Memoized, deterministic map `α ↦ r̂_α`.
///
/// Queries quantize α to the cache grid first, so identical queries are
/// identical keys; distinct α may be evaluated concurrently.
pub struct RadiusOracle {
    config: OracleConfig,
    cache: DashMap<(u64, usize), RadiusEstimate>,
}

impl RadiusOracle {
    pub fn new(config: OracleConfig) -> Self {
        Self { config, cache: DashMap::new() }
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    /// Cache key and the snapped parameter value for `alpha`.
    pub fn quantize(alpha: f64) -> (u64, f64) {
        let scale = (1u64 << ALPHA_QUANTUM_BITS) as f64;
        let key = (alpha * scale).round() as u64;
        (key, key as f64 / scale)
    }

    pub fn estimate(&self, alpha: f64) -> RadiusEstimate {
        self.estimate_at(alpha, self.config.order)
    }

    pub fn radius(&self, alpha: f64) -> f64 {
        self.estimate(alpha).value
    }

    pub fn radius_at(&self, alpha: f64, order: usize) -> f64 {
        self.estimate_at(alpha, order).value
    }

    pub fn estimate_at(&self, alpha: f64, order: usize) -> RadiusEstimate {
        let (key, snapped) = Self::quantize(alpha);
        if let Some(hit) = self.cache.get(&(key, order)) {
            return *hit;
        }
        let est = self.compute(snapped, order);
        *self.cache.entry((key, order)).or_insert(est)
    }

    /// Build the series behind an oracle query (uncached; callers that need
    /// the coefficients keep the series themselves).
    pub fn series_at(&self, alpha: f64, order: usize) -> LinearizerSeries {
        let (_, snapped) = Self::quantize(alpha);
        let rot = RotationNumber::from_f64(snapped).expect("snapped alpha in (0,1)");
        linearizer_coeffs(&rot, order, self.config.sigma)
    }

    fn compute(&self, snapped: f64, order: usize) -> RadiusEstimate {
        let rot = RotationNumber::from_f64(snapped).expect("snapped alpha in (0,1)");
        let series = linearizer_coeffs(&rot, order, self.config.sigma);
        conformal_radius(&series, self.config.method, self.config.window_fraction)
            .expect("oracle order is large enough for a fit")
    }

    pub fn cached_queries(&self) -> usize {
        self.cache.len()
    }
}

/// Sup distance between two truncated linearizers over sampled circles in
/// the closed disk of radius `r`.
///
/// Samples `grid_size` equispaced points on each circle `|z| = r k/8`,
/// `k = 1..8` — a computable surrogate for the compact-uniform metric.
pub fn linearizer_distance(
    s1: &LinearizerSeries,
    s2: &LinearizerSeries,
    r: f64,
    grid_size: usize,
) -> Result<f64, SearchError> {
    if grid_size < 8 {
        return Err(SearchError::DistanceGridTooSmall(grid_size));
    }
    let r1 = conformal_radius(s1, RadiusMethod::HadamardFit, 0.5)?;
    let r2 = conformal_radius(s2, RadiusMethod::HadamardFit, 0.5)?;
    let limit = 0.95 * r1.value.min(r2.value);
    if r >= limit {
        return Err(SearchError::DistanceRadiusTooLarge { r, limit });
    }
    let mut worst = 0.0_f64;
    for k in 1..=8 {
        let rho = r * k as f64 / 8.0;
        for i in 0..grid_size {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / grid_size as f64;
            let z = Complex64::from_polar(rho, angle);
            let a = evaluate_linearizer(s1, z)?;
            let b = evaluate_linearizer(s2, z)?;
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

/// Intermediate value search that honors the infimum construction for
/// semicontinuous oracles.
///
/// Requires `h(a)` and `h(b)` to straddle `x`. Maintains the point nearest
/// the low end known to satisfy `h ≥ x` and refines toward the boundary of
/// `{h ≥ x}` by bisection on the indicator, sampling a coarse ladder first.
/// Returns as soon as any evaluated point lands within `tol` of `x`; if the
/// attainment set has a jump there (the oracle is only semicontinuous), the
/// bracket collapses without attaining `x` and the error reports it.
pub fn ivt_search<F: FnMut(f64) -> f64>(
    mut oracle: F,
    a: f64,
    b: f64,
    x: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64, SearchError> {
    assert!(a < b, "bracket must be ordered");
    let h_a = oracle(a);
    if (h_a - x).abs() <= tol {
        return Ok(a);
    }
    let h_b = oracle(b);
    if (h_b - x).abs() <= tol {
        return Ok(b);
    }
    if (h_a < x) == (h_b < x) {
        return Err(SearchError::NoStraddle { h_a, h_b, x });
    }
    // Mirror so the oriented function sits below x at the left end.
    let flipped = h_a > x;
    let original = |y: f64| if flipped { a + b - y } else { y };
    let eval = |y: f64, oracle: &mut F| oracle(original(y));
    let mut budget = max_iter.saturating_sub(2);
    let (mut lo, mut hi) = (a, b);
    let mut best_gap = f64::INFINITY;
    // Coarse ladder: pull the high end to the leftmost sample with h >= x.
    let ladder = 12.min(budget / 2);
    for k in 1..=ladder {
        let y = lo + (hi - lo) * k as f64 / (ladder + 1) as f64;
        let v = eval(y, &mut oracle);
        budget -= 1;
        let gap = (v - x).abs();
        if gap <= tol {
            return Ok(original(y));
        }
        if v >= x {
            best_gap = best_gap.min(gap);
            hi = y;
            break;
        }
        lo = y;
    }
    while budget > 0 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket collapsed to adjacent floats
        }
        let v = eval(mid, &mut oracle);
        budget -= 1;
        let gap = (v - x).abs();
        if gap <= tol {
            return Ok(original(mid));
        }
        if v >= x {
            best_gap = best_gap.min(gap);
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (lo_out, hi_out) = (original(lo), original(hi));
    Err(SearchError::IvtBudget {
        lo: lo_out.min(hi_out),
        hi: lo_out.max(hi_out),
        best_gap,
    })
}

/// One stage of a staged radius search.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub index: usize,
    /// Parameter chosen at this stage (stage 0 is the starting α₀).
    pub beta: f64,
    /// Stage neighborhood size ε_i (ε₀ = δ).
    pub epsilon: f64,
    /// Radius requested from this stage's crossing search; for stage 0 this
    /// is the measured starting radius.
    pub requested_radius: f64,
    pub radius: RadiusEstimate,
    /// Compact-uniform distance to the previous stage's linearizer.
    pub distance: f64,
    /// Oracle truncation order used at this stage.
    pub order: usize,
}

/// Full ledger of a staged search: the (β_i, ε_i, r_i, dist_i) records plus
/// the data needed to re-check the structural invariants offline.
#[derive(Debug, Clone)]
pub struct SearchTrace {
    pub stages: Vec<StageRecord>,
    pub r_target: f64,
    pub tol: f64,
    pub final_alpha: f64,
    pub converged: bool,
}

impl SearchTrace {
    /// Re-check the structural invariants from the recorded data alone:
    /// ε decay, β step bound, and the midpoint rule on requested radii.
    pub fn check_invariants(&self) -> Result<(), String> {
        for pair in self.stages.windows(2) {
            let (prev, next) = (&pair[0], &pair[1]);
            if !(next.epsilon < prev.epsilon / 10.0) {
                return Err(format!(
                    "stage {}: epsilon {} not below a tenth of {}",
                    next.index, next.epsilon, prev.epsilon
                ));
            }
            if !((next.beta - prev.beta).abs() < next.epsilon / 10.0) {
                return Err(format!(
                    "stage {}: step {} not below epsilon/10 = {}",
                    next.index,
                    (next.beta - prev.beta).abs(),
                    next.epsilon / 10.0
                ));
            }
            let midpoint = 0.5 * (self.r_target + prev.radius.value);
            if next.requested_radius != midpoint {
                return Err(format!(
                    "stage {}: requested radius {} is not the midpoint {}",
                    next.index, next.requested_radius, midpoint
                ));
            }
        }
        Ok(())
    }
}

/// Knobs of the staged search. Every sampling grid is derived from `seed`,
/// so identical inputs produce identical traces.
#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub max_stages: usize,
    /// Oracle evaluations allowed per crossing search.
    pub ivt_max_iter: usize,
    /// Neighborhood samples per usc-margin certification attempt.
    pub margin_samples: usize,
    /// Halvings of ε allowed while certifying the margin.
    pub margin_retries: usize,
    /// Additive margin slack, as a fraction of the target radius.
    pub margin_slack_factor: f64,
    /// Per-stage radius tolerance, as a fraction of the overall `tol`.
    pub stage_tol_factor: f64,
    /// Distance checks run on the disk of `dist_radius_factor * r_target`.
    pub dist_radius_factor: f64,
    /// Points per circle in distance checks.
    pub dist_grid: usize,
    /// Oracle order multiplier per stage: deeper stages resolve dips of
    /// larger denominators, which need proportionally longer series.
    pub order_growth: f64,
    pub max_order: usize,
    /// Window shrinks allowed when a crossing fails the distance bound.
    pub window_retries: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_stages: 30,
            ivt_max_iter: 96,
            margin_samples: 24,
            margin_retries: 8,
            margin_slack_factor: 0.05,
            stage_tol_factor: 0.25,
            dist_radius_factor: 0.5,
            dist_grid: 16,
            order_growth: 2.0,
            max_order: 65536,
            window_retries: 6,
            seed: 0x51e6e1,
        }
    }
}

/// Reduced rationals inside the open interval `(lo, hi)`, by ascending
/// denominator.
///
/// These are the resonance sites whose radius dips the crossing search
/// rides; only denominators small enough to resonate within a buildable
/// series are useful, hence the cap.
pub fn rationals_in_window(lo: f64, hi: f64, q_cap: u64, max_count: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if !(hi > lo) {
        return out;
    }
    for q in 1..=q_cap {
        let qf = q as f64;
        let mut p = (lo * qf).ceil().max(0.0) as u64;
        if (p as f64) / qf <= lo {
            p += 1;
        }
        while (p as f64) / qf < hi {
            if num_integer::gcd(p, q) == 1 {
                out.push((p, q));
                if out.len() >= max_count {
                    return out;
                }
            }
            p += 1;
        }
    }
    out
}

/// Staged search for a parameter near `alpha0` whose radius estimate equals
/// `r_target`.
///
/// Stage `i+1` picks `ε_{i+1} < ε_i/10` whose sampled neighborhood certifies
/// the usc margin `r̂ < r_i + 2^{−i} + slack`, then searches the window
/// `(β_i ± ε_{i+1}/10)` for a crossing of the midpoint `(r_target + r_i)/2`,
/// and accepts it only if the new linearizer stays within `ε_{i+1}/10` of
/// the previous one in the compact-uniform distance. Terminates once the
/// stage radius is within `tol` of the target; the full trace is returned
/// either way (inside the error, on failure).
pub fn target_radius_search(
    alpha0: f64,
    r_target: f64,
    delta: f64,
    tol: f64,
    oracle: &RadiusOracle,
    cfg: &SearchConfig,
) -> Result<SearchTrace, SearchError> {
    if !(delta > 0.0) || !(tol > 0.0) {
        return Err(SearchError::BadTolerances);
    }
    let base_order = oracle.config().order;
    let est0 = oracle.estimate_at(alpha0, base_order);
    if !(r_target > 0.0 && r_target < est0.value) {
        return Err(SearchError::TargetNotBracketed { r0: est0.value, r_target });
    }
    let mut trace = SearchTrace {
        stages: vec![StageRecord {
            index: 0,
            beta: alpha0,
            epsilon: delta,
            requested_radius: est0.value,
            radius: est0,
            distance: 0.0,
            order: base_order,
        }],
        r_target,
        tol,
        final_alpha: alpha0,
        converged: (est0.value - r_target).abs() <= tol,
    };
    if trace.converged {
        return Ok(trace);
    }
    let stage_tol = tol * cfg.stage_tol_factor;
    let dist_r = cfg.dist_radius_factor * r_target;
    let mut prev_series = oracle.series_at(alpha0, base_order);

    while trace.stages.len() <= cfg.max_stages {
        let stage_index = trace.stages.len();
        let prev = trace.stages.last().expect("stage 0 exists").clone();
        let order = ((base_order as f64 * cfg.order_growth.powi(stage_index as i32 - 1)).round()
            as usize)
            .min(cfg.max_order);
        let usc_bound = prev.radius.value
            + (0.5f64).powi(prev.index as i32)
            + cfg.margin_slack_factor * r_target;

        // Certify the usc margin on a sampled neighborhood, shrinking ε
        // until it holds.
        let mut epsilon = prev.epsilon / 20.0;
        let mut certified = false;
        let mut worst_seen = f64::NEG_INFINITY;
        for attempt in 0..cfg.margin_retries {
            let mut rng = stage_rng(cfg.seed, stage_index, attempt);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..cfg.margin_samples {
                let beta = prev.beta + epsilon * (2.0 * rng.gen::<f64>() - 1.0);
                if beta > 0.0 && beta < 1.0 {
                    worst = worst.max(oracle.radius_at(beta, order));
                }
            }
            worst_seen = worst;
            if worst < usc_bound {
                certified = true;
                break;
            }
            epsilon /= 2.0;
        }
        if !certified {
            return Err(SearchError::MarginUncertified {
                stage: stage_index,
                worst: worst_seen,
                bound: usc_bound,
                trace,
            });
        }

        let midpoint = 0.5 * (r_target + prev.radius.value);
        let mut found: Option<(f64, RadiusEstimate, LinearizerSeries, f64)> = None;
        let mut window = epsilon / 10.0;
        'window: for _ in 0..=cfg.window_retries {
            match find_crossing(oracle, &prev, midpoint, window, order, stage_tol, cfg) {
                Ok(beta_next) => {
                    let series = oracle.series_at(beta_next, order);
                    let dist = linearizer_distance(&prev_series, &series, dist_r, cfg.dist_grid)?;
                    if dist < epsilon / 10.0 {
                        let est = oracle.estimate_at(beta_next, order);
                        found = Some((beta_next, est, series, dist));
                        break 'window;
                    }
                    // Too far in function space: retry closer to β_i.
                    window /= 10.0;
                }
                Err(CrossingFailure::NoBracket) => {
                    window /= 10.0;
                }
                Err(CrossingFailure::Ivt(err)) => {
                    return Err(SearchError::StageIvt {
                        stage: stage_index,
                        message: err.to_string(),
                        trace,
                    });
                }
            }
        }
        let Some((beta_next, est, series, dist)) = found else {
            return Err(SearchError::NoCrossing { stage: stage_index, midpoint, trace });
        };
        prev_series = series;
        trace.stages.push(StageRecord {
            index: stage_index,
            beta: beta_next,
            epsilon,
            requested_radius: midpoint,
            radius: est,
            distance: dist,
            order,
        });
        trace.final_alpha = beta_next;
        if (est.value - r_target).abs() <= tol {
            trace.converged = true;
            return Ok(trace);
        }
    }
    Err(SearchError::StageBudget { max_stages: cfg.max_stages, trace })
}

enum CrossingFailure {
    NoBracket,
    Ivt(SearchError),
}

/// Locate β in `(center − window, center + window)` with oracle ≈ midpoint.
///
/// Low anchors come from probing the flanks of the smallest-denominator
/// rationals in the window (their resonance dips reach below any midpoint);
/// the high anchor is the current stage point. The crossing between them is
/// then pinned by [`ivt_search`].
fn find_crossing(
    oracle: &RadiusOracle,
    prev: &StageRecord,
    midpoint: f64,
    window: f64,
    order: usize,
    stage_tol: f64,
    cfg: &SearchConfig,
) -> Result<f64, CrossingFailure> {
    let lo = (prev.beta - window).max(f64::MIN_POSITIVE);
    let hi = (prev.beta + window).min(1.0 - 1e-12);
    let h_center = oracle.radius_at(prev.beta, order);
    if (h_center - midpoint).abs() <= stage_tol {
        return Ok(prev.beta);
    }
    let q_cap = (order as u64).saturating_sub(1);
    let quantum = 2.0_f64.powi(-(ALPHA_QUANTUM_BITS as i32));
    for (p, q) in rationals_in_window(lo, hi, q_cap, 6) {
        let site = p as f64 / q as f64;
        let side = if prev.beta >= site { 1.0 } else { -1.0 };
        // The deepest representable point on the dip flank, approached from
        // the side the stage point sits on.
        let mut deepest = site + side * 4.0 * quantum;
        if deepest <= lo || deepest >= hi {
            deepest = site;
        }
        let deep_val = oracle.radius_at(deepest, order);
        if (deep_val - midpoint).abs() <= stage_tol {
            return Ok(deepest);
        }
        if deep_val >= midpoint {
            // Dip too shallow at representable distances; try the next site.
            continue;
        }
        let (a, b) = if deepest < prev.beta { (deepest, prev.beta) } else { (prev.beta, deepest) };
        if !(a < b) {
            continue;
        }
        match ivt_search(|y| oracle.radius_at(y, order), a, b, midpoint, stage_tol, cfg.ivt_max_iter)
        {
            Ok(c) => return Ok(c),
            Err(SearchError::NoStraddle { .. }) => continue,
            Err(SearchError::IvtBudget { .. }) => continue,
            Err(other) => return Err(CrossingFailure::Ivt(other)),
        }
    }
    Err(CrossingFailure::NoBracket)
}

fn stage_rng(seed: u64, stage: usize, attempt: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed ^ (stage as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
            ^ (attempt as u64).wrapping_mul(0xd1b5_4a32_d192_ed03),
    )
}

/// One scale of a semicontinuity probe.
#[derive(Debug, Clone, Copy)]
pub struct ProbeRow {
    pub scale: f64,
    /// Max sampled radius over `(α − ε, α)`.
    pub left_max: f64,
    /// Max sampled radius over `(α, α + ε)`.
    pub right_max: f64,
    /// `max(left, right) − r̂(α)`: the empirical usc margin.
    pub usc_margin: f64,
    /// `min(left, right) − r̂(α)`: the weak-lsc surrogate (min of one-sided
    /// limsup surrogates against the center value).
    pub lsc_surrogate: f64,
}

/// Diagnostic table of one-sided radius behavior around `alpha`.
///
/// Purely observational: nothing is asserted, the table is meant for scan
/// files and plots.
pub fn semicontinuity_probe(
    alpha: f64,
    scales: &[f64],
    samples_per_scale: usize,
    oracle: &RadiusOracle,
    seed: u64,
) -> Vec<ProbeRow> {
    let center = if scales.is_empty() { 0.0 } else { oracle.radius(alpha) };
    scales
        .iter()
        .enumerate()
        .map(|(k, &scale)| {
            let mut rng = stage_rng(seed, k, 0);
            let (mut left, mut right) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for _ in 0..samples_per_scale {
                let off = scale * rng.gen::<f64>();
                let l = alpha - off;
                let r = alpha + off;
                if l > 0.0 && l < 1.0 {
                    left = left.max(oracle.radius(l));
                }
                if r > 0.0 && r < 1.0 {
                    right = right.max(oracle.radius(r));
                }
            }
            ProbeRow {
                scale,
                left_max: left,
                right_max: right,
                usc_margin: left.max(right) - center,
                lsc_surrogate: left.min(right) - center,
            }
        })
        .collect()
}

/// Equispaced scan grid over `[lo, hi]` with grid points snapped onto every
/// reduced rational of denominator at most `snap_denominator_max`.
///
/// Snapping makes the dense-zero structure of the radius function visible in
/// scan output: a grid point sitting exactly on `p/q` resonates and reports
/// radius exactly zero, while its unsnapped neighbors report the positive
/// estimates of the dip flanks.
pub fn scan_alphas(lo: f64, hi: f64, count: usize, snap_denominator_max: u64) -> Vec<f64> {
    match count {
        0 => return Vec::new(),
        1 => return vec![lo],
        _ => {}
    }
    let step = (hi - lo) / (count - 1) as f64;
    let mut alphas: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
    let mut snapped = vec![false; count];
    for (p, q) in
        rationals_in_window(lo - step / 2.0, hi + step / 2.0, snap_denominator_max, usize::MAX)
    {
        let site = p as f64 / q as f64;
        let idx = (((site - lo) / step).round() as isize).clamp(0, count as isize - 1) as usize;
        if !snapped[idx] {
            alphas[idx] = site;
            snapped[idx] = true;
        }
    }
    alphas
}

/// One row of a radius scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub alpha: f64,
    pub radius: f64,
    pub uncertainty: f64,
    pub resonant: bool,
}

/// Evaluate the oracle over a grid, in parallel.
pub fn radius_scan(oracle: &RadiusOracle, alphas: &[f64]) -> Vec<ScanRow> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let est = oracle.estimate(alpha);
            ScanRow {
                alpha,
                radius: est.value,
                uncertainty: est.uncertainty,
                resonant: est.resonant_zero,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::RotationNumber;
    use crate::GOLDEN_MEAN;

    #[test]
    fn distance_of_series_with_itself_is_zero() {
        let s = linearizer_coeffs(&RotationNumber::golden(), 512, 0.25);
        let d = linearizer_distance(&s, &s, 0.1, 16).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn distance_truncation_tail_is_negligible() {
        let a = linearizer_coeffs(&RotationNumber::golden(), 512, 0.25);
        let b = linearizer_coeffs(&RotationNumber::golden(), 4096, 0.25);
        let r = 0.5 * conformal_radius(&a, RadiusMethod::HadamardFit, 0.5).unwrap().value;
        let d = linearizer_distance(&a, &b, r, 32).unwrap();
        assert!(d < 1e-8, "distance {d}");
    }

    #[test]
    fn distance_shrinks_with_perturbation() {
        let base = linearizer_coeffs(&RotationNumber::golden(), 1024, 0.25);
        let r = 0.5 * conformal_radius(&base, RadiusMethod::HadamardFit, 0.5).unwrap().value;
        let mut last = f64::INFINITY;
        for exp in [6, 8, 10] {
            let alpha = GOLDEN_MEAN + 10f64.powi(-exp);
            let pert = linearizer_coeffs(&RotationNumber::from_f64(alpha).unwrap(), 1024, 0.25);
            let d = linearizer_distance(&base, &pert, r, 16).unwrap();
            assert!(d < last, "perturbation 1e-{exp}: {d} !< {last}");
            last = d;
        }
    }

    #[test]
    fn distance_preconditions() {
        let s = linearizer_coeffs(&RotationNumber::golden(), 512, 0.25);
        assert!(matches!(
            linearizer_distance(&s, &s, 0.1, 4),
            Err(SearchError::DistanceGridTooSmall(4))
        ));
        assert!(matches!(
            linearizer_distance(&s, &s, 0.9, 16),
            Err(SearchError::DistanceRadiusTooLarge { .. })
        ));
    }

    #[test]
    fn ivt_on_identity() {
        let c = ivt_search(|y| y, 0.0, 1.0, 0.5, 1e-12, 80).unwrap();
        assert!((c - 0.5).abs() < 1e-9);
    }

    #[test]
    fn ivt_on_decreasing_oracle() {
        let c = ivt_search(|y| 1.0 - y, 0.0, 1.0, 0.25, 1e-12, 80).unwrap();
        assert!((c - 0.75).abs() < 1e-9);
    }

    #[test]
    fn ivt_step_function_collapses_to_jump() {
        let step = |y: f64| if y < 0.3 { 0.0 } else { 1.0 };
        match ivt_search(step, 0.0, 1.0, 0.5, 1e-6, 200) {
            Err(SearchError::IvtBudget { lo, hi, .. }) => {
                assert!((lo - 0.3).abs() < 1e-9, "lo = {lo}");
                assert!((hi - 0.3).abs() < 1e-9, "hi = {hi}");
            }
            other => panic!("expected budget failure at the jump, got {other:?}"),
        }
    }

    #[test]
    fn ivt_rejects_non_straddling_bracket() {
        assert!(matches!(
            ivt_search(|y| y, 0.0, 1.0, 2.0, 1e-9, 50),
            Err(SearchError::NoStraddle { .. })
        ));
    }

    #[test]
    fn oracle_memoizes_and_quantizes() {
        let oracle = RadiusOracle::new(OracleConfig { order: 256, ..Default::default() });
        let a = oracle.radius(GOLDEN_MEAN);
        let b = oracle.radius(GOLDEN_MEAN + 1e-16); // same quantum
        assert_eq!(a, b);
        assert_eq!(oracle.cached_queries(), 1);
    }

    #[test]
    fn rationals_enumerated_by_denominator() {
        let found = rationals_in_window(0.60, 0.64, 8, 16);
        assert!(found.contains(&(5, 8)));
        assert!(!found.contains(&(3, 5)), "0.6 is an endpoint, window is open");
        assert!(found.iter().all(|&(p, q)| num_integer::gcd(p, q) == 1));
    }

    #[test]
    fn scan_grid_snaps_low_denominator_rationals() {
        let alphas = scan_alphas(0.60, 0.64, 512, 8);
        assert_eq!(alphas.len(), 512);
        assert!(alphas.iter().any(|&a| a == 0.625));
        assert!(alphas.iter().any(|&a| a == 0.6));
    }

    #[test]
    fn trivial_search_converges_in_zero_stages() {
        let oracle = RadiusOracle::new(OracleConfig { order: 512, ..Default::default() });
        let r0 = oracle.radius(GOLDEN_MEAN);
        let trace = target_radius_search(
            GOLDEN_MEAN,
            r0 * (1.0 - 1e-9),
            1e-2,
            0.05 * r0,
            &oracle,
            &SearchConfig::default(),
        )
        .unwrap();
        assert!(trace.converged);
        assert_eq!(trace.stages.len(), 1);
        assert_eq!(trace.final_alpha, GOLDEN_MEAN);
        assert!(trace.check_invariants().is_ok());
    }

    #[test]
    fn search_rejects_target_above_initial_radius() {
        let oracle = RadiusOracle::new(OracleConfig { order: 512, ..Default::default() });
        let r0 = oracle.radius(GOLDEN_MEAN);
        assert!(matches!(
            target_radius_search(
                GOLDEN_MEAN,
                r0 * 1.5,
                1e-2,
                1e-3,
                &oracle,
                &SearchConfig::default()
            ),
            Err(SearchError::TargetNotBracketed { .. })
        ));
    }

    #[test]
    fn probe_handles_empty_scales() {
        let oracle = RadiusOracle::new(OracleConfig { order: 256, ..Default::default() });
        let rows = semicontinuity_probe(GOLDEN_MEAN, &[], 4, &oracle, 7);
        assert!(rows.is_empty());
    }
}
