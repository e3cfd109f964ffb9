//! Shared line-fit helpers for growth/decay rate estimation.

/// Plain least squares; returns (slope, intercept).
pub(crate) fn ls_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// Least squares refit after dropping the largest-residual fraction of the
/// points (spikes from near-resonant orders would otherwise drag the line).
pub(crate) fn robust_slope(points: &[(f64, f64)], keep_fraction: f64) -> f64 {
    let (slope, intercept) = ls_line(points);
    let residuals: Vec<f64> =
        points.iter().map(|&(x, y)| (y - slope * x - intercept).abs()).collect();
    let mut sorted = residuals.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cutoff_idx = ((points.len() as f64 * keep_fraction) as usize)
        .saturating_sub(1)
        .min(points.len() - 1);
    let cutoff = sorted[cutoff_idx];
    let kept: Vec<(f64, f64)> = points
        .iter()
        .zip(residuals.iter())
        .filter(|(_, r)| **r <= cutoff)
        .map(|(&p, _)| p)
        .collect();
    ls_line(&kept).0
}
