//! Binomial proportion intervals and least-squares slope fitting.

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `n` trials at quantile `z`.
///
/// The bounds are clamped so that `0 <= low <= p_hat <= high <= 1` holds
/// exactly despite rounding.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n > 0, "wilson interval needs at least one trial");
    let n_f = n as f64;
    let p_hat = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p_hat + z2 / (2.0 * n_f)) / denom;
    let half = z * (p_hat * (1.0 - p_hat) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let low = (center - half).clamp(0.0, p_hat);
    let high = (center + half).clamp(p_hat, 1.0);
    (low, high)
}

/// Standard error of a proportion estimate from `n` trials when the true
/// probability is `p`. This is the null-hypothesis scale of the Wilson
/// score statistic.
pub fn score_standard_error(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Ordinary least-squares slope of `y` on `x`. Returns `None` for fewer than
/// two points or when all `x` coincide.
pub fn ls_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
