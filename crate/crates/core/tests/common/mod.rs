#![allow(dead_code)]

use prospect_arch::calibration::RegressionEstimate;
use prospect_arch::demand::equity_preset;
use prospect_arch::market::{derive_arch, simulate_yields, MarketParams};
use prospect_arch::{Model, Yields};

pub fn equity_model() -> Model {
    derive_arch(&equity_preset(), &MarketParams::equity())
}

/// `n` yields from the derived equity model started at 0.
pub fn equity_yields(n: usize, seed: u64) -> Yields {
    simulate_yields(&equity_model(), 0.0, n, seed).unwrap().series
}

pub fn yield_range(y: &Yields) -> (f64, f64) {
    y.values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Mean absolute drift error over the valid grid points in the central half
/// of the yield range, and the range of the true drift over those points.
pub fn central_drift_error(est: &RegressionEstimate<f64>, model: &Model, y: &Yields) -> (f64, f64) {
    let (lo, hi) = yield_range(y);
    let (a, b) = (lo + 0.25 * (hi - lo), hi - 0.25 * (hi - lo));
    let pts: Vec<(f64, f64)> = est
        .valid_points()
        .filter(|&(x, _, _)| x >= a && x <= b)
        .map(|(x, f, _)| (f, model.drift(x)))
        .collect();
    assert!(pts.len() >= 10, "too few central grid points");
    let mae = pts.iter().map(|(f, t)| (f - t).abs()).sum::<f64>() / pts.len() as f64;
    let tmin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let tmax = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    (mae, tmax - tmin)
}

/// 90th percentile of `|Y|`.
pub fn abs_quantile_90(y: &Yields) -> f64 {
    let mut a: Vec<f64> = y.values.iter().map(|v| v.abs()).collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    a[(0.9 * (a.len() - 1) as f64).round() as usize]
}
