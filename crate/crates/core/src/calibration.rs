//! Nonparametric estimation of the drift and variance functions of
//! `Y_i = f(Y_{i-1}) + g(Y_{i-1}) eps_i`, and global polynomial surrogates.
//!
//! At each evaluation point `x` two kernel-weighted quadratic regressions are
//! solved on the local predictor `u = (Y_{i-1} - x) / h` with basis
//! `[1, u, u^2 / 2]`: one for `Y_i` (intercept `beta1`) and one for `Y_i^2`
//! (intercept `alpha1`). Then `f_hat(x) = beta1` and
//! `g2_hat(x) = alpha1 - beta1^2`. The kernel is the standard normal density
//! and the bandwidth is `h = (max Y - min Y) / gamma`.

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::linalg::solve_least_squares;
use crate::market::{PriceSeries, YieldSeries};
use crate::poly::PolyCoeffs;
use crate::scalar::Scalar;

/// Lower clamp applied to `g2_hat`.
pub const G2_FLOOR: f64 = 1e-10;

/// A local fit needs total kernel weight of at least this fraction of the
/// sample size.
pub const MIN_WEIGHT_FRACTION: f64 = 1e-6;

/// Default number of evaluation points.
pub const DEFAULT_GRID_POINTS: usize = 101;

/// Fraction of the yield range trimmed from each end of the default grid.
pub const DEFAULT_GRID_TRIM: f64 = 0.01;

/// Default surrogate degrees `(drift, vol)` for equity data.
pub const EQUITY_DEGREES: (usize, usize) = (4, 4);

/// Default surrogate degrees `(drift, vol)` for FX data.
pub const FX_DEGREES: (usize, usize) = (1, 5);

/// `Y_i = log P_i - log P_{i-1}`.
pub fn log_returns<T: Scalar>(prices: &PriceSeries<T>) -> Result<YieldSeries<T>> {
    let p = prices.values();
    if p.len() < 2 {
        return Err(domain(format!("need at least 2 prices, got {}", p.len())));
    }
    if let Some(bad) = p.iter().find(|v| !(v.is_finite() && **v > T::zero())) {
        return Err(domain(format!("prices must be positive, got {bad}")));
    }
    Ok(YieldSeries {
        values: p.windows(2).map(|w| w[1].ln() - w[0].ln()).collect(),
    })
}

fn range<T: Scalar>(yields: &YieldSeries<T>) -> (T, T) {
    yields
        .values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        })
}

/// `h = (max Y - min Y) / gamma`.
pub fn bandwidth<T: Scalar>(yields: &YieldSeries<T>, gamma: T) -> Result<T> {
    if !(gamma.is_finite() && gamma > T::zero()) {
        return Err(domain(format!("gamma must be positive, got {gamma}")));
    }
    if yields.values.iter().any(|y| !y.is_finite()) {
        return Err(domain("yields must be finite"));
    }
    let (lo, hi) = range(yields);
    if !(hi > lo) {
        return Err(Error::Degenerate("yield series has zero range".into()));
    }
    Ok((hi - lo) / gamma)
}

/// Intercepts of the two local quadratic regressions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFit<T> {
    /// Local estimate of `E[Y_i^2 | Y_{i-1} = x]`.
    pub alpha1: T,
    /// Local estimate of `E[Y_i | Y_{i-1} = x]`.
    pub beta1: T,
    /// Total kernel weight behind the fit.
    pub weight: T,
}

impl<T: Scalar> LocalFit<T> {
    /// `alpha1 - beta1^2`, unclamped.
    pub fn variance(&self) -> T {
        self.alpha1 - self.beta1 * self.beta1
    }
}

#[inline]
fn gaussian_kernel<T: Scalar>(u: T) -> T {
    (-(u * u) * T::lit(0.5)).exp() * T::lit(1.0 / (2.0 * std::f64::consts::PI).sqrt())
}

/// Local quadratic fit at `x` over all pairs `(Y_{i-1}, Y_i)`.
pub fn local_fit<T: Scalar>(yields: &YieldSeries<T>, x: T, h: T) -> Result<LocalFit<T>> {
    let y = &yields.values;
    let n = y.len().saturating_sub(1);
    local_fit_pairs(&y[..n], &y[y.len() - n..], x, h)
}

/// Local quadratic fit of `responses` on `predictors` at `x`.
pub fn local_fit_pairs<T: Scalar>(
    predictors: &[T],
    responses: &[T],
    x: T,
    h: T,
) -> Result<LocalFit<T>> {
    if !(h.is_finite() && h > T::zero()) {
        return Err(domain(format!("bandwidth must be positive, got {h}")));
    }
    if !x.is_finite() {
        return Err(domain(format!("evaluation point must be finite, got {x}")));
    }
    if predictors.len() != responses.len() {
        return Err(domain("predictor and response counts differ"));
    }
    let pairs = predictors.len();

    let half = T::lit(0.5);
    let mut c0 = Vec::with_capacity(pairs);
    let mut c1 = Vec::with_capacity(pairs);
    let mut c2 = Vec::with_capacity(pairs);
    let mut r_mean = Vec::with_capacity(pairs);
    let mut r_square = Vec::with_capacity(pairs);
    let mut weight = T::zero();
    for (&p, &r) in predictors.iter().zip(responses) {
        let u = (p - x) / h;
        let k = gaussian_kernel(u);
        if k > T::zero() {
            let s = k.sqrt();
            weight = weight + k;
            c0.push(s);
            c1.push(s * u);
            c2.push(s * u * u * half);
            r_mean.push(s * r);
            r_square.push(s * r * r);
        }
    }
    if c0.len() < 3 {
        return Err(Error::Singular(format!(
            "only {} pairs carry kernel weight at x = {x}",
            c0.len()
        )));
    }
    let min_weight = T::lit(MIN_WEIGHT_FRACTION * (pairs + 1) as f64);
    if weight < min_weight {
        return Err(Error::Degenerate(format!(
            "kernel weight {weight} at x = {x} below {min_weight}"
        )));
    }
    let sol = solve_least_squares(vec![c0, c1, c2], vec![r_mean, r_square])?;
    Ok(LocalFit {
        beta1: sol[0][0],
        alpha1: sol[1][0],
        weight,
    })
}

/// Drift and variance curves on an evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionEstimate<T> {
    pub grid: Vec<T>,
    /// `beta1` per point; NaN where the point is invalid.
    pub f_hat: Vec<T>,
    /// `max(alpha1 - beta1^2, G2_FLOOR)`; NaN where the point is invalid.
    pub g2_hat: Vec<T>,
    pub h: T,
    pub gamma: T,
    /// Number of yields the estimate was computed from.
    pub sample_size: usize,
    /// Points whose variance estimate hit the floor.
    pub clamped: Vec<bool>,
    /// Points where the local fit succeeded.
    pub valid: Vec<bool>,
}

impl<T: Scalar> RegressionEstimate<T> {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `(y, f_hat, g2_hat)` of the valid points.
    pub fn valid_points(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        (0..self.len())
            .filter(|&i| self.valid[i])
            .map(|i| (self.grid[i], self.f_hat[i], self.g2_hat[i]))
    }
}

/// Equispaced grid over the yield range, trimmed by 1% at each end.
pub fn default_grid<T: Scalar>(yields: &YieldSeries<T>) -> Result<Vec<T>> {
    trimmed_grid(yields, DEFAULT_GRID_POINTS)
}

/// `points` equispaced values over the trimmed yield range.
pub fn trimmed_grid<T: Scalar>(yields: &YieldSeries<T>, points: usize) -> Result<Vec<T>> {
    let (lo, hi) = range(yields);
    if !(hi > lo) {
        return Err(Error::Degenerate("yield series has zero range".into()));
    }
    let trim = (hi - lo) * T::lit(DEFAULT_GRID_TRIM);
    Ok(linspace(lo + trim, hi - trim, points))
}

/// `n` equispaced values from `a` to `b`, both ends exact.
pub fn linspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let step = (b - a) / T::lit((n - 1) as f64);
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + step * T::lit(i as f64) })
                .collect()
        }
    }
}

/// Runs [`local_fit`] at each grid point. Points where the fit fails are
/// marked invalid instead of aborting.
pub fn estimate_curves<T: Scalar>(
    yields: &YieldSeries<T>,
    grid: &[T],
    gamma: T,
) -> Result<RegressionEstimate<T>> {
    if grid.is_empty() {
        return Err(domain("evaluation grid is empty"));
    }
    let h = bandwidth(yields, gamma)?;
    let (lo, hi) = range(yields);
    if let Some(x) = grid.iter().find(|&&x| !(x >= lo && x <= hi)) {
        return Err(domain(format!("grid point {x} outside yield range [{lo}, {hi}]")));
    }

    let floor = T::lit(G2_FLOOR);
    let fits: Vec<Option<LocalFit<T>>> = grid
        .par_iter()
        .map(|&x| local_fit(yields, x, h).ok())
        .collect();

    let mut est = RegressionEstimate {
        grid: grid.to_vec(),
        f_hat: Vec::with_capacity(grid.len()),
        g2_hat: Vec::with_capacity(grid.len()),
        h,
        gamma,
        sample_size: yields.len(),
        clamped: Vec::with_capacity(grid.len()),
        valid: Vec::with_capacity(grid.len()),
    };
    for fit in fits {
        match fit {
            Some(fit) => {
                let v = fit.variance();
                let clamped = !(v >= floor);
                est.f_hat.push(fit.beta1);
                est.g2_hat.push(if clamped { floor } else { v });
                est.clamped.push(clamped);
                est.valid.push(true);
            }
            None => {
                est.f_hat.push(T::nan());
                est.g2_hat.push(T::nan());
                est.clamped.push(false);
                est.valid.push(false);
            }
        }
    }
    Ok(est)
}

/// Ordinary least-squares polynomial of the given degree.
///
/// Solved by Householder QR on the column-equilibrated Vandermonde matrix.
pub fn fit_poly<T: Scalar>(xs: &[T], ys: &[T], degree: usize) -> Result<PolyCoeffs<T>> {
    if xs.len() != ys.len() {
        return Err(domain("xs and ys differ in length"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(domain("fit inputs must be finite"));
    }
    let mut distinct: Vec<T> = xs.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < degree + 1 {
        return Err(Error::Rank {
            needed: degree + 1,
            got: distinct.len(),
        });
    }

    let mut columns = Vec::with_capacity(degree + 1);
    let mut scales = Vec::with_capacity(degree + 1);
    let mut col: Vec<T> = vec![T::one(); xs.len()];
    for _ in 0..=degree {
        let s = col.iter().map(|&v| v * v).sum::<T>().sqrt();
        let s = if s > T::zero() { s } else { T::one() };
        scales.push(s);
        columns.push(col.iter().map(|&v| v / s).collect::<Vec<_>>());
        col = col.iter().zip(xs).map(|(&c, &x)| c * x).collect();
    }
    let sol = solve_least_squares(columns, vec![ys.to_vec()])?;
    PolyCoeffs::new(sol[0].iter().zip(&scales).map(|(&c, &s)| c / s).collect())
}

/// Fits drift and volatility polynomials to the valid points of an
/// estimate; the volatility is fitted to `sqrt(g2_hat)`.
pub fn fit_surrogates<T: Scalar>(
    estimate: &RegressionEstimate<T>,
    drift_degree: usize,
    vol_degree: usize,
) -> Result<(PolyCoeffs<T>, PolyCoeffs<T>)> {
    let (xs, (fs, gs)): (Vec<T>, (Vec<T>, Vec<T>)) = estimate
        .valid_points()
        .map(|(x, f, g2)| (x, (f, g2.sqrt())))
        .unzip();
    Ok((fit_poly(&xs, &fs, drift_degree)?, fit_poly(&xs, &gs, vol_degree)?))
}

/// Published equity surrogates `(f~, g~)`, both quartic.
pub fn paper_surrogates_equity<T: Scalar>() -> (PolyCoeffs<T>, PolyCoeffs<T>) {
    (
        PolyCoeffs::from_f64(&[-8.948e-5, -7.557e-2, 0.8305, -13.60, 52.84]).unwrap(),
        PolyCoeffs::from_f64(&[1.288e-2, -0.1138, 5.503, 6.492, -3.306e2]).unwrap(),
    )
}

/// Published FX surrogates: linear drift `0.33 y` and quintic volatility.
pub fn paper_surrogates_fx<T: Scalar>() -> (PolyCoeffs<T>, PolyCoeffs<T>) {
    (
        PolyCoeffs::from_f64(&[0.0, 0.33]).unwrap(),
        PolyCoeffs::from_f64(&[4.328e-3, 6.422e-2, 15.73, -2.934e2, -6.987e3, 1.542e5]).unwrap(),
    )
}
