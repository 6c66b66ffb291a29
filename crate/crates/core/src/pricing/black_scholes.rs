//! Black-Scholes call/put prices and Vega.

use crate::error::{ensure_positive, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Standard normal CDF through `erfc`, accurate in both tails.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

fn validate(spot: f64, strike: f64, t: f64, sigma: f64, rate: f64) -> Result<()> {
    ensure_positive(spot, "spot")?;
    ensure_positive(strike, "strike")?;
    ensure_positive(t, "maturity")?;
    ensure_positive(sigma, "volatility")?;
    crate::error::ensure_finite(rate, "rate")
}

#[inline]
fn d1_d2(spot: f64, strike: f64, rate: f64, t: f64, sigma: f64) -> (f64, f64) {
    let sd = sigma * t.sqrt();
    let d1 = ((spot / strike).ln() + (rate + 0.5 * sigma * sigma) * t) / sd;
    (d1, d1 - sd)
}

/// Call price without input checks; used inside root finding.
#[inline]
pub(crate) fn call_unchecked(spot: f64, strike: f64, rate: f64, t: f64, sigma: f64) -> f64 {
    let (d1, d2) = d1_d2(spot, strike, rate, t, sigma);
    spot * norm_cdf(d1) - (-rate * t).exp() * strike * norm_cdf(d2)
}

#[inline]
pub(crate) fn log_vega_unchecked(spot: f64, strike: f64, rate: f64, t: f64, sigma: f64) -> f64 {
    let (d1, _) = d1_d2(spot, strike, rate, t, sigma);
    spot.ln() - 0.5 * d1 * d1 - LN_SQRT_2PI + 0.5 * t.ln()
}

/// `C = P Phi(d1) - e^{-rT} K Phi(d2)`.
pub fn bs_call(spot: f64, strike: f64, rate: f64, t: f64, sigma: f64) -> Result<f64> {
    validate(spot, strike, t, sigma, rate)?;
    Ok(call_unchecked(spot, strike, rate, t, sigma))
}

/// `e^{-rT} K Phi(-d2) - P Phi(-d1)`, computed directly rather than by parity.
pub fn bs_put(spot: f64, strike: f64, rate: f64, t: f64, sigma: f64) -> Result<f64> {
    validate(spot, strike, t, sigma, rate)?;
    let (d1, d2) = d1_d2(spot, strike, rate, t, sigma);
    Ok((-rate * t).exp() * strike * norm_cdf(-d2) - spot * norm_cdf(-d1))
}

/// Natural log of Vega; finite even where Vega itself underflows.
pub fn bs_log_vega(spot: f64, strike: f64, rate: f64, t: f64, sigma: f64) -> Result<f64> {
    validate(spot, strike, t, sigma, rate)?;
    Ok(log_vega_unchecked(spot, strike, rate, t, sigma))
}

/// `dC/dsigma = P phi(d1) sqrt(T)`, evaluated as `exp` of its logarithm.
pub fn bs_vega(spot: f64, strike: f64, rate: f64, t: f64, sigma: f64) -> Result<f64> {
    bs_log_vega(spot, strike, rate, t, sigma).map(f64::exp)
}
