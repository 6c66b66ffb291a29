//! Implied volatility by bracketed bisection with a Vega guard.
//!
//! Where Vega is tiny the call price barely moves with volatility, so any
//! pricing error (Monte Carlo noise, rounding) maps to an arbitrarily large
//! volatility error. Roots whose Vega falls below the guard are rejected.

use std::fmt;

use super::black_scholes::{call_unchecked, log_vega_unchecked};

/// Lower end of the volatility bracket.
pub const IV_LO: f64 = 1e-4;
/// Upper end of the volatility bracket.
pub const IV_HI: f64 = 5.0;
/// Bisection stops once the bracket is narrower than this.
pub const IV_TOL: f64 = 1e-10;
/// Default minimum Vega (price units per unit volatility).
pub const DEFAULT_VEGA_GUARD: f64 = 1e-4;

/// Why no implied volatility was reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IvFailure {
    /// Price at or below the discounted intrinsic value, or at or above spot.
    ArbitrageBound,
    /// The Black-Scholes price over `[IV_LO, IV_HI]` does not straddle the target.
    NoBracket,
    /// A root exists but Vega there is below the guard.
    VegaGuard { sigma: f64, vega: f64 },
    /// Non-finite or non-positive inputs.
    InvalidInput,
}

impl IvFailure {
    /// Stable reason code used in CSV output.
    pub fn code(&self) -> &'static str {
        match self {
            IvFailure::ArbitrageBound => "arbitrage-bound",
            IvFailure::NoBracket => "no-bracket",
            IvFailure::VegaGuard { .. } => "vega-guard",
            IvFailure::InvalidInput => "invalid-input",
        }
    }
}

impl fmt::Display for IvFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IvFailure::VegaGuard { sigma, vega } => {
                write!(f, "vega-guard (root {sigma}, vega {vega:e})")
            }
            other => f.write_str(other.code()),
        }
    }
}

impl std::error::Error for IvFailure {}

/// Successful inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpliedVol {
    pub sigma: f64,
    pub vega: f64,
}

/// Volatility `sigma` in `[IV_LO, IV_HI]` with `bs_call(sigma) = price`.
pub fn implied_vol(
    price: f64,
    spot: f64,
    strike: f64,
    rate: f64,
    t: f64,
    guard: f64,
) -> Result<f64, IvFailure> {
    implied_vol_with_vega(price, spot, strike, rate, t, guard).map(|iv| iv.sigma)
}

/// As [`implied_vol`], also returning Vega at the root.
pub fn implied_vol_with_vega(
    price: f64,
    spot: f64,
    strike: f64,
    rate: f64,
    t: f64,
    guard: f64,
) -> Result<ImpliedVol, IvFailure> {
    let positive = |v: f64| v.is_finite() && v > 0.0;
    if !price.is_finite() || !positive(spot) || !positive(strike) || !positive(t) || !rate.is_finite() || guard.is_nan() {
        return Err(IvFailure::InvalidInput);
    }
    let lower = (spot - strike * (-rate * t).exp()).max(0.0);
    if price <= lower || price >= spot {
        return Err(IvFailure::ArbitrageBound);
    }

    let excess = |sigma: f64| call_unchecked(spot, strike, rate, t, sigma) - price;
    let (mut lo, mut hi) = (IV_LO, IV_HI);
    if excess(lo) > 0.0 || excess(hi) < 0.0 {
        return Err(IvFailure::NoBracket);
    }
    while hi - lo > IV_TOL {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = 0.5 * (lo + hi);
    let vega = log_vega_unchecked(spot, strike, rate, t, sigma).exp();
    if !(vega >= guard) {
        return Err(IvFailure::VegaGuard { sigma, vega });
    }
    Ok(ImpliedVol { sigma, vega })
}
