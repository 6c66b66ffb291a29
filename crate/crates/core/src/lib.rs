//! Prospect-agent market model: demand curves, the ARCH recursion they
//! induce, nonparametric calibration from price data, and option pricing
//! under the fitted polynomial surrogate.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`). Option
//! pricing and CSV I/O work in `f64`. The aliases below fix the scalar to
//! `f64` for everyday use.

pub mod calibration;
pub mod data;
pub mod demand;
pub mod error;
pub mod linalg;
pub mod market;
pub mod poly;
pub mod pricing;
pub mod rng;
pub mod scalar;

pub use calibration::{
    bandwidth, default_grid, estimate_curves, fit_poly, linspace, trimmed_grid, fit_surrogates, local_fit, log_returns,
    paper_surrogates_equity, paper_surrogates_fx, LocalFit, RegressionEstimate,
};
pub use demand::{equity_preset, fx_preset, parse_curve, DemandCurve, StretchedExpPair};
pub use error::{Error, Result};
pub use market::{
    clearing_residual, derive_arch, simulate_prices, simulate_yields, ArchKind, ArchModel,
    MarketParams, PriceSeries, YieldSeries,
};
pub use poly::{PiecewisePoly, PolyCoeffs};
pub use pricing::{
    bs_call, bs_vega, convergence_study, implied_vol, iv_surface, mc_euro_call, vega_map,
    IvFailure, IvSurface, McResult, OptionSpec,
};
pub use rng::StreamRng;
pub use scalar::Scalar;

pub type Poly = PolyCoeffs<f64>;
pub type Piecewise = PiecewisePoly<f64>;
pub type Curve = DemandCurve<f64>;
pub type Model = ArchModel<f64>;
pub type Params = MarketParams<f64>;
pub type Estimate = RegressionEstimate<f64>;
pub type Prices = PriceSeries<f64>;
pub type Yields = YieldSeries<f64>;
