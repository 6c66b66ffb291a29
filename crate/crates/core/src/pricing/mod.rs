//! Option pricing under the surrogate model.

pub mod black_scholes;
pub mod implied;
pub mod monte_carlo;
pub mod surface;

pub use black_scholes::{bs_call, bs_log_vega, bs_put, bs_vega, norm_cdf, norm_pdf};
pub use implied::{
    implied_vol, implied_vol_with_vega, ImpliedVol, IvFailure, DEFAULT_VEGA_GUARD, IV_HI, IV_LO,
    IV_TOL,
};
pub use monte_carlo::{
    convergence_study, convergence_study_with_seeds, mc_euro_call, mc_euro_call_with, mc_euro_put,
    mc_price_grid, CompensatedSum, ConvergenceRow, McGrid, McOptions, McResult, OptionSpec, Payoff,
    BENCHMARK_P0, BENCHMARK_P1, DEFAULT_PATHS, DEFAULT_RATE, STEPS_PER_MONTH,
};
pub use surface::{iv_surface, iv_surface_with, vega_map, IvCell, IvSurface, VegaMap};
