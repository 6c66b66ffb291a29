//! Implied-volatility surfaces from Monte Carlo prices, and Vega maps.

use crate::error::{domain, Result};
use crate::poly::PolyCoeffs;

use super::black_scholes::log_vega_unchecked;
use super::implied::{implied_vol_with_vega, IvFailure};
use super::monte_carlo::{mc_price_grid, McOptions, OptionSpec, Payoff};

/// One surface cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvCell {
    pub strike: f64,
    pub maturity_months: u32,
    pub price: f64,
    pub std_error: f64,
    pub iv: std::result::Result<f64, IvFailure>,
    /// Vega at the root, when a root was found (also for guard failures).
    pub vega: Option<f64>,
}

impl IvCell {
    pub fn is_valid(&self) -> bool {
        self.iv.is_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IvSurface {
    pub strikes: Vec<f64>,
    pub maturities_months: Vec<u32>,
    /// `cells[t][k]`.
    pub cells: Vec<Vec<IvCell>>,
    pub vol_clamps: u64,
}

impl IvSurface {
    pub fn cell(&self, t: usize, k: usize) -> &IvCell {
        &self.cells[t][k]
    }

    /// Row of implied vols for maturity index `t`, `None` for invalid cells.
    pub fn row(&self, t: usize) -> Vec<Option<f64>> {
        self.cells[t].iter().map(|c| c.iv.ok()).collect()
    }

    pub fn valid_count(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_valid()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = &IvCell> {
        self.cells.iter().flatten()
    }
}

/// Prices every `(T, K)` cell on common paths and inverts each price.
/// `base` supplies the rate and spot pair.
#[allow(clippy::too_many_arguments)]
pub fn iv_surface(
    _drift: &PolyCoeffs<f64>,
    vol: &PolyCoeffs<f64>,
    base: &OptionSpec,
    k_grid: &[f64],
    t_grid_months: &[u32],
    paths: usize,
    seed: u64,
    guard: f64,
) -> Result<IvSurface> {
    iv_surface_with(vol, base, k_grid, t_grid_months, paths, seed, guard, &McOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn iv_surface_with(
    vol: &PolyCoeffs<f64>,
    base: &OptionSpec,
    k_grid: &[f64],
    t_grid_months: &[u32],
    paths: usize,
    seed: u64,
    guard: f64,
    opts: &McOptions,
) -> Result<IvSurface> {
    if k_grid.iter().any(|&k| !(k > 0.0)) {
        return Err(domain("surface strikes must be positive"));
    }
    let grid = mc_price_grid(vol, base, k_grid, t_grid_months, paths, seed, Payoff::Call, opts)?;
    let cells = t_grid_months
        .iter()
        .zip(&grid.cells)
        .map(|(&m, row)| {
            let years = m as f64 / 12.0;
            k_grid
                .iter()
                .zip(row)
                .map(|(&k, r)| {
                    let solved = implied_vol_with_vega(r.price, base.p1, k, base.rate, years, guard);
                    let (iv, vega) = match solved {
                        Ok(s) => (Ok(s.sigma), Some(s.vega)),
                        Err(IvFailure::VegaGuard { vega, .. }) => {
                            (Err(solved.unwrap_err()), Some(vega))
                        }
                        Err(e) => (Err(e), None),
                    };
                    IvCell {
                        strike: k,
                        maturity_months: m,
                        price: r.price,
                        std_error: r.std_error,
                        iv,
                        vega,
                    }
                })
                .collect()
        })
        .collect();
    Ok(IvSurface {
        strikes: k_grid.to_vec(),
        maturities_months: t_grid_months.to_vec(),
        cells,
        vol_clamps: grid.vol_clamps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VegaMap {
    pub strikes: Vec<f64>,
    pub maturities_months: Vec<u32>,
    /// `values[t][k]`.
    pub values: Vec<Vec<f64>>,
}

impl VegaMap {
    pub fn get(&self, strike: f64, months: u32) -> Option<f64> {
        let k = self.strikes.iter().position(|&s| s == strike)?;
        let t = self.maturities_months.iter().position(|&m| m == months)?;
        Some(self.values[t][k])
    }
}

/// Black-Scholes Vega on a strike x maturity grid.
pub fn vega_map(
    spot: f64,
    rate: f64,
    sigma: f64,
    k_grid: &[f64],
    t_grid_months: &[u32],
) -> Result<VegaMap> {
    if k_grid.is_empty() || t_grid_months.is_empty() {
        return Err(domain("strike and maturity grids must be nonempty"));
    }
    let positive = |v: f64| v.is_finite() && v > 0.0;
    if !positive(spot) || !positive(sigma) || !rate.is_finite() {
        return Err(domain("spot and sigma must be positive"));
    }
    if k_grid.iter().any(|&k| !positive(k)) || t_grid_months.contains(&0) {
        return Err(domain("grid values must be positive"));
    }
    let values = t_grid_months
        .iter()
        .map(|&m| {
            let t = m as f64 / 12.0;
            k_grid
                .iter()
                .map(|&k| log_vega_unchecked(spot, k, rate, t, sigma).exp())
                .collect()
        })
        .collect();
    Ok(VegaMap {
        strikes: k_grid.to_vec(),
        maturities_months: t_grid_months.to_vec(),
        values,
    })
}
