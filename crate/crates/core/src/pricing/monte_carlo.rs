//! Risk-neutral Monte Carlo under the polynomial ARCH surrogate.
//!
//! Per daily step, with `s = max(g~(Y_i), floor)` the per-step volatility,
//!
//! ```text
//! log P_{i+1} - log P_i = r dt - s^2 / 2 + s eps_i
//! ```
//!
//! and `Y_{i+1}` is that increment. The physical drift `f~` plays no role
//! once the measure is changed; the pricing functions accept it only so the
//! surrogate pair travels together.
//!
//! Path `p` draws from substream `p` of the seed. Paths are grouped into
//! fixed-size chunks, each chunk accumulates compensated sums, and chunks are
//! merged in index order, so results do not depend on the worker count.

use rayon::prelude::*;

use crate::error::{domain, ensure_finite, ensure_positive, Result};
use crate::poly::PolyCoeffs;
use crate::rng::StreamRng;

/// Trading days per month.
pub const STEPS_PER_MONTH: u32 = 21;
/// Step length in years.
pub const DT: f64 = 1.0 / 252.0;
/// Default annual risk-free rate.
pub const DEFAULT_RATE: f64 = 0.03;
/// Default number of simulated paths.
pub const DEFAULT_PATHS: usize = 200_000;
/// Benchmark spot pair for the equity surrogate.
pub const BENCHMARK_P0: f64 = 1462.42;
pub const BENCHMARK_P1: f64 = 1459.37;

const CHUNK: usize = 1024;
const LANES: usize = 8;

/// A European option on the simulated underlying. Maturity is a whole
/// number of months of 21 trading days each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    /// Strike; zero is allowed and prices the discounted forward.
    pub strike: f64,
    pub maturity_months: u32,
    /// Continuously compounded annual rate.
    pub rate: f64,
    /// Price one day before valuation; fixes the initial yield.
    pub p0: f64,
    /// Spot at valuation.
    pub p1: f64,
}

impl OptionSpec {
    pub fn new(strike: f64, maturity_months: u32, rate: f64, p0: f64, p1: f64) -> Result<Self> {
        let spec = Self {
            strike,
            maturity_months,
            rate,
            p0,
            p1,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// K = 800, T = 60 months, r = 0.03 on the benchmark spot pair.
    pub fn benchmark() -> Self {
        Self::new(800.0, 60, DEFAULT_RATE, BENCHMARK_P0, BENCHMARK_P1).unwrap()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike.is_finite() && self.strike >= 0.0) {
            return Err(domain(format!("strike must be >= 0, got {}", self.strike)));
        }
        if self.maturity_months == 0 {
            return Err(domain("maturity must be at least one month"));
        }
        ensure_finite(self.rate, "rate")?;
        ensure_positive(self.p0, "p0")?;
        ensure_positive(self.p1, "p1")
    }

    pub fn with_strike(mut self, strike: f64) -> Self {
        self.strike = strike;
        self
    }

    pub fn with_maturity(mut self, months: u32) -> Self {
        self.maturity_months = months;
        self
    }

    pub fn years(&self) -> f64 {
        self.maturity_months as f64 / 12.0
    }

    pub fn steps(&self) -> usize {
        (self.maturity_months * STEPS_PER_MONTH) as usize
    }

    pub fn initial_yield(&self) -> f64 {
        (self.p1 / self.p0).ln()
    }

    pub fn discount(&self) -> f64 {
        (-self.rate * self.years()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    /// Pair each path with its mirror (negated normals).
    pub antithetic: bool,
    /// Minimum per-step volatility.
    pub vol_floor: f64,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            antithetic: false,
            vol_floor: crate::market::DEFAULT_SURROGATE_VOL_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    /// Discounted mean payoff.
    pub price: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub std_error: f64,
    pub paths: usize,
    /// Path steps where the volatility floor replaced `g~`.
    pub vol_clamps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Payoff {
    Call,
    Put,
}

impl Payoff {
    #[inline]
    fn value(self, terminal: f64, strike: f64) -> f64 {
        match self {
            Payoff::Call => (terminal - strike).max(0.0),
            Payoff::Put => (strike - terminal).max(0.0),
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Default)]
struct Moments {
    sum: CompensatedSum,
    sum_sq: CompensatedSum,
}

impl Moments {
    #[inline]
    fn add(&mut self, x: f64) {
        self.sum.add(x);
        self.sum_sq.add(x * x);
    }

    fn merge(&mut self, other: &Moments) {
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    fn mean_and_se(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        let mean = self.sum.value() / nf;
        if n < 2 {
            return (mean, 0.0);
        }
        let var = ((self.sum_sq.value() - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (mean, (var / nf).sqrt())
    }
}

/// Path generator for the risk-neutral log-price.
struct LogPricePaths<'a> {
    vol: &'a PolyCoeffs<f64>,
    floor: f64,
    rate_dt: f64,
    y0: f64,
    ln_p1: f64,
}

impl LogPricePaths<'_> {
    /// Advances `LANES` independent paths together; interleaving hides the
    /// latency of the per-step polynomial. Writes the log-price after
    /// `checkpoints[j]` steps (ascending) to `out[j][lane]` and returns the
    /// number of floored steps in the first `active` lanes.
    #[inline]
    fn run(
        &self,
        rngs: &mut [StreamRng; LANES],
        signs: [f64; LANES],
        active: usize,
        checkpoints: &[usize],
        out: &mut [[f64; LANES]],
    ) -> u64 {
        let mut y = [self.y0; LANES];
        let mut lp = [self.ln_p1; LANES];
        let mut clamps = [0u64; LANES];
        let mut step = 0usize;
        for (slot, &target) in out.iter_mut().zip(checkpoints) {
            while step < target {
                for l in 0..LANES {
                    let mut s = self.vol.eval(y[l]);
                    if !(s >= self.floor) {
                        s = self.floor;
                        clamps[l] += 1;
                    }
                    let inc = self.rate_dt - 0.5 * s * s + s * signs[l] * rngs[l].normal();
                    lp[l] += inc;
                    y[l] = inc;
                }
                step += 1;
            }
            *slot = lp;
        }
        clamps[..active].iter().sum()
    }
}

/// Prices of one payoff type on a maturity x strike grid, all cells priced
/// on the same paths.
#[derive(Debug, Clone, PartialEq)]
pub struct McGrid {
    pub maturities_months: Vec<u32>,
    pub strikes: Vec<f64>,
    /// `cells[t][k]` for maturity `t` and strike `k`.
    pub cells: Vec<Vec<McResult>>,
    pub vol_clamps: u64,
}

/// Monte Carlo prices for every `(maturity, strike)` pair on common paths.
/// The strike and maturity in `base` are ignored.
#[allow(clippy::too_many_arguments)]
pub fn mc_price_grid(
    vol: &PolyCoeffs<f64>,
    base: &OptionSpec,
    strikes: &[f64],
    maturities_months: &[u32],
    paths: usize,
    seed: u64,
    payoff: Payoff,
    opts: &McOptions,
) -> Result<McGrid> {
    if paths == 0 {
        return Err(domain("need at least one path"));
    }
    if opts.antithetic && !paths.is_multiple_of(2) {
        return Err(domain("antithetic sampling needs an even path count"));
    }
    if !(opts.vol_floor.is_finite() && opts.vol_floor >= 0.0) {
        return Err(domain("vol floor must be >= 0"));
    }
    if strikes.is_empty() || maturities_months.is_empty() {
        return Err(domain("strike and maturity grids must be nonempty"));
    }
    for &k in strikes {
        base.with_strike(k).validate()?;
    }
    for &m in maturities_months {
        base.with_maturity(m).validate()?;
    }

    let mut checkpoint_months: Vec<u32> = maturities_months.to_vec();
    checkpoint_months.sort_unstable();
    checkpoint_months.dedup();
    let checkpoints: Vec<usize> = checkpoint_months
        .iter()
        .map(|&m| (m * STEPS_PER_MONTH) as usize)
        .collect();

    let engine = LogPricePaths {
        vol,
        floor: opts.vol_floor,
        rate_dt: base.rate * DT,
        y0: base.initial_yield(),
        ln_p1: base.p1.ln(),
    };
    let samples = if opts.antithetic { paths / 2 } else { paths };
    let n_cells = checkpoints.len() * strikes.len();
    let n_chunks = samples.div_ceil(CHUNK);

    let chunk_results: Vec<(Vec<Moments>, u64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Moments::default(); n_cells];
            let mut clamps = 0u64;
            let start = c * CHUNK;
            let end = ((c + 1) * CHUNK).min(samples);
            // (stream, sign) per simulated path; mirrors follow their originals.
            let lanes: Vec<(u64, f64)> = (start..end)
                .flat_map(|s| {
                    let mirror = opts.antithetic.then_some((s as u64, -1.0));
                    std::iter::once((s as u64, 1.0)).chain(mirror)
                })
                .collect();
            let mut terminal = vec![0.0; lanes.len() * checkpoints.len()];
            let mut out = vec![[0.0; LANES]; checkpoints.len()];
            for (g, group) in lanes.chunks(LANES).enumerate() {
                let mut rngs: [StreamRng; LANES] =
                    std::array::from_fn(|l| StreamRng::new(seed, group.get(l).map_or(0, |x| x.0)));
                let signs: [f64; LANES] = std::array::from_fn(|l| group.get(l).map_or(1.0, |x| x.1));
                clamps += engine.run(&mut rngs, signs, group.len(), &checkpoints, &mut out);
                for (l, _) in group.iter().enumerate() {
                    let lane = g * LANES + l;
                    for (t, o) in out.iter().enumerate() {
                        terminal[lane * checkpoints.len() + t] = o[l].exp();
                    }
                }
            }
            let per_sample = if opts.antithetic { 2 } else { 1 };
            for i in 0..end - start {
                for t in 0..checkpoints.len() {
                    let first = terminal[i * per_sample * checkpoints.len() + t];
                    let mirror = opts
                        .antithetic
                        .then(|| terminal[(i * 2 + 1) * checkpoints.len() + t]);
                    for (k, &strike) in strikes.iter().enumerate() {
                        let mut x = payoff.value(first, strike);
                        if let Some(m) = mirror {
                            x = 0.5 * (x + payoff.value(m, strike));
                        }
                        acc[t * strikes.len() + k].add(x);
                    }
                }
            }
            (acc, clamps)
        })
        .collect();

    let mut total = vec![Moments::default(); n_cells];
    let mut vol_clamps = 0u64;
    for (acc, clamps) in &chunk_results {
        for (t, a) in total.iter_mut().zip(acc) {
            t.merge(a);
        }
        vol_clamps += clamps;
    }

    let cells = maturities_months
        .iter()
        .map(|&m| {
            let t = checkpoint_months.binary_search(&m).unwrap();
            let disc = base.with_maturity(m).discount();
            strikes
                .iter()
                .enumerate()
                .map(|(k, _)| {
                    let (mean, se) = total[t * strikes.len() + k].mean_and_se(samples);
                    McResult {
                        price: disc * mean,
                        std_error: disc * se,
                        paths,
                        vol_clamps,
                    }
                })
                .collect()
        })
        .collect();

    Ok(McGrid {
        maturities_months: maturities_months.to_vec(),
        strikes: strikes.to_vec(),
        cells,
        vol_clamps,
    })
}

fn single(
    vol: &PolyCoeffs<f64>,
    spec: &OptionSpec,
    paths: usize,
    seed: u64,
    payoff: Payoff,
    opts: &McOptions,
) -> Result<McResult> {
    spec.validate()?;
    let grid = mc_price_grid(
        vol,
        spec,
        &[spec.strike],
        &[spec.maturity_months],
        paths,
        seed,
        payoff,
        opts,
    )?;
    Ok(grid.cells[0][0])
}

/// European call under the surrogate. `_drift` is not used by the
/// risk-neutral dynamics.
pub fn mc_euro_call(
    _drift: &PolyCoeffs<f64>,
    vol: &PolyCoeffs<f64>,
    spec: &OptionSpec,
    paths: usize,
    seed: u64,
) -> Result<McResult> {
    single(vol, spec, paths, seed, Payoff::Call, &McOptions::default())
}

pub fn mc_euro_call_with(
    _drift: &PolyCoeffs<f64>,
    vol: &PolyCoeffs<f64>,
    spec: &OptionSpec,
    paths: usize,
    seed: u64,
    opts: &McOptions,
) -> Result<McResult> {
    single(vol, spec, paths, seed, Payoff::Call, opts)
}

/// European put on the same paths a call with equal arguments would use.
pub fn mc_euro_put(
    _drift: &PolyCoeffs<f64>,
    vol: &PolyCoeffs<f64>,
    spec: &OptionSpec,
    paths: usize,
    seed: u64,
) -> Result<McResult> {
    single(vol, spec, paths, seed, Payoff::Put, &McOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub paths: usize,
    /// Sample standard deviation of the price across trials.
    pub std_dev: f64,
    pub mean_price: f64,
}

/// Price spread across `trials` runs per path count; trial `t` uses seed
/// `seed + t`.
pub fn convergence_study(
    drift: &PolyCoeffs<f64>,
    vol: &PolyCoeffs<f64>,
    spec: &OptionSpec,
    path_counts: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if trials < 2 {
        return Err(domain(format!("need at least 2 trials, got {trials}")));
    }
    let seeds: Vec<u64> = (0..trials as u64).map(|t| seed.wrapping_add(t)).collect();
    convergence_study_with_seeds(drift, vol, spec, path_counts, &seeds)
}

pub fn convergence_study_with_seeds(
    drift: &PolyCoeffs<f64>,
    vol: &PolyCoeffs<f64>,
    spec: &OptionSpec,
    path_counts: &[usize],
    seeds: &[u64],
) -> Result<Vec<ConvergenceRow>> {
    if seeds.len() < 2 {
        return Err(domain("need at least 2 trials"));
    }
    path_counts
        .iter()
        .map(|&paths| {
            let prices = seeds
                .iter()
                .map(|&s| mc_euro_call(drift, vol, spec, paths, s).map(|r| r.price))
                .collect::<Result<Vec<f64>>>()?;
            let n = prices.len() as f64;
            let mean = prices.iter().sum::<f64>() / n;
            let var = prices.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Ok(ConvergenceRow {
                paths,
                std_dev: var.sqrt(),
                mean_price: mean,
            })
        })
        .collect()
}
