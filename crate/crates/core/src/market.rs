//! Market clearing and the ARCH yield recursion it induces.
//!
//! Cumulative noise demand `nu * W_t`, trend-chasing demand `xi * log P_t`
//! and the two prospect populations must sum to a constant. Differencing
//! over a step of length `dt` and solving for the next yield gives
//!
//! ```text
//! Y_{i+1} = f(Y_i) + g(Y_i) * eps_i
//! f(y) = (D2'(y) * y - D1(y) * dt) / (xi + D2'(y))
//! g(y) = -nu * sqrt(dt) / (xi + D2'(y))
//! ```
//!
//! with `eps_i = dW_i / sqrt(dt)` standard normal.

use crate::demand::DemandCurve;
use crate::error::{domain, Result};
use crate::poly::PolyCoeffs;
use crate::rng::StreamRng;
use crate::scalar::Scalar;

/// Trading days per year; the default step is one day.
pub const TRADING_DAYS: f64 = 252.0;

/// Default per-step volatility floor for polynomial surrogates.
pub const DEFAULT_SURROGATE_VOL_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams<T> {
    /// Trend-chasing weight, `xi > 0`.
    pub xi: T,
    /// Noise weight, `nu < 0`.
    pub nu: T,
    /// Step length in years.
    pub dt: T,
    /// Total demand level `M`. It drops out of the differenced model.
    pub clearing_const: T,
}

impl<T: Scalar> MarketParams<T> {
    pub fn new(xi: T, nu: T, dt: T) -> Result<Self> {
        if !(xi.is_finite() && xi > T::zero()) {
            return Err(domain(format!("xi must be positive, got {xi}")));
        }
        if !(nu.is_finite() && nu < T::zero()) {
            return Err(domain(format!("nu must be negative, got {nu}")));
        }
        if !(dt.is_finite() && dt > T::zero()) {
            return Err(domain(format!("dt must be positive, got {dt}")));
        }
        Ok(Self {
            xi,
            nu,
            dt,
            clearing_const: T::zero(),
        })
    }

    pub fn with_clearing_const(mut self, m: T) -> Self {
        self.clearing_const = m;
        self
    }

    /// `xi = 40`, `nu = -27`, daily steps.
    pub fn equity() -> Self {
        Self::new(T::lit(40.0), T::lit(-27.0), T::lit(1.0 / TRADING_DAYS)).unwrap()
    }

    /// `xi = 60`, `nu = -20`, daily steps.
    pub fn fx() -> Self {
        Self::new(T::lit(60.0), T::lit(-20.0), T::lit(1.0 / TRADING_DAYS)).unwrap()
    }
}

/// Where the drift and volatility functions come from.
#[derive(Debug, Clone)]
pub enum ArchKind<T> {
    /// Closed form from demand curves and market parameters.
    Derived {
        curve: DemandCurve<T>,
        params: MarketParams<T>,
    },
    /// Global polynomial fits of drift and per-step volatility.
    Surrogate {
        drift: PolyCoeffs<T>,
        vol: PolyCoeffs<T>,
        dt: T,
    },
}

/// `Y_{i+1} = f(Y_i) + g(Y_i) * eps_i` with `g` floored at `vol_floor`.
#[derive(Debug, Clone)]
pub struct ArchModel<T> {
    kind: ArchKind<T>,
    vol_floor: T,
}

impl<T: Scalar> ArchModel<T> {
    /// Model induced by market clearing. No volatility floor is applied
    /// since `g` is positive by construction.
    pub fn derived(curve: DemandCurve<T>, params: MarketParams<T>) -> Self {
        Self {
            kind: ArchKind::Derived { curve, params },
            vol_floor: T::zero(),
        }
    }

    /// Polynomial surrogate with the default volatility floor.
    pub fn surrogate(drift: PolyCoeffs<T>, vol: PolyCoeffs<T>, dt: T) -> Result<Self> {
        if !(dt.is_finite() && dt > T::zero()) {
            return Err(domain(format!("dt must be positive, got {dt}")));
        }
        Ok(Self {
            kind: ArchKind::Surrogate { drift, vol, dt },
            vol_floor: T::lit(DEFAULT_SURROGATE_VOL_FLOOR),
        })
    }

    pub fn with_vol_floor(mut self, floor: T) -> Result<Self> {
        if !(floor.is_finite() && floor >= T::zero()) {
            return Err(domain(format!("vol floor must be >= 0, got {floor}")));
        }
        self.vol_floor = floor;
        Ok(self)
    }

    pub fn kind(&self) -> &ArchKind<T> {
        &self.kind
    }

    pub fn vol_floor(&self) -> T {
        self.vol_floor
    }

    pub fn dt(&self) -> T {
        match &self.kind {
            ArchKind::Derived { params, .. } => params.dt,
            ArchKind::Surrogate { dt, .. } => *dt,
        }
    }

    /// Conditional mean `f(y)` of the next yield.
    #[inline]
    pub fn drift(&self, y: T) -> T {
        match &self.kind {
            ArchKind::Derived { curve, params } => {
                let s = curve.d2_slope(y);
                (s * y - curve.d1(y) * params.dt) / (params.xi + s)
            }
            ArchKind::Surrogate { drift, .. } => drift.eval(y),
        }
    }

    /// Unfloored `g(y)`.
    #[inline]
    pub fn raw_vol(&self, y: T) -> T {
        match &self.kind {
            ArchKind::Derived { curve, params } => {
                -params.nu * params.dt.sqrt() / (params.xi + curve.d2_slope(y))
            }
            ArchKind::Surrogate { vol, .. } => vol.eval(y),
        }
    }

    /// Floored volatility and whether the floor was hit.
    #[inline]
    pub fn vol_checked(&self, y: T) -> (T, bool) {
        let g = self.raw_vol(y);
        if g < self.vol_floor || g.is_nan() {
            (self.vol_floor, true)
        } else {
            (g, false)
        }
    }

    #[inline]
    pub fn vol(&self, y: T) -> T {
        self.vol_checked(y).0
    }

    /// One recursion step: `f(y) + g(y) * eps`.
    #[inline]
    pub fn step(&self, y: T, eps: T) -> T {
        self.drift(y) + self.vol(y) * eps
    }
}

pub fn derive_arch<T: Scalar>(curve: &DemandCurve<T>, params: &MarketParams<T>) -> ArchModel<T> {
    ArchModel::derived(curve.clone(), *params)
}

pub fn step<T: Scalar>(model: &ArchModel<T>, y: T, eps: T) -> T {
    model.step(y, eps)
}

/// Left-hand side of the differenced clearing condition:
/// `nu dW + xi Y_{i+1} + D1(Y_i) dt + D2'(Y_i) (Y_{i+1} - Y_i)`.
pub fn clearing_residual<T: Scalar>(
    curve: &DemandCurve<T>,
    params: &MarketParams<T>,
    y_i: T,
    y_next: T,
    dw: T,
) -> T {
    params.nu * dw
        + params.xi * y_next
        + curve.d1(y_i) * params.dt
        + curve.d2_slope(y_i) * (y_next - y_i)
}

/// Daily log-returns, indexed from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldSeries<T> {
    pub values: Vec<T>,
}

impl<T> YieldSeries<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Strictly positive price levels in time order, with optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries<T> {
    values: Vec<T>,
    labels: Option<Vec<String>>,
}

impl<T: Scalar> PriceSeries<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some((i, p)) = values
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p > T::zero()))
        {
            return Err(domain(format!("price {i} must be positive, got {p}")));
        }
        Ok(Self {
            values,
            labels: None,
        })
    }

    pub fn with_labels(values: Vec<T>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(domain("label count differs from price count"));
        }
        let mut s = Self::new(values)?;
        s.labels = Some(labels);
        Ok(s)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The most recent `count` records.
    pub fn tail(&self, count: usize) -> Result<Self> {
        if count > self.len() {
            return Err(domain(format!(
                "window of {count} exceeds series length {}",
                self.len()
            )));
        }
        let start = self.len() - count;
        Ok(Self {
            values: self.values[start..].to_vec(),
            labels: self.labels.as_ref().map(|l| l[start..].to_vec()),
        })
    }
}

/// A simulated series plus the number of steps where the volatility floor
/// replaced `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated<S> {
    pub series: S,
    pub vol_clamps: usize,
}

/// Iterates the recursion from `y0` for `n` samples (including `y0`) on
/// substream 0 of `seed`. Sample `i` uses normal draw `i - 1`.
pub fn simulate_yields<T: Scalar>(
    model: &ArchModel<T>,
    y0: T,
    n: usize,
    seed: u64,
) -> Result<Simulated<YieldSeries<T>>> {
    simulate_yields_on_stream(model, y0, n, seed, 0)
}

pub fn simulate_yields_on_stream<T: Scalar>(
    model: &ArchModel<T>,
    y0: T,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<Simulated<YieldSeries<T>>> {
    if n == 0 {
        return Err(domain("need at least one sample"));
    }
    if !y0.is_finite() {
        return Err(domain(format!("initial yield must be finite, got {y0}")));
    }
    let mut rng = StreamRng::new(seed, stream);
    let mut values = Vec::with_capacity(n);
    let mut vol_clamps = 0;
    let mut y = y0;
    values.push(y);
    for _ in 1..n {
        let eps = T::lit(rng.normal());
        let (g, clamped) = model.vol_checked(y);
        vol_clamps += clamped as usize;
        y = model.drift(y) + g * eps;
        values.push(y);
    }
    Ok(Simulated {
        series: YieldSeries { values },
        vol_clamps,
    })
}

/// Price path starting from `p0, p1`, with `P_{i+1} = P_i exp(Y_{i+1})`.
pub fn simulate_prices<T: Scalar>(
    model: &ArchModel<T>,
    p0: T,
    p1: T,
    n: usize,
    seed: u64,
) -> Result<Simulated<PriceSeries<T>>> {
    simulate_prices_on_stream(model, p0, p1, n, seed, 0)
}

pub fn simulate_prices_on_stream<T: Scalar>(
    model: &ArchModel<T>,
    p0: T,
    p1: T,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<Simulated<PriceSeries<T>>> {
    for (name, p) in [("p0", p0), ("p1", p1)] {
        if !(p.is_finite() && p > T::zero()) {
            return Err(domain(format!("{name} must be positive, got {p}")));
        }
    }
    if n < 2 {
        return Err(domain(format!("price path needs n >= 2, got {n}")));
    }
    let yields = simulate_yields_on_stream(model, (p1 / p0).ln(), n - 1, seed, stream)?;
    let mut values = Vec::with_capacity(n);
    values.push(p0);
    values.push(p1);
    let mut p = p1;
    for &y in &yields.series.values[1..] {
        p = p * y.exp();
        values.push(p);
    }
    Ok(Simulated {
        series: PriceSeries::new(values)?,
        vol_clamps: yields.vol_clamps,
    })
}
