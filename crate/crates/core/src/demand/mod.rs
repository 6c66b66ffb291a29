//! Prospect-agent demand curves.
//!
//! Two trader populations are described as functions of the daily
//! log-return `y`:
//!
//! * `D1(y)`, the excess-demand *rate* of the first population, a piecewise
//!   polynomial that is concave for gains, convex for losses, and reverses
//!   at extreme returns;
//! * `D2(y)`, the cumulative demand of the second population, given through
//!   its slope `D2'(y)`: a pair of stretched exponentials peaking at a
//!   center return. `D2` itself is the integral of `D2'` from an anchor
//!   where `D2 = 0`.
//!
//! `D2` is tabulated once at construction on a fixed grid and completed
//! exactly between grid nodes, so hot loops never re-integrate.

mod curve_file;

pub use curve_file::{format_curve, parse_curve};

use crate::error::{domain, Error, Result};
use crate::poly::{PiecewisePoly, PolyCoeffs};
use crate::scalar::Scalar;

/// Lower end of the cumulative-demand table.
pub const D2_TABLE_LO: f64 = -0.2;
/// Upper end of the cumulative-demand table.
pub const D2_TABLE_HI: f64 = 0.2;
/// Number of grid nodes in the cumulative-demand table.
pub const D2_TABLE_POINTS: usize = 4001;

/// Two stretched-exponential branches joined at `center`:
/// `amp * exp(-rate * |y - center|^pow)`, using the left parameters for
/// `y <= center` and the right ones above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchedExpPair<T> {
    pub center: T,
    pub amp: T,
    pub left_rate: T,
    pub right_rate: T,
    pub left_pow: T,
    pub right_pow: T,
}

impl<T: Scalar> StretchedExpPair<T> {
    pub fn new(center: T, amp: T, left: (T, T), right: (T, T)) -> Result<Self> {
        let pair = Self {
            center,
            amp,
            left_rate: left.0,
            left_pow: left.1,
            right_rate: right.0,
            right_pow: right.1,
        };
        pair.validate()?;
        Ok(pair)
    }

    fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(domain("stretched-exponential center must be finite"));
        }
        for (name, v) in [
            ("amp", self.amp),
            ("left_rate", self.left_rate),
            ("right_rate", self.right_rate),
            ("left_pow", self.left_pow),
            ("right_pow", self.right_pow),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, y: T) -> T {
        let d = y - self.center;
        if d <= T::zero() {
            self.amp * (-self.left_rate * (-d).powf(self.left_pow)).exp()
        } else {
            self.amp * (-self.right_rate * d.powf(self.right_pow)).exp()
        }
    }
}

/// Demand specification of the prospect agents.
#[derive(Debug, Clone)]
pub struct DemandCurve<T> {
    d1: PiecewisePoly<T>,
    d2_slope: StretchedExpPair<T>,
    d2_anchor: T,
    table: D2Table<T>,
}

/// Cumulative integral of `D2'` on an equispaced grid, measured from the
/// first node. Values relative to the anchor are formed on lookup.
#[derive(Debug, Clone)]
struct D2Table<T> {
    step: T,
    nodes: Vec<T>,
    cumulative: Vec<T>,
    anchor_node: usize,
    anchor_piece: T,
}

impl<T: Scalar> DemandCurve<T> {
    pub fn new(d1: PiecewisePoly<T>, d2_slope: StretchedExpPair<T>, d2_anchor: T) -> Result<Self> {
        d2_slope.validate()?;
        let lo = T::lit(D2_TABLE_LO);
        let hi = T::lit(D2_TABLE_HI);
        if !(d2_anchor >= lo && d2_anchor <= hi) {
            return Err(Error::Range {
                value: d2_anchor.to_f64_lossy(),
                lo: D2_TABLE_LO,
                hi: D2_TABLE_HI,
            });
        }

        let intervals = D2_TABLE_POINTS - 1;
        let step = (hi - lo) / T::lit(intervals as f64);
        let nodes: Vec<T> = (0..D2_TABLE_POINTS)
            .map(|k| lo + step * T::lit(k as f64))
            .collect();
        let mut cumulative = Vec::with_capacity(D2_TABLE_POINTS);
        cumulative.push(T::zero());
        let mut acc = T::zero();
        for w in nodes.windows(2) {
            acc = acc + slope_integral(&d2_slope, w[0], w[1]);
            cumulative.push(acc);
        }

        let anchor_node = node_below(&nodes, d2_anchor);
        let anchor_piece = slope_integral(&d2_slope, nodes[anchor_node], d2_anchor);
        let table = D2Table {
            step,
            nodes,
            cumulative,
            anchor_node,
            anchor_piece,
        };
        Ok(Self {
            d1,
            d2_slope,
            d2_anchor,
            table,
        })
    }

    pub fn d1_poly(&self) -> &PiecewisePoly<T> {
        &self.d1
    }

    pub fn d2_slope_fn(&self) -> &StretchedExpPair<T> {
        &self.d2_slope
    }

    pub fn d2_anchor(&self) -> T {
        self.d2_anchor
    }

    /// Range covered by the cumulative-demand table.
    pub fn d2_range(&self) -> (T, T) {
        (self.table.nodes[0], *self.table.nodes.last().unwrap())
    }

    /// Excess-demand rate, no input check.
    #[inline]
    pub fn d1(&self, y: T) -> T {
        self.d1.eval(y)
    }

    /// Cumulative-demand slope, no input check.
    #[inline]
    pub fn d2_slope(&self, y: T) -> T {
        self.d2_slope.eval(y)
    }

    pub fn eval_d1(&self, y: T) -> Result<T> {
        check_finite(y)?;
        Ok(self.d1(y))
    }

    pub fn eval_d2_slope(&self, y: T) -> Result<T> {
        check_finite(y)?;
        Ok(self.d2_slope(y))
    }

    /// Cumulative demand `D2(y)`, the integral of `D2'` from the anchor.
    ///
    /// Looks up the tabulated integral at the grid node below `y` and adds
    /// a Simpson completion over the remaining sub-step. Never extrapolates.
    pub fn eval_d2(&self, y: T) -> Result<T> {
        check_finite(y)?;
        let (lo, hi) = self.d2_range();
        if y < lo || y > hi {
            return Err(Error::Range {
                value: y.to_f64_lossy(),
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
        let t = &self.table;
        let k = node_below(&t.nodes, y);
        let piece = slope_integral(&self.d2_slope, t.nodes[k], y);
        Ok((t.cumulative[k] - t.cumulative[t.anchor_node]) + (piece - t.anchor_piece))
    }

    /// The cached `(y, D2(y))` grid.
    pub fn d2_table(&self) -> Vec<(T, T)> {
        let t = &self.table;
        let base = t.cumulative[t.anchor_node] + t.anchor_piece;
        t.nodes
            .iter()
            .zip(&t.cumulative)
            .map(|(&x, &c)| (x, c - base))
            .collect()
    }

    /// Grid spacing of the cumulative-demand table.
    pub fn d2_step(&self) -> T {
        self.table.step
    }

    /// Left/right limits of `D1` at each breakpoint.
    pub fn continuity_report(&self) -> Vec<crate::poly::BreakpointJump<T>> {
        self.d1.continuity_report()
    }
}

fn check_finite<T: Scalar>(y: T) -> Result<()> {
    if y.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("yield must be finite, got {y}")))
    }
}

/// Largest node index `k` with `nodes[k] <= y`, clamped to a valid interval start.
fn node_below<T: Scalar>(nodes: &[T], y: T) -> usize {
    nodes
        .partition_point(|&x| x <= y)
        .saturating_sub(1)
        .min(nodes.len() - 2)
}

/// Integral of `D2'` over `[a, b]` by Simpson's rule. Near the center
/// `|y - center|^pow` has unbounded curvature, so intervals at or close to
/// it are integrated from the center on pieces halving toward it.
fn slope_integral<T: Scalar>(slope: &StretchedExpPair<T>, a: T, b: T) -> T {
    let c = slope.center;
    let gap = if c < a {
        a - c
    } else if c > b {
        c - b
    } else {
        T::zero()
    };
    if gap < T::lit(GRADED_REACH) * (b - a) {
        graded(slope, c, b) - graded(slope, c, a)
    } else {
        simpson(slope, a, b)
    }
}

const GRADED_LEVELS: usize = 40;
const GRADED_PANELS: usize = 8;
/// Intervals closer to the center than this many widths use the graded rule.
const GRADED_REACH: f64 = 16.0;

/// Signed integral from `c` to `far`. Each halving level is split into
/// equal Simpson panels.
fn graded<T: Scalar>(slope: &StretchedExpPair<T>, c: T, far: T) -> T {
    let half = T::lit(0.5);
    let panels = T::lit(GRADED_PANELS as f64);
    let mut outer = far;
    let mut total = T::zero();
    for _ in 0..GRADED_LEVELS {
        let inner = c + (outer - c) * half;
        let w = (outer - inner) / panels;
        for j in 0..GRADED_PANELS {
            let lo = inner + w * T::lit(j as f64);
            let hi = if j + 1 == GRADED_PANELS { outer } else { lo + w };
            total = total + simpson(slope, lo, hi);
        }
        outer = inner;
    }
    // `(c, outer]` is now ~1e-12 of the original length.
    total + simpson(slope, c, outer)
}

#[inline]
fn simpson<T: Scalar>(slope: &StretchedExpPair<T>, a: T, b: T) -> T {
    let mid = (a + b) * T::lit(0.5);
    (b - a) / T::lit(6.0) * (slope.eval(a) + T::lit(4.0) * slope.eval(mid) + slope.eval(b))
}

/// Equity-market prospect agents.
pub fn equity_preset<T: Scalar>() -> DemandCurve<T> {
    let seg = |c: &[f64]| PolyCoeffs::from_f64(c).expect("finite preset coefficients");
    let d1 = PiecewisePoly::new(
        vec![T::lit(-0.0286), T::zero(), T::lit(0.0648)],
        vec![
            seg(&[-352.1, -504.0]),
            seg(&[0.0, 2.63e4, 5.12e5]),
            seg(&[0.0, 3.5e4, -4.5e5, 1.44e6]),
            seg(&[435.46, 1.85e4, -2.66e5, 9.38e5]),
        ],
    )
    .expect("valid equity D1");
    let slope = StretchedExpPair::new(
        T::lit(0.008),
        T::lit(110.0),
        (T::lit(150.0), T::lit(1.5)),
        (T::lit(40.0), T::lit(1.3)),
    )
    .expect("valid equity D2'");
    DemandCurve::new(d1, slope, T::lit(0.008)).expect("equity anchor in range")
}

/// Foreign-exchange prospect agents (stronger reversal at extreme returns).
pub fn fx_preset<T: Scalar>() -> DemandCurve<T> {
    let seg = |c: &[f64]| PolyCoeffs::from_f64(c).expect("finite preset coefficients");
    let d1 = PiecewisePoly::new(
        vec![T::zero()],
        vec![
            seg(&[5.381, 4.039e4, 2.169e6, 2.802e7]),
            seg(&[-3.27, 3.391e4, -1.056e6, 7.935e6]),
        ],
    )
    .expect("valid FX D1");
    let slope = StretchedExpPair::new(
        T::lit(-0.002),
        T::lit(220.0),
        (T::lit(250.0), T::lit(1.36)),
        (T::lit(100.0), T::lit(1.35)),
    )
    .expect("valid FX D2'");
    DemandCurve::new(d1, slope, T::lit(-0.002)).expect("FX anchor in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn equity_d1_first_branch() {
        let c = equity_preset::<f64>();
        assert_relative_eq!(c.eval_d1(-0.04).unwrap(), -331.94, max_relative = 1e-14);
        assert_eq!(c.eval_d1(0.0).unwrap(), 0.0);
    }

    #[test]
    fn fx_d1_at_zero_uses_right_branch() {
        let c = fx_preset::<f64>();
        assert_eq!(c.eval_d1(0.0).unwrap(), -3.27);
        let jump = c.continuity_report()[0];
        assert_eq!(jump.left, 5.381);
        assert_eq!(jump.right, -3.27);
    }

    #[test]
    fn equity_d1_nearly_continuous() {
        // Published coefficients are continuous only to a few units.
        for j in equity_preset::<f64>().continuity_report() {
            assert!(j.jump().abs() < 5.0, "{j:?}");
        }
    }

    #[test]
    fn slope_at_center_is_amplitude() {
        assert_eq!(equity_preset::<f64>().eval_d2_slope(0.008).unwrap(), 110.0);
        assert_eq!(fx_preset::<f64>().eval_d2_slope(-0.002).unwrap(), 220.0);
    }

    #[test]
    fn slope_right_tail_value() {
        // 110 * exp(-40 * 0.1^1.3), evaluated independently in f64.
        let expected = 110.0 * (-40.0 * 10f64.powf(-1.3)).exp();
        assert_relative_eq!(expected, 14.816351934250523, max_relative = 1e-13);
        assert_relative_eq!(
            equity_preset::<f64>().eval_d2_slope(0.108).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn d2_vanishes_at_anchor() {
        assert_eq!(equity_preset::<f64>().eval_d2(0.008).unwrap(), 0.0);
        assert_eq!(fx_preset::<f64>().eval_d2(-0.002).unwrap(), 0.0);
    }

    #[test]
    fn d2_right_side_outweighs_left() {
        let c = equity_preset::<f64>();
        let right = c.eval_d2(0.018).unwrap();
        let left = c.eval_d2(-0.002).unwrap();
        assert!(right > 0.0 && left < 0.0);
        assert!(right > left.abs());
    }

    #[test]
    fn d2_out_of_range() {
        let c = equity_preset::<f64>();
        assert!(matches!(c.eval_d2(0.2001), Err(Error::Range { .. })));
        assert!(matches!(c.eval_d2(-0.25), Err(Error::Range { .. })));
        assert!(c.eval_d2(0.2).is_ok());
        assert!(c.eval_d2(-0.2).is_ok());
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let c = equity_preset::<f64>();
        assert!(c.eval_d1(f64::NAN).is_err());
        assert!(c.eval_d2_slope(f64::INFINITY).is_err());
        assert!(c.eval_d2(f64::NAN).is_err());
    }

    #[test]
    fn preset_shapes() {
        let eq = equity_preset::<f64>();
        assert_eq!(eq.d1_poly().breakpoints(), &[-0.0286, 0.0, 0.0648]);
        let fx = fx_preset::<f64>();
        assert_eq!(fx.d1_poly().breakpoints(), &[0.0]);
        assert_eq!(fx.d2_slope_fn().center, -0.002);
    }

    #[test]
    fn table_is_monotone_and_contains_anchor() {
        for c in [equity_preset::<f64>(), fx_preset::<f64>()] {
            let table = c.d2_table();
            assert_eq!(table.len(), D2_TABLE_POINTS);
            assert!(table.windows(2).all(|w| w[0].1 < w[1].1));
            let at_anchor = table
                .iter()
                .find(|(x, _)| (x - c.d2_anchor()).abs() < 1e-12)
                .expect("anchor is a grid node");
            assert!(at_anchor.1.abs() < 1e-12);
        }
    }

    #[test]
    fn stretched_exp_validation() {
        assert!(StretchedExpPair::new(0.0, -1.0, (1.0, 1.0), (1.0, 1.0)).is_err());
        assert!(StretchedExpPair::new(0.0, 1.0, (0.0, 1.0), (1.0, 1.0)).is_err());
        assert!(StretchedExpPair::new(f64::NAN, 1.0, (1.0, 1.0), (1.0, 1.0)).is_err());
    }

    #[test]
    fn anchor_outside_table_rejected() {
        let c = equity_preset::<f64>();
        let r = DemandCurve::new(c.d1_poly().clone(), *c.d2_slope_fn(), 0.3);
        assert!(matches!(r, Err(Error::Range { .. })));
    }

    #[test]
    fn single_precision_curve() {
        let c = equity_preset::<f32>();
        assert_eq!(c.eval_d2_slope(0.008).unwrap(), 110.0_f32);
        assert!((c.eval_d1(-0.04).unwrap() + 331.94).abs() < 1e-3);
    }
}
