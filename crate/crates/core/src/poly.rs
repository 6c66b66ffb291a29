//! Dense and piecewise polynomials with constant-first coefficient storage.

use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// A polynomial `c[0] + c[1] x + ... + c[d] x^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> PolyCoeffs<T> {
    /// Builds a polynomial from constant-first coefficients. At least one
    /// coefficient is required and all must be finite.
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(domain("polynomial needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(domain("polynomial coefficients must be finite"));
        }
        Ok(Self { coeffs })
    }

    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| T::lit(c)).collect())
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![T::zero()],
        }
    }

    pub fn constant(c: T) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Horner evaluation.
    #[inline]
    pub fn eval(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::lit(k as f64))
            .collect();
        Self { coeffs }
    }
}

/// Piecewise polynomial over half-open intervals `[b_k, b_{k+1})`.
///
/// With breakpoints `b_0 < ... < b_{m-1}` there are `m + 1` segments:
/// segment 0 covers `(-inf, b_0)`, segment `m` covers `[b_{m-1}, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly<T> {
    breakpoints: Vec<T>,
    segments: Vec<PolyCoeffs<T>>,
}

/// Left and right limits of a piecewise polynomial at one breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakpointJump<T> {
    pub at: T,
    pub left: T,
    pub right: T,
}

impl<T: Scalar> BreakpointJump<T> {
    pub fn jump(&self) -> T {
        self.right - self.left
    }
}

impl<T: Scalar> PiecewisePoly<T> {
    pub fn new(breakpoints: Vec<T>, segments: Vec<PolyCoeffs<T>>) -> Result<Self> {
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(domain("breakpoints must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain("breakpoints must be strictly ascending"));
        }
        if segments.len() != breakpoints.len() + 1 {
            return Err(domain(format!(
                "{} breakpoints need {} segments, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                segments.len()
            )));
        }
        Ok(Self {
            breakpoints,
            segments,
        })
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[PolyCoeffs<T>] {
        &self.segments
    }

    /// Index of the segment containing `x`; a breakpoint belongs to the
    /// segment on its right.
    #[inline]
    pub fn segment_index(&self, x: T) -> usize {
        self.breakpoints.partition_point(|&b| b <= x)
    }

    #[inline]
    pub fn eval(&self, x: T) -> T {
        self.segments[self.segment_index(x)].eval(x)
    }

    pub fn try_eval(&self, x: T) -> Result<T> {
        if !x.is_finite() {
            return Err(Error::Domain(format!(
                "evaluation point must be finite, got {x}"
            )));
        }
        Ok(self.eval(x))
    }

    /// Left/right limits at every breakpoint.
    pub fn continuity_report(&self) -> Vec<BreakpointJump<T>> {
        self.breakpoints
            .iter()
            .enumerate()
            .map(|(k, &b)| BreakpointJump {
                at: b,
                left: self.segments[k].eval(b),
                right: self.segments[k + 1].eval(b),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_matches_naive() {
        let p = PolyCoeffs::<f64>::from_f64(&[1.0, -2.0, 0.5, 3.0]).unwrap();
        let x = 0.7_f64;
        let naive = 1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x.powi(3);
        assert!((p.eval(x) - naive).abs() < 1e-15);
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn derivative_of_cubic() {
        let p = PolyCoeffs::<f64>::from_f64(&[1.0, -2.0, 0.5, 3.0]).unwrap();
        assert_eq!(p.derivative().coeffs(), &[-2.0, 1.0, 9.0]);
        assert_eq!(PolyCoeffs::<f64>::constant(4.0).derivative().coeffs(), &[0.0]);
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(PolyCoeffs::<f64>::new(vec![]).is_err());
        assert!(PolyCoeffs::<f64>::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn breakpoint_goes_right() {
        let pp = PiecewisePoly::new(
            vec![0.0_f64],
            vec![
                PolyCoeffs::constant(-1.0),
                PolyCoeffs::constant(1.0),
            ],
        )
        .unwrap();
        assert_eq!(pp.eval(-1e-300), -1.0);
        assert_eq!(pp.eval(0.0), 1.0);
        assert_eq!(pp.continuity_report()[0].jump(), 2.0);
    }

    #[test]
    fn piecewise_validation() {
        let seg = || PolyCoeffs::<f64>::constant(0.0);
        assert!(PiecewisePoly::new(vec![1.0, 0.0], vec![seg(), seg(), seg()]).is_err());
        assert!(PiecewisePoly::new(vec![0.0, 0.0], vec![seg(), seg(), seg()]).is_err());
        assert!(PiecewisePoly::new(vec![0.0], vec![seg()]).is_err());
        let pp = PiecewisePoly::new(vec![0.0], vec![seg(), seg()]).unwrap();
        assert!(pp.try_eval(f64::INFINITY).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let p = PolyCoeffs::<f32>::from_f64(&[0.0, 0.33]).unwrap();
        assert_eq!(p.eval(2.0_f32), 0.66_f32);
    }
}
