//! Least squares by Householder QR.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `min ||A x - b||_2` for one or more right-hand sides sharing the
/// design `A`, given column-major storage (`columns[j][i] = A[i][j]`).
///
/// The factorization is applied to every right-hand side in place, so the
/// normal equations are never formed. Returns one coefficient vector per
/// right-hand side.
pub fn solve_least_squares<T: Scalar>(
    mut columns: Vec<Vec<T>>,
    mut rhs: Vec<Vec<T>>,
) -> Result<Vec<Vec<T>>> {
    let p = columns.len();
    if p == 0 {
        return Err(Error::Singular("design has no columns".into()));
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) || rhs.iter().any(|b| b.len() != n) {
        return Err(Error::Domain("least-squares dimensions disagree".into()));
    }
    if n < p {
        return Err(Error::Rank { needed: p, got: n });
    }

    let tol = T::epsilon() * T::lit(n.max(p) as f64);
    let mut diag = vec![T::zero(); p];

    for k in 0..p {
        let col_scale = norm(&columns[k]);
        let (head, tail) = columns.split_at_mut(k + 1);
        let v = &mut head[k][k..];
        let sub_norm = norm(v);
        if !(sub_norm > tol * col_scale) || sub_norm == T::zero() {
            return Err(Error::Singular(format!(
                "column {k} is (numerically) dependent on earlier columns"
            )));
        }
        let alpha = if v[0] > T::zero() { -sub_norm } else { sub_norm };
        v[0] = v[0] - alpha;
        let vtv = v.iter().map(|&x| x * x).sum::<T>();
        diag[k] = alpha;

        for col in tail.iter_mut() {
            reflect(v, vtv, &mut col[k..]);
        }
        for b in rhs.iter_mut() {
            reflect(v, vtv, &mut b[k..]);
        }
    }

    // Back substitution against R (strict upper part lives in `columns`).
    let solutions = rhs
        .iter()
        .map(|b| {
            let mut x = vec![T::zero(); p];
            for i in (0..p).rev() {
                let mut s = b[i];
                for j in i + 1..p {
                    s = s - columns[j][i] * x[j];
                }
                x[i] = s / diag[i];
            }
            x
        })
        .collect();
    Ok(solutions)
}

#[inline]
fn reflect<T: Scalar>(v: &[T], vtv: T, target: &mut [T]) {
    let dot = v.iter().zip(target.iter()).map(|(&a, &b)| a * b).sum::<T>();
    let scale = (dot + dot) / vtv;
    for (t, &vi) in target.iter_mut().zip(v) {
        *t = *t - scale * vi;
    }
}

/// Euclidean norm with scaling against overflow/underflow.
fn norm<T: Scalar>(x: &[T]) -> T {
    let max = x.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if max == T::zero() {
        return T::zero();
    }
    let s = x.iter().map(|&v| (v / max) * (v / max)).sum::<T>();
    max * s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_system() {
        // [[2, 1], [1, 3]] x = [3, 5] -> x = [0.8, 1.4]
        let cols: Vec<Vec<f64>> = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_least_squares(cols, vec![vec![3.0, 5.0]]).unwrap();
        assert!((x[0][0] - 0.8).abs() < 1e-14);
        assert!((x[0][1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn overdetermined_line_fit() {
        // y = 1 + 2x with symmetric noise that cancels in the fit.
        let xs = [0.0, 1.0, 2.0, 3.0];
        let noise = [0.1, -0.1, -0.1, 0.1];
        let ys: Vec<f64> = xs.iter().zip(noise).map(|(x, e)| 1.0 + 2.0 * x + e).collect();
        let cols = vec![vec![1.0; 4], xs.to_vec()];
        let x = solve_least_squares(cols, vec![ys]).unwrap();
        assert!((x[0][0] - 1.0).abs() < 1e-12);
        assert!((x[0][1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dependent_columns_are_singular() {
        let cols = vec![vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0]];
        let err = solve_least_squares(cols, vec![vec![1.0, 2.0, 3.0]]).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
    }

    #[test]
    fn underdetermined_is_rank_error() {
        let cols = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            solve_least_squares(cols, vec![vec![1.0]]),
            Err(Error::Rank { .. })
        ));
    }

    #[test]
    fn multiple_rhs_share_factorization() {
        let cols = vec![vec![1.0_f32, 1.0, 1.0], vec![0.0, 1.0, 2.0]];
        let x = solve_least_squares(cols, vec![vec![1.0, 1.0, 1.0], vec![0.0, 2.0, 4.0]]).unwrap();
        assert!((x[0][0] - 1.0).abs() < 1e-5 && x[0][1].abs() < 1e-5);
        assert!(x[1][0].abs() < 1e-5 && (x[1][1] - 2.0).abs() < 1e-5);
    }
}
