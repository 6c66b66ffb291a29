mod common;

use prospect_arch::calibration::{
    bandwidth, default_grid, estimate_curves, fit_poly, local_fit, local_fit_pairs, log_returns,
    linspace, paper_surrogates_equity, paper_surrogates_fx, G2_FLOOR,
};
use prospect_arch::{PriceSeries, YieldSeries};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn log_returns_examples() {
    let p = PriceSeries::new(vec![100.0, 101.0, 99.0]).unwrap();
    let y = log_returns(&p).unwrap();
    assert_eq!(y.values, vec![(101.0f64).ln() - (100.0f64).ln(), (99.0f64).ln() - (101.0f64).ln()]);
    assert!(((y.values[0]) - 1.01f64.ln()).abs() < 1e-15);
    let e = log_returns(&PriceSeries::new(vec![1.0, std::f64::consts::E]).unwrap()).unwrap();
    assert!((e.values[0] - 1.0).abs() < 1e-15);
    let flat = log_returns(&PriceSeries::new(vec![5.0; 4]).unwrap()).unwrap();
    assert!(flat.values.iter().all(|&v| v == 0.0));
}

#[test]
fn bandwidth_examples() {
    let y = YieldSeries::<f64> { values: vec![-0.05, 0.01, 0.05, 0.0] };
    assert!((bandwidth(&y, 2.0).unwrap() - 0.05).abs() < 1e-17);
    assert_eq!(bandwidth(&y, 4.0).unwrap() * 2.0, bandwidth(&y, 2.0).unwrap());
}

#[test]
fn single_point_estimate_equals_local_fit() {
    let y = common::equity_yields(3000, 4);
    let est = estimate_curves(&y, &[0.001], 3.5).unwrap();
    let h = bandwidth(&y, 3.5).unwrap();
    let fit = local_fit(&y, 0.001, h).unwrap();
    assert_eq!(est.f_hat[0], fit.beta1);
    assert_eq!(est.g2_hat[0], fit.alpha1 - fit.beta1 * fit.beta1);
}

#[test]
fn affine_data_reproduced_at_every_point() {
    let mut rng = StdRng::seed_from_u64(8);
    let pred: Vec<f64> = (0..400).map(|_| rng.gen_range(-0.05..0.05)).collect();
    let (a, b) = (0.0012, -0.35);
    let resp: Vec<f64> = pred.iter().map(|&p| a + b * p).collect();
    for i in 0..=20 {
        let x = -0.04 + i as f64 * 0.004;
        let fit = local_fit_pairs(&pred, &resp, x, 0.02).unwrap();
        assert!((fit.beta1 - (a + b * x)).abs() < 1e3 * f64::EPSILON * 0.02, "x = {x}");
    }
}

#[test]
fn far_points_have_no_influence() {
    let mut rng = StdRng::seed_from_u64(2);
    let mut pred: Vec<f64> = (0..300).map(|_| rng.gen_range(-0.03..0.03)).collect();
    let resp: Vec<f64> = (0..300).map(|_| rng.gen_range(-0.02..0.02)).collect();
    pred[0] = 0.9;
    let h = 0.01;
    let before = local_fit_pairs(&pred, &resp, 0.0, h).unwrap();
    pred[0] = 0.8;
    let after = local_fit_pairs(&pred, &resp, 0.0, h).unwrap();
    assert!((before.beta1 - after.beta1).abs() < 1e-9);
    assert!((before.alpha1 - after.alpha1).abs() < 1e-9);
}

#[test]
fn clamp_flags_mark_floored_points() {
    let y = common::equity_yields(4000, 6);
    let grid = default_grid(&y).unwrap();
    let est = estimate_curves(&y, &grid, 5.0).unwrap();
    let h = est.h;
    for (i, &x) in grid.iter().enumerate() {
        if !est.valid[i] {
            continue;
        }
        assert!(est.g2_hat[i] >= G2_FLOOR);
        let fit = local_fit(&y, x, h).unwrap();
        if est.clamped[i] {
            assert!(fit.alpha1 - fit.beta1 * fit.beta1 < G2_FLOOR);
        } else {
            assert_eq!(est.g2_hat[i], fit.alpha1 - fit.beta1 * fit.beta1);
        }
    }
}

// Both estimates are scored on one grid: the central half of the shorter
// window's range, where both windows have data.
#[test]
fn drift_error_shrinks_with_more_data() {
    let model = common::equity_model();
    let long = common::equity_yields(20_000, 21);
    let short = YieldSeries { values: long.values[long.len() - 2000..].to_vec() };
    let (lo, hi) = common::yield_range(&short);
    let grid = linspace(lo + 0.25 * (hi - lo), hi - 0.25 * (hi - lo), 51);
    let err = |y: &YieldSeries<f64>| {
        let est = estimate_curves(y, &grid, 3.5).unwrap();
        assert!(est.valid.iter().all(|&v| v));
        est.valid_points().map(|(x, f, _)| (f - model.drift(x)).abs()).sum::<f64>() / grid.len() as f64
    };
    let (e_short, e_long) = (err(&short), err(&long));
    assert!(e_long < e_short, "{e_long} vs {e_short}");
}

// Recovery error varies a lot between paths, so the bound is on the median
// over nine seeds.
#[test]
fn synthetic_drift_recovered_within_tenth_of_range() {
    let model = common::equity_model();
    let mut ratios: Vec<f64> = (1..=9)
        .map(|seed| {
            let y = common::equity_yields(20_000, seed);
            let est = estimate_curves(&y, &default_grid(&y).unwrap(), 3.5).unwrap();
            let (mae, range) = common::central_drift_error(&est, &model, &y);
            mae / range
        })
        .collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!(ratios[4] < 0.1, "{ratios:?}");
}

#[test]
fn fit_poly_exact_quadratic_and_constant() {
    let xs: Vec<f64> = (0..12).map(|i| -0.1 + i as f64 * 0.02).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| 0.5 - 3.0 * x + 40.0 * x * x).collect();
    let p = fit_poly(&xs, &ys, 2).unwrap();
    for (c, w) in p.coeffs().iter().zip([0.5, -3.0, 40.0]) {
        assert!((c - w).abs() < 1e-10);
    }
    let c = fit_poly(&xs, &ys, 0).unwrap();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    assert!((c.coeffs()[0] - mean).abs() < 1e-14);
    assert!(fit_poly(&[1.0, 1.0, 2.0], &[0.0, 1.0, 2.0], 2).is_err());
}

#[test]
fn fit_poly_is_least_squares_optimal() {
    let mut rng = StdRng::seed_from_u64(5);
    let xs: Vec<f64> = (0..200).map(|_| rng.gen_range(-0.1..0.1)).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| 0.01 - 0.1 * x + 5.0 * x * x + rng.gen_range(-0.002..0.002)).collect();
    let p = fit_poly(&xs, &ys, 4).unwrap();
    let sse = |c: &[f64]| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let v = c.iter().rev().fold(0.0, |acc, &k| acc * x + k);
                (v - y).powi(2)
            })
            .sum()
    };
    let base = sse(p.coeffs());
    for i in 0..p.coeffs().len() {
        for d in [1e-6, -1e-6] {
            let mut c = p.coeffs().to_vec();
            c[i] += d;
            assert!(sse(&c) >= base, "coefficient {i} {d:+e}");
        }
    }
}

#[test]
fn fitted_derived_vol_has_published_sign_pattern() {
    let model = common::equity_model();
    let xs: Vec<f64> = (0..=200).map(|i| -0.1 + i as f64 * 1e-3).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| model.vol(x)).collect();
    let p = fit_poly(&xs, &gs, 4).unwrap();
    let signs: Vec<bool> = p.coeffs().iter().map(|&c| c > 0.0).collect();
    assert_eq!(signs, vec![true, false, true, true, false], "{:?}", p.coeffs());
    let (_, g_published) = paper_surrogates_equity::<f64>();
    let published_signs: Vec<bool> = g_published.coeffs().iter().map(|&c| c > 0.0).collect();
    assert_eq!(signs, published_signs);
}

#[test]
fn published_surrogates() {
    let (f, _) = paper_surrogates_equity::<f64>();
    assert_eq!(f.coeffs()[0], -8.948e-5);
    let (f, g) = paper_surrogates_fx::<f64>();
    assert_eq!(f.coeffs(), &[0.0, 0.33]);
    assert_eq!(g.coeffs()[0], 4.328e-3);
    assert_eq!(g.degree(), 5);
}
