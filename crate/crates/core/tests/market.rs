use prospect_arch::demand::{equity_preset, fx_preset};
use prospect_arch::market::{
    clearing_residual, derive_arch, simulate_prices, simulate_yields, simulate_yields_on_stream,
    MarketParams,
};
use prospect_arch::{Curve, Params};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

fn presets() -> Vec<(Curve, Params)> {
    vec![
        (equity_preset(), MarketParams::equity()),
        (fx_preset(), MarketParams::fx()),
    ]
}

#[test]
fn derived_vol_matches_direct_formula() {
    let (eq, eqp) = &presets()[0];
    let m = derive_arch(eq, eqp);
    let want = 27.0 / (252f64.sqrt() * 150.0);
    assert!((m.vol(0.008) - want).abs() < 1e-15);
    assert!((m.vol(0.008) - 0.011339).abs() < 5e-7);

    let (fx, fxp) = &presets()[1];
    let m = derive_arch(fx, fxp);
    assert!((m.vol(-0.002) - 20.0 / (252f64.sqrt() * 280.0)).abs() < 1e-15);
    assert!((m.vol(-0.002) - 0.004499).abs() < 1e-6);
}

#[test]
fn step_from_zero_yield_is_vol() {
    let (eq, eqp) = &presets()[0];
    let m = derive_arch(eq, eqp);
    let d2p0 = 110.0 * (-150.0 * 0.008f64.powf(1.5)).exp();
    let want = 27.0 / (252f64.sqrt() * (40.0 + d2p0));
    assert!((m.step(0.0, 1.0) - want).abs() < 1e-15);
}

#[test]
fn residual_matches_independent_expression() {
    let mut rng = StdRng::seed_from_u64(3);
    for (curve, p) in presets() {
        for _ in 0..500 {
            let y: f64 = rng.gen_range(-0.1..0.1);
            let yn: f64 = rng.gen_range(-0.1..0.1);
            let dw: f64 = rng.gen_range(-0.2..0.2);
            let d1 = curve.eval_d1(y).unwrap();
            let s = curve.eval_d2_slope(y).unwrap();
            let want = p.nu * dw + p.xi * yn + d1 * p.dt + s * (yn - y);
            let got = clearing_residual(&curve, &p, y, yn, dw);
            let scale = (p.nu * dw).abs() + (p.xi * yn).abs() + (d1 * p.dt).abs() + (s * (yn - y)).abs();
            assert!((got - want).abs() <= 1e-15 * scale.max(1e-300), "{got} vs {want}");
        }
    }
}

#[test]
fn residual_shifts_linearly_in_next_yield() {
    let (curve, p) = &presets()[0];
    let (y, yn, dw, delta) = (0.013, -0.004, 0.02, 1e-3);
    let r0 = clearing_residual(curve, p, y, yn, dw);
    let r1 = clearing_residual(curve, p, y, yn + delta, dw);
    let slope = p.xi + curve.eval_d2_slope(y).unwrap();
    assert!((r1 - r0 - slope * delta).abs() < 1e-12);
}

#[test]
fn derived_vol_positive_on_wide_range() {
    for (curve, p) in presets() {
        let m = derive_arch(&curve, &p);
        for i in 0..=1000 {
            let y = -0.5 + i as f64 / 1000.0;
            assert!(m.raw_vol(y) > 0.0);
        }
    }
}

#[test]
fn equity_drift_reverts_outside_band() {
    let (curve, p) = &presets()[0];
    let m = derive_arch(curve, p);
    for i in 1..=180 {
        let y = 0.02 + i as f64 * 1e-3;
        assert!(m.drift(y) < y, "y = {y}");
        assert!(m.drift(-y) > -y, "y = {}", -y);
    }
}

#[test]
fn parallel_streams_match_serial() {
    let (curve, p) = &presets()[0];
    let m = derive_arch(curve, p);
    let serial: Vec<_> = (0..16)
        .map(|s| simulate_yields_on_stream(&m, 0.0, 300, 5, s).unwrap().series)
        .collect();
    for threads in [1, 2, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let par: Vec<_> = pool.install(|| {
            (0..16u64)
                .into_par_iter()
                .map(|s| simulate_yields_on_stream(&m, 0.0, 300, 5, s).unwrap().series)
                .collect()
        });
        assert_eq!(par, serial);
    }
}

#[test]
fn price_log_differences_are_the_yields() {
    let (curve, p) = &presets()[1];
    let m = derive_arch(curve, p);
    let (p0, p1) = (0.6493, 0.6492);
    let prices = simulate_prices(&m, p0, p1, 400, 9).unwrap().series;
    let yields = simulate_yields(&m, (p1 / p0).ln(), 399, 9).unwrap().series;
    let v = prices.values();
    for i in 1..v.len() {
        let y = (v[i] / v[i - 1]).ln();
        assert!((y - yields.values[i - 1]).abs() < 1e-12);
    }
}

#[test]
fn single_precision_tracks_double() {
    let m64 = derive_arch(&equity_preset::<f64>(), &MarketParams::<f64>::equity());
    let m32 = derive_arch(&equity_preset::<f32>(), &MarketParams::<f32>::equity());
    for i in 0..=20 {
        let y = -0.05 + i as f64 * 0.005;
        let rel = |a: f32, b: f64| ((a as f64 - b) / b).abs();
        assert!(rel(m32.vol(y as f32), m64.vol(y)) < 1e-5);
        assert!((m32.drift(y as f32) as f64 - m64.drift(y)).abs() < 1e-6);
    }
}
