mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{
    CalibrateArgs, Cli, Command, Common, ConvergenceArgs, Market, ModelKind, PriceArgs,
    Sampling, SimulateArgs, SurfaceArgs, VegaArgs,
};
use prospect_arch::calibration::{self, EQUITY_DEGREES};
use prospect_arch::data::{self, CsvRow};
use prospect_arch::demand::{self, DemandCurve};
use prospect_arch::market::{self, ArchModel, MarketParams};
use prospect_arch::pricing::{self, McOptions, OptionSpec};
use prospect_arch::{linspace, Poly};

/// Exit 2: the invocation itself is wrong. Exit 1: it failed while running.
enum Failure {
    Config(String),
    Runtime(String),
}

type Outcome = Result<(), Failure>;

fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Price(a) => cmd_price(a),
        Command::Ivsurface(a) => cmd_ivsurface(a),
        Command::Vegamap(a) => cmd_vegamap(a),
        Command::Convergence(a) => cmd_convergence(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn setup(common: &Common) -> Outcome {
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(runtime)?;
    }
    Ok(())
}

fn print_config(command: &str, fields: &[(&str, String)], common: &Common) {
    let mut line = format!("config: command={command}");
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    line.push_str(&format!(" seed={}", common.seed));
    line.push_str(&format!(
        " threads={}",
        common.threads.map_or("auto".to_string(), |t| t.to_string())
    ));
    line.push_str(&format!(
        " output={}",
        common
            .output
            .as_ref()
            .map_or("-".to_string(), |p| p.display().to_string())
    ));
    eprintln!("{line}");
}

fn emit<R: CsvRow>(rows: &[R], common: &Common) -> Outcome {
    match &common.output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| runtime(format!("cannot create {}: {e}", path.display())))?;
            data::write_csv(rows, BufWriter::new(file)).map_err(runtime)
        }
        None => data::write_csv(rows, io::stdout().lock()).map_err(runtime),
    }
}

/// Summaries go to stdout unless stdout carries the CSV.
fn summary(common: &Common, text: &str) {
    if common.output.is_some() {
        let _ = writeln!(io::stdout(), "{text}");
    } else {
        eprintln!("{text}");
    }
}

fn positive(v: f64, flag: &str) -> Result<f64, Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(config(format!("{flag} must be positive, got {v}")))
    }
}

fn load_curve(path: &str) -> Result<DemandCurve<f64>, Failure> {
    if !Path::new(path).is_file() {
        return Err(config(format!(
            "--preset must be `equity`, `fx` or a readable curve file, got `{path}`"
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| config(format!("{path}: {e}")))?;
    demand::parse_curve(&text).map_err(|e| config(format!("{path}: {e}")))
}

fn cmd_simulate(a: SimulateArgs) -> Outcome {
    setup(&a.common)?;
    let (curve, params, surrogate, (p0, p1)) = match a.preset.as_str() {
        "equity" => (
            demand::equity_preset::<f64>(),
            MarketParams::<f64>::equity(),
            Some(calibration::paper_surrogates_equity::<f64>()),
            (1462.42, 1459.37),
        ),
        "fx" => (
            demand::fx_preset::<f64>(),
            MarketParams::<f64>::fx(),
            Some(calibration::paper_surrogates_fx::<f64>()),
            (0.6493, 0.6492),
        ),
        path => (
            load_curve(path)?,
            MarketParams::<f64>::equity(),
            None,
            (1462.42, 1459.37),
        ),
    };
    let xi = a.xi.unwrap_or(params.xi);
    let nu = a.nu.unwrap_or(params.nu);
    let dt = a.dt.unwrap_or(params.dt);
    let params = MarketParams::new(xi, nu, dt).map_err(|e| config(e.to_string()))?;
    let p0 = positive(a.p0.unwrap_or(p0), "--p0")?;
    let p1 = positive(a.p1.unwrap_or(p1), "--p1")?;
    if a.n < 2 {
        return Err(config(format!("--n must be at least 2, got {}", a.n)));
    }
    let model = match a.model {
        ModelKind::Derived => ArchModel::derived(curve, params),
        ModelKind::Surrogate => {
            let (f, g) = surrogate
                .ok_or_else(|| config("--model surrogate needs preset `equity` or `fx`"))?;
            ArchModel::surrogate(f, g, dt).map_err(|e| config(e.to_string()))?
        }
    };
    print_config(
        "simulate",
        &[
            ("preset", a.preset.clone()),
            ("model", format!("{:?}", a.model).to_lowercase()),
            ("xi", xi.to_string()),
            ("nu", nu.to_string()),
            ("dt", dt.to_string()),
            ("p0", p0.to_string()),
            ("p1", p1.to_string()),
            ("n", a.n.to_string()),
        ],
        &a.common,
    );

    let sim = market::simulate_prices(&model, p0, p1, a.n, a.common.seed).map_err(runtime)?;
    emit(&data::price_rows(&sim.series), &a.common)?;
    let v = sim.series.values();
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    summary(
        &a.common,
        &format!(
            "path: n={} min={min} max={max} final={} vol_clamps={}",
            v.len(),
            v[v.len() - 1],
            sim.vol_clamps
        ),
    );
    Ok(())
}

fn cmd_calibrate(a: CalibrateArgs) -> Outcome {
    setup(&a.common)?;
    if !(a.gamma.is_finite() && a.gamma > 0.0) {
        return Err(config(format!("--gamma must be positive, got {}", a.gamma)));
    }
    if a.grid_points == 0 {
        return Err(config("--grid-points must be at least 1"));
    }
    if !a.input.is_file() {
        return Err(config(format!("input file {} not found", a.input.display())));
    }
    let prices = data::read_price_csv_path(&a.input)
        .map_err(|e| runtime(format!("{}: {e}", a.input.display())))?;
    let window = a.window.unwrap_or(prices.len());
    if window < 3 || window > prices.len() {
        return Err(config(format!(
            "--S must be between 3 and {} (rows in input), got {window}",
            prices.len()
        )));
    }
    print_config(
        "calibrate",
        &[
            ("input", a.input.display().to_string()),
            ("S", window.to_string()),
            ("gamma", a.gamma.to_string()),
            ("grid_points", a.grid_points.to_string()),
        ],
        &a.common,
    );

    let prices = data::tail(&prices, window).map_err(runtime)?;
    let yields = calibration::log_returns(&prices).map_err(runtime)?;
    let grid = calibration::trimmed_grid(&yields, a.grid_points).map_err(runtime)?;
    let est = calibration::estimate_curves(&yields, &grid, a.gamma).map_err(runtime)?;
    emit(&data::estimate_rows(&est), &a.common)?;

    let valid = est.valid.iter().filter(|&&v| v).count();
    let mut text = format!("estimate: h={} valid={valid}/{}", est.h, est.len());
    match calibration::fit_surrogates(&est, EQUITY_DEGREES.0, EQUITY_DEGREES.1) {
        Ok((f, g)) => {
            text.push_str(&format!("\nf_tilde: {:?}\ng_tilde: {:?}", f.coeffs(), g.coeffs()));
        }
        Err(e) => text.push_str(&format!("\nsurrogate fit skipped: {e}")),
    }
    summary(&a.common, &text);
    Ok(())
}

struct Resolved {
    drift: Poly,
    vol: Poly,
    base: OptionSpec,
    opts: McOptions,
}

fn resolve_market(
    m: &Market,
    sampling: Option<&Sampling>,
    strike: f64,
    months: u32,
) -> Result<Resolved, Failure> {
    let ((drift, vol), (p0, p1)) = match m.preset.as_str() {
        "equity" => (
            calibration::paper_surrogates_equity::<f64>(),
            (pricing::BENCHMARK_P0, pricing::BENCHMARK_P1),
        ),
        "fx" => (calibration::paper_surrogates_fx::<f64>(), (0.6493, 0.6492)),
        other => {
            return Err(config(format!(
                "--preset must be `equity` or `fx` for pricing, got `{other}`"
            )))
        }
    };
    let p0 = positive(m.p0.unwrap_or(p0), "--p0")?;
    let p1 = positive(m.p1.unwrap_or(p1), "--p1")?;
    let base =
        OptionSpec::new(strike, months, m.rate, p0, p1).map_err(|e| config(e.to_string()))?;
    let opts = match sampling {
        Some(s) => McOptions {
            antithetic: s.antithetic,
            vol_floor: s.vol_floor,
        },
        None => McOptions::default(),
    };
    if !(opts.vol_floor.is_finite() && opts.vol_floor >= 0.0) {
        return Err(config("--vol-floor must be >= 0"));
    }
    Ok(Resolved {
        drift,
        vol,
        base,
        opts,
    })
}

fn market_fields(m: &Market, r: &Resolved) -> Vec<(&'static str, String)> {
    vec![
        ("preset", m.preset.clone()),
        ("rate", r.base.rate.to_string()),
        ("p0", r.base.p0.to_string()),
        ("p1", r.base.p1.to_string()),
        ("antithetic", r.opts.antithetic.to_string()),
        ("vol_floor", r.opts.vol_floor.to_string()),
    ]
}

fn check_paths(paths: usize, opts: &McOptions) -> Outcome {
    if paths == 0 {
        return Err(config("--paths must be at least 1"));
    }
    if opts.antithetic && paths % 2 == 1 {
        return Err(config("--antithetic needs an even --paths"));
    }
    Ok(())
}

#[derive(serde::Serialize, serde::Deserialize)]
struct PriceRow {
    #[serde(rename = "K")]
    strike: f64,
    #[serde(rename = "T_months")]
    months: u32,
    price: f64,
    std_error: f64,
    paths: usize,
    vol_clamps: u64,
}

impl CsvRow for PriceRow {
    const HEADER: &'static [&'static str] =
        &["K", "T_months", "price", "std_error", "paths", "vol_clamps"];
}

fn cmd_price(a: PriceArgs) -> Outcome {
    setup(&a.common)?;
    let r = resolve_market(&a.market, Some(&a.sampling), a.strike, a.months)?;
    check_paths(a.paths, &r.opts)?;
    let mut fields = vec![
        ("K", a.strike.to_string()),
        ("T_months", a.months.to_string()),
        ("paths", a.paths.to_string()),
    ];
    fields.extend(market_fields(&a.market, &r));
    print_config("price", &fields, &a.common);

    let res = pricing::mc_euro_call_with(&r.drift, &r.vol, &r.base, a.paths, a.common.seed, &r.opts)
        .map_err(runtime)?;
    emit(
        &[PriceRow {
            strike: a.strike,
            months: a.months,
            price: res.price,
            std_error: res.std_error,
            paths: res.paths,
            vol_clamps: res.vol_clamps,
        }],
        &a.common,
    )?;
    summary(
        &a.common,
        &format!("price={} std_error={}", res.price, res.std_error),
    );
    Ok(())
}

fn strike_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>, Failure> {
    positive(min, "--K-min")?;
    positive(max, "--K-max")?;
    if count == 0 || max < min || (count > 1 && max == min) {
        return Err(config(format!(
            "strike grid needs K-min < K-max and K-count >= 1 (K-count 1 uses K-min), got {min}..{max} x {count}"
        )));
    }
    Ok(linspace(min, max, count))
}

fn month_grid(min: u32, max: u32, step: u32) -> Result<Vec<u32>, Failure> {
    if min == 0 || step == 0 || max < min {
        return Err(config(format!(
            "maturity grid needs 1 <= T-min <= T-max and T-step >= 1, got {min}..{max} step {step}"
        )));
    }
    Ok((min..=max).step_by(step as usize).collect())
}

fn cmd_ivsurface(a: SurfaceArgs) -> Outcome {
    setup(&a.common)?;
    let g = &a.grid;
    let ks = strike_grid(g.k_min, g.k_max, g.k_count)?;
    let ts = month_grid(g.t_min, g.t_max, g.t_step)?;
    if !(a.guard >= 0.0) {
        return Err(config("--guard must be >= 0"));
    }
    let r = resolve_market(&a.market, Some(&a.sampling), ks[0], ts[0])?;
    check_paths(a.paths, &r.opts)?;
    let mut fields = vec![
        ("K_min", g.k_min.to_string()),
        ("K_max", g.k_max.to_string()),
        ("K_count", g.k_count.to_string()),
        ("T_min", g.t_min.to_string()),
        ("T_max", g.t_max.to_string()),
        ("T_step", g.t_step.to_string()),
        ("guard", a.guard.to_string()),
        ("paths", a.paths.to_string()),
    ];
    fields.extend(market_fields(&a.market, &r));
    print_config("ivsurface", &fields, &a.common);

    let surface = pricing::iv_surface_with(
        &r.vol,
        &r.base,
        &ks,
        &ts,
        a.paths,
        a.common.seed,
        a.guard,
        &r.opts,
    )
    .map_err(runtime)?;
    emit(&data::surface_rows(&surface), &a.common)?;
    summary(
        &a.common,
        &format!(
            "surface: valid={}/{} vol_clamps={}",
            surface.valid_count(),
            ks.len() * ts.len(),
            surface.vol_clamps
        ),
    );
    Ok(())
}

fn cmd_vegamap(a: VegaArgs) -> Outcome {
    setup(&a.common)?;
    let ks = strike_grid(a.k_min, a.k_max, a.k_count)?;
    let ts = month_grid(a.t_min, a.t_max, a.t_step)?;
    positive(a.sigma, "--sigma")?;
    positive(a.spot, "--spot")?;
    if !a.rate.is_finite() {
        return Err(config("--rate must be finite"));
    }
    print_config(
        "vegamap",
        &[
            ("sigma", a.sigma.to_string()),
            ("spot", a.spot.to_string()),
            ("rate", a.rate.to_string()),
            ("K_min", a.k_min.to_string()),
            ("K_max", a.k_max.to_string()),
            ("K_count", a.k_count.to_string()),
            ("T_min", a.t_min.to_string()),
            ("T_max", a.t_max.to_string()),
            ("T_step", a.t_step.to_string()),
        ],
        &a.common,
    );
    let map = pricing::vega_map(a.spot, a.rate, a.sigma, &ks, &ts).map_err(runtime)?;
    emit(&data::vega_rows(&map), &a.common)
}

fn cmd_convergence(a: ConvergenceArgs) -> Outcome {
    setup(&a.common)?;
    let r = resolve_market(&a.market, None, a.strike, a.months)?;
    if a.trials < 2 {
        return Err(config(format!("--trials must be at least 2, got {}", a.trials)));
    }
    if a.path_counts.is_empty() {
        return Err(config("--path-counts is empty"));
    }
    for &p in &a.path_counts {
        check_paths(p, &r.opts)?;
    }
    let counts: Vec<String> = a.path_counts.iter().map(|p| p.to_string()).collect();
    let mut fields = vec![
        ("K", a.strike.to_string()),
        ("T_months", a.months.to_string()),
        ("path_counts", counts.join(",")),
        ("trials", a.trials.to_string()),
    ];
    fields.extend(market_fields(&a.market, &r));
    print_config("convergence", &fields, &a.common);

    let rows = pricing::convergence_study(
        &r.drift,
        &r.vol,
        &r.base,
        &a.path_counts,
        a.trials,
        a.common.seed,
    )
    .map_err(runtime)?;
    emit(&data::convergence_rows(&rows), &a.common)
}
