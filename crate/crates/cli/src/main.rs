use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use d2d_mimo::analytic::{d2d_coverage, CueCoverage};
use d2d_mimo::metrics::{self, CoverageCurve, NetworkMetrics};
use d2d_mimo::montecarlo::{empirical_coverage, simulate, UserType};
use d2d_mimo::sweep::{
    self, analytic_rates, emit_csv, emit_json, load_config, mc_rates, parse_beta_db, parse_lambda_grid,
    parse_tc_grid, LoadedConfig, Mode, RatePair, RunMeta, SweepOptions, Units, ValidateOptions,
};
use d2d_mimo::{Error, SystemParams};

/// Coverage, sum rate and energy efficiency of a massive-MIMO downlink with
/// an underlaid Poisson field of D2D pairs.
#[derive(Parser, Debug)]
#[command(name = "d2dmimo", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration; missing fields take the reference defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Monte Carlo trials per user type.
    #[arg(long, global = true, value_name = "N")]
    trials: Option<u64>,
    /// Master seed of the simulator.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    /// Output file, or `-` for stdout. A `.json` extension selects JSON for `sweep`.
    #[arg(long, global = true, value_name = "PATH|-", default_value = "-")]
    out: PathBuf,
    /// Rate and efficiency units: si (bit/s, bit/J) or mbit (Mbit/s, Mbit/J).
    #[arg(long, global = true, default_value = "si", value_parser = parse_units)]
    units: Units,
    /// Scale the thermal noise by the receiver noise figure.
    #[arg(long, global = true, value_name = "BOOL", action = clap::ArgAction::Set)]
    apply_noise_figure: Option<bool>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Suppress progress output on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coverage probability curves of both user types.
    Coverage(PointArgs),
    /// Rate-maximizing thresholds and average rates.
    Rate(PointArgs),
    /// Sum rate, power and efficiency over a (t_c, lambda_d) grid.
    Sweep(SweepArgs),
    /// Closed-form coverage against simulation.
    Validate(ValidateArgs),
    /// Breakdown of consumed power.
    Power(PowerArgs),
}

#[derive(Args, Debug)]
struct PointArgs {
    /// Number of BS antennas.
    #[arg(long)]
    tc: Option<u32>,
    /// D2D density in m^-2.
    #[arg(long = "lambda-d", value_name = "LAMBDA")]
    lambda_d: Option<f64>,
    #[arg(long, default_value = "analytic", value_parser = parse_mode)]
    mode: Mode,
    /// Threshold grid in dB (coverage only).
    #[arg(long = "beta-db", value_name = "LO:HI:N", default_value = "-10:20:13", allow_hyphen_values = true)]
    beta_db: String,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Antenna grid: N, a,b,c or start:stop:step (inclusive).
    #[arg(long)]
    tc: Option<String>,
    /// Density grid: x, a,b,c, lo:hi:N or lo:hi:Nlog.
    #[arg(long = "lambda-d", value_name = "GRID")]
    lambda_d: Option<String>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Replace numerically failed analytic rows by simulated ones.
    #[arg(long)]
    fallback_mc: bool,
    /// Make every analytic row fail (exercises the fallback path).
    #[arg(long, hide = true)]
    inject_analytic_failure: bool,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    tc: Option<u32>,
    #[arg(long = "lambda-d", value_name = "LAMBDA")]
    lambda_d: Option<f64>,
    #[arg(long = "beta-db", value_name = "LO:HI:N", default_value = "-10:20:13", allow_hyphen_values = true)]
    beta_db: String,
    /// Shift added to every analytic value (detector self-test).
    #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
    inject_analytic_offset: f64,
}

#[derive(Args, Debug)]
struct PowerArgs {
    #[arg(long)]
    tc: Option<u32>,
    #[arg(long = "lambda-d", value_name = "LAMBDA")]
    lambda_d: Option<f64>,
}

fn parse_units(s: &str) -> Result<Units, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Process outcome other than success.
enum Failure {
    Usage(String),
    Validation,
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation) => ExitCode::from(2),
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let mut config = match &cli.common.config {
        Some(path) => load_config(path)?,
        None => LoadedConfig::default(),
    };
    if let Some(t) = cli.common.trials {
        config.sim.trials = t;
    }
    if let Some(s) = cli.common.seed {
        config.sim.master_seed = s;
    }
    if let Some(f) = cli.common.apply_noise_figure {
        config.params.apply_noise_figure = f;
    }
    match cli.command {
        Command::Coverage(a) => coverage(&mut config, &cli.common, a),
        Command::Rate(a) => rate(&mut config, &cli.common, a),
        Command::Sweep(a) => run_sweep(&mut config, &cli.common, a),
        Command::Validate(a) => validate(&mut config, &cli.common, a),
        Command::Power(a) => power(&mut config, &cli.common, a),
    }
}

/// Applies single-point overrides and checks the resulting parameter set.
fn point_params(config: &mut LoadedConfig, tc: Option<u32>, lambda_d: Option<f64>) -> Result<SystemParams, Failure> {
    if let Some(tc) = tc {
        config.params.t_c = tc;
    }
    if let Some(l) = lambda_d {
        config.params.lambda_d = l;
    }
    config.sim.validate()?;
    config.params.ensure_valid()?;
    Ok(config.params.clone())
}

fn open_out(path: &Path) -> Result<Box<dyn Write>, Failure> {
    if path == Path::new("-") {
        Ok(Box::new(io::stdout().lock()))
    } else {
        let f = std::fs::File::create(path)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        Ok(Box::new(io::BufWriter::new(f)))
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure::Usage(format!("write failed: {e}"))
}

fn note(common: &Common, msg: &str) {
    if !common.quiet {
        eprintln!("{msg}");
    }
}

fn modes(mode: Mode) -> &'static [&'static str] {
    match mode {
        Mode::Analytic => &["analytic"],
        Mode::Mc => &["mc"],
        Mode::Both => &["analytic", "mc"],
    }
}

fn coverage(config: &mut LoadedConfig, common: &Common, a: PointArgs) -> Outcome {
    let params = point_params(config, a.tc, a.lambda_d)?;
    let betas = parse_beta_db(&a.beta_db)?;
    let mut curves = Vec::new();
    for &mode in modes(a.mode) {
        for user_type in [UserType::D2d, UserType::Cellular] {
            let curve = if mode == "analytic" {
                let values = match user_type {
                    UserType::D2d => betas.iter().map(|&b| d2d_coverage(&params, b)).collect::<Result<Vec<_>, _>>()?,
                    UserType::Cellular => {
                        let cov = CueCoverage::new(&params)?;
                        betas.iter().map(|&b| cov.at(b)).collect::<Result<Vec<_>, _>>()?
                    }
                };
                CoverageCurve::analytic(user_type, betas.clone(), values)?
            } else {
                note(common, &format!("simulating {user_type} ({} trials)", config.sim.trials));
                let batch = simulate(&params, &config.sim, user_type)?;
                CoverageCurve::empirical(user_type, &empirical_coverage(&batch, &betas)?)?
            };
            curves.push((mode, curve));
        }
    }
    let mut out = open_out(&common.out)?;
    writeln!(out, "user_type,mode,beta_db,beta,coverage,half_width_95").map_err(io_failure)?;
    for (mode, c) in &curves {
        for (i, (&b, &p)) in c.betas.iter().zip(&c.coverage).enumerate() {
            let hw = c.half_width.as_ref().map(|h| format!("{:e}", h[i])).unwrap_or_default();
            writeln!(out, "{},{mode},{:e},{b:e},{p:e},{hw}", c.user_type, 10.0 * b.log10()).map_err(io_failure)?;
        }
    }
    out.flush().map_err(io_failure)
}

fn rate(config: &mut LoadedConfig, common: &Common, a: PointArgs) -> Outcome {
    let params = point_params(config, a.tc, a.lambda_d)?;
    let scale = match common.units {
        Units::Si => 1.0,
        Units::Mbit => 1e-6,
    };
    let unit = match common.units {
        Units::Si => "bps",
        Units::Mbit => "mbps",
    };
    let mut results: Vec<(&str, RatePair)> = Vec::new();
    for &mode in modes(a.mode) {
        let pair = if mode == "analytic" {
            analytic_rates(&params, &config.search)?
        } else {
            note(common, &format!("simulating ({} trials per user type)", config.sim.trials));
            mc_rates(&params, &config.sim, &config.search)?
        };
        results.push((mode, pair));
    }
    let mut out = open_out(&common.out)?;
    writeln!(out, "user_type,mode,beta_star,beta_star_db,rate_{unit},coverage_at_star,rate_stderr,boundary_warning")
        .map_err(io_failure)?;
    for (mode, pair) in &results {
        for (user_type, r, se) in [("d2d", pair.d2d, pair.d2d_stderr), ("cellular", pair.cue, pair.cue_stderr)] {
            if r.boundary_warning {
                note(common, &format!("warning: {user_type} rate still increasing at the top of the search window"));
            }
            writeln!(
                out,
                "{user_type},{mode},{:e},{:e},{:e},{:e},{},{}",
                r.beta_star,
                10.0 * r.beta_star.log10(),
                r.rate * scale,
                r.coverage_at_star,
                se.map(|s| format!("{:e}", s * scale)).unwrap_or_default(),
                r.boundary_warning
            )
            .map_err(io_failure)?;
        }
    }
    out.flush().map_err(io_failure)
}

fn run_sweep(config: &mut LoadedConfig, common: &Common, a: SweepArgs) -> Outcome {
    if let Some(tc) = &a.tc {
        config.grid.tc_values = parse_tc_grid(tc)?;
    }
    if let Some(l) = &a.lambda_d {
        config.grid.lambda_values = parse_lambda_grid(l)?;
    }
    if let Some(m) = a.mode {
        config.grid.mode = m;
    }
    config.validate()?;
    let total = config.grid.points().len() * modes(config.grid.mode).len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let rows = sweep::run_sweep(config, SweepOptions { fallback_mc: a.fallback_mc, inject_analytic_failure: a.inject_analytic_failure }, |row| {
        let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
        if !common.quiet {
            let status = row.failure.as_deref().map(|f| format!(" FAILED: {f}")).unwrap_or_default();
            eprintln!("[{k}/{total}] t_c={} lambda_d={:e} {}{status}", row.tc, row.lambda_d, row.mode.as_str());
        }
    })?;
    let json = common.out.extension().is_some_and(|e| e == "json");
    if json {
        emit_json(&rows, &RunMeta::new(config, common.units), &common.out)?;
    } else {
        emit_csv(&rows, common.units, &common.out)?;
    }
    if rows.iter().any(|r| r.boundary_warning) {
        note(common, "warning: some rate searches hit the top of the threshold window");
    }
    match sweep::first_failure(&rows) {
        Some(e) => Err(Failure::Numerical(format!("{e} (rerun with --fallback-mc)"))),
        None => Ok(()),
    }
}

fn validate(config: &mut LoadedConfig, common: &Common, a: ValidateArgs) -> Outcome {
    point_params(config, a.tc, a.lambda_d)?;
    let options = ValidateOptions {
        betas: parse_beta_db(&a.beta_db)?,
        trials: None,
        analytic_offset: a.inject_analytic_offset,
    };
    note(common, &format!("validating with {} trials per user type", config.sim.trials));
    let report = sweep::validate_command(config, &options)?;
    let mut out = open_out(&common.out)?;
    report.write_csv(&mut out)?;
    out.flush().map_err(io_failure)?;
    if report.passed() {
        note(common, &format!("all {} checks passed", report.rows.len()));
        Ok(())
    } else {
        eprintln!("{} of {} checks failed", report.failures(), report.rows.len());
        Err(Failure::Validation)
    }
}

fn power(config: &mut LoadedConfig, common: &Common, a: PowerArgs) -> Outcome {
    let p = point_params(config, a.tc, a.lambda_d)?;
    let pm = &config.power;
    let n_d2d = p.mean_d2d_count();
    let total = metrics::total_power(&p, pm);
    let parts = [
        ("bs_transmit", p.p_c / pm.eta),
        ("d2d_transmit", n_d2d * p.p_d / pm.eta),
        ("load_independent", pm.c0),
        ("antennas", p.t_c as f64 * pm.c1),
        ("handsets", (p.u_c as f64 + 2.0 * n_d2d) * pm.c2),
        ("total", total),
    ];
    let mut out = open_out(&common.out)?;
    writeln!(out, "component,watts").map_err(io_failure)?;
    for (name, w) in parts {
        writeln!(out, "{name},{w:e}").map_err(io_failure)?;
    }
    out.flush().map_err(io_failure)?;
    // keep the identity visible in debug builds
    debug_assert!((NetworkMetrics::new(&p, pm, 0.0, 0.0)?.total_power - total).abs() < 1e-12);
    Ok(())
}
