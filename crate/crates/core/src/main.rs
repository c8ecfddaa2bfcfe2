use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use minmax_core::estimators::{estimate_minmax, MinMaxOptions};
use minmax_core::geometry::Scenario;
use minmax_core::harness::{
    self, emit_csv, preset, run_experiment, to_csv_string, write_gnuplot, HarnessError,
};

/// Worst-case robust bistatic-range localization and Monte Carlo studies.
#[derive(Parser, Debug)]
#[command(name = "minmax-loc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a Monte Carlo RMSE experiment and write CSV.
    Run(RunArgs),
    /// Estimate one position from a scenario and measured ranges.
    Solve(SolveArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetName {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(
        long,
        value_enum,
        required_unless_present = "config",
        conflicts_with = "config"
    )]
    preset: Option<PresetName>,
    /// Experiment description in JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "n-mc")]
    n_mc: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot data file.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
    #[arg(long, env = "MINMAX_LOC_WORKERS")]
    workers: Option<usize>,
    /// Record mean solve time per estimator (output is then not reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// JSON with `transmitters_m` and `receivers_m` arrays of [x, y].
    #[arg(long)]
    scenario: PathBuf,
    /// M×L ranges in meters, one transmitter per line, no header.
    #[arg(long)]
    ranges: PathBuf,
    #[arg(long = "rho-hat")]
    rho_hat: f64,
    /// Print the estimate as JSON.
    #[arg(long)]
    json: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::Parse(_) => Failure::Config(e.to_string()),
            HarnessError::Io { .. } | HarnessError::Pool(_) => Failure::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Solve(args) => solve(args),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(p), _) => {
            let name = p.to_possible_value().expect("named variant");
            preset(name.get_name())?
        }
        (None, Some(path)) => harness::ExperimentConfig::load(path)?,
        (None, None) => unreachable!("clap enforces one source"),
    };
    if let Some(n) = args.n_mc {
        cfg.n_mc = n;
    }
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    if args.out.is_some() {
        cfg.output = args.out;
    }
    if args.gnuplot.is_some() {
        cfg.gnuplot = args.gnuplot;
    }
    cfg.record_timing |= args.timing;
    cfg.validate()?;

    let result = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => emit_csv(&result, path)?,
        None => print!("{}", to_csv_string(&result)),
    }
    if let Some(path) = &cfg.gnuplot {
        write_gnuplot(&result, path)?;
    }
    Ok(())
}

fn read_ranges(path: &Path) -> Result<DMatrix<f64>, Failure> {
    let bad = |msg: String| Failure::Config(format!("{}: {msg}", path.display()));
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| bad(format!("`{f}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let l = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || l == 0 || rows.iter().any(|r| r.len() != l) {
        return Err(bad("expected a nonempty rectangular table".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), l, |i, j| rows[i][j]))
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.scenario)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.scenario.display())))?;
    let scenario: Scenario = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.scenario.display())))?;
    scenario
        .validate()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let ranges = read_ranges(&args.ranges)?;
    let opts = MinMaxOptions::with_rho(args.rho_hat);
    opts.validate()
        .map_err(|e| Failure::Config(e.to_string()))?;
    if (ranges.nrows(), ranges.ncols()) != (scenario.m(), scenario.l()) {
        return Err(Failure::Config(format!(
            "ranges are {}x{} but the scenario has {} transmitters and {} receivers",
            ranges.nrows(),
            ranges.ncols(),
            scenario.m(),
            scenario.l()
        )));
    }
    let est =
        estimate_minmax(&scenario, &ranges, &opts).map_err(|e| Failure::Runtime(e.to_string()))?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&est).expect("estimate serializes")
        );
        return Ok(());
    }
    let d = &est.diagnostics;
    println!("position_m: {:.6} {:.6}", est.position.x, est.position.y);
    println!("worst_case_radius_m: {:.6e}", d.objective);
    if let Some(status) = d.solver_status {
        println!("solver_status: {status}");
    }
    println!("iterations: {}", d.iterations);
    println!("inflations: {}", d.inflations);
    if let Some(rho) = d.rho_hat {
        println!("rho_hat_m: {rho}");
    }
    if let Some(g) = d.relaxation_gap {
        println!(
            "relaxation_gap: lambda {:.3e} m^2, range_square {:.3e} m^2, range {:.3e} m",
            g.lambda, g.range_square, g.range
        );
    }
    Ok(())
}

fn selftest() -> Result<(), Failure> {
    let checks = harness::selftest();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    if failed > 0 {
        return Err(Failure::Runtime(format!(
            "{failed} of {} checks failed",
            checks.len()
        )));
    }
    Ok(())
}
