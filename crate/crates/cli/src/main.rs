//! Command-line surface: fit user data, run simulations, scan the
//! hyper-parameter grid, and dump basis layouts. JSON for structured
//! results, CSV for anything plottable. Exit codes: 0 success, 1
//! numerical failure, 2 usage or input error.

use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rayon::prelude::*;
use svridge::{
    approx_gic, default_gamma_grid, default_lambda_grid, design_matrix, gamma_select, generate,
    load_dataset, log_grid, mse, ridge_fit, ridge_gic, ridge_select, run_benchmark, run_trial,
    svr_fit, validate_compatibility, BasisSpec, BoundaryMode, Dataset, FitResult,
    GicMode, LambdaInit, Method, RidgeConfig, SimConfig, SvrOptions, TrueFunction,
};

#[derive(Parser)]
#[command(name = "svridge", version, about = "Regression with smoothly varying ridge regularization")]
struct Cli {
    /// Worker threads for trials and grid points (default: machine parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory [env: SVRIDGE_OUT_DIR] (default: current directory)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a CSV dataset (columns x1[,x2],y) with ridge or the smoothly varying method
    Fit(FitArgs),
    /// Monte-Carlo benchmark on a built-in test function
    Simulate(SimulateArgs),
    /// Evaluate the information criterion over a hyper-parameter grid
    Scan(ScanArgs),
    /// Write the basis-center layout as CSV
    BasisDump(BasisDumpArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ridge,
    Svr,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Paper,
    Exact,
}

#[derive(Args)]
struct FitArgs {
    /// Input dataset CSV
    dataset: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Fixed ridge tuning parameter (ridge only)
    #[arg(long, conflicts_with = "select")]
    lambda: Option<f64>,
    /// Select the ridge tuning parameter on the default grid by GIC
    #[arg(long)]
    select: bool,
    /// Smoothness hyper-parameter (svr; omit both gammas to scan the default grid)
    #[arg(long, requires = "gamma2")]
    gamma1: Option<f64>,
    /// Positivity hyper-parameter (svr)
    #[arg(long, requires = "gamma1")]
    gamma2: Option<f64>,
    #[arg(long, value_enum, default_value = "paper")]
    boundary: BoundaryArg,
    /// Center the responses before fitting (offset recorded in the result)
    #[arg(long)]
    center: bool,
    /// Basis centers per dimension (default: 30 in 1D, 10 in 2D)
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    function: FunctionArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated list of methods to run
    #[arg(long, value_delimiter = ',', value_enum, default_values_t = [MethodArg::Svr, MethodArg::Ridge])]
    methods: Vec<MethodArg>,
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionArg {
    Peak10,
    Chirp11,
    Surface13,
}

impl From<FunctionArg> for TrueFunction {
    fn from(f: FunctionArg) -> Self {
        match f {
            FunctionArg::Peak10 => TrueFunction::Peak10,
            FunctionArg::Chirp11 => TrueFunction::Chirp11,
            FunctionArg::Surface13 => TrueFunction::Surface13,
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    /// Input dataset CSV
    dataset: PathBuf,
    /// Log-spaced gamma1 grid as lo:hi:count
    #[arg(long, default_value = "1e-6:1:7")]
    gamma1_grid: String,
    /// Log-spaced gamma2 grid as lo:hi:count
    #[arg(long, default_value = "1e-6:1:7")]
    gamma2_grid: String,
    #[arg(long, value_enum, default_value = "paper")]
    boundary: BoundaryArg,
    /// Known truth (adds an MSE column computed at the design points)
    #[arg(long, value_enum)]
    function: Option<FunctionArg>,
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct BasisDumpArgs {
    /// Centers per dimension
    #[arg(long)]
    m: usize,
    /// Domain as lo:hi (repeat with a comma for 2D: "lo:hi,lo:hi")
    #[arg(long)]
    domain: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<svridge::Error> for Failure {
    fn from(e: svridge::Error) -> Self {
        use svridge::Error::*;
        let code = match e {
            SingularSystem(_) | AlphaCollapse { .. } | SingularInformation { .. }
            | SelectionFailed(_) | Simulation(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: 1,
            message: format!("serialization: {e}"),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: 2,
            message: format!("csv: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: threads: {e}");
            return ExitCode::from(2);
        }
    }
    let out_dir = cli
        .out_dir
        .or_else(|| std::env::var_os("SVRIDGE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let result = match cli.command {
        Command::Fit(args) => run_fit(&args, &out_dir),
        Command::Simulate(args) => run_simulate(&args, &out_dir),
        Command::Scan(args) => run_scan(&args, &out_dir),
        Command::BasisDump(args) => run_basis_dump(&args, &out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn open_dataset(path: &Path) -> Result<Dataset, Failure> {
    if !path.exists() {
        return Err(Failure::usage("dataset: not found"));
    }
    let file = File::open(path)?;
    Ok(load_dataset(file, None)?)
}

fn default_m(dims: usize) -> usize {
    if dims == 1 {
        30
    } else {
        10
    }
}

fn build_basis(dataset: &Dataset, m: Option<usize>) -> Result<BasisSpec, Failure> {
    let spec = BasisSpec::grid(
        dataset.domain(),
        m.unwrap_or_else(|| default_m(dataset.dims())),
        1.0,
    )?;
    validate_compatibility(dataset, &spec)?;
    Ok(spec)
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut file = File::create(&path)?;
    file.write_all(serde_json::to_string_pretty(value)?.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(path)
}

/// Fitted curve on a 512-point grid (1D) or 64x64 grid (2D).
fn write_curve(
    dir: &Path,
    name: &str,
    spec: &BasisSpec,
    fit: &FitResult,
) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut writer = csv::Writer::from_path(&path)?;
    let beta = fit.params.beta_vector();
    let domain = spec.domain();
    if spec.dims() == 1 {
        writer.write_record(["x1", "yhat"])?;
        let (lo, hi) = domain[0];
        for i in 0..512 {
            let x = lo + (hi - lo) * i as f64 / 511.0;
            let yhat = spec.eval_row(&[x]).dot(&beta) + fit.y_offset;
            writer.write_record([format!("{x}"), format!("{yhat}")])?;
        }
    } else {
        writer.write_record(["x1", "x2", "yhat"])?;
        let (lo1, hi1) = domain[0];
        let (lo2, hi2) = domain[1];
        for i in 0..64 {
            let x1 = lo1 + (hi1 - lo1) * i as f64 / 63.0;
            for j in 0..64 {
                let x2 = lo2 + (hi2 - lo2) * j as f64 / 63.0;
                let yhat = spec.eval_row(&[x1, x2]).dot(&beta) + fit.y_offset;
                writer.write_record([format!("{x1}"), format!("{x2}"), format!("{yhat}")])?;
            }
        }
    }
    writer.flush()?;
    Ok(path)
}

fn run_fit(args: &FitArgs, out_dir: &Path) -> Result<(), Failure> {
    let raw = open_dataset(&args.dataset)?;
    let (dataset, offset) = if args.center {
        raw.centered()
    } else {
        (raw, 0.0)
    };
    let spec = build_basis(&dataset, args.m)?;
    let dm = design_matrix(&spec, dataset.xs());
    let boundary = match args.boundary {
        BoundaryArg::Paper => BoundaryMode::Paper,
        BoundaryArg::Exact => BoundaryMode::Exact,
    };

    let mut fit = match args.method {
        MethodArg::Ridge => {
            if let Some(lambda) = args.lambda {
                let mut fit = ridge_fit(&dm, dataset.ys(), &RidgeConfig::new(lambda)?)?;
                fit.gic = Some(ridge_gic(&dm, dataset.ys(), &fit, GicMode::Expected)?);
                fit
            } else {
                if !args.select {
                    println!("no lambda given: selecting on the default grid");
                }
                let (lambda, fit) = ridge_select(&dm, dataset.ys(), &default_lambda_grid())?;
                println!("selected lambda = {lambda:.6e}");
                fit
            }
        }
        MethodArg::Svr => match (args.gamma1, args.gamma2) {
            (Some(g1), Some(g2)) => {
                let mut options = SvrOptions::new(g1, g2)?;
                options.boundary_mode = boundary;
                let mut fit = svr_fit(&dm, dataset.ys(), &options)?;
                fit.gic = Some(approx_gic(&dm, dataset.ys(), &fit, g1, g2, GicMode::Expected)?);
                fit
            }
            _ => {
                println!("no gamma flags given: scanning the default 7x7 grid");
                let mut base = SvrOptions::new(1.0, 1.0)?;
                base.boundary_mode = boundary;
                let ((g1, g2), fit) =
                    gamma_select(&dm, dataset.ys(), &default_gamma_grid(), &base)?;
                println!("selected gamma = ({g1:.6e}, {g2:.6e})");
                fit
            }
        },
    };
    fit.y_offset = offset;

    let fit_path = write_json(out_dir, "fit_result.json", &fit)?;
    let curve_path = write_curve(out_dir, "fitted_curve.csv", &spec, &fit)?;
    println!("wrote {}", fit_path.display());
    println!("wrote {}", curve_path.display());
    if let Some(gic) = &fit.gic {
        let gic_path = write_json(out_dir, "gic_report.json", gic)?;
        println!("wrote {}", gic_path.display());
    }
    Ok(())
}

fn run_simulate(args: &SimulateArgs, out_dir: &Path) -> Result<(), Failure> {
    let mut config = SimConfig::new(args.function.into(), args.n, args.alpha, args.trials, args.seed)?;
    config.methods = args
        .methods
        .iter()
        .map(|m| match m {
            MethodArg::Svr => Method::Svr,
            MethodArg::Ridge => Method::Ridge,
        })
        .collect();
    config.m_per_dim = args.m;
    let report = run_benchmark(&config)?;

    let report_path = write_json(out_dir, "sim_report.json", &report)?;
    println!("wrote {}", report_path.display());

    // Per-trial MSE table.
    std::fs::create_dir_all(out_dir)?;
    let trials_path = out_dir.join("trials.csv");
    let mut writer = csv::Writer::from_path(&trials_path)?;
    writer.write_record(["method", "trial", "mse"])?;
    for summary in &report.methods {
        let tag = match summary.method {
            Method::Svr => "svr",
            Method::Ridge => "ridge",
        };
        for (trial, err) in summary.mses.iter().enumerate() {
            writer.write_record([tag.to_string(), trial.to_string(), format!("{err}")])?;
        }
    }
    writer.flush()?;
    println!("wrote {}", trials_path.display());

    // Plot-ready fitted curve for the first trial of each method.
    let spec = config.basis()?;
    let first = generate(&config, 0)?;
    for &method in &config.methods {
        let (fit, _) = run_trial(&config, &spec, &first, method)?;
        let tag = match method {
            Method::Svr => "svr",
            Method::Ridge => "ridge",
        };
        let path = write_curve(out_dir, &format!("curve_{tag}.csv"), &spec, &fit)?;
        println!("wrote {}", path.display());
    }
    for summary in &report.methods {
        println!(
            "{:?}: mean MSE {:.6e} (sd {:.6e}, {} trials, {} failed)",
            summary.method,
            summary.mean_mse,
            summary.sd_mse,
            summary.mses.len(),
            summary.failed_trials.len()
        );
    }
    println!("runtime: {:.1}s", report.runtime_seconds);
    Ok(())
}

fn parse_grid(text: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!("{flag}: expected lo:hi:count")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::usage(format!("{flag}: bad lower bound")))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::usage(format!("{flag}: bad upper bound")))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Failure::usage(format!("{flag}: bad count")))?;
    if !(lo > 0.0) || !(hi >= lo) || count == 0 {
        return Err(Failure::usage(format!(
            "{flag}: need 0 < lo <= hi and count >= 1"
        )));
    }
    Ok(log_grid(lo, hi, count))
}

fn run_scan(args: &ScanArgs, out_dir: &Path) -> Result<(), Failure> {
    let dataset = open_dataset(&args.dataset)?;
    let spec = build_basis(&dataset, args.m)?;
    let dm = design_matrix(&spec, dataset.xs());
    let boundary = match args.boundary {
        BoundaryArg::Paper => BoundaryMode::Paper,
        BoundaryArg::Exact => BoundaryMode::Exact,
    };
    let g1s = parse_grid(&args.gamma1_grid, "--gamma1-grid")?;
    let g2s = parse_grid(&args.gamma2_grid, "--gamma2-grid")?;
    let truth: Option<TrueFunction> = args.function.map(Into::into);

    // Shared warm start, as in grid selection.
    let (ridge_lambda, _) = ridge_select(&dm, dataset.ys(), &default_lambda_grid())?;
    let grid: Vec<(f64, f64)> = g1s
        .iter()
        .flat_map(|&g1| g2s.iter().map(move |&g2| (g1, g2)))
        .collect();
    type Row = ((f64, f64), Result<(f64, Option<f64>), svridge::Error>);
    let rows: Vec<Row> = grid
        .par_iter()
        .map(|&(g1, g2)| {
            let outcome = (|| {
                let mut options = SvrOptions::new(g1, g2)?;
                options.boundary_mode = boundary;
                options.lambda_init = Some(LambdaInit::Scalar(ridge_lambda));
                let fit = svr_fit(&dm, dataset.ys(), &options)?;
                let gic = approx_gic(&dm, dataset.ys(), &fit, g1, g2, GicMode::Expected)?;
                let err = truth
                    .map(|t| mse(&fit, &spec, &dataset, t))
                    .transpose()?;
                Ok((gic.total, err))
            })();
            ((g1, g2), outcome)
        })
        .collect();

    std::fs::create_dir_all(out_dir)?;
    let scan_path = out_dir.join("scan.csv");
    let mut writer = csv::Writer::from_path(&scan_path)?;
    writer.write_record(["gamma1", "gamma2", "gic", "mse"])?;
    let mut best: Option<((f64, f64), f64)> = None;
    for ((g1, g2), outcome) in &rows {
        match outcome {
            Ok((gic, err)) => {
                let mse_text = err.map(|v| format!("{v}")).unwrap_or_default();
                writer.write_record([
                    format!("{g1}"),
                    format!("{g2}"),
                    format!("{gic}"),
                    mse_text,
                ])?;
                // Ties resolve toward larger gamma1, then larger gamma2.
                let better = match &best {
                    None => true,
                    Some((bg, bv)) => {
                        *gic < *bv || (*gic == *bv && (*g1, *g2) > *bg)
                    }
                };
                if better {
                    best = Some(((*g1, *g2), *gic));
                }
            }
            Err(e) => {
                writer.write_record([
                    format!("{g1}"),
                    format!("{g2}"),
                    String::new(),
                    format!("failed: {e}"),
                ])?;
            }
        }
    }
    writer.flush()?;
    println!("wrote {}", scan_path.display());

    let ((g1, g2), _) = best.ok_or(Failure {
        code: 1,
        message: "scan: every grid point failed".into(),
    })?;
    let mut options = SvrOptions::new(g1, g2)?;
    options.boundary_mode = boundary;
    options.lambda_init = Some(LambdaInit::Scalar(ridge_lambda));
    let mut fit = svr_fit(&dm, dataset.ys(), &options)?;
    fit.gic = Some(approx_gic(&dm, dataset.ys(), &fit, g1, g2, GicMode::Expected)?);
    let best_path = write_json(out_dir, "best_fit.json", &fit)?;
    println!("selected gamma = ({g1:.6e}, {g2:.6e})");
    println!("wrote {}", best_path.display());
    Ok(())
}

fn parse_domain(text: &str) -> Result<Vec<(f64, f64)>, Failure> {
    text.split(',')
        .map(|axis| {
            let parts: Vec<&str> = axis.split(':').collect();
            if parts.len() != 2 {
                return Err(Failure::usage("--domain: expected lo:hi per axis"));
            }
            let lo: f64 = parts[0]
                .parse()
                .map_err(|_| Failure::usage("--domain: bad lower bound"))?;
            let hi: f64 = parts[1]
                .parse()
                .map_err(|_| Failure::usage("--domain: bad upper bound"))?;
            Ok((lo, hi))
        })
        .collect()
}

fn run_basis_dump(args: &BasisDumpArgs, out_dir: &Path) -> Result<(), Failure> {
    let domain = parse_domain(&args.domain)?;
    if domain.len() > 2 {
        return Err(Failure::usage("--domain: at most 2 axes supported"));
    }
    let spec = BasisSpec::grid(&domain, args.m, 1.0)?;
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("basis_centers.csv");
    let mut writer = csv::Writer::from_path(&path)?;
    let centers: &DMatrix<f64> = spec.centers();
    if spec.dims() == 1 {
        writer.write_record(["center", "c1", "width"])?;
        for j in 0..spec.num_centers() {
            writer.write_record([
                j.to_string(),
                format!("{}", centers[(j, 0)]),
                format!("{}", spec.width()),
            ])?;
        }
    } else {
        writer.write_record(["center", "c1", "c2", "width"])?;
        for j in 0..spec.num_centers() {
            writer.write_record([
                j.to_string(),
                format!("{}", centers[(j, 0)]),
                format!("{}", centers[(j, 1)]),
                format!("{}", spec.width()),
            ])?;
        }
    }
    writer.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}
