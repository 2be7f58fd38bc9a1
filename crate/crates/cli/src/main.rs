use clap::{Args, Parser, Subcommand, ValueEnum};
use ebm_core::ball::modes_csv;
use ebm_core::relaxation::kernel_table_csv;
use ebm_core::verify::{run_suite, DEFAULT_SEED};
use ebm_core::{
    compute_spectrum, invert_known_c, self_consistent_invert, solve_mode, ClusterData, ClusterSpectrum, EbmModel,
    Error, InversionResult,
};
use rayon::prelude::*;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_PROPERTY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_FIT: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "ebm", version, about = "Relaxation kernels, ball clusters and spectral inversion for extended Burgers models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the radial modes and cluster spectra of a model, plus its kernel table.
    Forward(ForwardArgs),
    /// Recover a model from two cluster files.
    Invert(InvertArgs),
    /// Tabulate the relaxation kernels of a model.
    Kernel(KernelArgs),
    /// Run the seeded property suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ForwardArgs {
    #[arg(long)]
    model: PathBuf,
    /// Mode indices, comma separated.
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u32).range(1..))]
    ell: Vec<u32>,
    /// Kernel grid `start:stop:step`.
    #[arg(long, default_value = "0:10:0.1", value_parser = parse_grid)]
    t_grid: Grid,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InvertMode {
    KnownC,
    SelfConsistent,
}

#[derive(Args, Debug)]
struct InvertArgs {
    /// Two cluster JSON files written by `forward`.
    #[arg(num_args = 2, required = true)]
    clusters: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "known-c")]
    mode: InvertMode,
    /// Largest accepted fit residual.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Ball radius, used in self-consistent mode.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value = "0:10:0.1", value_parser = parse_grid)]
    t_grid: Grid,
    /// CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Property names, comma separated.
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Overrides every property's case count.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    cases: Option<u64>,
    /// Report JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// List the properties and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Grid {
    start: f64,
    step: f64,
    count: usize,
}

impl Grid {
    fn times(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, h] = parts.as_slice() else {
        return Err("expected start:stop:step".into());
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
    let (start, stop, step) = (num(a)?, num(b)?, num(h)?);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err("grid values must be finite".into());
    }
    if start < 0.0 {
        return Err("grid must start at t >= 0".into());
    }
    if step <= 0.0 || stop < start {
        return Err("grid must be strictly increasing".into());
    }
    let intervals = ((stop - start) / step + 1e-9).floor();
    if intervals > 1e7 {
        return Err("grid has too many points".into());
    }
    Ok(Grid { start, step, count: intervals as usize + 1 })
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    error: Error,
}

impl Failure {
    fn input(error: Error) -> Self {
        Failure { code: EXIT_INPUT, error }
    }

    fn fit(error: Error) -> Self {
        Failure { code: EXIT_FIT, error }
    }
}

fn error_json(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        Failure::input(Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
    })
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| {
        Failure::input(Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
    })
}

fn load_model(path: &Path) -> Result<EbmModel, Failure> {
    EbmModel::from_json(&read(path)?).map_err(Failure::input)
}

fn forward(args: &ForwardArgs) -> Result<u8, Failure> {
    let model = load_model(&args.model)?;
    let spectrum = compute_spectrum(&model).map_err(Failure::input)?;
    let prony = ebm_core::spectrum::build_prony(&model, &spectrum).map_err(Failure::input)?;
    let clusters = args
        .ell
        .par_iter()
        .map(|&ell| {
            let mode = solve_mode(spectrum.lambda0, spectrum.mu0, model.radius, ell as usize)?;
            let cluster = ebm_core::cluster_roots(&prony, &mode)?;
            Ok((mode, cluster))
        })
        .collect::<ebm_core::Result<Vec<_>>>()
        .map_err(Failure::input)?;
    fs::create_dir_all(&args.out).map_err(|e| Failure::input(e.into()))?;
    for (_, cluster) in &clusters {
        let path = args.out.join(format!("cluster_l{}.json", cluster.ell));
        write(&path, &cluster.to_json())?;
        println!("{}", path.display());
    }
    let modes: Vec<_> = clusters.iter().map(|(m, _)| *m).collect();
    let path = args.out.join("modes.csv");
    write(&path, &modes_csv(&modes))?;
    println!("{}", path.display());
    let path = args.out.join("kernel.csv");
    write(&path, &kernel_table_csv(&spectrum, &args.t_grid.times()).map_err(Failure::input)?)?;
    println!("{}", path.display());
    Ok(0)
}

fn load_cluster(path: &Path) -> Result<ClusterData, Failure> {
    let spectrum = ClusterSpectrum::from_json(&read(path)?).map_err(Failure::input)?;
    let data = ClusterData::from(&spectrum);
    data.validate().map_err(Failure::input)?;
    Ok(data)
}

fn invert(args: &InvertArgs) -> Result<u8, Failure> {
    let a = load_cluster(&args.clusters[0])?;
    let b = load_cluster(&args.clusters[1])?;
    if a.roots.len() != b.roots.len() {
        return Err(Failure::input(Error::InconsistentClusters(format!(
            "root counts differ: {} and {}",
            a.roots.len(),
            b.roots.len()
        ))));
    }
    let result: InversionResult = match args.mode {
        InvertMode::KnownC => invert_known_c(&a, &b),
        InvertMode::SelfConsistent => {
            let (la, lb) = (a.ell.unwrap_or(0), b.ell.unwrap_or(0));
            if la == lb {
                return Err(Failure::input(Error::InvalidArgument(format!(
                    "self-consistent mode needs two distinct mode indices, got {la} and {lb}"
                ))));
            }
            self_consistent_invert(&a.roots, &b.roots, la, lb, args.radius)
        }
    }
    .map_err(Failure::fit)?;
    let report = result.to_json();
    match &args.out {
        Some(p) => write(p, &report)?,
        None => print!("{report}"),
    }
    if result.fit_residual < args.tol {
        Ok(0)
    } else {
        eprintln!(
            "{}",
            serde_json::json!({
                "error": "FitResidual",
                "message": format!("fit residual {:e} is not below {:e}", result.fit_residual, args.tol),
            })
        );
        Ok(EXIT_FIT)
    }
}

fn kernel(args: &KernelArgs) -> Result<u8, Failure> {
    let model = load_model(&args.model)?;
    let spectrum = compute_spectrum(&model).map_err(Failure::input)?;
    let table = kernel_table_csv(&spectrum, &args.t_grid.times()).map_err(Failure::input)?;
    match &args.out {
        Some(p) => write(p, &table)?,
        None => print!("{table}"),
    }
    Ok(0)
}

fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    if args.list {
        for (name, description) in ebm_core::verify::property_names() {
            println!("{name:<28} {description}");
        }
        return Ok(0);
    }
    let outcomes = run_suite(&args.only, args.seed, args.cases.map(|c| c as usize))
        .map_err(|error| Failure { code: EXIT_USAGE, error })?;
    for o in &outcomes {
        println!(
            "{} {:<28} cases={:<5} max={:.3e} tol={:.1e}{}",
            if o.passed() { "PASS" } else { "FAIL" },
            o.name,
            o.cases,
            o.max_observed,
            o.tolerance,
            o.first_failure.as_deref().map(|f| format!("  [{} failed; {f}]", o.failures)).unwrap_or_default()
        );
    }
    if let Some(p) = &args.out {
        let report = serde_json::json!({ "seed": args.seed, "properties": outcomes });
        write(p, &ebm_core::io::to_json_string(&report))?;
    }
    Ok(if outcomes.iter().all(|o| o.passed()) { 0 } else { EXIT_PROPERTY })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("EBM_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::input(Error::InvalidArgument(format!("EBM_THREADS must be a positive integer, got '{v}'"))))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::input(Error::InvalidArgument(e.to_string())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = configure_threads().and_then(|()| match &cli.command {
        Command::Forward(a) => forward(a),
        Command::Invert(a) => invert(a),
        Command::Kernel(a) => kernel(a),
        Command::Verify(a) => verify(a),
    });
    match run {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", error_json(&f.error));
            ExitCode::from(f.code)
        }
    }
}
