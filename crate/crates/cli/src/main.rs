//! `weingarten`: list classes, solve natural PDEs, reconstruct and verify
//! surfaces, build parallel families and classify linear relations.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_extent, parse_four, parse_grid, parse_list, FileConfig, JobConfig, Overrides};
use error::CliError;

#[derive(Parser)]
#[command(name = "weingarten", version, about = "Time-like Weingarten surfaces in Minkowski 3-space")]
#[command(after_help = "Exit codes: 0 ok, 2 config error, 3 precondition violated, 4 numerical failure, 5 verification failed.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the ten basic classes with their natural PDEs.
    Classes {
        /// Print the full machine-readable registry entries.
        #[arg(long)]
        long: bool,
    },
    /// Solve the class PDE and write the λ field.
    Solve {
        #[command(flatten)]
        job: JobArgs,
        /// Write ν instead of λ.
        #[arg(long)]
        nu: bool,
    },
    /// Solve (or read a field), integrate the frame and write the mesh plus a patch dump.
    Reconstruct {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Patch dump path [default: --out with extension .patch].
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Reconstruct and compare recovered invariants with the prescribed ones.
    Verify {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Bound on the max invariant deviation [default: 5e-3].
        #[arg(long = "verify-tol")]
        verify_tol: Option<f64>,
        /// Boundary nodes excluded from the comparison [default: 4, less on small grids].
        #[arg(long)]
        margin: Option<usize>,
    },
    /// Build the parallel family of a reconstructed patch.
    Parallel {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Offset distances, comma separated or repeated [default: 0.1,-0.2,0.35].
        #[arg(long = "offset", value_delimiter = ',', allow_negative_numbers = true)]
        offsets: Vec<f64>,
    },
    /// Classify δK = αH + βH′ + γ (or ν₁ = (Aν₂+B)/(Cν₂+D) with --coeffs).
    Classify {
        /// α,β,γ,δ as one comma-separated argument or four numbers.
        #[arg(allow_negative_numbers = true, num_args = 0..=4)]
        relation: Vec<String>,
        /// α,β,γ,δ.
        #[arg(long = "relation", value_parser = parse_four, allow_hyphen_values = true, conflicts_with = "relation")]
        relation_flag: Option<[f64; 4]>,
        /// A,B,C,D of the linear fractional form.
        #[arg(long, value_parser = parse_four, allow_hyphen_values = true)]
        coeffs: Option<[f64; 4]>,
        /// Output file [default: stdout].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct JobArgs {
    /// TOML job file with sections [class] [grid] [init] [solver] [seed] [verify] [parallel] [output].
    #[arg(long)]
    config: Option<PathBuf>,
    /// Basic class name or number 1-10 [default: CMC_HALF].
    #[arg(long)]
    class: Option<String>,
    /// Class parameter β [default: 2 for the β² > 1 classes, 0.5 for β² < 1, 1 for class 10].
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Class parameter γ of class 10 [default: -1].
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Resolution NxM in (u, v), at least 3 each [default: 128x128].
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Box lengths LUxLV, or one length for both [default: 2.54].
    #[arg(long, value_parser = parse_extent)]
    extent: Option<(f64, f64)>,
    /// Initial data: bump or constant [default: bump].
    #[arg(long)]
    init: Option<String>,
    /// Bump amplitude added to λ₀ [default: 0.3].
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<f64>,
    /// SOR relaxation factor in [1, 2) [default: 2/(1+sin(π/n))].
    #[arg(long)]
    omega: Option<f64>,
    /// SOR update tolerance [default: 1e-10].
    #[arg(long)]
    tol: Option<f64>,
    /// Output path [default: stdout; a directory for parallel].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: obj, ply, csv or field [default: field for solve, obj for meshes, csv for verify].
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Read a λ or ν field file instead of solving.
    #[arg(long)]
    field: Option<PathBuf>,
}

fn resolve(job: &JobArgs, extra: Overrides) -> Result<JobConfig, CliError> {
    let file = match &job.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let o = Overrides {
        class: job.class.clone(),
        beta: job.beta,
        gamma: job.gamma,
        grid: job.grid,
        extent: job.extent,
        init: job.init.clone(),
        amplitude: job.amplitude,
        omega: job.omega,
        tol: job.tol,
        out: job.out.clone(),
        format: job.format.clone(),
        ..extra
    };
    JobConfig::resolve(&file, &o)
}

fn positional_relation(args: &[String]) -> Result<Option<[f64; 4]>, CliError> {
    match args.len() {
        0 => Ok(None),
        1 => parse_four(&args[0]).map(Some).map_err(CliError::Config),
        4 => parse_list(&args.join(",")).map(|v| Some([v[0], v[1], v[2], v[3]])).map_err(CliError::Config),
        n => Err(CliError::Config(format!("expected 1 or 4 relation arguments, got {n}"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classes { long } => {
            print!("{}", commands::cmd_classes(long));
            Ok(())
        }
        Command::Solve { job, nu } => commands::cmd_solve(&resolve(&job, Overrides::default())?, nu),
        Command::Reconstruct { job, input, dump } => {
            let cfg = resolve(&job, Overrides { dump, ..Default::default() })?;
            commands::cmd_reconstruct(&cfg, input.field.as_deref())
        }
        Command::Verify { job, input, verify_tol, margin } => {
            let cfg = resolve(&job, Overrides { verify_tol, margin, ..Default::default() })?;
            commands::cmd_verify(&cfg, input.field.as_deref())
        }
        Command::Parallel { job, input, offsets } => {
            let offsets = (!offsets.is_empty()).then_some(offsets);
            let cfg = resolve(&job, Overrides { offsets, ..Default::default() })?;
            commands::cmd_parallel(&cfg, input.field.as_deref())
        }
        Command::Classify { relation, relation_flag, coeffs, out } => {
            let rel = positional_relation(&relation)?.or(relation_flag);
            commands::cmd_classify(rel, coeffs, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
