//! `oakernel` command-line front-end.
//!
//! Exit codes: 0 success, 1 input or parse error, 2 numerical
//! non-convergence, 3 consistency failure (including a certificate that
//! did not hold: counterexample not refuted, min-kernel Gram not PSD).

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oakernel::counterexample::{gamma_sweep_with, sweep_csv};
use oakernel::io::{parse_matrix, to_json, write_matrix, Format};
use oakernel::spectral::DEFAULT_PSD_TOL;
use oakernel::{
    jacobi_eigen, psd_check, psd_project_clip, run_counterexample, verify_min_kernel_psd, Error,
    Execution, TupleDataset,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "oakernel",
    version,
    about = "Optimal assignment kernel diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gram matrix of a tuple dataset
    Gram(GramArgs),
    /// Eigendecomposition and PSD verdict of a matrix file
    Spectrum(SpectrumArgs),
    /// Reproduce the non-PSD counterexample on the unit square
    Counterexample(CounterexampleArgs),
    /// Counterexample summary over a grid of gamma values
    Sweep(SweepArgs),
    /// Project a matrix onto the PSD cone by clipping negative eigenvalues
    Repair(RepairArgs),
    /// Check that the singleton-base kernel is the PSD min kernel
    VerifyMinKernel(MinKernelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GramArgs {
    /// Tuple dataset JSON (`-` for stdin)
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Matrix as JSON or CSV (`-` for stdin)
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PSD_TOL, value_parser = parse_tol)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = DEFAULT_PSD_TOL, value_parser = parse_tol)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated gamma values
    #[arg(long, default_value = "0.1,0.25,0.5,1,2,5", value_parser = parse_float_list)]
    grid: FloatList,
    #[arg(long, default_value_t = DEFAULT_PSD_TOL, value_parser = parse_tol)]
    tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct RepairArgs {
    /// Matrix as JSON or CSV (`-` for stdin)
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct MinKernelArgs {
    /// Comma-separated positive tuple lengths
    #[arg(long, value_parser = parse_length_list)]
    lengths: LengthList,
    #[arg(long, default_value_t = DEFAULT_PSD_TOL, value_parser = parse_tol)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone)]
struct FloatList(Vec<f64>);

#[derive(Clone)]
struct LengthList(Vec<usize>);

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t >= 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(format!("tolerance must be nonnegative, got {s}"))
    }
}

fn parse_float_list(s: &str) -> Result<FloatList, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(FloatList)
}

fn parse_length_list(s: &str) -> Result<LengthList, String> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(LengthList)
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) | Error::Config(_) => 1,
            Error::Numeric(_) => 2,
            Error::Consistency(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| io_failure(path, e))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| io_failure(path, e))
    }
}

fn emit(out: &Output, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| io_failure(Path::new("<stdout>"), e)),
    }
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    labels: &'a [String],
    eigenvalues: &'a [f64],
    eigenvectors: &'a [Vec<f64>],
    min_eigenvalue: f64,
    max_eigenvalue: f64,
    psd: bool,
    margin: f64,
    tol: f64,
    sweeps: usize,
}

/// Runs one command; `Ok(false)` means the command ran but its certificate failed.
fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Gram(args) => {
            let dataset = TupleDataset::from_json(&read_input(&args.input)?)?;
            let gram = dataset.gram()?;
            emit(&args.out, &write_matrix(&gram, args.format.into())?)?;
            Ok(true)
        }
        Command::Spectrum(args) => {
            let m = parse_matrix(&read_input(&args.input)?)?;
            let s = jacobi_eigen(m.values())?;
            let v = psd_check(&s, args.tol);
            let out = SpectrumOutput {
                labels: m.labels(),
                eigenvalues: &s.eigenvalues,
                eigenvectors: &s.eigenvectors,
                min_eigenvalue: v.min_eigenvalue,
                max_eigenvalue: v.max_eigenvalue,
                psd: v.psd,
                margin: v.margin,
                tol: v.tol,
                sweeps: s.sweeps,
            };
            emit(&args.out, &to_json(&out)?)?;
            Ok(true)
        }
        Command::Counterexample(args) => {
            let report = run_counterexample(args.gamma, args.tol)?;
            emit(&args.out, &to_json(&report)?)?;
            Ok(report.refuted)
        }
        Command::Sweep(args) => {
            let rows = gamma_sweep_with(&args.grid.0, args.tol, Execution::default())?;
            let text = match args.format {
                OutputFormat::Csv => sweep_csv(&rows),
                OutputFormat::Json => to_json(&rows)?,
            };
            emit(&args.out, &text)?;
            Ok(true)
        }
        Command::Repair(args) => {
            let m = parse_matrix(&read_input(&args.input)?)?;
            let repaired = psd_project_clip(&m)?;
            emit(&args.out, &write_matrix(&repaired, args.format.into())?)?;
            Ok(true)
        }
        Command::VerifyMinKernel(args) => {
            let verdict = verify_min_kernel_psd(&args.lengths.0, args.tol)?;
            emit(&args.out, &to_json(&verdict)?)?;
            Ok(verdict.psd)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("oakernel: certificate did not hold");
            ExitCode::from(3)
        }
        Err(f) => {
            eprintln!("oakernel: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
