use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qcoherence::report::canonical::named_state;
use qcoherence::report::sweep::{dump_counterexamples, summary_json, write_csv, write_json};
use qcoherence::report::{
    measure, run_sweep, BasisFile, Check, LoadedState, ReportError, StateFile, SweepConfig,
};
use qcoherence::{BipartiteState, OptimizerConfig};

const EXIT_INVALID_STATE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_VIOLATIONS: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qcoherence",
    version,
    about = "Coherence, discord and one-way deficit of quantum states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a named state as a JSON state file:
    /// mcs <d> | psi1 | psi2 | psi3 | mixed <d> | haar <d> <seed> | ginibre <d> <rank> <seed>
    Gen { name: String, args: Vec<String> },
    /// Evaluate every measure for a state file and print a JSON record
    Measure {
        statefile: PathBuf,
        /// Treat the state as bipartite with these subsystem dimensions
        #[arg(long, num_args = 2, value_names = ["DA", "DB"])]
        dims: Option<Vec<usize>>,
        /// Basis for the single-system coherences (JSON: {"vectors": [[[re, im], ...], ...]})
        #[arg(long)]
        basis_file: Option<PathBuf>,
    },
    /// Run a Monte Carlo verification sweep
    Verify {
        check: Check,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// One dimension, or two for bipartite checks
        #[arg(long, num_args = 1..=2, default_values_t = [2, 2])]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Violation tolerance (defaults depend on the check)
        #[arg(long)]
        tol: Option<f64>,
        /// Write rows here and the summary to <out>.summary.json
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn fail(code: u8, err: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn gen(name: &str, args: &[String]) -> ExitCode {
    match named_state(name, args) {
        Ok(file) => {
            println!("{}", file.to_json());
            ExitCode::SUCCESS
        }
        Err(e) => fail(EXIT_USAGE, e),
    }
}

fn load_state(
    path: &Path,
    dims: Option<&[usize]>,
) -> Result<(LoadedState, Option<String>), ReportError> {
    let file = StateFile::load(path)?;
    let state = file.to_state()?;
    let state = match dims {
        Some(&[da, db]) => {
            LoadedState::Bipartite(BipartiteState::new(state.op().clone(), (da, db))?)
        }
        _ => state,
    };
    Ok((state, file.label))
}

fn run_measure(path: &Path, dims: Option<&[usize]>, basis_file: Option<&Path>) -> ExitCode {
    let (state, label) = match load_state(path, dims) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_INVALID_STATE, e),
    };
    let basis = match basis_file
        .map(|p| BasisFile::load(p).and_then(|b| b.to_basis()))
        .transpose()
    {
        Ok(b) => b,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    match measure(&state, label, basis.as_ref(), &OptimizerConfig::default()) {
        Ok(record) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&record).expect("record serializes")
            );
            if record.converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: optimizer did not converge; values are best found");
                ExitCode::from(EXIT_NOT_CONVERGED)
            }
        }
        Err(e) => fail(EXIT_INVALID_STATE, e),
    }
}

fn emit(
    report: &qcoherence::report::VerificationReport,
    format: Format,
    out: impl Write,
) -> Result<(), ReportError> {
    let mut out = BufWriter::new(out);
    match format {
        Format::Csv => write_csv(report, &mut out),
        Format::Json => write_json(report, &mut out),
    }
}

fn run_verify(cfg: SweepConfig, out: Option<&Path>, format: Format) -> ExitCode {
    let mut report = match run_sweep(&cfg) {
        Ok(r) => r,
        Err(
            e @ (ReportError::BadArgs(_) | ReportError::State(qcoherence::Error::BadConfig(_))),
        ) => return fail(EXIT_USAGE, e),
        Err(e) => return fail(EXIT_INVALID_STATE, e),
    };
    let written = match out {
        Some(path) => (|| {
            if cfg.check == Check::Thm2 {
                dump_counterexamples(&mut report, &with_suffix(path, ".counterexamples"))?;
            }
            let file = File::create(path).map_err(|source| ReportError::Io {
                path: path.into(),
                source,
            })?;
            emit(&report, format, file)?;
            let summary_path = with_suffix(path, ".summary.json");
            std::fs::write(&summary_path, summary_json(&report) + "\n").map_err(|source| {
                ReportError::Io {
                    path: summary_path,
                    source,
                }
            })
        })(),
        None => emit(&report, format, io::stdout().lock())
            .map(|_| eprintln!("{}", summary_json(&report))),
    };
    if let Err(e) = written {
        return fail(EXIT_INVALID_STATE, e);
    }
    let s = &report.summary;
    eprintln!(
        "{}: {} samples, residual min {:e} max {:e}, {} violation(s) at tol {:e}",
        s.check, s.samples, s.min, s.max, s.violations, s.tol
    );
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VIOLATIONS)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen { name, args } => gen(&name, &args),
        Command::Measure {
            statefile,
            dims,
            basis_file,
        } => run_measure(&statefile, dims.as_deref(), basis_file.as_deref()),
        Command::Verify {
            check,
            samples,
            dims,
            seed,
            tol,
            out,
            format,
        } => {
            let mut cfg = SweepConfig::new(check, samples, dims, seed);
            if let Some(tol) = tol {
                cfg.tol = tol;
            }
            run_verify(cfg, out.as_deref(), format)
        }
    }
}
