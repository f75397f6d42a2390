//! `photon-eff`: scans, verifiers and scheme simulations.

mod commands;
mod parse;
mod scheme;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Environment variable naming the directory for output files when `--out` is absent.
pub const OUT_DIR_ENV: &str = "PHOTON_EFF_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "photon-eff", version, about = "Linear-optics efficiency scans and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimum eigenvalues over Haar-random interferometers, one JSONL record per trial.
    Scan(commands::ScanArgs),
    /// Randomized checks of the no-gain bounds and identities.
    Verify(commands::VerifyArgs),
    /// Closed-form output of one of the four qubit circuits.
    Scheme(scheme::SchemeArgs),
    /// Photon statistics of mode 1 for a given interferometer and measurement.
    Output(commands::OutputArgs),
}

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<photon_efficiency::Error> for Failure {
    fn from(e: photon_efficiency::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// `Ok(true)` when every check passed and no violation was seen.
pub type Outcome = Result<bool, Failure>;

/// `--out` if given, else a file in `$PHOTON_EFF_OUT_DIR`, else stdout.
pub fn open_sink(out: Option<&Path>, default_name: &str) -> io::Result<Box<dyn Write + Send>> {
    let path: Option<PathBuf> = match out {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(OUT_DIR_ENV).map(|dir| Path::new(&dir).join(default_name)),
    };
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

pub fn write_json(w: &mut dyn Write, value: &impl serde::Serialize) -> io::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Scan(a) => commands::run_scan(&a),
        Command::Verify(a) => commands::run_verify(&a),
        Command::Scheme(a) => scheme::run_scheme(&a),
        Command::Output(a) => commands::run_output(&a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("I/O error: {e}");
            ExitCode::from(3)
        }
    }
}
