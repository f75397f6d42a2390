//! `scan`, `verify` and `output`.

use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use photon_efficiency::amplitudes::ProjectionState;
use photon_efficiency::checks::{run_check, CheckConfig, CheckKind};
use photon_efficiency::conjecture::{scan, ScanConfig, ScanError, SCHEMA_VERSION, VIOLATION_TOL};
use photon_efficiency::fock_basis::OccupationVector;
use photon_efficiency::interferometer::{haar_random, Interferometer, RandomSeed};
use photon_efficiency::output_state::{output_statistics, SourceEfficiencies};
use serde::{Deserialize, Serialize};

use crate::parse::UsizeList;
use crate::{open_sink, with_jobs, write_json, Failure, Outcome};

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Mode counts, e.g. `4..6` or `4,6`.
    #[arg(long)]
    pub n: UsizeList,
    /// Detector photon numbers, or `auto` for every `D` in `2..=N-2`.
    #[arg(long, default_value = "auto")]
    pub d: String,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSONL destination; defaults to `$PHOTON_EFF_OUT_DIR/scan-<seed>.jsonl` or stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also run `D` in `{0, 1, N-1, N}`.
    #[arg(long)]
    pub include_analytic_d: bool,
    /// Also restrict to the null space of the two-photon block, with this relative tolerance.
    #[arg(long, num_args = 0..=1, default_missing_value = "1e-10")]
    pub null_space: Option<f64>,
    #[arg(long, default_value_t = VIOLATION_TOL)]
    pub violation_tol: f64,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Record wall time per trial (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{name} must be positive, got {v}")))
    }
}

pub fn scan_config(a: &ScanArgs) -> Result<ScanConfig, Failure> {
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    positive("--violation-tol", a.violation_tol)?;
    if let Some(tol) = a.null_space {
        positive("--null-space", tol)?;
    }
    let mut config = ScanConfig::new(a.n.0.clone(), a.trials, a.seed);
    config.d_values = match a.d.as_str() {
        "auto" => None,
        s => Some(
            s.parse::<UsizeList>()
                .map_err(|e| Failure::Usage(format!("--d: {e}")))?
                .0,
        ),
    };
    config.include_analytic_d = a.include_analytic_d;
    config.null_space = a.null_space;
    config.violation_tol = a.violation_tol;
    config.timing = a.timing;
    if config.sectors().is_empty() {
        return Err(Failure::Usage(format!(
            "no sector with 2 <= D <= N-2 for N in {:?}; pass --include-analytic-d to run D in {{0, 1, N-1, N}}",
            a.n.0
        )));
    }
    Ok(config)
}

pub fn run_scan(a: &ScanArgs) -> Outcome {
    let config = scan_config(a)?;
    let mut sink = open_sink(a.out.as_deref(), &format!("scan-{}.jsonl", a.seed))?;
    let summary = with_jobs(a.jobs, || scan(&config, |r| write_json(&mut *sink, r)))?;
    let summary = summary.map_err(|e| match e {
        ScanError::Compute(e) => Failure::from(e),
        ScanError::Sink(e) => Failure::Io(e),
    })?;
    write_json(&mut *sink, &summary)?;
    sink.flush()?;
    for s in &summary.sectors {
        eprintln!(
            "N = {} D = {}: min eigenvalue {:.3e}, relative {:.3e}, violations {}",
            s.n,
            s.d,
            s.min_eig.unwrap_or(f64::NAN),
            s.min_relative.unwrap_or(f64::NAN),
            s.violations
        );
    }
    Ok(summary.violations == 0)
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// One of bound-d-n1m1, bound-d0, recurrence, convexity, absorb, no-gain, or `all`.
    #[arg(long, default_value = "all")]
    pub check: String,
    #[arg(long, default_value = "4")]
    pub n: UsizeList,
    /// Random instances per mode count.
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Efficiency levels for the bound checks.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

pub fn run_verify(a: &VerifyArgs) -> Outcome {
    let kinds: Vec<CheckKind> = if a.check == "all" {
        CheckKind::ALL.to_vec()
    } else {
        vec![CheckKind::from_name(&a.check).ok_or_else(|| {
            let names: Vec<&str> = CheckKind::ALL.iter().map(|k| k.name()).collect();
            Failure::Usage(format!(
                "unknown check {:?}; expected one of {} or all",
                a.check,
                names.join(", ")
            ))
        })?]
    };
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let mut config = CheckConfig::new(a.n.0.clone(), a.trials, a.seed);
    if let Some(p) = &a.p {
        config.p_values = p.clone();
    }
    let mut sink = open_sink(a.out.as_deref(), &format!("verify-{}.jsonl", a.seed))?;
    let mut all_passed = true;
    for kind in kinds {
        let report = with_jobs(a.jobs, || run_check(kind, &config))??;
        eprintln!(
            "{}: {} (worst {:.3e}, tolerance {:.1e}, {} of {} applicable)",
            report.check,
            if report.passed { "PASS" } else { "FAIL" },
            report.worst,
            report.tolerance,
            report.applicable,
            report.instances
        );
        all_passed &= report.passed;
        write_json(&mut *sink, &report)?;
    }
    sink.flush()?;
    Ok(all_passed)
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Interferometer file in the JSON matrix format.
    #[arg(long, conflicts_with_all = ["seed", "identity"])]
    pub lambda: Option<PathBuf>,
    /// Draw a Haar-random interferometer from this seed.
    #[arg(long, conflicts_with = "identity")]
    pub seed: Option<u64>,
    /// Use the identity interferometer.
    #[arg(long)]
    pub identity: bool,
    /// Mode count for `--seed` and `--identity`; defaults to the length of `--p`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Source efficiencies, one per input or a single shared value.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    /// Photon counts on detector modes `2..N`; defaults to all zero.
    #[arg(long, value_delimiter = ',', conflicts_with = "chi_file")]
    pub chi_pattern: Option<Vec<usize>>,
    /// Measurement state as a JSON list of `{"occupation": [...], "amplitude": [re, im]}`.
    #[arg(long)]
    pub chi_file: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct ChiTerm {
    occupation: Vec<usize>,
    amplitude: Complex64,
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum Source {
    File(PathBuf),
    Seed(u64),
    Identity,
}

#[derive(Serialize)]
struct OutputReport {
    schema: u32,
    kind: &'static str,
    source: Source,
    n: usize,
    d: usize,
    p: Vec<f64>,
    p_max: f64,
    weights: Vec<f64>,
    success_probability: f64,
    possible: bool,
    normalization: Option<f64>,
    probabilities: Option<Vec<f64>>,
    c1: Option<f64>,
    c1_minus_p_max: Option<f64>,
}

/// `c1 - p_max` above this counts as a gain.
const GAIN_TOL: f64 = 1e-12;

pub fn run_output(a: &OutputArgs) -> Outcome {
    let (lambda, source) = if let Some(path) = &a.lambda {
        let text = std::fs::read_to_string(path)?;
        (Interferometer::from_json(&text)?, Source::File(path.clone()))
    } else {
        let n = a.n.unwrap_or(a.p.len());
        if n == 0 {
            return Err(Failure::Usage("need at least one mode".into()));
        }
        match a.seed {
            Some(seed) => (haar_random(n, RandomSeed::new(seed, 0)), Source::Seed(seed)),
            None if a.identity => (Interferometer::identity(n), Source::Identity),
            None => return Err(Failure::Usage("give one of --lambda, --seed or --identity".into())),
        }
    };
    let n = lambda.dim();
    let p = match a.p.as_slice() {
        [single] => SourceEfficiencies::uniform(n, *single)?,
        many => SourceEfficiencies::new(many.to_vec())?,
    };
    let chi = match (&a.chi_pattern, &a.chi_file) {
        (_, Some(path)) => {
            let terms: Vec<ChiTerm> = serde_json::from_str(&std::fs::read_to_string(path)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let pairs: Vec<(OccupationVector, Complex64)> = terms
                .into_iter()
                .map(|t| (OccupationVector::new(t.occupation), t.amplitude))
                .collect();
            ProjectionState::from_pairs(n - 1, &pairs)?
        }
        (Some(pattern), None) => ProjectionState::fock(OccupationVector::new(pattern.clone())),
        (None, None) => ProjectionState::fock(OccupationVector::vacuum(n - 1)),
    };
    let stats = output_statistics(&lambda, &p, &chi)?;
    let c1 = stats.probability(1);
    let report = OutputReport {
        schema: SCHEMA_VERSION,
        kind: "output",
        source,
        n,
        d: chi.total(),
        p: p.values().to_vec(),
        p_max: p.p_max(),
        success_probability: stats.success_probability(),
        possible: stats.is_possible(),
        normalization: stats.normalization(),
        probabilities: stats.probabilities(),
        c1,
        c1_minus_p_max: c1.map(|c| c - p.p_max()),
        weights: stats.weights,
    };
    if !report.possible {
        eprintln!("the conditioning outcome has probability zero");
    }
    let mut sink = open_sink(a.out.as_deref(), "output.json")?;
    write_json(&mut *sink, &report)?;
    sink.flush()?;
    Ok(report.c1_minus_p_max.is_none_or(|g| g <= GAIN_TOL))
}
