//! Positivity tests on the Gamma matrices and the Haar-random scan harness.
//!
//! The strong form asks that
//! `M = G0^dag G0 + G2^dag G2 / 2 - G1^dag G1` be positive semidefinite. The
//! weak form only asks that `G0^dag G0 - G1^dag G1` be positive semidefinite on
//! the null space of `G2`. Either one rules out raising the single-photon
//! efficiency with linear optics and photon counting.

use std::io;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::build_gamma;
use crate::eigen::{hermitian_eigen, HermitianEigen};
use crate::error::{Error, Result};
use crate::interferometer::{haar_random, Interferometer, MatrixFile, RandomSeed};
use crate::matrix::ComplexMatrix;

/// Relative eigenvalue threshold deciding membership in the null space of `G2`.
pub const NULL_SPACE_TOL: f64 = 1e-10;

/// Eigenvalues below `-VIOLATION_TOL * |M|` are reported as candidate violations.
pub const VIOLATION_TOL: f64 = 1e-8;

/// Version tag carried by every JSONL record.
pub const SCHEMA_VERSION: u32 = 1;

/// Trials evaluated in parallel before their records are flushed in order.
const SCAN_CHUNK: u64 = 64;

fn check_d(lambda: &Interferometer, d: usize) -> Result<()> {
    if lambda.dim() < 2 {
        return Err(Error::InvalidParameter("at least two modes are needed".into()));
    }
    if d > lambda.dim() {
        return Err(Error::InvalidParameter(format!(
            "D = {d} exceeds the photon number N = {}",
            lambda.dim()
        )));
    }
    Ok(())
}

/// `(G0^dag G0, G1^dag G1, G2^dag G2)` for detected total `D`.
pub fn gram_blocks(lambda: &Interferometer, d: usize) -> Result<[ComplexMatrix; 3]> {
    check_d(lambda, d)?;
    let g0 = build_gamma(lambda, d, 0)?.gram();
    let g1 = build_gamma(lambda, d, 1)?.gram();
    let g2 = build_gamma(lambda, d, 2)?.gram();
    Ok([g0, g1, g2])
}

/// `M = G0^dag G0 + G2^dag G2 / 2 - G1^dag G1`, symmetrized.
pub fn conjecture_matrix(lambda: &Interferometer, d: usize) -> Result<ComplexMatrix> {
    let [mut m, g1, g2] = gram_blocks(lambda, d)?;
    m.add_scaled(&g2, 0.5)?;
    m.add_scaled(&g1, -1.0)?;
    m.symmetrize();
    Ok(m)
}

/// Smallest eigenvalue of a Hermitian matrix. The empty matrix has none.
pub fn hermitian_min_eigenvalue(m: &ComplexMatrix) -> Result<Option<f64>> {
    Ok(hermitian_eigen(m, false)?.min())
}

/// Result of restricting `G0^dag G0 - G1^dag G1` to the null space of `G2`.
#[derive(Clone, Debug, PartialEq)]
pub struct NullSpaceReport {
    pub null_dim: usize,
    /// `None` when the null space is trivial.
    pub min_eig: Option<f64>,
    /// Largest eigenvalue magnitude of the restricted form.
    pub norm: f64,
}

/// Numerical null space of `G2`: eigenvectors of `G2^dag G2` with eigenvalue at
/// most `tol * |G2^dag G2|`. If `G2` has no rows the whole space qualifies.
pub fn null_space_test(lambda: &Interferometer, d: usize, tol: f64) -> Result<NullSpaceReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "null-space tolerance must be positive, got {tol}"
        )));
    }
    let [g0, g1, g2] = gram_blocks(lambda, d)?;
    let dim = g0.rows();
    let mut form = g0;
    form.add_scaled(&g1, -1.0)?;
    form.symmetrize();

    let eig2 = hermitian_eigen(&g2, true)?;
    let scale = eig2.max_abs();
    let vectors = eig2.vectors.expect("eigenvectors requested");
    let basis: Vec<usize> = (0..dim).filter(|&k| eig2.values[k] <= tol * scale).collect();
    if basis.is_empty() {
        return Ok(NullSpaceReport {
            null_dim: 0,
            min_eig: None,
            norm: 0.0,
        });
    }
    let v = ComplexMatrix::from_fn(dim, basis.len(), |i, j| vectors[(i, basis[j])]);
    let mut restricted = v.adjoint().matmul(&form)?.matmul(&v)?;
    restricted.symmetrize();
    let eig = hermitian_eigen(&restricted, false)?;
    Ok(NullSpaceReport {
        null_dim: basis.len(),
        min_eig: eig.min(),
        norm: eig.max_abs(),
    })
}

/// Full spectrum of `M` plus, optionally, the null-space test.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub dim: usize,
    pub spectrum: Vec<f64>,
    pub null_space: Option<NullSpaceReport>,
}

impl Analysis {
    pub fn min_eig(&self) -> Option<f64> {
        self.spectrum.first().copied()
    }

    /// `max |eigenvalue|` of `M`.
    pub fn norm(&self) -> f64 {
        self.spectrum.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Whether either form dips below `-violation_tol * |M|`.
    pub fn is_violation(&self, violation_tol: f64) -> bool {
        let floor = -violation_tol * self.norm();
        self.min_eig().is_some_and(|v| v < floor)
            || self
                .null_space
                .as_ref()
                .and_then(|r| r.min_eig)
                .is_some_and(|v| v < floor)
    }
}

pub fn analyze(lambda: &Interferometer, d: usize, null_tol: Option<f64>) -> Result<Analysis> {
    let m = conjecture_matrix(lambda, d)?;
    let HermitianEigen { values, .. } = hermitian_eigen(&m, false)?;
    let null_space = null_tol.map(|tol| null_space_test(lambda, d, tol)).transpose()?;
    Ok(Analysis {
        dim: m.rows(),
        spectrum: values,
        null_space,
    })
}

/// Which `(N, D)` sectors and how many Haar trials to run.
#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub n_values: Vec<usize>,
    /// `None` selects every admissible `D`.
    pub d_values: Option<Vec<usize>>,
    /// Keep `D` in `{0, 1, N-1, N}`, where the result is known in closed form.
    pub include_analytic_d: bool,
    pub trials: u64,
    pub seed: u64,
    /// Run [`null_space_test`] with this tolerance on every trial.
    pub null_space: Option<f64>,
    pub violation_tol: f64,
    /// Fill the `ms` field. Off by default since wall time breaks reproducibility.
    pub timing: bool,
}

impl ScanConfig {
    pub fn new(n_values: Vec<usize>, trials: u64, seed: u64) -> Self {
        Self {
            n_values,
            d_values: None,
            include_analytic_d: false,
            trials,
            seed,
            null_space: None,
            violation_tol: VIOLATION_TOL,
            timing: false,
        }
    }

    /// The `(N, D)` pairs to visit, in order.
    pub fn sectors(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &n in &self.n_values {
            let candidates: Vec<usize> = match &self.d_values {
                Some(ds) => ds.clone(),
                None => (0..=n).collect(),
            };
            for d in candidates {
                let numeric = d >= 2 && d + 2 <= n;
                if d <= n && (numeric || self.include_analytic_d) {
                    out.push((n, d));
                }
            }
        }
        out
    }
}

/// Matrix and spectrum kept for a candidate violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub lambda: MatrixFile,
    pub spectrum: Vec<f64>,
    pub null_min_eig: Option<f64>,
}

/// One JSONL line per trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub schema: u32,
    pub kind: String,
    pub n: usize,
    pub d: usize,
    pub trial: u64,
    pub seed: u64,
    pub dim: usize,
    pub min_eig: Option<f64>,
    pub norm: f64,
    pub null_dim: Option<usize>,
    pub null_min_eig: Option<f64>,
    pub ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violation: Option<Violation>,
}

/// Aggregate over all trials of one sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub n: usize,
    pub d: usize,
    pub trials: u64,
    pub min_eig: Option<f64>,
    /// Smallest `min_eig / |M|` seen.
    pub min_relative: Option<f64>,
    pub null_min_eig: Option<f64>,
    pub violations: u64,
}

/// Final JSONL line of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub schema: u32,
    pub kind: String,
    pub seed: u64,
    pub trials: u64,
    pub sectors: Vec<SectorSummary>,
    pub violations: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("writing scan output failed: {0}")]
    Sink(#[from] io::Error),
}

/// Evaluates a single Haar trial of sector `(n, d)`.
pub fn run_trial(n: usize, d: usize, trial: u64, config: &ScanConfig) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = RandomSeed::for_sector(config.seed, n, d, trial);
    let lambda = haar_random(n, seed);
    let analysis = analyze(&lambda, d, config.null_space)?;
    let violation = analysis.is_violation(config.violation_tol).then(|| Violation {
        lambda: lambda.to_file(),
        spectrum: analysis.spectrum.clone(),
        null_min_eig: analysis.null_space.as_ref().and_then(|r| r.min_eig),
    });
    let ms = config.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(TrialRecord {
        schema: SCHEMA_VERSION,
        kind: "trial".into(),
        n,
        d,
        trial,
        seed: seed.stream_seed(),
        dim: analysis.dim,
        min_eig: analysis.min_eig(),
        norm: analysis.norm(),
        null_dim: analysis.null_space.as_ref().map(|r| r.null_dim),
        null_min_eig: analysis.null_space.as_ref().and_then(|r| r.min_eig),
        ms,
        violation,
    })
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Runs every trial of every sector on the current rayon pool and hands the
/// records to `sink` in `(sector, trial)` order, so the output does not depend
/// on the number of threads.
pub fn scan(
    config: &ScanConfig,
    mut sink: impl FnMut(&TrialRecord) -> io::Result<()>,
) -> std::result::Result<ScanSummary, ScanError> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()).into());
    }
    let mut sectors = Vec::new();
    for (n, d) in config.sectors() {
        let mut summary = SectorSummary {
            n,
            d,
            trials: config.trials,
            min_eig: None,
            min_relative: None,
            null_min_eig: None,
            violations: 0,
        };
        let mut start = 0;
        while start < config.trials {
            let end = (start + SCAN_CHUNK).min(config.trials);
            let records: Vec<TrialRecord> = (start..end)
                .into_par_iter()
                .map(|trial| run_trial(n, d, trial, config))
                .collect::<Result<_>>()?;
            for r in &records {
                summary.min_eig = min_opt(summary.min_eig, r.min_eig);
                let rel = r.min_eig.map(|v| if r.norm > 0.0 { v / r.norm } else { 0.0 });
                summary.min_relative = min_opt(summary.min_relative, rel);
                summary.null_min_eig = min_opt(summary.null_min_eig, r.null_min_eig);
                summary.violations += u64::from(r.violation.is_some());
                sink(r)?;
            }
            start = end;
        }
        sectors.push(summary);
    }
    let violations = sectors.iter().map(|s| s.violations).sum();
    Ok(ScanSummary {
        schema: SCHEMA_VERSION,
        kind: "summary".into(),
        seed: config.seed,
        trials: config.trials,
        sectors,
        violations,
    })
}
