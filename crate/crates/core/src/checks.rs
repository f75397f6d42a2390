//! Randomized verifications of the structural identities and no-go bounds.
//!
//! Every check draws its instances from [`RandomSeed`] streams keyed by the
//! master seed and the instance index, evaluates them on the current rayon
//! pool, and reduces in index order, so reports are reproducible bit for bit.

use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{amplitude_t, build_gamma, ProjectionState};
use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::fock_basis::{clear_one, enumerate_patterns, InputPattern, OccupationVector};
use crate::interferometer::{absorb_single_photon_projection, haar_random, Interferometer, RandomSeed};
use crate::output_state::{
    convexity_check_at, output_statistics, verify_bound_d0, verify_bound_d_eq_n1_minus_1, SourceEfficiencies,
};

/// Summary of one randomized check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub seed: u64,
    pub instances: u64,
    /// Instances on which the property actually had something to say.
    pub applicable: u64,
    /// Largest residual, or most negative margin, over all instances.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Selector for [`run_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckKind {
    BoundDEqN1Minus1,
    BoundD0,
    Recurrence,
    Convexity,
    Absorb,
    NoGain,
}

impl CheckKind {
    pub const ALL: [CheckKind; 6] = [
        CheckKind::BoundDEqN1Minus1,
        CheckKind::BoundD0,
        CheckKind::Recurrence,
        CheckKind::Convexity,
        CheckKind::Absorb,
        CheckKind::NoGain,
    ];

    /// Inverse of [`name`](Self::name).
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::BoundDEqN1Minus1 => "bound-d-n1m1",
            CheckKind::BoundD0 => "bound-d0",
            CheckKind::Recurrence => "recurrence",
            CheckKind::Convexity => "convexity",
            CheckKind::Absorb => "absorb",
            CheckKind::NoGain => "no-gain",
        }
    }
}

/// Instance counts and ranges shared by the checks.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub n_values: Vec<usize>,
    pub instances: u64,
    pub seed: u64,
    /// Efficiency levels for the bound checks.
    pub p_values: Vec<f64>,
}

impl CheckConfig {
    pub fn new(n_values: Vec<usize>, instances: u64, seed: u64) -> Self {
        Self {
            n_values,
            instances,
            seed,
            p_values: vec![0.1, 0.5, 0.9],
        }
    }
}

pub fn run_check(kind: CheckKind, config: &CheckConfig) -> Result<CheckReport> {
    match kind {
        CheckKind::BoundDEqN1Minus1 => check_bound(config, false),
        CheckKind::BoundD0 => check_bound(config, true),
        CheckKind::Recurrence => check_recurrence(config, &[0, 1, 2, 3]),
        CheckKind::Convexity => check_convexity(config),
        CheckKind::Absorb => check_absorb(config),
        CheckKind::NoGain => check_no_gain(config),
    }
}

/// Per-instance generator, independent of evaluation order.
fn instance_rng(seed: u64, tag: usize, n: usize, i: u64) -> ChaCha20Rng {
    RandomSeed::for_sector(seed, n, tag, i).rng()
}

fn random_unitary(n: usize, rng: &mut impl Rng) -> Interferometer {
    haar_random(n, RandomSeed::new(rng.random(), rng.random()))
}

fn random_unit_vector(len: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

fn random_pattern(n: usize, weight: usize, rng: &mut impl Rng) -> InputPattern {
    enumerate_patterns(n, weight)
        .as_slice()
        .choose(rng)
        .expect("weight <= n")
        .clone()
}

/// Runs `f` on every instance index and returns the outcomes in index order.
fn per_instance<T: Send>(config: &CheckConfig, f: impl Fn(usize, u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let jobs: Vec<(usize, u64)> = config
        .n_values
        .iter()
        .flat_map(|&n| (0..config.instances).map(move |i| (n, i)))
        .collect();
    jobs.par_iter().map(|&(n, i)| f(n, i)).collect()
}

fn report(
    name: &str,
    config: &CheckConfig,
    instances: u64,
    applicable: u64,
    worst: f64,
    tol: f64,
    lower_is_bad: bool,
) -> CheckReport {
    let passed = if lower_is_bad { worst >= -tol } else { worst <= tol };
    CheckReport {
        check: name.to_string(),
        seed: config.seed,
        instances,
        applicable,
        worst,
        tolerance: tol,
        passed,
    }
}

/// `c1 / c0 <= p_max (N1 - D) / (1 - p_max)` with random active subsets at every level
/// in `p_values`; `D = N1 - 1` or, for `d0`, `D = 0`.
pub fn check_bound(config: &CheckConfig, d0: bool) -> Result<CheckReport> {
    let tag = if d0 { 10 } else { 11 };
    let margins = per_instance(config, |n, i| {
        let mut rng = instance_rng(config.seed, tag, n, i);
        let lambda = random_unitary(n, &mut rng);
        let mut out = Vec::new();
        for &p_max in &config.p_values {
            let active = rng.random_range(1..=n);
            let mut p = vec![0.0; n];
            for j in rand::seq::index::sample(&mut rng, n, active) {
                p[j] = p_max;
            }
            let p = SourceEfficiencies::new(p)?;
            let d = if d0 { 0 } else { active - 1 };
            let chi = ProjectionState::random(n - 1, d, &mut rng);
            let r = if d0 {
                verify_bound_d0(&lambda, &p, &chi)?
            } else {
                verify_bound_d_eq_n1_minus_1(&lambda, &p, &chi)?
            };
            out.push(r.margin);
        }
        Ok(out)
    })?;
    let flat: Vec<Option<f64>> = margins.into_iter().flatten().collect();
    let applicable = flat.iter().filter(|m| m.is_some()).count() as u64;
    let worst = flat.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let name = if d0 {
        CheckKind::BoundD0.name()
    } else {
        CheckKind::BoundDEqN1Minus1.name()
    };
    Ok(report(name, config, flat.len() as u64, applicable, worst, 1e-12, true))
}

/// `T^(n1+1)(s) = (n1+1)^{-1/2} sum_{i: s_i = 1} L[1, i] T^(n1)(s with bit i cleared)`.
pub fn check_recurrence(config: &CheckConfig, n1_values: &[usize]) -> Result<CheckReport> {
    let residuals = per_instance(config, |n, i| {
        let mut rng = instance_rng(config.seed, 20, n, i);
        let lambda = random_unitary(n, &mut rng);
        let mut worst: Option<f64> = None;
        for &n1 in n1_values {
            if n1 + 1 > n {
                continue;
            }
            let d = rng.random_range(0..=n - n1 - 1);
            let chi = ProjectionState::random(n - 1, d, &mut rng);
            let s = random_pattern(n, d + n1 + 1, &mut rng);
            let lhs = amplitude_t(&lambda, &s, &chi, n1 + 1);
            let rhs: Complex64 = s
                .occupied()
                .map(|k| lambda.entry(0, k) * amplitude_t(&lambda, &clear_one(&s, k).expect("bit set"), &chi, n1))
                .sum::<Complex64>()
                / ((n1 + 1) as f64).sqrt();
            let r = (lhs - rhs).norm();
            worst = Some(worst.map_or(r, |w: f64| w.max(r)));
        }
        Ok(worst)
    })?;
    let applicable = residuals.iter().flatten().count() as u64;
    let worst = residuals.iter().flatten().copied().fold(0.0, f64::max);
    Ok(report(
        CheckKind::Recurrence.name(),
        config,
        residuals.len() as u64,
        applicable,
        worst,
        1e-11,
        false,
    ))
}

/// Mixed efficiencies against the explicit mixture over all-or-nothing inputs.
pub fn check_convexity(config: &CheckConfig) -> Result<CheckReport> {
    let deviations = per_instance(config, |n, i| {
        let mut rng = instance_rng(config.seed, 30, n, i);
        let lambda = random_unitary(n, &mut rng);
        let level = if rng.random_bool(0.5) {
            1.0
        } else {
            rng.random_range(0.3..1.0)
        };
        let p: Vec<f64> = (0..n)
            .map(|_| match rng.random_range(0..3) {
                0 => 0.0,
                1 => level,
                _ => rng.random_range(0.0..level),
            })
            .collect();
        let d = rng.random_range(0..n);
        let chi = ProjectionState::random(n - 1, d, &mut rng);
        let r = convexity_check_at(&lambda, &SourceEfficiencies::new(p)?, &chi, level)?;
        // a mixture can never beat its best component
        let c1_ok = match (r.c1, r.max_extreme_c1) {
            (Some(c), Some(m)) => c <= m + 1e-12,
            _ => true,
        };
        Ok(if c1_ok { r.max_deviation } else { f64::INFINITY })
    })?;
    let worst = deviations.iter().copied().fold(0.0, f64::max);
    let count = deviations.len() as u64;
    Ok(report(
        CheckKind::Convexity.name(),
        config,
        count,
        count,
        worst,
        1e-11,
        false,
    ))
}

/// Projection onto a one-photon `chi` against the folded interferometer with a
/// plain photon count in mode 2.
pub fn check_absorb(config: &CheckConfig) -> Result<CheckReport> {
    let residuals = per_instance(config, |n, i| {
        let mut rng = instance_rng(config.seed, 40, n, i);
        let lambda = random_unitary(n, &mut rng);
        let phi = random_unit_vector(n - 1, &mut rng);
        let chi = ProjectionState::from_amplitudes(n - 1, 1, phi.clone())?;
        let folded = absorb_single_photon_projection(&phi, &lambda)?;
        let mut counts = vec![0; n - 1];
        counts[0] = 1;
        let click = ProjectionState::fock(OccupationVector::new(counts));
        let mut worst: f64 = 0.0;
        for n1 in 0..n {
            for s in enumerate_patterns(n, 1 + n1).iter() {
                let direct = amplitude_t(&lambda, s, &chi, n1);
                let via = amplitude_t(&folded, s, &click, n1);
                worst = worst.max((direct - via).norm());
            }
        }
        Ok(worst)
    })?;
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let count = residuals.len() as u64;
    Ok(report(
        CheckKind::Absorb.name(),
        config,
        count,
        count,
        worst,
        1e-12,
        false,
    ))
}

/// `c1 <= p_max` whenever one photon is detected and the two-photon weight vanishes.
///
/// `chi` is drawn from the numerical null space of `Gamma^(2)` at `D = 1` when
/// it is nontrivial (generically only for `N = 3`), and at random otherwise;
/// only instances with `w2 = 0` count as applicable.
pub fn check_no_gain(config: &CheckConfig) -> Result<CheckReport> {
    let outcomes = per_instance(config, |n, i| {
        let mut rng = instance_rng(config.seed, 50, n, i);
        let lambda = random_unitary(n, &mut rng);
        let g2 = build_gamma(&lambda, 1, 2)?;
        let eig = hermitian_eigen(&g2.gram(), true)?;
        let scale = eig.max_abs();
        let vectors = eig.vectors.as_ref().expect("eigenvectors requested");
        let null: Vec<usize> = (0..eig.values.len())
            .filter(|&k| eig.values[k] <= crate::conjecture::NULL_SPACE_TOL * scale)
            .collect();
        let chi = if null.is_empty() {
            ProjectionState::random(n - 1, 1, &mut rng)
        } else {
            let coeffs = random_unit_vector(null.len(), &mut rng);
            let weighted: Vec<Complex64> = (0..n - 1)
                .map(|row| null.iter().zip(&coeffs).map(|(&k, c)| vectors[(row, k)] * c).sum())
                .collect();
            ProjectionState::from_weighted(n - 1, 1, &weighted)?
        };
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
        let p = SourceEfficiencies::new(p)?;
        let stats = output_statistics(&lambda, &p, &chi)?;
        if !stats.is_possible() || !stats.two_photon_weight_vanishes() {
            return Ok(None);
        }
        let c1 = stats.probability(1).expect("possible outcome");
        Ok(Some(c1 - p.p_max()))
    })?;
    let applicable = outcomes.iter().flatten().count() as u64;
    // margin form: p_max - c1, most negative is worst
    let worst = outcomes.iter().flatten().map(|x| -x).fold(f64::INFINITY, f64::min);
    Ok(report(
        CheckKind::NoGain.name(),
        config,
        outcomes.len() as u64,
        applicable,
        worst,
        1e-9,
        true,
    ))
}

/// Checks `T^(2)(s) = 0` for all `s` implies `T^(3)(s) = 0` for all `s`, using
/// `chi` built from the null space of `Gamma^(2)`. Returns the largest `|T^(3)|`
/// seen together with the largest `|T^(2)|`, over `instances` draws.
pub fn check_two_photon_implies_three(n: usize, d: usize, instances: u64, seed: u64) -> Result<(f64, f64)> {
    if d + 3 > n {
        return Err(Error::InvalidParameter(format!(
            "need D + 3 <= N, got N = {n}, D = {d}"
        )));
    }
    let config = CheckConfig::new(vec![n], instances, seed);
    let out = per_instance(&config, |n, i| {
        let mut rng = instance_rng(seed, 60 + d, n, i);
        let lambda = random_unitary(n, &mut rng);
        let g2 = build_gamma(&lambda, d, 2)?;
        let eig = hermitian_eigen(&g2.gram(), true)?;
        let scale = eig.max_abs();
        let vectors = eig.vectors.as_ref().expect("eigenvectors requested");
        let null: Vec<usize> = (0..eig.values.len())
            .filter(|&k| eig.values[k] <= crate::conjecture::NULL_SPACE_TOL * scale)
            .collect();
        if null.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "Gamma^(2) has a trivial null space at N = {n}, D = {d}"
            )));
        }
        let coeffs = random_unit_vector(null.len(), &mut rng);
        let weighted: Vec<Complex64> = (0..g2.cols.len())
            .map(|row| null.iter().zip(&coeffs).map(|(&k, c)| vectors[(row, k)] * c).sum())
            .collect();
        let chi = ProjectionState::from_weighted(n - 1, d, &weighted)?;
        let t2 = enumerate_patterns(n, d + 2)
            .iter()
            .map(|s| amplitude_t(&lambda, s, &chi, 2).norm())
            .fold(0.0, f64::max);
        let t3 = enumerate_patterns(n, d + 3)
            .iter()
            .map(|s| amplitude_t(&lambda, s, &chi, 3).norm())
            .fold(0.0, f64::max);
        Ok((t2, t3))
    })?;
    Ok(out
        .iter()
        .fold((0.0, 0.0), |(a, b), &(t2, t3)| (f64::max(a, t2), f64::max(b, t3))))
}
