//! Photon-number statistics of mode 1 after conditioning the other modes.
//!
//! Input `i` carries a single photon with probability `p_i` and is empty
//! otherwise. After the interferometer, modes `2..N` are projected onto `chi`
//! and mode 1 is left with `n1` photons with probability
//! `c[n1] = K * sum_s P_s |T^(n1)(s, chi)|^2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitudes::{amplitude_t, ProjectionState};
use crate::error::{Error, Result};
use crate::fock_basis::{enumerate_patterns, InputPattern};
use crate::interferometer::Interferometer;

/// Relative size below which `w2` counts as zero.
pub const W2_ZERO_TOL: f64 = 1e-12;

/// Per-input single-photon probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SourceEfficiencies(Vec<f64>);

impl SourceEfficiencies {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some(bad) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("efficiency {bad} is outside [0, 1]")));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn p_max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Number of inputs that can emit a photon at all.
    pub fn active(&self) -> usize {
        self.0.iter().filter(|&&x| x > 0.0).count()
    }
}

impl TryFrom<Vec<f64>> for SourceEfficiencies {
    type Error = Error;
    fn try_from(p: Vec<f64>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<SourceEfficiencies> for Vec<f64> {
    fn from(p: SourceEfficiencies) -> Self {
        p.0
    }
}

/// `prod_i p_i^{s_i} (1 - p_i)^{1 - s_i}`.
pub fn pattern_probability(p: &SourceEfficiencies, s: &InputPattern) -> f64 {
    assert_eq!(p.len(), s.modes(), "efficiencies and pattern must have the same length");
    p.0.iter()
        .zip(s.bits())
        .map(|(&pi, &b)| if b == 1 { pi } else { 1.0 - pi })
        .product()
}

/// Unnormalized weights `w[n1]` for `n1 = 0..=N-D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputStatistics {
    pub weights: Vec<f64>,
}

impl OutputStatistics {
    /// Probability of the conditioning outcome, `sum w`.
    pub fn success_probability(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// False when the projection onto `chi` can never succeed.
    pub fn is_possible(&self) -> bool {
        self.success_probability() > 0.0
    }

    /// `K = 1 / sum w`.
    pub fn normalization(&self) -> Option<f64> {
        self.is_possible().then(|| 1.0 / self.success_probability())
    }

    /// `c[n1]`, or `None` for an impossible outcome.
    pub fn probabilities(&self) -> Option<Vec<f64>> {
        let k = self.normalization()?;
        Some(self.weights.iter().map(|w| w * k).collect())
    }

    pub fn probability(&self, n1: usize) -> Option<f64> {
        let k = self.normalization()?;
        Some(self.weights.get(n1).copied().unwrap_or(0.0) * k)
    }

    /// `w[n1]`, zero beyond the stored range.
    pub fn weight(&self, n1: usize) -> f64 {
        self.weights.get(n1).copied().unwrap_or(0.0)
    }

    /// `|w2| <= W2_ZERO_TOL * sum w`.
    pub fn two_photon_weight_vanishes(&self) -> bool {
        self.weight(2).abs() <= W2_ZERO_TOL * self.success_probability()
    }
}

/// Weights `w[n1] = sum_s P_s |T^(n1)(s, chi)|^2`.
pub fn output_statistics(
    lambda: &Interferometer,
    p: &SourceEfficiencies,
    chi: &ProjectionState,
) -> Result<OutputStatistics> {
    let n = lambda.dim();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: p.len(),
        });
    }
    if chi.modes() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            actual: chi.modes(),
        });
    }
    let d = chi.total();
    if d > n {
        return Ok(OutputStatistics { weights: vec![0.0] });
    }
    let weights = (0..=n - d)
        .map(|n1| {
            let patterns = enumerate_patterns(n, d + n1);
            let terms: Vec<f64> = patterns
                .as_slice()
                .par_iter()
                .map(|s| {
                    let ps = pattern_probability(p, s);
                    if ps == 0.0 {
                        0.0
                    } else {
                        ps * amplitude_t(lambda, s, chi, n1).norm_sqr()
                    }
                })
                .collect();
            terms.iter().sum()
        })
        .collect();
    Ok(OutputStatistics { weights })
}

/// Comparison of `c1 / c0` with `p_max (N1 - D) / (1 - p_max)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub d: usize,
    /// Inputs with nonzero efficiency.
    pub active: usize,
    pub p_max: f64,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    /// `None` if the outcome is impossible or `c0 = 0`.
    pub ratio: Option<f64>,
    pub bound: f64,
    pub margin: Option<f64>,
}

impl BoundReport {
    /// Holds when the ratio is undefined or does not exceed the bound by more than `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.margin.is_none_or(|m| m >= -tol)
    }
}

fn two_level(p: &SourceEfficiencies) -> Result<f64> {
    let p_max = p.p_max();
    if !(p_max > 0.0 && p_max < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "the bound needs 0 < p_max < 1, got {p_max}"
        )));
    }
    if p.values().iter().any(|&x| x != 0.0 && x != p_max) {
        return Err(Error::InvalidParameter(
            "every input must have efficiency 0 or p_max".into(),
        ));
    }
    Ok(p_max)
}

fn bound_report(lambda: &Interferometer, p: &SourceEfficiencies, chi: &ProjectionState) -> Result<BoundReport> {
    let p_max = two_level(p)?;
    let active = p.active();
    let d = chi.total();
    let stats = output_statistics(lambda, p, chi)?;
    let probs = stats.probabilities();
    let c0 = probs.as_ref().map(|c| c[0]);
    let c1 = probs.as_ref().map(|c| c.get(1).copied().unwrap_or(0.0));
    let ratio = match (c0, c1) {
        (Some(c0), Some(c1)) if c0 > 0.0 => Some(c1 / c0),
        _ => None,
    };
    let bound = p_max * active.saturating_sub(d) as f64 / (1.0 - p_max);
    Ok(BoundReport {
        n: lambda.dim(),
        d,
        active,
        p_max,
        c0,
        c1,
        ratio,
        bound,
        margin: ratio.map(|r| bound - r),
    })
}

/// The `D = N1 - 1` no-go bound, where `N1` counts the active inputs, all at `p_max`.
pub fn verify_bound_d_eq_n1_minus_1(
    lambda: &Interferometer,
    p: &SourceEfficiencies,
    chi: &ProjectionState,
) -> Result<BoundReport> {
    two_level(p)?;
    if chi.total() + 1 != p.active() {
        return Err(Error::InvalidParameter(format!(
            "expected D = N1 - 1 = {}, got D = {}",
            p.active().saturating_sub(1),
            chi.total()
        )));
    }
    bound_report(lambda, p, chi)
}

/// The same bound with no photons detected, `c1 / c0 <= p_max N1 / (1 - p_max)`.
pub fn verify_bound_d0(lambda: &Interferometer, p: &SourceEfficiencies, chi: &ProjectionState) -> Result<BoundReport> {
    if chi.total() != 0 {
        return Err(Error::InvalidParameter(format!(
            "expected D = 0, got D = {}",
            chi.total()
        )));
    }
    bound_report(lambda, p, chi)
}

/// Mixed efficiencies written as a mixture of inputs that are either at `level` or empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub level: f64,
    pub configurations: usize,
    /// `max_n1 |w(p) - sum_k q_k w(config_k)|`.
    pub max_deviation: f64,
    pub c1: Option<f64>,
    /// Largest `c1` over the configurations with a possible outcome.
    pub max_extreme_c1: Option<f64>,
}

/// [`convexity_check_at`] with `level = p_max`.
pub fn convexity_check(
    lambda: &Interferometer,
    p: &SourceEfficiencies,
    chi: &ProjectionState,
) -> Result<ConvexityReport> {
    convexity_check_at(lambda, p, chi, p.p_max())
}

/// Splits each `p_i` strictly between 0 and `level` as
/// `(p_i / level) * level + (1 - p_i / level) * 0` and compares the weights.
pub fn convexity_check_at(
    lambda: &Interferometer,
    p: &SourceEfficiencies,
    chi: &ProjectionState,
    level: f64,
) -> Result<ConvexityReport> {
    if !(level > 0.0 && level <= 1.0) || p.values().iter().any(|&x| x > level) {
        return Err(Error::InvalidParameter(format!(
            "level {level} must lie in (0, 1] and bound every efficiency"
        )));
    }
    let partial: Vec<usize> = (0..p.len())
        .filter(|&i| p.values()[i] != 0.0 && p.values()[i] != level)
        .collect();
    if partial.len() > 16 {
        return Err(Error::TooLarge {
            dim: partial.len(),
            limit: 16,
        });
    }
    let direct = output_statistics(lambda, p, chi)?;
    let mut mixed = vec![0.0; direct.weights.len()];
    let mut max_extreme_c1: Option<f64> = None;
    let configurations = 1usize << partial.len();
    for mask in 0..configurations {
        let mut q = 1.0;
        let mut values = p.values().to_vec();
        for (b, &i) in partial.iter().enumerate() {
            let frac = p.values()[i] / level;
            if mask & (1 << b) != 0 {
                values[i] = level;
                q *= frac;
            } else {
                values[i] = 0.0;
                q *= 1.0 - frac;
            }
        }
        let stats = output_statistics(lambda, &SourceEfficiencies::new(values)?, chi)?;
        for (acc, w) in mixed.iter_mut().zip(&stats.weights) {
            *acc += q * w;
        }
        if let Some(c1) = stats.probability(1) {
            max_extreme_c1 = Some(max_extreme_c1.map_or(c1, |m| m.max(c1)));
        }
    }
    let max_deviation = direct
        .weights
        .iter()
        .zip(&mixed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(ConvexityReport {
        level,
        configurations,
        max_deviation,
        c1: direct.probability(1),
        max_extreme_c1,
    })
}
