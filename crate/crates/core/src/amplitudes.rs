//! Transition amplitudes through an interferometer.
//!
//! * `S(s, n) = per(L[n, s])`: the amplitude for the photons of input pattern
//!   `s` to leave in occupation `n`, scaled by `sqrt(n!)`.
//! * `T^(n1)(s, chi)`: the amplitude of finding `n1` photons in mode 1 and the
//!   detector modes `2..N` in the state `chi`.
//! * `Gamma^(n1)`: the matrix of conjugated `S` values, rows indexed by input
//!   patterns and columns by detector occupations, so that
//!   `(Gamma^(n1) x)_s = sqrt(n1!) * conj(T^(n1)(s, chi))` where
//!   `x[nbar] = chi[nbar] / sqrt(nbar!)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock_basis::{enumerate_occupations, enumerate_patterns, InputPattern, OccupationVector};
use crate::interferometer::Interferometer;
use crate::matrix::ComplexMatrix;
use crate::permanent::ryser_unchecked;

/// Tolerance on `sum |chi|^2 - 1`.
pub const PROJECTION_NORM_TOL: f64 = 1e-12;

/// A pure measurement state on the detector modes `2..N` with exactly `total` photons.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionState {
    modes: usize,
    total: usize,
    basis: Vec<OccupationVector>,
    amplitudes: Vec<Complex64>,
}

impl ProjectionState {
    /// `amplitudes[k]` belongs to the `k`-th vector of `enumerate_occupations(modes, total)`.
    pub fn from_amplitudes(modes: usize, total: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let basis = enumerate_occupations(modes, total).as_slice().to_vec();
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                actual: amplitudes.len(),
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > PROJECTION_NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self {
            modes,
            total,
            basis,
            amplitudes,
        })
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales to unit norm first.
    pub fn normalized(modes: usize, total: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::from_amplitudes(modes, total, amplitudes)
    }

    /// Sparse construction from `(occupation, amplitude)` pairs; all occupations must
    /// have the same total.
    pub fn from_pairs(modes: usize, pairs: &[(OccupationVector, Complex64)]) -> Result<Self> {
        let total = pairs.first().map_or(0, |(n, _)| n.total());
        let basis = enumerate_occupations(modes, total);
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.len()];
        for (n, a) in pairs {
            if n.modes() != modes {
                return Err(Error::DimensionMismatch {
                    expected: modes,
                    actual: n.modes(),
                });
            }
            let k = basis.index_of(n).ok_or_else(|| {
                Error::InvalidParameter(format!("occupation {n:?} is not in the {total}-photon sector"))
            })?;
            amps[k] += *a;
        }
        Self::from_amplitudes(modes, total, amps)
    }

    /// The Fock state `|nbar>` on the detector modes.
    pub fn fock(nbar: OccupationVector) -> Self {
        let modes = nbar.modes();
        Self::from_pairs(modes, &[(nbar, Complex64::new(1.0, 0.0))]).expect("Fock state is normalized")
    }

    /// State whose weighted vector (see [`weighted_vector`](Self::weighted_vector)) is
    /// proportional to `weighted`.
    pub fn from_weighted(modes: usize, total: usize, weighted: &[Complex64]) -> Result<Self> {
        let basis = enumerate_occupations(modes, total);
        if weighted.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                actual: weighted.len(),
            });
        }
        let amps = weighted
            .iter()
            .zip(basis.iter())
            .map(|(x, n)| x * (n.factorial_weight() as f64).sqrt())
            .collect();
        Self::normalized(modes, total, amps)
    }

    /// Random normalized state with i.i.d. complex Gaussian amplitudes.
    pub fn random(modes: usize, total: usize, rng: &mut impl Rng) -> Self {
        let len = enumerate_occupations(modes, total).len();
        let amps = (0..len)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(modes, total, amps).expect("Gaussian vector is nonzero")
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of photons detected, `D`.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn basis(&self) -> &[OccupationVector] {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Nonzero `(nbar, chi[nbar])` terms.
    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, Complex64)> {
        self.basis
            .iter()
            .zip(self.amplitudes.iter().copied())
            .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
    }

    /// `chi[nbar] / sqrt(nbar!)`, the vector the Gamma matrices act on.
    pub fn weighted_vector(&self) -> Vec<Complex64> {
        self.basis
            .iter()
            .zip(&self.amplitudes)
            .map(|(n, a)| a / (n.factorial_weight() as f64).sqrt())
            .collect()
    }
}

/// `L[n, s]`: column `i` of `L` repeated `s_i` times, row `j` repeated `n_j` times.
pub fn repeated_matrix(lambda: &Interferometer, n: &OccupationVector, s: &InputPattern) -> Result<ComplexMatrix> {
    let dim = lambda.dim();
    if n.modes() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: n.modes(),
        });
    }
    if s.modes() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: s.modes(),
        });
    }
    if n.total() != s.weight() {
        return Err(Error::TotalMismatch {
            rows: n.total(),
            cols: s.weight(),
        });
    }
    Ok(repeated_unchecked(lambda, n, s))
}

fn repeated_unchecked(lambda: &Interferometer, n: &OccupationVector, s: &InputPattern) -> ComplexMatrix {
    let rows: Vec<usize> = n
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(j, &c)| std::iter::repeat_n(j, c))
        .collect();
    let cols: Vec<usize> = s.occupied().collect();
    ComplexMatrix::from_fn(rows.len(), cols.len(), |a, b| lambda.entry(rows[a], cols[b]))
}

/// `S(s, n) = per(L[n, s])`, or exactly zero when the photon totals differ.
pub fn amplitude_s(lambda: &Interferometer, s: &InputPattern, n: &OccupationVector) -> Complex64 {
    assert_eq!(
        s.modes(),
        lambda.dim(),
        "input pattern length must equal the mode count"
    );
    assert_eq!(n.modes(), lambda.dim(), "occupation length must equal the mode count");
    if n.total() != s.weight() {
        return Complex64::new(0.0, 0.0);
    }
    ryser_unchecked(&repeated_unchecked(lambda, n, s))
}

/// `T^(n1)(s, chi) = sum_nbar conj(chi[nbar]) (n1! nbar!)^{-1/2} S(s, (n1, nbar))`.
///
/// Zero unless `|s| = D + n1`.
pub fn amplitude_t(lambda: &Interferometer, s: &InputPattern, chi: &ProjectionState, n1: usize) -> Complex64 {
    assert_eq!(chi.modes() + 1, lambda.dim(), "projection state must cover modes 2..N");
    if s.weight() != chi.total() + n1 {
        return Complex64::new(0.0, 0.0);
    }
    let n1_fact = crate::fock_basis::factorial(n1) as f64;
    chi.terms()
        .map(|(nbar, a)| {
            let n = nbar.with_leading(n1);
            let w = (n1_fact * nbar.factorial_weight() as f64).sqrt();
            a.conj() * amplitude_s(lambda, s, &n) / w
        })
        .sum()
}

/// `Gamma^(n1)` for detected total `D`.
#[derive(Clone, Debug)]
pub struct GammaMatrix {
    pub n1: usize,
    pub d: usize,
    /// Input patterns with `D + n1` photons, one per row.
    pub rows: Vec<InputPattern>,
    /// Detector occupations with `D` photons, one per column.
    pub cols: Vec<OccupationVector>,
    pub matrix: ComplexMatrix,
}

impl GammaMatrix {
    /// `Gamma^(n1) x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.matrix.apply(x)
    }

    /// `Gamma^dag Gamma`.
    pub fn gram(&self) -> ComplexMatrix {
        self.matrix.gram()
    }
}

/// Builds `Gamma^(n1)` with entries `conj(per(L[(n1, nbar), s]))`.
///
/// Shape is `C(N, D + n1) x C(D + N - 2, N - 2)`; when `D + n1 > N` there are no rows.
/// `n1` must be 0, 1 or 2.
pub fn build_gamma(lambda: &Interferometer, d: usize, n1: usize) -> Result<GammaMatrix> {
    if n1 > 2 {
        return Err(Error::InvalidParameter(format!(
            "Gamma is defined for n1 in 0..=2, got {n1}"
        )));
    }
    let n = lambda.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("Gamma needs at least two modes".into()));
    }
    let cols = enumerate_occupations(n - 1, d).as_slice().to_vec();
    let rows = enumerate_patterns(n, d + n1).as_slice().to_vec();
    let full_cols: Vec<OccupationVector> = cols.iter().map(|nbar| nbar.with_leading(n1)).collect();

    let data: Vec<Complex64> = rows
        .par_iter()
        .flat_map_iter(|s| {
            full_cols
                .iter()
                .map(move |nn| ryser_unchecked(&repeated_unchecked(lambda, nn, s)).conj())
        })
        .collect();
    let matrix = ComplexMatrix::new(rows.len(), cols.len(), data)?;
    Ok(GammaMatrix {
        n1,
        d,
        rows,
        cols,
        matrix,
    })
}
