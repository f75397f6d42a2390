//! Single-rail qubits: `rho = E |phi><phi| + (1 - E) |0><0|` with
//! `|phi> = gamma |0> + beta |1>`.
//!
//! The efficiency measure `E_gen = |beta|^2 E / (1 - |gamma|^2 E)` reduces to the
//! photon efficiency for `gamma = 0` and cannot be raised by linear optics if the
//! photon no-go results hold.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod schemes;
pub mod truncated;

pub use schemes::{Scheme, SchemeResult, Splitter};
pub use truncated::TruncatedState;

/// Tolerance on `|gamma|^2 + |beta|^2 - 1`.
pub const QUBIT_NORM_TOL: f64 = 1e-12;

/// `E |phi><phi| + (1 - E) |0><0|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleRailQubit {
    pub gamma: Complex64,
    pub beta: Complex64,
    #[serde(rename = "E")]
    pub efficiency: f64,
}

impl SingleRailQubit {
    pub fn new(gamma: Complex64, beta: Complex64, efficiency: f64) -> Result<Self> {
        let norm_sqr = gamma.norm_sqr() + beta.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > QUBIT_NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(Error::InvalidParameter(format!(
                "efficiency {efficiency} is outside [0, 1]"
            )));
        }
        Ok(Self {
            gamma,
            beta,
            efficiency,
        })
    }

    pub fn pure(gamma: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(gamma, beta, 1.0)
    }

    pub fn vacuum() -> Self {
        Self {
            gamma: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
            efficiency: 1.0,
        }
    }

    /// Mixture of `rho` at trace 1 in the basis `{|0>, |1>}`.
    ///
    /// Any such density matrix has this form, with `E = rho11 + |rho01|^2 / rho11`.
    /// An unnormalized `rho` is rescaled first.
    pub fn from_density(rho: &[[Complex64; 2]; 2]) -> Result<Self> {
        let tau = rho[0][0].re + rho[1][1].re;
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter("density matrix has zero trace".into()));
        }
        let r11 = rho[1][1].re / tau;
        let r01 = rho[0][1] / tau;
        if r11 <= 0.0 {
            return Ok(Self::vacuum());
        }
        let e = (r11 + r01.norm_sqr() / r11).min(1.0);
        let beta = (r11 / e).sqrt();
        let gamma = r01 / (e * beta);
        // absorb rounding so the invariant holds to machine precision
        let norm = (gamma.norm_sqr() + beta * beta).sqrt();
        Self::new(gamma / norm, Complex64::new(beta / norm, 0.0), e)
    }

    /// `[[rho00, rho01], [rho10, rho11]]` with `rho01 = E gamma conj(beta)`.
    pub fn density(&self) -> [[Complex64; 2]; 2] {
        let e = self.efficiency;
        let r01 = self.gamma * self.beta.conj() * e;
        [
            [Complex64::new(e * self.gamma.norm_sqr() + 1.0 - e, 0.0), r01],
            [r01.conj(), Complex64::new(e * self.beta.norm_sqr(), 0.0)],
        ]
    }

    pub fn generalized_efficiency(&self) -> f64 {
        generalized_efficiency(self)
    }
}

/// `|beta|^2 E / (1 - |gamma|^2 E)`, taken as 0 when `beta = 0`.
pub fn generalized_efficiency(q: &SingleRailQubit) -> f64 {
    let b2 = q.beta.norm_sqr();
    if b2 == 0.0 {
        return 0.0;
    }
    if q.efficiency == 1.0 {
        return 1.0;
    }
    b2 * q.efficiency / (1.0 - q.gamma.norm_sqr() * q.efficiency)
}

/// Generalized efficiency of a (possibly unnormalized) 2x2 density matrix:
/// `rho11^2 / (tr(rho) rho11 - |rho01|^2)`.
pub fn efficiency_of_density(rho: &[[Complex64; 2]; 2]) -> f64 {
    let r11 = rho[1][1].re;
    if r11 <= 0.0 {
        return 0.0;
    }
    let tau = rho[0][0].re + r11;
    // den >= r11^2 by positivity, so the ratio never exceeds 1
    let den = tau * r11 - rho[0][1].norm_sqr();
    (r11 * r11 / den).min(1.0)
}

/// Harmonic-oscillator eigenfunctions `<Q|n>` for `n = 0..=n_max` in the
/// dimensionless convention `<Q|0> = pi^{-1/4} exp(-Q^2 / 2)`.
pub fn hermite_functions(q: f64, n_max: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(n_max + 1);
    h.push(std::f64::consts::PI.powf(-0.25) * (-q * q / 2.0).exp());
    if n_max >= 1 {
        h.push(std::f64::consts::SQRT_2 * q * h[0]);
    }
    for n in 1..n_max {
        let next = (2.0 / (n + 1) as f64).sqrt() * q * h[n] - (n as f64 / (n + 1) as f64).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

/// `<Q|n>` for `n` in `{0, 1}`.
pub fn quadrature_overlap(q: f64, n: usize) -> Result<f64> {
    match n {
        0 | 1 => Ok(hermite_functions(q, 1)[n]),
        _ => Err(Error::InvalidParameter(format!(
            "quadrature overlap is provided for n = 0, 1, got {n}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn efficiency_examples() {
        let q = SingleRailQubit::new(c(0.0, 0.0), c(1.0, 0.0), 0.7).unwrap();
        assert_eq!(q.generalized_efficiency(), 0.7);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let q = SingleRailQubit::new(c(h, 0.0), c(0.0, h), 1.0).unwrap();
        assert_eq!(q.generalized_efficiency(), 1.0);
        let q = SingleRailQubit::new(c(h, 0.0), c(h, 0.0), 0.5).unwrap();
        assert!((q.generalized_efficiency() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(SingleRailQubit::vacuum().generalized_efficiency(), 0.0);
    }

    #[test]
    fn validation() {
        assert!(SingleRailQubit::new(c(1.0, 0.0), c(1.0, 0.0), 0.5).is_err());
        assert!(SingleRailQubit::new(c(1.0, 0.0), c(0.0, 0.0), 1.5).is_err());
    }

    #[test]
    fn density_roundtrip() {
        let q = SingleRailQubit::new(c(0.6, 0.0), c(0.0, 0.8), 0.45).unwrap();
        let rho = q.density();
        let back = SingleRailQubit::from_density(&rho).unwrap();
        assert!((back.efficiency - q.efficiency).abs() < 1e-14);
        assert!((back.gamma * back.beta.conj() - q.gamma * q.beta.conj()).norm() < 1e-14);
        assert!((efficiency_of_density(&rho) - q.generalized_efficiency()).abs() < 1e-15);
        let scaled = rho.map(|row| row.map(|z| z * 3.0));
        assert!((efficiency_of_density(&scaled) - q.generalized_efficiency()).abs() < 1e-15);
    }

    #[test]
    fn quadrature_examples() {
        assert_eq!(quadrature_overlap(0.0, 1).unwrap(), 0.0);
        assert_eq!(quadrature_overlap(0.0, 0).unwrap(), std::f64::consts::PI.powf(-0.25));
        for q in [-1.3, 0.2, 2.5] {
            let ratio = quadrature_overlap(q, 1).unwrap() / quadrature_overlap(q, 0).unwrap();
            assert!((ratio - std::f64::consts::SQRT_2 * q).abs() < 1e-14);
        }
        assert!(quadrature_overlap(0.0, 2).is_err());
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        // trapezoid rule on a wide grid
        let n_max = 6;
        let (lo, hi, steps) = (-12.0, 12.0, 4000);
        let dx = (hi - lo) / steps as f64;
        let mut gram = vec![vec![0.0; n_max + 1]; n_max + 1];
        for k in 0..=steps {
            let x = lo + k as f64 * dx;
            let h = hermite_functions(x, n_max);
            for i in 0..=n_max {
                for j in 0..=n_max {
                    gram[i][j] += h[i] * h[j] * dx;
                }
            }
        }
        for i in 0..=n_max {
            for j in 0..=n_max {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i][j] - expected).abs() < 1e-10);
            }
        }
    }
}
