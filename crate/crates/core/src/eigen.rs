//! Dense Hermitian eigensolver.
//!
//! Matrices up to [`JACOBI_MAX_DIM`] are diagonalized with cyclic complex
//! Jacobi rotations. Larger ones go through nalgebra's Householder
//! tridiagonalization + implicit QR, which is far cheaper at the
//! thousand-row sizes reached by `N = 8, 9` scans.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Above this dimension [`hermitian_eigen`] switches to the tridiagonal solver.
pub const JACOBI_MAX_DIM: usize = 160;

/// Absolute Hermiticity tolerance, scaled by `max(1, max |m_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order, with eigenvectors stored as matching columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Option<ComplexMatrix>,
}

impl HermitianEigen {
    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let scale = m.as_slice().iter().fold(1.0_f64, |s, z| s.max(z.norm()));
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let mut a = m.clone();
    a.symmetrize();
    if a.rows() <= JACOBI_MAX_DIM {
        Ok(jacobi(a, want_vectors))
    } else {
        Ok(tridiagonal(&a, want_vectors))
    }
}

/// Cyclic Jacobi regardless of size. Exposed for cross-checking the two routes.
pub fn hermitian_eigen_jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let mut a = m.clone();
    a.symmetrize();
    Ok(jacobi(a, want_vectors))
}

/// Tridiagonal QR regardless of size.
pub fn hermitian_eigen_tridiagonal(m: &ComplexMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let mut a = m.clone();
    a.symmetrize();
    Ok(tridiagonal(&a, want_vectors))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

fn jacobi(mut a: ComplexMatrix, want_vectors: bool) -> HermitianEigen {
    let n = a.rows();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let target = JACOBI_OFF_TOL * a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // skip rotations that cannot change the diagonal in floating point
                if g < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // phase that makes the (p, q) entry real
                let e = (apq / g).conj();
                let se = e * s;
                let ce = e * c;

                // A <- A V with V = [[c, s], [-s e, c e]] on columns (p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * se;
                    a[(k, q)] = akp * s + akq * ce;
                }
                // A <- V^dag A on rows (p, q)
                let (sec, cec) = (se.conj(), ce.conj());
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * sec;
                    a[(q, k)] = apk * s + aqk * cec;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * se;
                        v[(k, q)] = vkp * s + vkq * ce;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    sorted(diag, v)
}

fn tridiagonal(a: &ComplexMatrix, want_vectors: bool) -> HermitianEigen {
    let n = a.rows();
    let m = DMatrix::<Complex64>::from_fn(n, n, |i, j| a[(i, j)]);
    if want_vectors {
        let eig = m.symmetric_eigen();
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, j)]);
        sorted(values, Some(vectors))
    } else {
        let values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        sorted(values, None)
    }
}

fn sorted(values: Vec<f64>, vectors: Option<ComplexMatrix>) -> HermitianEigen {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let vals = order.iter().map(|&i| values[i]).collect();
    let vecs = vectors.map(|v| ComplexMatrix::from_fn(v.rows(), v.cols(), |r, c| v[(r, order[c])]));
    HermitianEigen {
        values: vals,
        vectors: vecs,
    }
}
