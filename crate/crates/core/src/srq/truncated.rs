//! Brute-force pure states on a few modes with a per-mode photon cutoff.
//!
//! Used as an independent check on the closed-form scheme outputs: beam
//! splitters act through the two-mode binomial expansion, displacements through
//! a matrix exponential of the truncated generator, and measurements through
//! explicit bras.

use num_complex::Complex64;

use super::hermite_functions;
use crate::error::{Error, Result};
use crate::fock_basis::binomial;
use crate::matrix::ComplexMatrix;

/// Largest admissible norm of the part of a displaced state pushed past the cutoff.
pub const TAIL_LIMIT: f64 = 1e-10;

/// Extra levels used when exponentiating the displacement generator.
const DISPLACEMENT_PADDING: usize = 40;

/// Amplitudes over `(cutoff + 1)^modes` occupations, mode 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedState {
    modes: usize,
    cutoff: usize,
    amps: Vec<Complex64>,
    lost: f64,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl TruncatedState {
    /// Product of single-mode states, each given by its first few Fock amplitudes.
    pub fn product(factors: &[Vec<Complex64>], cutoff: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("need at least one mode".into()));
        }
        let dim = cutoff + 1;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for f in factors {
            if f.len() > dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: f.len(),
                });
            }
            let mut next = Vec::with_capacity(amps.len() * dim);
            for a in &amps {
                for k in 0..dim {
                    next.push(a * f.get(k).copied().unwrap_or_else(zero));
                }
            }
            amps = next;
        }
        Ok(Self {
            modes: factors.len(),
            cutoff,
            amps,
            lost: 0.0,
        })
    }

    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        Self::product(&vec![vec![Complex64::new(1.0, 0.0)]; modes], cutoff)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Squared norm discarded so far by truncation.
    pub fn lost_norm(&self) -> f64 {
        self.lost
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow((self.modes - 1 - mode) as u32)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::IndexOutOfRange {
                index: mode,
                len: self.modes,
            });
        }
        Ok(())
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        assert_eq!(occupation.len(), self.modes);
        if occupation.iter().any(|&n| n > self.cutoff) {
            return zero();
        }
        let idx = occupation.iter().fold(0, |acc, &n| acc * (self.cutoff + 1) + n);
        self.amps[idx]
    }

    /// `D(alpha) = exp(alpha a^dag - conj(alpha) a)` on `mode`.
    ///
    /// The exponential is taken on a padded space. If the displaced state puts
    /// more than [`TAIL_LIMIT`] of amplitude norm past the cutoff the call fails
    /// and the state is left untouched; otherwise the kept part is rescaled to the
    /// previous norm.
    pub fn displace(&mut self, mode: usize, alpha: Complex64) -> Result<()> {
        self.check_mode(mode)?;
        let d = displacement_matrix(alpha, self.cutoff)?;
        let dim = self.cutoff + 1;
        let big = d.rows();
        let stride = self.stride(mode);
        let block = stride * dim;
        let mut out = vec![zero(); self.amps.len()];
        let mut tail_sqr = 0.0;
        for base in (0..self.amps.len()).step_by(block) {
            for off in 0..stride {
                for j in 0..big {
                    let mut acc = zero();
                    for k in 0..dim {
                        acc += d[(j, k)] * self.amps[base + off + k * stride];
                    }
                    if j < dim {
                        out[base + off + j * stride] = acc;
                    } else {
                        tail_sqr += acc.norm_sqr();
                    }
                }
            }
        }
        let before = self.norm_sqr();
        let tail = if before > 0.0 { (tail_sqr / before).sqrt() } else { 0.0 };
        if tail > TAIL_LIMIT {
            return Err(Error::Truncation {
                tail,
                limit: TAIL_LIMIT,
            });
        }
        let after: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        if after > 0.0 {
            let s = (before / after).sqrt();
            out.iter_mut().for_each(|z| *z *= s);
        }
        self.amps = out;
        self.lost += tail_sqr;
        Ok(())
    }

    /// Two-mode linear map: `a_in_i^dag -> sum_k u[k][i] a_out_k^dag` with
    /// index 0 meaning `mode_a` and 1 meaning `mode_b`.
    pub fn beam_splitter(&mut self, mode_a: usize, mode_b: usize, u: [[Complex64; 2]; 2]) -> Result<()> {
        self.check_mode(mode_a)?;
        self.check_mode(mode_b)?;
        if mode_a == mode_b {
            return Err(Error::DuplicateIndex { index: mode_a });
        }
        let c = self.cutoff;
        let dim = c + 1;
        let (sa, sb) = (self.stride(mode_a), self.stride(mode_b));
        let mut images: Vec<Vec<(usize, usize, Complex64)>> = Vec::with_capacity(dim * dim);
        for na in 0..dim {
            for nb in 0..dim {
                images.push(two_mode_image(na, nb, &u));
            }
        }
        let mut out = vec![zero(); self.amps.len()];
        for (idx, &amp) in self.amps.iter().enumerate() {
            if amp == zero() {
                continue;
            }
            let na = (idx / sa) % dim;
            let nb = (idx / sb) % dim;
            let rest = idx - na * sa - nb * sb;
            for &(ma, mb, coef) in &images[na * dim + nb] {
                if ma <= c && mb <= c {
                    out[rest + ma * sa + mb * sb] += amp * coef;
                }
            }
        }
        // the full map is unitary, so the norm change is exactly what fell past the cutoff
        let before = self.norm_sqr();
        self.amps = out;
        self.lost += (before - self.norm_sqr()).max(0.0);
        Ok(())
    }

    /// Contracts `mode` with the bra whose components are `bra[n] = <b|n>`,
    /// removing the mode. Components beyond `bra.len()` are treated as zero.
    pub fn project(&self, mode: usize, bra: &[Complex64]) -> Result<Self> {
        self.check_mode(mode)?;
        if self.modes == 1 {
            let amp: Complex64 = self.amps.iter().zip(bra).map(|(a, b)| a * b).sum();
            return Ok(Self {
                modes: 0,
                cutoff: self.cutoff,
                amps: vec![amp],
                lost: self.lost,
            });
        }
        let dim = self.cutoff + 1;
        let stride = self.stride(mode);
        let block = stride * dim;
        let mut out = Vec::with_capacity(self.amps.len() / dim);
        for base in (0..self.amps.len()).step_by(block) {
            for off in 0..stride {
                let v: Complex64 = bra
                    .iter()
                    .take(dim)
                    .enumerate()
                    .map(|(k, b)| b * self.amps[base + off + k * stride])
                    .sum();
                out.push(v);
            }
        }
        Ok(Self {
            modes: self.modes - 1,
            cutoff: self.cutoff,
            amps: out,
            lost: self.lost,
        })
    }

    /// Projects `mode` onto the Fock state `|m>`.
    pub fn project_fock(&self, mode: usize, m: usize) -> Result<Self> {
        if m > self.cutoff {
            return Err(Error::InvalidParameter(format!("Fock state {m} is beyond the cutoff")));
        }
        let mut bra = vec![zero(); m + 1];
        bra[m] = Complex64::new(1.0, 0.0);
        self.project(mode, &bra)
    }

    /// Projects `mode` onto the quadrature eigenstate `<Q_theta|` with
    /// `<Q_theta|n> = e^{i n theta} <Q|n>`.
    pub fn project_quadrature(&self, mode: usize, q: f64, theta: f64) -> Result<Self> {
        let bra: Vec<Complex64> = hermite_functions(q, self.cutoff)
            .into_iter()
            .enumerate()
            .map(|(n, h)| Complex64::from_polar(h, n as f64 * theta))
            .collect();
        self.project(mode, &bra)
    }

    /// Projects `mode` onto the ket `|v>`, i.e. contracts with `conj(v)`.
    pub fn project_onto(&self, mode: usize, ket: &[Complex64]) -> Result<Self> {
        let bra: Vec<Complex64> = ket.iter().map(|z| z.conj()).collect();
        self.project(mode, &bra)
    }
}

/// `sum_k A^k / k!` after scaling and squaring.
fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let norm = a.frobenius_norm();
    let mut squarings = 0;
    while norm / f64::from(1u32 << squarings.min(30)) > 0.25 {
        squarings += 1;
    }
    let scaled = a.scale(Complex64::new(1.0 / f64::from(1u32 << squarings), 0.0));
    let n = a.rows();
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=24 {
        term = term.matmul(&scaled)?.scale(Complex64::new(1.0 / k as f64, 0.0));
        result.add_scaled(&term, 1.0)?;
    }
    for _ in 0..squarings {
        result = result.matmul(&result)?;
    }
    Ok(result)
}

/// Columns `0..=cutoff` of `D(alpha)`, computed on `cutoff + 1 + padding` levels.
pub fn displacement_matrix(alpha: Complex64, cutoff: usize) -> Result<ComplexMatrix> {
    let big = cutoff + 1 + DISPLACEMENT_PADDING;
    let mut g = ComplexMatrix::zeros(big, big);
    for n in 0..big - 1 {
        let s = ((n + 1) as f64).sqrt();
        g[(n + 1, n)] = alpha * s;
        g[(n, n + 1)] = -alpha.conj() * s;
    }
    let d = expm(&g)?;
    Ok(ComplexMatrix::from_fn(big, cutoff + 1, |i, j| d[(i, j)]))
}

/// `(u00 a^dag + u10 b^dag)^na (u01 a^dag + u11 b^dag)^nb |0,0> / sqrt(na! nb!)`.
fn two_mode_image(na: usize, nb: usize, u: &[[Complex64; 2]; 2]) -> Vec<(usize, usize, Complex64)> {
    let total = na + nb;
    let mut coef = vec![zero(); total + 1];
    for k in 0..=na {
        let ck = u[0][0].powu(k as u32) * u[1][0].powu((na - k) as u32) * binomial(na, k) as f64;
        for l in 0..=nb {
            let cl = u[0][1].powu(l as u32) * u[1][1].powu((nb - l) as u32) * binomial(nb, l) as f64;
            coef[k + l] += ck * cl;
        }
    }
    let norm_in = factorial_f(na) * factorial_f(nb);
    (0..=total)
        .map(|ma| {
            let mb = total - ma;
            let w = (factorial_f(ma) * factorial_f(mb) / norm_in).sqrt();
            (ma, mb, coef[ma] * w)
        })
        .collect()
}

fn factorial_f(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
