//! Lossless linear-optical interferometers.
//!
//! An [`Interferometer`] is an `N x N` unitary `L` acting on creation
//! operators as `a_in,i^dag -> sum_k L[k][i] a_out,k^dag`: column `i` holds
//! the output amplitudes of a photon entering channel `i`. The state-space
//! unitary is never built; everything downstream goes through permanents of
//! `L`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_basis::MAX_MODES;
use crate::matrix::ComplexMatrix;

/// Max entry of `L^dag L - I` tolerated by [`Interferometer::validate`].
pub const UNITARY_TOL: f64 = 1e-12;

/// Tolerance on `|t|^2 + |r|^2 - 1` and `|phi|^2 - 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Max entry of `L^dag L - I`.
pub fn unitarity_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    m.gram().max_abs_diff(&ComplexMatrix::identity(m.rows()))
}

/// A validated unitary mode transformation.
#[derive(Clone, Debug, PartialEq)]
pub struct Interferometer {
    lambda: ComplexMatrix,
}

impl Interferometer {
    /// Wraps `lambda` if it is square, at most [`MAX_MODES`] wide and unitary to [`UNITARY_TOL`].
    pub fn validate(lambda: ComplexMatrix) -> Result<Self> {
        if !lambda.is_square() {
            return Err(Error::NotSquare {
                rows: lambda.rows(),
                cols: lambda.cols(),
            });
        }
        if lambda.rows() == 0 {
            return Err(Error::InvalidParameter("interferometer needs at least one mode".into()));
        }
        if lambda.rows() > MAX_MODES {
            return Err(Error::TooLarge {
                dim: lambda.rows(),
                limit: MAX_MODES,
            });
        }
        let deviation = unitarity_deviation(&lambda);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { lambda })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            lambda: ComplexMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.lambda.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.lambda
    }

    #[inline]
    pub fn entry(&self, out_mode: usize, in_mode: usize) -> Complex64 {
        self.lambda[(out_mode, in_mode)]
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.lambda
    }

    /// `self` followed by `next`: the combined matrix is `next * self`.
    pub fn then(&self, next: &Interferometer) -> Result<Self> {
        Self::validate(next.lambda.matmul(&self.lambda)?)
    }

    /// Multiplies every entry by `e^{i theta}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        Self {
            lambda: self.lambda.scale(Complex64::from_polar(1.0, theta)),
        }
    }

    /// Relabels output modes: row `k` of the result is row `perm[k]` of `self`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim();
        check_subset(perm, n)?;
        if perm.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: perm.len(),
            });
        }
        Ok(Self {
            lambda: ComplexMatrix::from_fn(n, n, |i, j| self.lambda[(perm[i], j)]),
        })
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile::from_matrix(&self.lambda)
    }

    pub fn from_file(file: &MatrixFile) -> Result<Self> {
        Self::validate(file.to_matrix()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("matrix file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("bad matrix JSON: {e}")))?;
        Self::from_file(&file)
    }
}

/// On-disk matrix layout: `{"n": N, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            n: m.rows(),
            re: (0..m.rows()).map(|i| m.row(i).iter().map(|z| z.re).collect()).collect(),
            im: (0..m.rows()).map(|i| m.row(i).iter().map(|z| z.im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.re.len() != self.n || self.im.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: self.re.len().min(self.im.len()),
            });
        }
        let mut rows = Vec::with_capacity(self.n);
        for (r, i) in self.re.iter().zip(&self.im) {
            if r.len() != self.n || i.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    actual: r.len().min(i.len()),
                });
            }
            rows.push(r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)).collect());
        }
        ComplexMatrix::from_rows(&rows)
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A master seed plus trial index, from which an independent random stream is derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSeed {
    pub master: u64,
    pub trial: u64,
}

impl RandomSeed {
    pub fn new(master: u64, trial: u64) -> Self {
        Self { master, trial }
    }

    /// Seed for trial `trial` of the `(n, d)` sector of a scan. Streams stay
    /// fixed when the scanned ranges change.
    pub fn for_sector(master: u64, n: usize, d: usize, trial: u64) -> Self {
        let sector = ((n as u64) << 32) | d as u64;
        Self {
            master: splitmix64(splitmix64(master) ^ splitmix64(sector.wrapping_add(0x5EC7_0000))),
            trial,
        }
    }

    /// The 64-bit seed actually fed to the generator.
    pub fn stream_seed(&self) -> u64 {
        splitmix64(splitmix64(self.master) ^ self.trial)
    }

    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.stream_seed())
    }
}

/// Householder QR of a square complex matrix: returns `(Q, R)` with `A = Q R`.
pub(crate) fn householder_qr(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut r = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let norm: f64 = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr == 0.0 {
            continue;
        }
        // R <- (I - 2 v v^dag / |v|^2) R
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * r[(k + t, j)]).sum();
            let f = dot * (2.0 / vnorm_sqr);
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= vi * f;
            }
        }
        // Q <- Q (I - 2 v v^dag / |v|^2)
        for i in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| q[(i, k + t)] * vi).sum();
            let f = dot * (2.0 / vnorm_sqr);
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] -= f * vi.conj();
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            r[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    (q, r)
}

/// Samples an `n x n` unitary from the Haar measure.
///
/// A matrix of i.i.d. standard complex Gaussians is QR-decomposed and each
/// column of `Q` is multiplied by the phase of the matching diagonal entry of
/// `R`. Without that phase fix the result is not Haar-distributed.
pub fn haar_random(n: usize, seed: RandomSeed) -> Interferometer {
    assert!((1..=MAX_MODES).contains(&n), "haar_random: dimension {n} out of range");
    let mut rng = seed.rng();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let (mut q, r) = householder_qr(&g);
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    Interferometer { lambda: q }
}

/// Two-mode beam splitter `[[t, r], [-r*, t*]]`.
///
/// A photon entering channel 1 leaves in channel 1 with amplitude `t` and in
/// channel 2 with amplitude `-r*`.
pub fn beam_splitter(t: Complex64, r: Complex64) -> Result<Interferometer> {
    let norm = t.norm_sqr() + r.norm_sqr();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { norm_sqr: norm });
    }
    let m = ComplexMatrix::from_rows(&[vec![t, r], vec![-r.conj(), t.conj()]])?;
    Interferometer::validate(m)
}

fn check_subset(modes: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &m in modes {
        if m >= n {
            return Err(Error::IndexOutOfRange { index: m, len: n });
        }
        if seen[m] {
            return Err(Error::DuplicateIndex { index: m });
        }
        seen[m] = true;
    }
    Ok(())
}

/// Places `inner` on the listed modes of an `n`-mode identity.
///
/// `modes[a]` is the global index of the inner interferometer's mode `a`.
pub fn embed(inner: &Interferometer, modes: &[usize], n: usize) -> Result<Interferometer> {
    if modes.len() != inner.dim() {
        return Err(Error::DimensionMismatch {
            expected: inner.dim(),
            actual: modes.len(),
        });
    }
    check_subset(modes, n)?;
    let mut m = ComplexMatrix::identity(n);
    for (a, &ga) in modes.iter().enumerate() {
        for (b, &gb) in modes.iter().enumerate() {
            m[(ga, gb)] = inner.entry(a, b);
        }
    }
    Interferometer::validate(m)
}

/// A unitary whose first column is the unit vector `phi`, completed with a
/// Householder reflection.
pub fn unitary_with_first_column(phi: &[Complex64]) -> Result<ComplexMatrix> {
    let m = phi.len();
    let norm_sqr: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    if m == 0 || (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    // y = e^{i b} phi has a real, nonnegative first entry
    let p0 = phi[0];
    let unphase = if p0.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        p0.conj() / p0.norm()
    };
    let y: Vec<Complex64> = phi.iter().map(|z| z * unphase).collect();
    let mut u: Vec<Complex64> = y.iter().map(|z| -z).collect();
    // 1 - y0 written as sum_{i>0} |y_i|^2 / (1 + y0) to avoid cancellation
    let tail: f64 = y[1..].iter().map(|z| z.norm_sqr()).sum();
    u[0] = Complex64::new(tail / (1.0 + y[0].re), 0.0);
    let u_sqr: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let mut w = ComplexMatrix::identity(m);
    if u_sqr > 1e-300 {
        // H = I - 2 u u^dag / |u|^2 maps e1 to y
        for i in 0..m {
            for j in 0..m {
                w[(i, j)] -= u[i] * u[j].conj() * (2.0 / u_sqr);
            }
        }
    }
    let rephase = unphase.conj();
    for i in 0..m {
        w[(i, 0)] *= rephase;
    }
    Ok(w)
}

/// Folds a one-photon projection on modes `2..N` into the interferometer.
///
/// Given `chi = sum_i phi_i a_i^dag |0>` over modes `2..N` (`phi` has length
/// `N - 1`), returns `Omega * base` where `Omega` acts on modes `2..N` with
/// first row `phi*`. Counting one photon in mode 2 and none in modes `3..N`
/// after the returned interferometer is the same event as projecting onto
/// `chi` after `base`.
pub fn absorb_single_photon_projection(phi: &[Complex64], base: &Interferometer) -> Result<Interferometer> {
    let n = base.dim();
    if phi.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            actual: phi.len(),
        });
    }
    let w = unitary_with_first_column(phi)?;
    let omega = Interferometer::validate(w.adjoint())?;
    let modes: Vec<usize> = (1..n).collect();
    let embedded = embed(&omega, &modes, n)?;
    base.then(&embedded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validate_examples() {
        assert!(Interferometer::validate(ComplexMatrix::identity(3)).is_ok());
        let bad = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        match Interferometer::validate(bad) {
            Err(Error::NotUnitary { deviation }) => assert!((deviation - 3.0).abs() < 1e-15),
            other => panic!("expected NotUnitary, got {other:?}"),
        }
        assert!(Interferometer::validate(ComplexMatrix::zeros(2, 3)).is_err());
        assert!(Interferometer::validate(ComplexMatrix::identity(17)).is_err());
    }

    #[test]
    fn qr_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = ComplexMatrix::from_fn(6, 6, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let (q, r) = householder_qr(&a);
        assert!(unitarity_deviation(&q) < 1e-14);
        assert!(q.matmul(&r).unwrap().max_abs_diff(&a) < 1e-13);
        for i in 0..6 {
            for j in 0..i {
                assert_eq!(r[(i, j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for n in 1..=9 {
            let u = haar_random(n, RandomSeed::new(42, n as u64));
            assert!(unitarity_deviation(u.matrix()) <= UNITARY_TOL);
            assert!(Interferometer::validate(u.matrix().clone()).is_ok());
        }
        let one = haar_random(1, RandomSeed::new(9, 9));
        assert!((one.entry(0, 0).norm() - 1.0).abs() < 1e-15);
        let a = haar_random(5, RandomSeed::new(7, 3));
        let b = haar_random(5, RandomSeed::new(7, 3));
        assert_eq!(a.matrix().as_slice(), b.matrix().as_slice());
        let other = haar_random(5, RandomSeed::new(7, 4));
        assert_ne!(a.matrix().as_slice(), other.matrix().as_slice());
    }

    #[test]
    fn sector_seeds_are_distinct() {
        let a = RandomSeed::for_sector(1, 4, 2, 0).stream_seed();
        let b = RandomSeed::for_sector(1, 4, 3, 0).stream_seed();
        let c2 = RandomSeed::for_sector(1, 5, 2, 0).stream_seed();
        let d = RandomSeed::for_sector(1, 4, 2, 1).stream_seed();
        assert!(a != b && a != c2 && a != d && b != c2);
    }

    #[test]
    fn beam_splitter_examples() {
        let id = beam_splitter(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(id.matrix(), &ComplexMatrix::identity(2));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bs = beam_splitter(c(h, 0.0), c(h, 0.0)).unwrap();
        assert!(unitarity_deviation(bs.matrix()) < 1e-15);
        assert!(matches!(
            beam_splitter(c(1.0, 0.0), c(0.1, 0.0)),
            Err(Error::NotNormalized { .. })
        ));
        let bs = beam_splitter(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        assert_eq!(bs.entry(1, 0), c(0.0, 0.8));
    }

    #[test]
    fn embed_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let id2 = Interferometer::identity(2);
        assert_eq!(embed(&id2, &[1, 3], 4).unwrap().matrix(), &ComplexMatrix::identity(4));
        let bs = beam_splitter(c(h, 0.0), c(h, 0.0)).unwrap();
        let first = embed(&bs, &[0, 1], 3).unwrap();
        let second = embed(&bs, &[1, 2], 3).unwrap();
        let ab = first.then(&second).unwrap();
        let ba = second.then(&first).unwrap();
        assert!(unitarity_deviation(ab.matrix()) < 1e-14);
        assert!(ab.matrix().max_abs_diff(ba.matrix()) > 0.1);
        assert!(matches!(
            embed(&bs, &[0, 0], 3),
            Err(Error::DuplicateIndex { index: 0 })
        ));
        assert!(matches!(embed(&bs, &[0, 3], 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn householder_completion_has_requested_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for m in 1..=6 {
            let mut phi: Vec<Complex64> = (0..m)
                .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            phi.iter_mut().for_each(|z| *z /= norm);
            let w = unitary_with_first_column(&phi).unwrap();
            assert!(unitarity_deviation(&w) < 1e-14);
            for i in 0..m {
                assert!(
                    (w[(i, 0)] - phi[i]).norm() < 1e-14,
                    "m={m} i={i} {} vs {}",
                    w[(i, 0)],
                    phi[i]
                );
            }
        }
        let e1 = unitary_with_first_column(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(e1, ComplexMatrix::identity(2));
        assert!(unitary_with_first_column(&[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn absorbing_trivial_projection_keeps_base() {
        let base = haar_random(4, RandomSeed::new(3, 0));
        let phi = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let combined = absorb_single_photon_projection(&phi, &base).unwrap();
        assert!(combined.matrix().max_abs_diff(base.matrix()) < 1e-15);
    }

    #[test]
    fn json_roundtrip_validates() {
        let u = haar_random(3, RandomSeed::new(5, 5));
        let back = Interferometer::from_json(&u.to_json()).unwrap();
        assert_eq!(back, u);
        let bad = r#"{"n":2,"re":[[1,0],[0,2]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(Interferometer::from_json(bad), Err(Error::NotUnitary { .. })));
        let ragged = r#"{"n":2,"re":[[1,0],[0]],"im":[[0,0],[0,0]]}"#;
        assert!(Interferometer::from_json(ragged).is_err());
    }
}
