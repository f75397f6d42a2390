//! Matrix permanents.
//!
//! [`permanent_ryser`] is the production kernel; [`permanent_naive`] sums all
//! `n!` permutation products and exists as an independent reference.

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use crate::matrix::ComplexMatrix;

/// Largest dimension accepted by [`permanent_ryser`].
pub const RYSER_MAX_DIM: usize = 20;

/// Largest dimension accepted by [`permanent_naive`].
pub const NAIVE_MAX_DIM: usize = 9;

/// Neumaier-compensated running sum of complex terms.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: Complex64) {
        self.sum.re = Self::step(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = Self::step(self.sum.im, x.im, &mut self.comp.im);
    }

    #[inline]
    fn step(sum: f64, x: f64, comp: &mut f64) -> f64 {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            *comp += (sum - t) + x;
        } else {
            *comp += (x - t) + sum;
        }
        t
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Permanent via Ryser's inclusion-exclusion formula, visiting column subsets
/// in Gray-code order so each step updates the row sums by a single column.
///
/// Cost is `O(2^n n)`. The permanent of the empty matrix is 1.
pub fn permanent_ryser(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n > RYSER_MAX_DIM {
        return Err(Error::TooLarge {
            dim: n,
            limit: RYSER_MAX_DIM,
        });
    }
    Ok(ryser_unchecked(m))
}

pub(crate) fn ryser_unchecked(m: &ComplexMatrix) -> Complex64 {
    let n = m.rows();
    match n {
        0 => return Complex64::new(1.0, 0.0),
        1 => return m[(0, 0)],
        2 => return m[(0, 0)] * m[(1, 1)] + m[(0, 1)] * m[(1, 0)],
        _ => {}
    }

    // per(A) = (-1)^n sum_{S != {}} (-1)^{|S|} prod_i sum_{j in S} a_ij
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = CompensatedSum::default();
    let mut gray: u64 = 0;
    let mut subset_size: usize = 0;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        let bit = 1u64 << j;
        gray ^= bit;
        if gray & bit != 0 {
            subset_size += 1;
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs += m[(i, j)];
            }
        } else {
            subset_size -= 1;
            for (i, rs) in row_sums.iter_mut().enumerate() {
                *rs -= m[(i, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if (n - subset_size).is_multiple_of(2) {
            acc.add(prod);
        } else {
            acc.add(-prod);
        }
    }
    acc.value()
}

/// Permanent by explicit summation over all permutations. Test reference only.
pub fn permanent_naive(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n > NAIVE_MAX_DIM {
        return Err(Error::TooLarge {
            dim: n,
            limit: NAIVE_MAX_DIM,
        });
    }
    fn recurse(m: &ComplexMatrix, row: usize, used: u32, partial: Complex64, acc: &mut Complex64) {
        let n = m.rows();
        if row == n {
            *acc += partial;
            return;
        }
        for col in 0..n {
            if used & (1 << col) == 0 {
                recurse(m, row + 1, used | (1 << col), partial * m[(row, col)], acc);
            }
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    recurse(m, 0, 0, Complex64::new(1.0, 0.0), &mut acc);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    }

    #[test]
    fn identity_and_ones() {
        assert_eq!(permanent_ryser(&ComplexMatrix::identity(3)).unwrap(), c(1.0, 0.0));
        let ones = ComplexMatrix::from_fn(4, 4, |_, _| c(1.0, 0.0));
        assert!((permanent_ryser(&ones).unwrap() - c(24.0, 0.0)).norm() < 1e-12);
        let ones7 = ComplexMatrix::from_fn(7, 7, |_, _| c(1.0, 0.0));
        assert!((permanent_ryser(&ones7).unwrap() - c(5040.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn two_by_two_definition() {
        let (a, b, cc, d) = (c(1.0, 2.0), c(-0.5, 0.3), c(0.7, -1.1), c(2.0, 0.0));
        let m = ComplexMatrix::from_rows(&[vec![a, b], vec![cc, d]]).unwrap();
        assert!((permanent_ryser(&m).unwrap() - (a * d + b * cc)).norm() < 1e-15);
        // the general Gray-code path too, via a 3x3 block with a unit corner
        let m3 = ComplexMatrix::from_rows(&[
            vec![a, b, c(0.0, 0.0)],
            vec![cc, d, c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!((permanent_ryser(&m3).unwrap() - (a * d + b * cc)).norm() < 1e-14);
    }

    #[test]
    fn empty_matrix_is_one() {
        assert_eq!(permanent_ryser(&ComplexMatrix::zeros(0, 0)).unwrap(), c(1.0, 0.0));
        assert_eq!(permanent_naive(&ComplexMatrix::zeros(0, 0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn naive_examples() {
        assert_eq!(permanent_naive(&ComplexMatrix::identity(2)).unwrap(), c(1.0, 0.0));
        let swap = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(permanent_naive(&swap).unwrap(), c(1.0, 0.0));
        assert_eq!(permanent_naive(&ComplexMatrix::zeros(5, 5)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn errors() {
        assert_eq!(
            permanent_ryser(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        );
        assert!(matches!(
            permanent_naive(&ComplexMatrix::zeros(10, 10)),
            Err(Error::TooLarge { dim: 10, .. })
        ));
        assert!(matches!(
            permanent_ryser(&ComplexMatrix::zeros(21, 21)),
            Err(Error::TooLarge { dim: 21, .. })
        ));
    }

    #[test]
    fn ryser_matches_naive_6x6() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let m = random_matrix(6, &mut rng);
            let r = permanent_ryser(&m).unwrap();
            let nv = permanent_naive(&m).unwrap();
            assert!((r - nv).norm() <= 1e-12 * nv.norm(), "{r} vs {nv}");
        }
    }

    #[test]
    fn row_and_column_swaps_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let m = random_matrix(5, &mut rng);
        let p = permanent_ryser(&m).unwrap();
        let mut r = m.clone();
        r.swap_rows(0, 3);
        assert!((permanent_ryser(&r).unwrap() - p).norm() < 1e-12 * p.norm());
        let mut cl = m.clone();
        cl.swap_cols(1, 4);
        assert!((permanent_ryser(&cl).unwrap() - p).norm() < 1e-12 * p.norm());
    }

    #[test]
    fn multilinear_in_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let base = random_matrix(5, &mut rng);
        let urow: Vec<Complex64> = (0..5).map(|_| c(rng.sample(StandardNormal), 0.3)).collect();
        let vrow: Vec<Complex64> = (0..5).map(|_| c(-0.2, rng.sample(StandardNormal))).collect();
        let with_row = |row: &[Complex64]| {
            let mut m = base.clone();
            for j in 0..5 {
                m[(2, j)] = row[j];
            }
            permanent_ryser(&m).unwrap()
        };
        let sum: Vec<Complex64> = urow.iter().zip(&vrow).map(|(a, b)| a + b).collect();
        let lhs = with_row(&sum);
        let rhs = with_row(&urow) + with_row(&vrow);
        assert!((lhs - rhs).norm() < 1e-11 * (1.0 + lhs.norm()));

        let lambda = c(0.3, -1.7);
        let scaled: Vec<Complex64> = urow.iter().map(|a| a * lambda).collect();
        let lhs = with_row(&scaled);
        assert!((lhs - with_row(&urow) * lambda).norm() < 1e-11 * (1.0 + lhs.norm()));
    }
}
