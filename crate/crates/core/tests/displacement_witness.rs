//! A coherent input can be traded for a displaced measurement.
//!
//! Feeding `|alpha>` into input mode 1 of a two-mode interferometer and
//! projecting output mode 1 onto `chi` leaves output mode 0 in the same state
//! (up to normalization) as feeding vacuum, projecting onto
//! `D(-alpha_1') chi` and then displacing mode 0 by `alpha_0'`, where
//! `alpha_k' = alpha * L[k][1]`.

use num_complex::Complex64;
use photon_efficiency::interferometer::beam_splitter;
use photon_efficiency::srq::truncated::displacement_matrix;
use photon_efficiency::srq::TruncatedState;

const CUTOFF: usize = 14;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn normalized(v: &[Complex64]) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

fn overlap_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let (a, b) = (normalized(a), normalized(b));
    let inner: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    1.0 - inner.norm()
}

fn run(alpha: Complex64, chi: &[Complex64], input0: &[Complex64]) -> f64 {
    let bs = beam_splitter(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
    let u = [[bs.entry(0, 0), bs.entry(0, 1)], [bs.entry(1, 0), bs.entry(1, 1)]];

    let coherent = displacement_matrix(alpha, CUTOFF).unwrap().column(0)[..=CUTOFF].to_vec();
    let mut direct = TruncatedState::product(&[input0.to_vec(), coherent], CUTOFF).unwrap();
    direct.beam_splitter(0, 1, u).unwrap();
    let direct = direct.project_onto(1, chi).unwrap();

    let shifted: Vec<Complex64> = {
        let d = displacement_matrix(-alpha * bs.entry(1, 1), CUTOFF).unwrap();
        (0..=CUTOFF)
            .map(|i| (0..chi.len()).map(|j| d[(i, j)] * chi[j]).sum())
            .collect()
    };
    let mut witness = TruncatedState::product(&[input0.to_vec(), vec![c(1.0, 0.0)]], CUTOFF).unwrap();
    witness.beam_splitter(0, 1, u).unwrap();
    let mut witness = witness.project_onto(1, &shifted).unwrap();
    witness.displace(0, alpha * bs.entry(0, 1)).unwrap();

    overlap_gap(direct.amplitudes(), witness.amplitudes())
}

#[test]
fn single_photon_with_fock_measurement() {
    let chi = [c(0.0, 0.0), c(1.0, 0.0)];
    let gap = run(c(0.3, 0.1), &chi, &[c(0.0, 0.0), c(1.0, 0.0)]);
    assert!(gap < 1e-9, "gap {gap}");
}

#[test]
fn superposed_input_with_superposed_measurement() {
    let chi = [c(0.6, 0.0), c(0.0, 0.8)];
    let gap = run(c(-0.2, 0.25), &chi, &[c(0.8, 0.0), c(0.36, 0.48)]);
    assert!(gap < 1e-9, "gap {gap}");
}

#[test]
fn plain_projection_differs() {
    // dropping the displacements gives a different conditional state
    let bs = beam_splitter(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
    let u = [[bs.entry(0, 0), bs.entry(0, 1)], [bs.entry(1, 0), bs.entry(1, 1)]];
    let chi = [c(0.0, 0.0), c(1.0, 0.0)];
    let alpha = c(0.3, 0.1);
    let coherent = displacement_matrix(alpha, CUTOFF).unwrap().column(0)[..=CUTOFF].to_vec();
    let mut direct = TruncatedState::product(&[vec![c(0.0, 0.0), c(1.0, 0.0)], coherent], CUTOFF).unwrap();
    direct.beam_splitter(0, 1, u).unwrap();
    let direct = direct.project_onto(1, &chi).unwrap();
    let mut naive = TruncatedState::product(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0)]], CUTOFF).unwrap();
    naive.beam_splitter(0, 1, u).unwrap();
    let naive = naive.project_onto(1, &chi).unwrap();
    assert!(overlap_gap(direct.amplitudes(), naive.amplitudes()) > 1e-3);
}
