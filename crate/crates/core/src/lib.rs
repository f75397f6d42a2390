//! Exact linear-optics calculations for inefficient single-photon sources.
//!
//! A set of inputs, each carrying one photon with probability `p_i`, passes
//! through an `N`-mode interferometer `L`. Modes `2..N` are measured and the
//! photon statistics of mode 1 are read off. The crate computes those
//! statistics from matrix permanents and tests, over Haar-random
//! interferometers, the positivity conditions under which no such circuit can
//! make mode 1 a better single-photon source than the best input.
//!
//! ```
//! use photon_efficiency::conjecture::conjecture_matrix;
//! use photon_efficiency::eigen::hermitian_eigen;
//! use photon_efficiency::interferometer::{haar_random, RandomSeed};
//!
//! let lambda = haar_random(4, RandomSeed::new(7, 0));
//! let m = conjecture_matrix(&lambda, 2)?;
//! let min = hermitian_eigen(&m, false)?.min().unwrap();
//! assert!(min > 0.0);
//! # Ok::<(), photon_efficiency::Error>(())
//! ```
//!
//! Modules, from the bottom up:
//!
//! * [`fock_basis`]: occupation vectors, input patterns, basis enumeration;
//! * [`permanent`]: Ryser permanents;
//! * [`interferometer`]: unitaries, Haar sampling, beam splitters;
//! * [`amplitudes`]: `S`, `T` and `Gamma` matrices;
//! * [`conjecture`]: the positivity tests and the scan harness;
//! * [`output_state`]: conditional statistics and no-go bounds;
//! * [`srq`]: single-rail qubits and four heralded circuits;
//! * [`checks`]: randomized verifiers shared with the command-line tool.

pub mod amplitudes;
pub mod checks;
pub mod conjecture;
pub mod eigen;
pub mod error;
pub mod fock_basis;
pub mod interferometer;
pub mod matrix;
pub mod output_state;
pub mod permanent;
pub mod srq;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fock-basis.md")]
    mod fock_basis {}
    #[doc = include_str!("../../../book/src/permanents.md")]
    mod permanents {}
    #[doc = include_str!("../../../book/src/interferometers.md")]
    mod interferometers {}
    #[doc = include_str!("../../../book/src/amplitudes.md")]
    mod amplitudes {}
    #[doc = include_str!("../../../book/src/positivity.md")]
    mod positivity {}
    #[doc = include_str!("../../../book/src/output-statistics.md")]
    mod output_statistics {}
    #[doc = include_str!("../../../book/src/single-rail-qubits.md")]
    mod single_rail_qubits {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
