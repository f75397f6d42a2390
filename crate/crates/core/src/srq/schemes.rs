//! Four heralded circuits that reshape single-rail qubits.
//!
//! All beam splitters use the map `a1^dag -> r a1^dag + t a2^dag`,
//! `a2^dag -> -conj(t) a1^dag + conj(r) a2^dag`, with port 1 the upper
//! (detected) arm. In terms of [`beam_splitter`](crate::interferometer::beam_splitter)
//! this is `beam_splitter(r, -conj(t))`, so `t = 0, r = 1` is the direct connection.
//!
//! | id | inputs            | measured                         | unnormalized output |
//! |----|-------------------|----------------------------------|---------------------|
//! | 1  | qubit, vacuum     | quadrature `Q` at phase `theta`  | `(g <Q|0> + b r e^{i theta} <Q|1>)|0> + b t <Q|0> |1>` |
//! | 2  | qubit, `|alpha>`  | one photon                       | `(b r - alpha g t*)|0> + b alpha (|r|^2 - |t|^2)|1>` |
//! | 3  | two qubits        | one photon                       | `(b1 g2 r - g1 b2 t*)|0> + b1 b2 (|r|^2 - |t|^2)|1>` |
//! | 4  | two qubits, vacuum| vacuum, then one photon          | `r'(b1 g2 t + g1 b2 r*)|0> + 2 r* t r' t' b1 b2 |1>` |
//!
//! Scheme 2 is stated to first order in `alpha`; [`Scheme::oracle`] keeps all orders.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::truncated::TruncatedState;
use super::{efficiency_of_density, hermite_functions, SingleRailQubit};
use crate::error::{Error, Result};
use crate::interferometer::{beam_splitter, Interferometer};

/// Residual below which a single-photon condition counts as satisfied.
pub const CONDITION_TOL: f64 = 1e-12;

/// Transmission and reflection amplitudes with `|t|^2 + |r|^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Splitter {
    pub t: Complex64,
    pub r: Complex64,
}

impl Splitter {
    pub fn new(t: Complex64, r: Complex64) -> Result<Self> {
        let norm_sqr = t.norm_sqr() + r.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { t, r })
    }

    /// Real `t` in `[0, 1]` and `r = sqrt(1 - t^2)`.
    pub fn from_transmission(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("transmission {t} is outside [0, 1]")));
        }
        Self::new(Complex64::new(t, 0.0), Complex64::new((1.0 - t * t).sqrt(), 0.0))
    }

    /// `u[out][in]` for the two-mode map described in the module docs.
    pub fn mode_map(&self) -> [[Complex64; 2]; 2] {
        [[self.r, -self.t.conj()], [self.t, self.r.conj()]]
    }

    pub fn interferometer(&self) -> Result<Interferometer> {
        beam_splitter(self.r, -self.t.conj())
    }
}

/// One of the four circuits with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme")]
pub enum Scheme {
    /// Qubit and vacuum on a splitter, homodyne detection of port 1.
    Homodyne {
        qubit: SingleRailQubit,
        splitter: Splitter,
        quadrature: f64,
        lo_phase: f64,
    },
    /// Qubit and a weak coherent state, one photon counted in port 1.
    CoherentAncilla {
        qubit: SingleRailQubit,
        alpha: Complex64,
        splitter: Splitter,
    },
    /// Two qubits, one photon counted in port 1.
    TwoQubit {
        first: SingleRailQubit,
        second: SingleRailQubit,
        splitter: Splitter,
    },
    /// Two qubits, vacuum heralded in port 1, then the second arm split again and
    /// one photon counted.
    TwoSplitter {
        first: SingleRailQubit,
        second: SingleRailQubit,
        splitter: Splitter,
        second_splitter: Splitter,
    },
}

/// Closed-form output of a scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub scheme: u8,
    /// Vacuum amplitude for the pure parts of the inputs.
    pub vacuum: Complex64,
    /// One-photon amplitude for the pure parts of the inputs.
    pub one: Complex64,
    /// Modulus of the cross-multiplied single-photon condition.
    pub condition_residual: f64,
    pub condition_holds: bool,
    /// Unnormalized output density matrix on `{|0>, |1>}`, mixing over input branches.
    pub density: [[Complex64; 2]; 2],
    /// Trace of `density`; a probability density in `Q` for scheme 1.
    pub success_probability: f64,
    pub output_efficiency: f64,
    /// Largest generalized efficiency among the qubit inputs.
    pub input_efficiency: f64,
}

/// Pure amplitudes of a qubit branch.
#[derive(Clone, Copy)]
struct Branch {
    weight: f64,
    gamma: Complex64,
    beta: Complex64,
}

fn branches(q: &SingleRailQubit) -> Vec<Branch> {
    let mut out = vec![Branch {
        weight: q.efficiency,
        gamma: q.gamma,
        beta: q.beta,
    }];
    if q.efficiency < 1.0 {
        out.push(Branch {
            weight: 1.0 - q.efficiency,
            gamma: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        });
    }
    out
}

impl Scheme {
    pub fn id(&self) -> u8 {
        match self {
            Scheme::Homodyne { .. } => 1,
            Scheme::CoherentAncilla { .. } => 2,
            Scheme::TwoQubit { .. } => 3,
            Scheme::TwoSplitter { .. } => 4,
        }
    }

    fn qubits(&self) -> Vec<SingleRailQubit> {
        match *self {
            Scheme::Homodyne { qubit, .. } | Scheme::CoherentAncilla { qubit, .. } => vec![qubit],
            Scheme::TwoQubit { first, second, .. } | Scheme::TwoSplitter { first, second, .. } => {
                vec![first, second]
            }
        }
    }

    /// `(vacuum, one)` amplitudes for pure qubit amplitudes `(g1, b1)` and `(g2, b2)`.
    fn amplitudes(&self, g1: Complex64, b1: Complex64, g2: Complex64, b2: Complex64) -> (Complex64, Complex64) {
        match *self {
            Scheme::Homodyne {
                splitter: s,
                quadrature,
                lo_phase,
                ..
            } => {
                let h = hermite_functions(quadrature, 1);
                let rot = Complex64::from_polar(1.0, lo_phase);
                (g1 * h[0] + b1 * s.r * rot * h[1], b1 * s.t * h[0])
            }
            Scheme::CoherentAncilla { alpha, splitter: s, .. } => (
                b1 * s.r - alpha * g1 * s.t.conj(),
                b1 * alpha * (s.r.norm_sqr() - s.t.norm_sqr()),
            ),
            Scheme::TwoQubit { splitter: s, .. } => (
                b1 * g2 * s.r - g1 * b2 * s.t.conj(),
                b1 * b2 * (s.r.norm_sqr() - s.t.norm_sqr()),
            ),
            Scheme::TwoSplitter {
                splitter: s,
                second_splitter: p,
                ..
            } => (
                p.r * (b1 * g2 * s.t + g1 * b2 * s.r.conj()),
                s.r.conj() * s.t * p.r * p.t * b1 * b2 * 2.0,
            ),
        }
    }

    /// The single-photon condition, cross-multiplied so that it reads `residual = 0`.
    pub fn condition_residual(&self) -> f64 {
        let qs = self.qubits();
        let (g1, b1) = (qs[0].gamma, qs[0].beta);
        let (g2, b2) = qs
            .get(1)
            .map_or((Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), |q| {
                (q.gamma, q.beta)
            });
        match *self {
            Scheme::TwoSplitter { splitter: s, .. } => (b1 * g2 * s.t + g1 * b2 * s.r.conj()).norm(),
            _ => self.amplitudes(g1, b1, g2, b2).0.norm(),
        }
    }

    /// Output for the given inputs, mixing over the vacuum branches of inefficient qubits.
    pub fn output(&self) -> SchemeResult {
        let qs = self.qubits();
        let vac = SingleRailQubit::vacuum();
        let first = branches(&qs[0]);
        let second = qs.get(1).map_or_else(|| branches(&vac), branches);

        let (vacuum, one) = self.amplitudes(
            qs[0].gamma,
            qs[0].beta,
            qs.get(1).map_or(vac.gamma, |q| q.gamma),
            qs.get(1).map_or(vac.beta, |q| q.beta),
        );

        let mut density = [[Complex64::new(0.0, 0.0); 2]; 2];
        for a in &first {
            for b in &second {
                let w = a.weight * b.weight;
                if w == 0.0 {
                    continue;
                }
                let (v0, v1) = self.amplitudes(a.gamma, a.beta, b.gamma, b.beta);
                let psi = [v0, v1];
                for i in 0..2 {
                    for j in 0..2 {
                        density[i][j] += psi[i] * psi[j].conj() * w;
                    }
                }
            }
        }
        let residual = self.condition_residual();
        SchemeResult {
            scheme: self.id(),
            vacuum,
            one,
            condition_residual: residual,
            condition_holds: residual <= CONDITION_TOL,
            success_probability: density[0][0].re + density[1][1].re,
            output_efficiency: efficiency_of_density(&density),
            input_efficiency: qs.iter().map(|q| q.generalized_efficiency()).fold(0.0, f64::max),
            density,
        }
    }

    /// Returns the scheme with its free parameters chosen to satisfy the
    /// single-photon condition.
    ///
    /// * scheme 1 keeps the splitter and picks `Q` and the oscillator phase;
    /// * schemes 2 and 3 set `r / t* = kappa` with real `t`;
    /// * scheme 4 sets `t / r* = kappa` with real `r`.
    pub fn auto_condition(&self) -> Result<Self> {
        let solve = |kappa: Complex64| {
            let a = 1.0 / (1.0 + kappa.norm_sqr()).sqrt();
            (Complex64::new(a, 0.0), kappa * a)
        };
        let ratio = |num: Complex64, den: Complex64| {
            if den.norm() == 0.0 {
                Err(Error::InvalidParameter(
                    "single-photon condition has no solution for these inputs".into(),
                ))
            } else {
                Ok(num / den)
            }
        };
        match *self {
            Scheme::Homodyne { qubit, splitter, .. } => {
                let k = ratio(-qubit.gamma, qubit.beta * splitter.r)?;
                Ok(Scheme::Homodyne {
                    qubit,
                    splitter,
                    quadrature: k.norm() / std::f64::consts::SQRT_2,
                    lo_phase: if k.norm() == 0.0 { 0.0 } else { k.arg() },
                })
            }
            Scheme::CoherentAncilla { qubit, alpha, .. } => {
                let (t, r) = solve(ratio(qubit.gamma * alpha, qubit.beta)?);
                Ok(Scheme::CoherentAncilla {
                    qubit,
                    alpha,
                    splitter: Splitter::new(t, r)?,
                })
            }
            Scheme::TwoQubit { first, second, .. } => {
                let (t, r) = solve(ratio(first.gamma * second.beta, first.beta * second.gamma)?);
                Ok(Scheme::TwoQubit {
                    first,
                    second,
                    splitter: Splitter::new(t, r)?,
                })
            }
            Scheme::TwoSplitter {
                first,
                second,
                second_splitter,
                ..
            } => {
                let (r, t) = solve(ratio(-first.gamma * second.beta, first.beta * second.gamma)?);
                Ok(Scheme::TwoSplitter {
                    first,
                    second,
                    splitter: Splitter::new(t, r)?,
                    second_splitter,
                })
            }
        }
    }

    /// Runs the circuit on the pure parts of the inputs in a truncated Fock
    /// space and returns the amplitudes left in the output mode.
    pub fn oracle(&self, cutoff: usize) -> Result<OracleOutput> {
        let ket = |q: &SingleRailQubit| vec![q.gamma, q.beta];
        let vac = vec![Complex64::new(1.0, 0.0)];
        let out = match self {
            Scheme::Homodyne {
                qubit,
                splitter,
                quadrature,
                lo_phase,
            } => {
                let mut s = TruncatedState::product(&[ket(qubit), vac], cutoff)?;
                s.beam_splitter(0, 1, splitter.mode_map())?;
                s.project_quadrature(0, *quadrature, *lo_phase)?
            }
            Scheme::CoherentAncilla { qubit, alpha, splitter } => {
                let mut s = TruncatedState::product(&[ket(qubit), vac], cutoff)?;
                s.displace(1, *alpha)?;
                s.beam_splitter(0, 1, splitter.mode_map())?;
                s.project_fock(0, 1)?
            }
            Scheme::TwoQubit {
                first,
                second,
                splitter,
            } => {
                let mut s = TruncatedState::product(&[ket(first), ket(second)], cutoff)?;
                s.beam_splitter(0, 1, splitter.mode_map())?;
                s.project_fock(0, 1)?
            }
            Scheme::TwoSplitter {
                first,
                second,
                splitter,
                second_splitter,
            } => {
                let mut s = TruncatedState::product(&[ket(first), ket(second), vac], cutoff)?;
                s.beam_splitter(0, 1, splitter.mode_map())?;
                s.beam_splitter(1, 2, second_splitter.mode_map())?;
                s.project_fock(0, 0)?.project_fock(0, 1)?
            }
        };
        Ok(OracleOutput {
            amplitudes: out.amplitudes().to_vec(),
            lost_norm: out.lost_norm(),
        })
    }
}

/// Output-mode amplitudes from [`Scheme::oracle`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleOutput {
    pub amplitudes: Vec<Complex64>,
    pub lost_norm: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit(g: Complex64, b: Complex64, e: f64) -> SingleRailQubit {
        let n = (g.norm_sqr() + b.norm_sqr()).sqrt();
        SingleRailQubit::new(g / n, b / n, e).unwrap()
    }

    #[test]
    fn splitter_matches_interferometer_convention() {
        let s = Splitter::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let m = s.interferometer().unwrap();
        let u = s.mode_map();
        for (i, row) in u.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(m.entry(i, j), *v);
            }
        }
        let direct = Splitter::from_transmission(0.0).unwrap();
        assert_eq!(direct.interferometer().unwrap(), Interferometer::identity(2));
    }

    #[test]
    fn scheme2_condition_zeroes_vacuum() {
        let q = qubit(c(0.3, 0.2), c(0.5, -0.7), 1.0);
        let alpha = c(1e-3, 5e-4);
        let s = Scheme::CoherentAncilla {
            qubit: q,
            alpha,
            splitter: Splitter::from_transmission(0.9).unwrap(),
        }
        .auto_condition()
        .unwrap();
        let out = s.output();
        assert!(out.vacuum.norm() < 1e-12);
        assert!(out.condition_holds);
        if let Scheme::CoherentAncilla { splitter, .. } = s {
            let kappa = q.gamma * alpha / q.beta;
            assert!((splitter.r / splitter.t.conj() - kappa).norm() < 1e-15);
        }
    }

    #[test]
    fn scheme3_equal_vacuum_weights_never_succeed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let q1 = qubit(c(h, 0.0), c(h, 0.0), 1.0);
        let q2 = qubit(c(0.0, h), c(h, 0.0), 1.0);
        let s = Scheme::TwoQubit {
            first: q1,
            second: q2,
            splitter: Splitter::from_transmission(0.5).unwrap(),
        }
        .auto_condition()
        .unwrap();
        let out = s.output();
        assert!(out.condition_holds);
        assert!(out.success_probability < 1e-30);
    }

    #[test]
    fn scheme1_conditioning_gives_single_photon() {
        let q = qubit(c(0.4, 0.1), c(0.2, 0.6), 1.0);
        let s = Scheme::Homodyne {
            qubit: q,
            splitter: Splitter::from_transmission(0.8).unwrap(),
            quadrature: 0.0,
            lo_phase: 0.0,
        }
        .auto_condition()
        .unwrap();
        let out = s.output();
        assert!(out.vacuum.norm() < 1e-15);
        assert!(out.one.norm() > 0.0);
        assert_eq!(out.output_efficiency, 1.0);
    }

    #[test]
    fn scheme4_row_and_condition() {
        let q1 = qubit(c(0.5, 0.1), c(0.3, 0.7), 1.0);
        let q2 = qubit(c(0.2, -0.4), c(0.6, 0.3), 1.0);
        let s = Scheme::TwoSplitter {
            first: q1,
            second: q2,
            splitter: Splitter::from_transmission(0.5).unwrap(),
            second_splitter: Splitter::from_transmission(0.3).unwrap(),
        }
        .auto_condition()
        .unwrap();
        let out = s.output();
        assert!(out.vacuum.norm() < 1e-15);
        let oracle = s.oracle(4).unwrap();
        assert!((oracle.amplitudes[1] - out.one).norm() < 1e-15);
        assert!(oracle.amplitudes[0].norm() < 1e-15);
    }

    #[test]
    fn vacuum_branch_lowers_output_efficiency() {
        let q = qubit(c(0.0, 0.0), c(1.0, 0.0), 0.6);
        let s = Scheme::Homodyne {
            qubit: q,
            splitter: Splitter::from_transmission(0.9).unwrap(),
            quadrature: 0.0,
            lo_phase: 0.0,
        };
        let out = s.output();
        // gamma = 0: the vacuum branch alone feeds |0>
        let t2 = 0.81;
        let expected = 0.6 * t2 / (0.6 * t2 + 0.4);
        assert!((out.output_efficiency - expected).abs() < 1e-14);
        assert!(out.output_efficiency <= out.input_efficiency);
    }

    #[test]
    fn impossible_condition_is_reported() {
        let s = Scheme::TwoQubit {
            first: qubit(c(1.0, 0.0), c(0.0, 0.0), 1.0),
            second: qubit(c(0.0, 0.0), c(1.0, 0.0), 1.0),
            splitter: Splitter::from_transmission(0.5).unwrap(),
        };
        assert!(s.auto_condition().is_err());
    }
}
