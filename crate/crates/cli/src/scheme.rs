//! `scheme`: closed-form outputs, optional truncated-space oracle, parameter sweeps.

use clap::Args;
use num_complex::Complex64;
use photon_efficiency::conjecture::SCHEMA_VERSION;
use photon_efficiency::srq::{Scheme, SchemeResult, SingleRailQubit, Splitter};
use serde::Serialize;

use crate::parse::Interval;
use crate::{open_sink, write_json, Failure, Outcome};

#[derive(Args, Debug, Clone)]
pub struct SchemeArgs {
    /// 1 homodyne, 2 coherent ancilla, 3 two qubits, 4 two splitters.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub id: u8,
    /// Vacuum amplitude of the first qubit; complex values as `0.6+0.1i`.
    #[arg(long, default_value = "0.6")]
    pub gamma: Complex64,
    #[arg(long, default_value = "0.8")]
    pub beta: Complex64,
    /// Efficiency of the first qubit.
    #[arg(long = "E", default_value_t = 1.0)]
    pub efficiency: f64,
    /// Second qubit; each field defaults to the first qubit's.
    #[arg(long)]
    pub gamma2: Option<Complex64>,
    #[arg(long)]
    pub beta2: Option<Complex64>,
    #[arg(long = "E2")]
    pub efficiency2: Option<f64>,
    /// Coherent amplitude for scheme 2.
    #[arg(long, default_value = "0.01")]
    pub alpha: Complex64,
    /// Splitter amplitudes; a missing one is filled in as a nonnegative real.
    #[arg(long)]
    pub t: Option<Complex64>,
    #[arg(long)]
    pub r: Option<Complex64>,
    /// Second splitter of scheme 4.
    #[arg(long)]
    pub t2: Option<Complex64>,
    #[arg(long)]
    pub r2: Option<Complex64>,
    /// Homodyne outcome for scheme 1.
    #[arg(long, default_value_t = 0.0)]
    pub q: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lo_phase: f64,
    /// Choose the free parameters so the vacuum amplitude vanishes.
    #[arg(long)]
    pub auto_condition: bool,
    /// Also run the circuit in a truncated Fock space.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 12)]
    pub cutoff: usize,
    /// Sweep one of t, r, t2, r2, alpha, q, lo-phase, E, E2 over an interval.
    #[arg(long, num_args = 2, value_names = ["PARAM", "RANGE"])]
    pub sweep: Option<Vec<String>>,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

fn splitter(t: Option<Complex64>, r: Option<Complex64>) -> Result<Splitter, Failure> {
    let fill = |x: Complex64| Complex64::new((1.0 - x.norm_sqr()).max(0.0).sqrt(), 0.0);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (t, r) = match (t, r) {
        (Some(t), Some(r)) => (t, r),
        (Some(t), None) => (t, fill(t)),
        (None, Some(r)) => (fill(r), r),
        (None, None) => (h, h),
    };
    Ok(Splitter::new(t, r)?)
}

pub fn build(a: &SchemeArgs) -> Result<Scheme, Failure> {
    let first = SingleRailQubit::new(a.gamma, a.beta, a.efficiency)?;
    let second = SingleRailQubit::new(
        a.gamma2.unwrap_or(a.gamma),
        a.beta2.unwrap_or(a.beta),
        a.efficiency2.unwrap_or(a.efficiency),
    )?;
    let s = splitter(a.t, a.r)?;
    let scheme = match a.id {
        1 => Scheme::Homodyne {
            qubit: first,
            splitter: s,
            quadrature: a.q,
            lo_phase: a.lo_phase,
        },
        2 => Scheme::CoherentAncilla {
            qubit: first,
            alpha: a.alpha,
            splitter: s,
        },
        3 => Scheme::TwoQubit {
            first,
            second,
            splitter: s,
        },
        _ => Scheme::TwoSplitter {
            first,
            second,
            splitter: s,
            second_splitter: splitter(a.t2, a.r2)?,
        },
    };
    Ok(if a.auto_condition {
        scheme.auto_condition()?
    } else {
        scheme
    })
}

fn with_param(a: &SchemeArgs, param: &str, x: f64) -> Result<SchemeArgs, Failure> {
    let mut a = a.clone();
    let c = Complex64::new(x, 0.0);
    match param {
        "t" => (a.t, a.r) = (Some(c), None),
        "r" => (a.t, a.r) = (None, Some(c)),
        "t2" => (a.t2, a.r2) = (Some(c), None),
        "r2" => (a.t2, a.r2) = (None, Some(c)),
        "alpha" => a.alpha = c,
        "q" => a.q = x,
        "lo-phase" => a.lo_phase = x,
        "E" => a.efficiency = x,
        "E2" => a.efficiency2 = Some(x),
        other => return Err(Failure::Usage(format!("cannot sweep {other:?}"))),
    }
    Ok(a)
}

#[derive(Serialize)]
struct OracleReport {
    cutoff: usize,
    amplitudes: Vec<Complex64>,
    lost_norm: f64,
    /// Largest gap to the closed-form `(vacuum, one)`, counting weight on two or more photons.
    deviation: f64,
}

#[derive(Serialize)]
struct SchemeReport {
    schema: u32,
    kind: &'static str,
    parameters: Scheme,
    result: SchemeResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleReport>,
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    schema: u32,
    kind: &'static str,
    param: &'a str,
    value: f64,
    parameters: Scheme,
    result: SchemeResult,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    schema: u32,
    kind: &'static str,
    param: &'a str,
    points: usize,
    min_success_probability: f64,
    argmin: f64,
    /// Golden-section minimum of the success probability around the best grid point.
    refined_argmin: f64,
    refined_min_success_probability: f64,
}

fn oracle_report(scheme: &Scheme, result: &SchemeResult, cutoff: usize) -> Result<OracleReport, Failure> {
    let out = scheme.oracle(cutoff)?;
    let amp = |k: usize| out.amplitudes.get(k).copied().unwrap_or_default();
    let higher: f64 = out.amplitudes.iter().skip(2).map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let deviation = (amp(0) - result.vacuum)
        .norm()
        .max((amp(1) - result.one).norm())
        .max(higher);
    Ok(OracleReport {
        cutoff,
        amplitudes: out.amplitudes,
        lost_norm: out.lost_norm,
        deviation,
    })
}

fn golden_min(f: impl Fn(f64) -> Result<f64, Failure>, mut lo: f64, mut hi: f64) -> Result<(f64, f64), Failure> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..100 {
        if f1 <= f2 {
            hi = x2;
            (x2, f2) = (x1, f1);
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            (x1, f1) = (x2, f2);
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?))
}

pub fn run_scheme(a: &SchemeArgs) -> Outcome {
    let mut sink = open_sink(a.out.as_deref(), &format!("scheme-{}.jsonl", a.id))?;
    let Some(sweep) = &a.sweep else {
        let scheme = build(a)?;
        let result = scheme.output();
        let oracle = if a.oracle {
            Some(oracle_report(&scheme, &result, a.cutoff)?)
        } else {
            None
        };
        eprintln!(
            "scheme {}: output efficiency {:.6}, input efficiency {:.6}, success probability {:.6e}, condition residual {:.2e}",
            result.scheme, result.output_efficiency, result.input_efficiency, result.success_probability, result.condition_residual
        );
        write_json(
            &mut *sink,
            &SchemeReport {
                schema: SCHEMA_VERSION,
                kind: "scheme",
                parameters: scheme,
                result,
                oracle,
            },
        )?;
        sink.flush()?;
        return Ok(true);
    };
    let (param, range) = (sweep[0].as_str(), sweep[1].parse::<Interval>().map_err(Failure::Usage)?);
    if a.steps == 0 {
        return Err(Failure::Usage("--steps must be at least 1".into()));
    }
    let grid = range.grid(a.steps);
    let success =
        |x: f64| -> Result<f64, Failure> { Ok(build(&with_param(a, param, x)?)?.output().success_probability) };
    let (mut best, mut best_k) = (f64::INFINITY, 0);
    for (k, &x) in grid.iter().enumerate() {
        let scheme = build(&with_param(a, param, x)?)?;
        let result = scheme.output();
        if result.success_probability < best {
            (best, best_k) = (result.success_probability, k);
        }
        let record = SweepRecord {
            schema: SCHEMA_VERSION,
            kind: "sweep",
            param,
            value: x,
            parameters: scheme,
            result,
        };
        write_json(&mut *sink, &record)?;
    }
    let lo = grid[best_k.saturating_sub(1)];
    let hi = grid[(best_k + 1).min(grid.len() - 1)];
    let (refined_argmin, refined) = if hi > lo {
        golden_min(success, lo, hi)?
    } else {
        (grid[best_k], best)
    };
    let (refined_argmin, refined) = if refined <= best {
        (refined_argmin, refined)
    } else {
        (grid[best_k], best)
    };
    eprintln!("sweep {param}: minimum success probability {refined:.3e} at {refined_argmin:.6}");
    write_json(
        &mut *sink,
        &SweepSummary {
            schema: SCHEMA_VERSION,
            kind: "sweep-summary",
            param,
            points: grid.len(),
            min_success_probability: best,
            argmin: grid[best_k],
            refined_argmin,
            refined_min_success_probability: refined,
        },
    )?;
    sink.flush()?;
    Ok(true)
}
