//! Accelerated MISL variants.
//!
//! * SQUAREM: two MISL steps give `r = x1 - x` and `v = x2 - x1 - r`; the extrapolated point
//!   `x - 2 a r + a^2 v` (with `a = -||r|| / ||v||`) is projected back to unit modulus.
//!   While the objective would increase, `a` moves halfway towards -1, where the
//!   candidate equals `x2`.
//! * Backtracking: the curvature level `L` of the surrogate climbs the ladder
//!   `p_max + (2^i - 1) N` until the surrogate upper-bounds the objective at its own minimizer.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::misl::majorizer_from_spectra;
use crate::run::{iterate, to_sequence, DesignOutcome, DesignRun, StepDetail, Variant};
use crate::sequence::{project_unit, UnimodularSequence};
use crate::surrogate::{Evaluated, Surrogate};
use crate::transform::GridPlan;
use crate::{Mode, C64};

/// Halvings of `a` towards -1 before falling back to `x2` itself.
pub const MAX_HALVINGS: u32 = 60;

/// Relative rounding allowance in the backtracking acceptance test.
const ACCEPT_SLACK: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquaremStepRecord {
    pub alpha: f64,
    pub halvings: u32,
    pub objective_before: f64,
    pub objective_after: f64,
    /// The halving cap was reached and `x2` was returned.
    pub capped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BacktrackStepRecord {
    /// Ladder rung `i` of the accepted `L`.
    pub ladder_index: u32,
    pub l: f64,
    pub accepted: bool,
}

/// `exp(j arg(x - 2 a r + a^2 v))`.
pub(crate) fn extrapolate(x: &[C64], r: &[C64], v: &[C64], alpha: f64) -> Vec<C64> {
    let mut out: Vec<C64> = x
        .iter()
        .zip(r)
        .zip(v)
        .map(|((xi, ri), vi)| xi - ri * (2.0 * alpha) + vi * (alpha * alpha))
        .collect();
    project_unit(&mut out);
    out
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn squarem_from(
    surrogate: &Surrogate,
    point: &Evaluated,
) -> (Evaluated, SquaremStepRecord) {
    let x1 = surrogate.evaluate(surrogate.misl_map(point));
    let x2 = surrogate.evaluate(surrogate.misl_map(&x1));
    let r: Vec<C64> = x1.x.iter().zip(&point.x).map(|(a, b)| a - b).collect();
    let v: Vec<C64> = x2
        .x
        .iter()
        .zip(&x1.x)
        .zip(&r)
        .map(|((b, a), ri)| b - a - ri)
        .collect();
    let (r_norm, v_norm) = (norm(&r), norm(&v));

    let record = |alpha, halvings, after: &Evaluated, capped| SquaremStepRecord {
        alpha,
        halvings,
        objective_before: point.objective,
        objective_after: after.objective,
        capped,
    };

    if r_norm == 0.0 || v_norm == 0.0 {
        let rec = record(-1.0, 0, &x2, false);
        return (x2, rec);
    }

    let mut alpha = -r_norm / v_norm;
    let mut halvings = 0;
    loop {
        let candidate = surrogate.evaluate(extrapolate(&point.x, &r, &v, alpha));
        if candidate.objective <= point.objective {
            let rec = record(alpha, halvings, &candidate, false);
            return (candidate, rec);
        }
        if halvings == MAX_HALVINGS {
            let rec = record(-1.0, halvings, &x2, true);
            return (x2, rec);
        }
        alpha = (alpha - 1.0) / 2.0;
        halvings += 1;
    }
}

/// One SQUAREM-accelerated MISL step.
pub fn squarem_step(x: &UnimodularSequence, mode: Mode) -> (UnimodularSequence, SquaremStepRecord) {
    let surrogate = Surrogate::new(GridPlan::new(x.len(), mode).expect("sequence is nonempty"));
    let (next, rec) = squarem_from(&surrogate, &surrogate.evaluate(x.to_complex()));
    (to_sequence(&next.x), rec)
}

/// Smallest `i` with `(2^i - 1) N >= N^2`; the ladder accepts no later than this rung.
pub fn guaranteed_rung(n: usize) -> u32 {
    let mut i = 0;
    while (1u128 << i) < n as u128 + 1 {
        i += 1;
    }
    i
}

pub(crate) fn backtrack_from(
    surrogate: &Surrogate,
    point: &Evaluated,
) -> Result<(Evaluated, BacktrackStepRecord)> {
    let n = surrogate.n();
    let p_max = point.power.iter().copied().fold(0.0, f64::max);
    let limit = guaranteed_rung(n) + 2;
    for i in 0..=limit {
        let l = p_max + ((1u64 << i) - 1) as f64 * n as f64;
        let z: Vec<C64> = point
            .spectrum
            .iter()
            .zip(&point.power)
            .map(|(f, p)| f * (l - p))
            .collect();
        let mut y = surrogate.plan().adjoint(&z);
        project_unit(&mut y);
        let candidate = surrogate.evaluate(y);
        let bound = majorizer_from_spectra(&candidate.spectrum, &point.spectrum, l, n);
        let quartic: f64 = candidate.power.iter().map(|p| p * p).sum();
        if bound >= quartic - ACCEPT_SLACK * quartic {
            let rec = BacktrackStepRecord {
                ladder_index: i,
                l,
                accepted: true,
            };
            return Ok((candidate, rec));
        }
    }
    Err(Error::Consistency(format!(
        "backtracking ladder passed rung {limit} for N = {n}"
    )))
}

/// One backtracking-MISL step.
pub fn backtracking_misl_step(
    x: &UnimodularSequence,
    mode: Mode,
) -> Result<(UnimodularSequence, BacktrackStepRecord)> {
    let surrogate = Surrogate::new(GridPlan::new(x.len(), mode)?);
    let (next, rec) = backtrack_from(&surrogate, &surrogate.evaluate(x.to_complex()))?;
    Ok((to_sequence(&next.x), rec))
}

pub fn run_accelerated(run: &DesignRun, x0: &UnimodularSequence) -> Result<DesignOutcome> {
    run.validate()?;
    let surrogate = Surrogate::new(GridPlan::new(run.n, run.mode)?);
    let start = surrogate.evaluate(x0.to_complex());
    match run.variant {
        Variant::AccelMisl => iterate(run, start, |point| {
            let (next, rec) = squarem_from(&surrogate, point);
            Ok((next, squarem_detail(&rec)))
        }),
        Variant::BacktrackMisl => iterate(run, start, |point| {
            let (next, rec) = backtrack_from(&surrogate, point)?;
            Ok((
                next,
                StepDetail::Backtrack {
                    ladder_index: rec.ladder_index,
                    l: rec.l,
                },
            ))
        }),
        other => Err(invalid(format!("run_accelerated called for {other}"))),
    }
}

pub(crate) fn squarem_detail(rec: &SquaremStepRecord) -> StepDetail {
    StepDetail::Squarem {
        alpha: rec.alpha,
        halvings: rec.halvings,
    }
}
