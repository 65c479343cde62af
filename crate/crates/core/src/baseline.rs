//! CAN and PeCAN: alternating projections for `||A^H x - sqrt(N) v||^2` over unimodular
//! `x` and unit-modulus `v`.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::metrics::isl_from_power;
use crate::run::{iterate, to_sequence, DesignOutcome, DesignRun, StepDetail, Variant};
use crate::sequence::{project_unit, unit_phasor, UnimodularSequence};
use crate::surrogate::Surrogate;
use crate::transform::GridPlan;
use crate::{Mode, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanStepRecord {
    /// `min_v ||A^H x - sqrt(N) v||^2 = sum_p (|f_p| - sqrt(N))^2` at the new point.
    pub objective_can: f64,
    pub isl_value: f64,
}

/// Intermediates of one CAN update.
#[derive(Debug, Clone)]
pub struct CanUpdate {
    /// `v_p = exp(j arg(f_p))`.
    pub v: Vec<C64>,
    /// `g = A v`.
    pub g: Vec<C64>,
    pub next: UnimodularSequence,
    pub record: CanStepRecord,
}

fn can_objective_from_spectrum(f: &[C64], n: usize) -> f64 {
    let root = (n as f64).sqrt();
    f.iter().map(|z| (z.norm() - root).powi(2)).sum()
}

/// `||A^H x - sqrt(N) v||^2` minimized over `v`.
pub fn can_objective(x: &UnimodularSequence, mode: Mode) -> f64 {
    let plan = GridPlan::new(x.len(), mode).expect("sequence is nonempty");
    can_objective_from_spectrum(&plan.forward(&x.to_complex()), x.len())
}

fn can_map(plan: &GridPlan, spectrum: &[C64]) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
    let v: Vec<C64> = spectrum.iter().map(|&f| unit_phasor(f)).collect();
    let g = plan.adjoint(&v);
    let mut next = g.clone();
    project_unit(&mut next);
    (v, g, next)
}

pub fn can_update(x: &UnimodularSequence, mode: Mode) -> CanUpdate {
    let plan = GridPlan::new(x.len(), mode).expect("sequence is nonempty");
    let (v, g, next) = can_map(&plan, &plan.forward(&x.to_complex()));
    let f_next = plan.forward(&next);
    let power: Vec<f64> = f_next.iter().map(|z| z.norm_sqr()).collect();
    let record = CanStepRecord {
        objective_can: can_objective_from_spectrum(&f_next, x.len()),
        isl_value: isl_from_power(&power, x.len(), mode),
    };
    CanUpdate {
        v,
        g,
        next: to_sequence(&next),
        record,
    }
}

/// One CAN (aperiodic) or PeCAN (periodic) iteration.
pub fn can_step(x: &UnimodularSequence, mode: Mode) -> UnimodularSequence {
    can_update(x, mode).next
}

/// Iterates CAN/PeCAN with the relative-ISL stopping rule. The ISL trace need not be monotone.
pub fn run_can(run: &DesignRun, x0: &UnimodularSequence) -> Result<DesignOutcome> {
    if !matches!(run.variant, Variant::Can | Variant::Pecan) {
        return Err(invalid(format!("run_can called for {}", run.variant)));
    }
    run.validate()?;
    let surrogate = Surrogate::new(GridPlan::new(run.n, run.mode)?);
    let start = surrogate.evaluate(x0.to_complex());
    iterate(run, start, |point| {
        let (_, _, next) = can_map(surrogate.plan(), &point.spectrum);
        let next = surrogate.evaluate(next);
        let objective_can = can_objective_from_spectrum(&next.spectrum, run.n);
        Ok((next, StepDetail::Can { objective_can }))
    })
}
