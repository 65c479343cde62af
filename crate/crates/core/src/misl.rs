//! The MISL fixed-point map and its driver loop.
//!
//! One step computes `p = |A^H x|^2`, `p_max = max(p)` and
//! `y = -A (Diag(p) - p_max I - N^2 I) A^H x`, then keeps only the phases of `y`.
//! The same formula with the N-bin grid handles the periodic ISL.

use crate::error::{invalid, Result};
use crate::run::{iterate, to_sequence, DesignOutcome, DesignRun, StepDetail, Variant};
use crate::sequence::{project_unit, UnimodularSequence};
use crate::surrogate::Surrogate;
use crate::transform::GridPlan;
use crate::{Mode, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct MislStepDiagnostics {
    /// `|A^H x|^2` at the input point.
    pub power: Vec<f64>,
    pub p_max: f64,
    /// `y` before projection.
    pub direction: Vec<C64>,
    pub objective_before: f64,
    pub objective_after: f64,
}

pub fn misl_step(x: &UnimodularSequence, mode: Mode) -> (UnimodularSequence, MislStepDiagnostics) {
    let plan = GridPlan::new(x.len(), mode).expect("sequence is nonempty");
    let surrogate = Surrogate::new(plan);
    let point = surrogate.evaluate(x.to_complex());
    let (direction, _, p_max) = surrogate.misl_direction(&point);
    let mut y = direction.clone();
    project_unit(&mut y);
    let next = surrogate.evaluate(y);
    let diagnostics = MislStepDiagnostics {
        p_max,
        direction,
        objective_before: point.objective,
        objective_after: next.objective,
        power: point.power,
    };
    (to_sequence(&next.x), diagnostics)
}

pub fn run_misl(run: &DesignRun, x0: &UnimodularSequence) -> Result<DesignOutcome> {
    if run.variant != Variant::Misl {
        return Err(invalid(format!("run_misl called for {}", run.variant)));
    }
    run.validate()?;
    let surrogate = Surrogate::new(GridPlan::new(run.n, run.mode)?);
    let start = surrogate.evaluate(x0.to_complex());
    iterate(run, start, |point| {
        let (mut y, _, p_max) = surrogate.misl_direction(point);
        project_unit(&mut y);
        Ok((surrogate.evaluate(y), StepDetail::Misl { p_max }))
    })
}

/// `sum_p |a_p^H x|^4` over the mode's grid.
pub fn quartic_objective(x: &UnimodularSequence, mode: Mode) -> f64 {
    let plan = GridPlan::new(x.len(), mode).expect("sequence is nonempty");
    plan.forward(&x.to_complex())
        .iter()
        .map(|f| f.norm_sqr().powi(2))
        .sum()
}

/// The majorizer `u_L(x, x_k)` of the quartic objective, evaluated in the frequency domain:
///
/// `4 Re(x^H A (Diag(p_k) - L I) A^H x_k) + 4 G N L - 3 sum_p p_k^2`
///
/// where `G` is the grid length. With `L = p_max + N^2` it is a global upper bound on the
/// unit-modulus set, tight at `x = x_k`.
pub fn majorizer_value(x: &[C64], anchor: &[C64], l: f64, mode: Mode) -> f64 {
    let plan = GridPlan::new(anchor.len(), mode).expect("anchor is nonempty");
    let f_anchor = plan.forward(anchor);
    let f_x = plan.forward(x);
    majorizer_from_spectra(&f_x, &f_anchor, l, anchor.len())
}

pub(crate) fn majorizer_from_spectra(f_x: &[C64], f_anchor: &[C64], l: f64, n: usize) -> f64 {
    let grid = f_anchor.len() as f64;
    let mut cross = 0.0;
    let mut fourth = 0.0;
    for (fx, fa) in f_x.iter().zip(f_anchor) {
        let p = fa.norm_sqr();
        cross += (fx.conj() * fa).re * (p - l);
        fourth += p * p;
    }
    4.0 * cross + 4.0 * grid * n as f64 * l - 3.0 * fourth
}

/// `L = p_max + N^2`, the level at which [`majorizer_value`] is a global majorizer.
pub fn global_majorizer_level(anchor: &[C64], mode: Mode) -> f64 {
    let plan = GridPlan::new(anchor.len(), mode).expect("anchor is nonempty");
    let p_max = plan
        .forward(anchor)
        .iter()
        .map(|f| f.norm_sqr())
        .fold(0.0, f64::max);
    p_max + (anchor.len() * anchor.len()) as f64
}
