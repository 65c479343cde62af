//! Shared machinery for the MM fixed-point maps.
//!
//! Every iterate is kept as unit complex samples together with its spectrum, so the
//! objective of the current point and the next MISL update share a single forward FFT.

use crate::metrics::isl_from_power;
use crate::sequence::project_unit;
use crate::transform::GridPlan;
use crate::{Mode, C64};

/// Stopband penalty on the aperiodic grid.
///
/// Raising `p` by `lambda/2` on the stopband majorizes `sum_p (p_p - N)^2 + lambda * SP`,
/// which is `4N` times `ISL + lambda/(4N) * SP`; the latter is the tracked objective.
#[derive(Debug, Clone)]
pub(crate) struct Penalty {
    pub bins: Vec<usize>,
    pub lambda: f64,
}

/// A point together with its spectrum and objective values.
#[derive(Debug, Clone)]
pub(crate) struct Evaluated {
    pub x: Vec<C64>,
    pub spectrum: Vec<C64>,
    pub power: Vec<f64>,
    pub isl: f64,
    /// `isl + lambda/(4N) * stopband power`, or just `isl` without a penalty.
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Surrogate {
    plan: GridPlan,
    penalty: Option<Penalty>,
}

impl Surrogate {
    pub fn new(plan: GridPlan) -> Self {
        Self {
            plan,
            penalty: None,
        }
    }

    pub fn with_penalty(plan: GridPlan, penalty: Penalty) -> Self {
        debug_assert_eq!(plan.mode(), Mode::Aperiodic);
        Self {
            plan,
            penalty: Some(penalty),
        }
    }

    pub fn n(&self) -> usize {
        self.plan.n()
    }

    pub fn mode(&self) -> Mode {
        self.plan.mode()
    }

    pub fn plan(&self) -> &GridPlan {
        &self.plan
    }

    pub fn evaluate(&self, x: Vec<C64>) -> Evaluated {
        let spectrum = self.plan.forward(&x);
        let power: Vec<f64> = spectrum.iter().map(|f| f.norm_sqr()).collect();
        let isl = isl_from_power(&power, self.n(), self.mode());
        let objective = match &self.penalty {
            Some(pen) => {
                let stop: f64 = pen.bins.iter().map(|&k| power[k]).sum();
                isl + pen.lambda / (4.0 * self.n() as f64) * stop
            }
            None => isl,
        };
        Evaluated {
            x,
            spectrum,
            power,
            isl,
            objective,
        }
    }

    /// `p` with `lambda/2` added on the penalized bins.
    pub fn weights(&self, power: &[f64]) -> Vec<f64> {
        let mut w = power.to_vec();
        if let Some(pen) = &self.penalty {
            let half = pen.lambda / 2.0;
            for &k in &pen.bins {
                w[k] += half;
            }
        }
        w
    }

    /// `y = -A (Diag(w) - w_max I - N^2 I) A^H x`, before projection. Returns `(y, w, w_max)`.
    pub fn misl_direction(&self, point: &Evaluated) -> (Vec<C64>, Vec<f64>, f64) {
        let w = self.weights(&point.power);
        let w_max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let n2 = (self.n() * self.n()) as f64;
        let d: Vec<C64> = point
            .spectrum
            .iter()
            .zip(&w)
            .map(|(f, wp)| f * -(wp - w_max - n2))
            .collect();
        (self.plan.adjoint(&d), w, w_max)
    }

    /// One application of the MISL map.
    pub fn misl_map(&self, point: &Evaluated) -> Vec<C64> {
        let (mut y, _, _) = self.misl_direction(point);
        project_unit(&mut y);
        y
    }
}
