//! ISL minimization with a weighted stopband power penalty.
//!
//! The update is the MISL step with `p` replaced by `p_bar = p + lambda/2` on the stopband
//! bins (and `p_bar_max = max(p_bar)`). It decreases
//! `sum_p (|a_p^H x|^2 - N)^2 + lambda * SP(x)` with `SP(x) = sum_{k in omega} |a_k^H x|^2`
//! on the 2N grid. Divided by `4N` this is the reported objective
//! `J(x) = ISL(x) + lambda / (4N) * SP(x)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::accel::{squarem_detail, squarem_from};
use crate::error::{invalid, Result};
use crate::run::{iterate, to_sequence, DesignOutcome, DesignRun, StepDetail, Variant};
use crate::sequence::{project_unit, UnimodularSequence};
use crate::surrogate::{Penalty, Surrogate};
use crate::transform::GridPlan;
use crate::Mode;

/// Stopband bins (0-based, on the 2N grid with `omega_k = pi k / N`) and penalty weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMask {
    omega: Vec<usize>,
    lambda: f64,
}

impl SpectralMask {
    /// Sorts and deduplicates `bins`.
    pub fn new(mut bins: Vec<usize>, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(invalid(format!("penalty weight must be finite and >= 0, got {lambda}")));
        }
        bins.sort_unstable();
        bins.dedup();
        Ok(Self {
            omega: bins,
            lambda,
        })
    }

    pub fn from_bands(bands: &[(f64, f64)], n: usize, lambda: f64) -> Result<Self> {
        Self::new(band_to_indices(bands, n)?, lambda)
    }

    pub fn bins(&self) -> &[usize] {
        &self.omega
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Errors if any bin is outside the 2N grid of a length-`n` sequence.
    pub fn check_len(&self, n: usize) -> Result<()> {
        match self.omega.last() {
            Some(&k) if k >= 2 * n => Err(invalid(format!(
                "mask bin {k} outside the {}-bin grid for N = {n}",
                2 * n
            ))),
            _ => Ok(()),
        }
    }

    /// Bins not in the stopband.
    pub fn passband(&self, n: usize) -> Vec<usize> {
        (0..2 * n).filter(|k| self.omega.binary_search(k).is_err()).collect()
    }

    fn penalty(&self) -> Penalty {
        Penalty {
            bins: self.omega.clone(),
            lambda: self.lambda,
        }
    }
}

/// Snaps `v` to the nearest integer when it is within rounding distance of it.
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        v
    }
}

/// All 0-based bins `k` in `0..2N` with `lo <= pi k / N < hi` for some band `[lo, hi)`.
pub fn band_to_indices(bands: &[(f64, f64)], n: usize) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(invalid("sequence length must be at least 1"));
    }
    let mut bins = Vec::new();
    for &(lo, hi) in bands {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi > 2.0 * PI * (1.0 + 1e-12) || lo >= hi
        {
            return Err(invalid(format!(
                "band [{lo}, {hi}) must satisfy 0 <= lo < hi <= 2pi"
            )));
        }
        // Bin positions in units of pi/N.
        let first = snap(lo * n as f64 / PI).ceil() as usize;
        let end = (snap(hi * n as f64 / PI).ceil() as usize).min(2 * n);
        bins.extend(first..end);
    }
    bins.sort_unstable();
    bins.dedup();
    Ok(bins)
}

/// `J(x) = ISL(x) + lambda / (4N) * spectral_power(x, omega)`.
pub fn penalized_objective(x: &UnimodularSequence, mask: &SpectralMask) -> Result<f64> {
    mask.check_len(x.len())?;
    let surrogate = Surrogate::with_penalty(GridPlan::new(x.len(), Mode::Aperiodic)?, mask.penalty());
    Ok(surrogate.evaluate(x.to_complex()).objective)
}

pub fn spectral_misl_step(x: &UnimodularSequence, mask: &SpectralMask) -> Result<UnimodularSequence> {
    mask.check_len(x.len())?;
    let surrogate = Surrogate::with_penalty(GridPlan::new(x.len(), Mode::Aperiodic)?, mask.penalty());
    let point = surrogate.evaluate(x.to_complex());
    let (mut y, _, _) = surrogate.misl_direction(&point);
    project_unit(&mut y);
    Ok(to_sequence(&y))
}

pub fn run_spectral(run: &DesignRun, x0: &UnimodularSequence) -> Result<DesignOutcome> {
    if run.variant != Variant::SpectralMisl {
        return Err(invalid(format!("run_spectral called for {}", run.variant)));
    }
    run.validate()?;
    let mask = run.mask.as_ref().expect("validated");
    let surrogate = Surrogate::with_penalty(GridPlan::new(run.n, Mode::Aperiodic)?, mask.penalty());
    let start = surrogate.evaluate(x0.to_complex());
    if run.accelerate {
        iterate(run, start, |point| {
            let (next, rec) = squarem_from(&surrogate, point);
            Ok((next, squarem_detail(&rec)))
        })
    } else {
        iterate(run, start, |point| {
            let (mut y, _, p_max) = surrogate.misl_direction(point);
            project_unit(&mut y);
            Ok((surrogate.evaluate(y), StepDetail::Misl { p_max }))
        })
    }
}
