//! Design-run configuration, traces, and the shared iteration driver.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metrics::merit_factor_from_isl;
use crate::sequence::UnimodularSequence;
use crate::spectral::SpectralMask;
use crate::surrogate::Evaluated;
use crate::{accel, baseline, misl, spectral, Mode, C64};

pub const DEFAULT_TOLERANCE: f64 = 1e-5;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Misl,
    AccelMisl,
    BacktrackMisl,
    SpectralMisl,
    Can,
    Pecan,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Misl,
        Variant::AccelMisl,
        Variant::BacktrackMisl,
        Variant::SpectralMisl,
        Variant::Can,
        Variant::Pecan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Misl => "misl",
            Variant::AccelMisl => "accel-misl",
            Variant::BacktrackMisl => "backtrack-misl",
            Variant::SpectralMisl => "spectral-misl",
            Variant::Can => "can",
            Variant::Pecan => "pecan",
        }
    }

    /// Whether the variant guarantees a nonincreasing objective trace.
    pub fn is_monotone(self) -> bool {
        !matches!(self, Variant::Can | Variant::Pecan)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == key)
            .ok_or_else(|| invalid(format!("unknown variant '{s}'")))
    }
}

/// Configuration of one design run.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignRun {
    pub variant: Variant,
    pub mode: Mode,
    pub n: usize,
    pub seed: u64,
    /// Relative-change stopping threshold; `f64::INFINITY` stops after one step.
    pub tolerance: f64,
    pub max_iters: usize,
    pub mask: Option<SpectralMask>,
    /// Wrap the spectral map in SQUAREM (spectral variant only).
    pub accelerate: bool,
}

impl DesignRun {
    pub fn new(variant: Variant, mode: Mode, n: usize) -> Self {
        Self {
            variant,
            mode,
            n,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            max_iters: DEFAULT_MAX_ITERS,
            mask: None,
            accelerate: false,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mask(mut self, mask: SpectralMask) -> Self {
        self.mask = Some(mask);
        self
    }

    pub fn accelerated(mut self, on: bool) -> Self {
        self.accelerate = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("sequence length must be at least 1"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(invalid("tolerance must be positive"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be at least 1"));
        }
        match self.variant {
            Variant::Pecan if self.mode != Mode::Periodic => {
                return Err(invalid("pecan runs in periodic mode"));
            }
            Variant::SpectralMisl => {
                if self.mode != Mode::Aperiodic {
                    return Err(invalid("spectral-misl is defined on the aperiodic grid"));
                }
                let mask = self
                    .mask
                    .as_ref()
                    .ok_or_else(|| invalid("spectral-misl needs a mask"))?;
                mask.check_len(self.n)?;
            }
            _ if self.mask.is_some() => {
                return Err(invalid("a mask is only used by spectral-misl"));
            }
            _ => {}
        }
        if self.accelerate && self.variant != Variant::SpectralMisl {
            return Err(invalid("the accelerate flag applies to spectral-misl only"));
        }
        Ok(())
    }
}

/// Per-step bookkeeping specific to each variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepDetail {
    Initial,
    Misl { p_max: f64 },
    Squarem { alpha: f64, halvings: u32 },
    Backtrack { ladder_index: u32, l: f64 },
    Can { objective_can: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// The quantity the stopping rule and the descent property refer to.
    pub objective: f64,
    pub isl: f64,
    pub detail: StepDetail,
}

#[derive(Debug, Clone)]
pub struct DesignOutcome {
    pub sequence: UnimodularSequence,
    /// Entry 0 describes the initial sequence.
    pub trace: Vec<TraceEntry>,
    /// `false` when the run stopped at `max_iters`.
    pub converged: bool,
}

impl DesignOutcome {
    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }

    pub fn final_isl(&self) -> f64 {
        self.trace.last().expect("trace has the initial entry").isl
    }

    pub fn final_objective(&self) -> f64 {
        self.trace.last().expect("trace has the initial entry").objective
    }

    /// Merit factor of the final sequence (aperiodic runs).
    pub fn merit_factor(&self) -> f64 {
        merit_factor_from_isl(self.sequence.len(), self.final_isl())
    }

    /// Largest relative objective increase between consecutive entries.
    pub fn worst_ascent(&self) -> f64 {
        self.trace
            .windows(2)
            .map(|w| (w[1].objective - w[0].objective) / w[0].objective.max(1.0))
            .fold(0.0, f64::max)
    }
}

/// `|J_{k+1} - J_k| / max(1, J_k) <= tol`.
pub fn relative_change_converged(previous: f64, current: f64, tol: f64) -> bool {
    (current - previous).abs() / previous.max(1.0) <= tol
}

/// Runs `step` from `start` until the relative-change rule or the iteration cap.
pub(crate) fn iterate<F>(run: &DesignRun, start: Evaluated, mut step: F) -> Result<DesignOutcome>
where
    F: FnMut(&Evaluated) -> Result<(Evaluated, StepDetail)>,
{
    let mut trace = Vec::with_capacity(64);
    trace.push(TraceEntry {
        iteration: 0,
        objective: start.objective,
        isl: start.isl,
        detail: StepDetail::Initial,
    });
    let mut current = start;
    let mut converged = false;
    for k in 1..=run.max_iters {
        let (next, detail) = step(&current)?;
        trace.push(TraceEntry {
            iteration: k,
            objective: next.objective,
            isl: next.isl,
            detail,
        });
        let done = relative_change_converged(current.objective, next.objective, run.tolerance);
        current = next;
        if done {
            converged = true;
            break;
        }
    }
    Ok(DesignOutcome {
        sequence: to_sequence(&current.x),
        trace,
        converged,
    })
}

pub(crate) fn to_sequence(x: &[C64]) -> UnimodularSequence {
    UnimodularSequence::from_complex(x).expect("iterates are nonempty and finite")
}

/// Runs the configured variant from `x0`.
pub fn run_design(run: &DesignRun, x0: &UnimodularSequence) -> Result<DesignOutcome> {
    run.validate()?;
    if x0.len() != run.n {
        return Err(invalid(format!(
            "initial sequence has length {}, run expects {}",
            x0.len(),
            run.n
        )));
    }
    match run.variant {
        Variant::Misl => misl::run_misl(run, x0),
        Variant::AccelMisl | Variant::BacktrackMisl => accel::run_accelerated(run, x0),
        Variant::SpectralMisl => spectral::run_spectral(run, x0),
        Variant::Can | Variant::Pecan => baseline::run_can(run, x0),
    }
}
