//! Design of unimodular sequences with low integrated sidelobe level (ISL).
//!
//! The solvers are majorization-minimization fixed-point maps evaluated with FFTs:
//!
//! * [`misl`]: the monotone ISL minimizer and its driver loop;
//! * [`accel`]: SQUAREM extrapolation and the backtracking (`L`-ladder) variant;
//! * [`spectral`]: ISL plus a weighted stopband power penalty;
//! * [`baseline`]: CAN / PeCAN for comparison.
//!
//! [`metrics`] evaluates sequences, [`transform`] hosts the grid products, and the
//! `oracle` module (feature `oracle`) carries dense brute-force references.
//!
//! ```
//! use sidelobe::{random_unimodular, run_design, DesignRun, Mode, Variant};
//!
//! let run = DesignRun::new(Variant::AccelMisl, Mode::Aperiodic, 32);
//! let x0 = random_unimodular(32, 7).unwrap();
//! let out = run_design(&run, &x0).unwrap();
//! assert!(out.final_isl() < out.trace[0].isl);
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod accel;
pub mod baseline;
pub mod error;
pub mod io;
pub mod metrics;
pub mod misl;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod run;
pub mod sequence;
pub mod spectral;
mod surrogate;
pub mod transform;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use metrics::{
    autocorrelation, correlation_level, isl, isl_freq, merit_factor, spectral_power,
    AutocorrelationProfile,
};
pub use run::{run_design, DesignOutcome, DesignRun, StepDetail, TraceEntry, Variant};
pub use sequence::{frank_sequence, golomb_sequence, random_unimodular, UnimodularSequence};
pub use spectral::{band_to_indices, SpectralMask};
pub use transform::{adjoint_grid, forward_grid, GridPlan, SpectrumGrid};

/// Which autocorrelation the ISL refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Lags over the overlapping window; 2N-bin frequency grid.
    Aperiodic,
    /// Cyclic lags; N-bin frequency grid.
    Periodic,
}

impl Mode {
    /// Number of frequency bins for a length-`n` sequence.
    pub fn grid_len(self, n: usize) -> usize {
        match self {
            Mode::Aperiodic => 2 * n,
            Mode::Periodic => n,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Aperiodic => "aperiodic",
            Mode::Periodic => "periodic",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aperiodic" => Ok(Mode::Aperiodic),
            "periodic" => Ok(Mode::Periodic),
            other => Err(error::invalid(format!("unknown mode '{other}'"))),
        }
    }
}
