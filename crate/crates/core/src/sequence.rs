//! Unimodular sequences and the classic initializers.
//!
//! A sequence is stored as its phases, so `|x_n| = 1` holds by construction.
//! Complex samples are materialized only at the transform boundary.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::C64;

/// A length-N complex sequence with unit-modulus entries `x_n = exp(j * phases[n])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceFile", into = "SequenceFile")]
pub struct UnimodularSequence {
    phases: Vec<f64>,
}

impl UnimodularSequence {
    pub fn from_phases(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(invalid("sequence length must be at least 1"));
        }
        if let Some(i) = phases.iter().position(|p| !p.is_finite()) {
            return Err(invalid(format!("phase {i} is not finite")));
        }
        Ok(Self { phases })
    }

    /// Projects arbitrary complex samples onto the unit circle, keeping only their phase.
    ///
    /// Zero entries map to phase 0.
    pub fn from_complex(samples: &[C64]) -> Result<Self> {
        Self::from_phases(samples.iter().map(|&z| phase_of(z)).collect())
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn into_phases(self) -> Vec<f64> {
        self.phases
    }

    pub fn to_complex(&self) -> Vec<C64> {
        self.phases.iter().map(|&t| C64::from_polar(1.0, t)).collect()
    }

    /// Multiplies every entry by `exp(j * phi)`.
    pub fn rotated(&self, phi: f64) -> Self {
        Self {
            phases: self.phases.iter().map(|t| t + phi).collect(),
        }
    }
}

/// `arg(z)` with the convention `arg(0) = 0`.
pub fn phase_of(z: C64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        0.0
    } else {
        z.im.atan2(z.re)
    }
}

/// `exp(j * arg(z))` with the convention `arg(0) = 0`.
pub(crate) fn unit_phasor(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// Projects each entry onto the unit circle in place.
pub(crate) fn project_unit(values: &mut [C64]) {
    for v in values.iter_mut() {
        *v = unit_phasor(*v);
    }
}

/// Random phases `2*pi*theta_n` with `theta_n` i.i.d. uniform on `[0, 1)`.
///
/// The generator is ChaCha20 seeded from `seed`, so output is a pure function of `(n, seed)`.
pub fn random_unimodular(n: usize, seed: u64) -> Result<UnimodularSequence> {
    if n == 0 {
        return Err(invalid("sequence length must be at least 1"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let phases = (0..n).map(|_| 2.0 * PI * rng.gen::<f64>()).collect();
    Ok(UnimodularSequence { phases })
}

/// Golomb polyphase sequence, `x_n = exp(j*pi*(n-1)*n/N)` for `n = 1..N`.
pub fn golomb_sequence(n: usize) -> Result<UnimodularSequence> {
    if n == 0 {
        return Err(invalid("sequence length must be at least 1"));
    }
    let len = n as f64;
    // (n-1)n is even, so reduce modulo 2N before scaling to keep phases small.
    let phases = (1..=n)
        .map(|i| {
            let k = ((i - 1) as u128 * i as u128) % (2 * n as u128);
            PI * k as f64 / len
        })
        .collect();
    Ok(UnimodularSequence { phases })
}

/// Frank sequence of length `M^2`, phase `2*pi*p*q/M` in row-major `(p, q)` order.
pub fn frank_sequence(m: usize) -> Result<UnimodularSequence> {
    if m == 0 {
        return Err(invalid("Frank order must be at least 1"));
    }
    let mut phases = Vec::with_capacity(m * m);
    for p in 0..m {
        for q in 0..m {
            phases.push(2.0 * PI * ((p * q) % m) as f64 / m as f64);
        }
    }
    Ok(UnimodularSequence { phases })
}

/// On-disk JSON form: `{"n": N, "phases": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub n: usize,
    pub phases: Vec<f64>,
}

impl TryFrom<SequenceFile> for UnimodularSequence {
    type Error = crate::Error;

    fn try_from(file: SequenceFile) -> Result<Self> {
        if file.n != file.phases.len() {
            return Err(invalid(format!(
                "declared n = {} but {} phases present",
                file.n,
                file.phases.len()
            )));
        }
        Self::from_phases(file.phases)
    }
}

impl From<UnimodularSequence> for SequenceFile {
    fn from(seq: UnimodularSequence) -> Self {
        Self {
            n: seq.len(),
            phases: seq.phases,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{isl, merit_factor};
    use crate::oracle::isl_bruteforce;
    use crate::Mode;

    #[test]
    fn random_single_entry_is_unit() {
        let x = random_unimodular(1, 99).unwrap();
        assert_eq!(x.len(), 1);
        assert!((x.to_complex()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_unimodular(8, 42).unwrap();
        let b = random_unimodular(8, 42).unwrap();
        assert_eq!(a.phases(), b.phases());
        assert_ne!(a.phases(), random_unimodular(8, 43).unwrap().phases());
    }

    #[test]
    fn random_phase_mean_is_centered() {
        // Uniform on [0, 2pi): mean pi, std of the mean of 64 draws is ~0.23.
        let x = random_unimodular(64, 1).unwrap();
        let mean = x.phases().iter().sum::<f64>() / 64.0;
        assert!((PI - 0.8..=PI + 0.8).contains(&mean), "mean {mean}");
        assert!(x.phases().iter().all(|&t| (0.0..2.0 * PI).contains(&t)));
    }

    #[test]
    fn zero_length_rejected() {
        assert!(random_unimodular(0, 1).is_err());
        assert!(golomb_sequence(0).is_err());
        assert!(frank_sequence(0).is_err());
        assert!(UnimodularSequence::from_phases(vec![]).is_err());
        assert!(UnimodularSequence::from_phases(vec![f64::NAN]).is_err());
    }

    #[test]
    fn golomb_small_cases() {
        assert_eq!(golomb_sequence(1).unwrap().phases(), &[0.0]);
        assert_eq!(golomb_sequence(2).unwrap().phases(), &[0.0, PI]);
    }

    #[test]
    fn golomb_beats_all_ones() {
        let g = golomb_sequence(16).unwrap();
        let ones = UnimodularSequence::from_phases(vec![0.0; 16]).unwrap();
        assert!(merit_factor(&g) > merit_factor(&ones));
    }

    #[test]
    fn frank_small_cases() {
        assert_eq!(frank_sequence(1).unwrap().phases(), &[0.0]);
        assert_eq!(frank_sequence(2).unwrap().phases(), &[0.0, 0.0, 0.0, PI]);
    }

    #[test]
    fn frank_is_perfect() {
        for m in 1..=8 {
            let x = frank_sequence(m).unwrap();
            let brute = isl_bruteforce(&x, Mode::Periodic).unwrap();
            assert!(brute < 1e-9, "M={m}: brute ISL {brute}");
            assert!(isl(&x, Mode::Periodic) < 1e-9, "M={m}");
        }
    }

    #[test]
    fn zero_maps_to_phase_zero() {
        assert_eq!(phase_of(C64::new(0.0, 0.0)), 0.0);
        assert_eq!(phase_of(C64::new(-0.0, -0.0)), 0.0);
        assert_eq!(unit_phasor(C64::new(0.0, 0.0)), C64::new(1.0, 0.0));
    }

    #[test]
    fn json_shape() {
        let x = UnimodularSequence::from_phases(vec![0.0, 1.5]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"n":2,"phases":[0.0,1.5]}"#);
        let back: UnimodularSequence = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<UnimodularSequence>(r#"{"n":3,"phases":[0.0]}"#).is_err());
    }
}
