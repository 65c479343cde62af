//! Autocorrelation-based quality measures.

use crate::error::{invalid, Result};
use crate::sequence::UnimodularSequence;
use crate::transform::GridPlan;
use crate::{Mode, C64};

/// Lags `r_0 ..= r_{N-1}`; negative lags follow from `r_{-k} = conj(r_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrelationProfile {
    lags: Vec<C64>,
    mode: Mode,
}

impl AutocorrelationProfile {
    pub fn lags(&self) -> &[C64] {
        &self.lags
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    /// `r_k` for `k` in `1-N ..= N-1`.
    pub fn lag(&self, k: isize) -> C64 {
        let r = self.lags[k.unsigned_abs()];
        if k < 0 {
            r.conj()
        } else {
            r
        }
    }

    /// `sum_{k>=1} |r_k|^2`.
    pub fn isl(&self) -> f64 {
        self.lags.iter().skip(1).map(|r| r.norm_sqr()).sum()
    }
}

/// Aperiodic `r_k = sum_n x_n conj(x_{n+k})` or its cyclic counterpart, computed from
/// the power spectrum on the mode's grid (the 2N grid makes the aperiodic case alias-free).
pub fn autocorrelation(x: &UnimodularSequence, mode: Mode) -> AutocorrelationProfile {
    let n = x.len();
    let plan = GridPlan::new(n, mode).expect("sequence is nonempty");
    let grid = plan.grid_len() as f64;
    let mut power: Vec<C64> = plan
        .forward(&x.to_complex())
        .iter()
        .map(|f| C64::new(f.norm_sqr(), 0.0))
        .collect();
    plan.grid_dft(&mut power);
    let mut lags: Vec<C64> = power.into_iter().take(n).map(|r| r / grid).collect();
    // r_0 = ||x||^2 = N for unimodular input.
    lags[0] = C64::new(n as f64, 0.0);
    AutocorrelationProfile { lags, mode }
}

/// Time-domain ISL, `sum_{k=1}^{N-1} |r_k|^2`.
pub fn isl(x: &UnimodularSequence, mode: Mode) -> f64 {
    autocorrelation(x, mode).isl()
}

/// Frequency-domain ISL from the spectrum on the mode's grid.
pub fn isl_freq(x: &UnimodularSequence, mode: Mode) -> f64 {
    let plan = GridPlan::new(x.len(), mode).expect("sequence is nonempty");
    let f = plan.forward(&x.to_complex());
    let power: Vec<f64> = f.iter().map(|v| v.norm_sqr()).collect();
    isl_from_power(&power, x.len(), mode)
}

/// `(1/4N) sum_p (|f_p|^2 - N)^2` on the 2N grid, `(1/N) sum_p (|f_p|^2 - N)^2` on the N grid.
pub fn isl_from_power(power: &[f64], n: usize, mode: Mode) -> f64 {
    let nf = n as f64;
    let scale = match mode {
        Mode::Aperiodic => 4.0 * nf,
        Mode::Periodic => nf,
    };
    power.iter().map(|p| (p - nf) * (p - nf)).sum::<f64>() / scale
}

/// Golay merit factor `N^2 / (2 ISL)` of the aperiodic autocorrelation.
///
/// Returns `f64::INFINITY` when the ISL is exactly zero (only possible for N = 1).
pub fn merit_factor(x: &UnimodularSequence) -> f64 {
    merit_factor_from_isl(x.len(), isl(x, Mode::Aperiodic))
}

pub fn merit_factor_from_isl(n: usize, isl: f64) -> f64 {
    if isl == 0.0 {
        f64::INFINITY
    } else {
        (n * n) as f64 / (2.0 * isl)
    }
}

/// Magnitudes at or below this multiple of the rounding floor count as exact zeros.
const ZERO_FLOOR_ULPS: f64 = 16.0;

/// `20 log10 |r_k / r_0|` for `k = 1-N ..= N-1`, as `(lag, dB)` pairs.
///
/// Lags whose magnitude sits at the floating-point noise floor of the computation are
/// reported as `f64::NEG_INFINITY`, which serializes as `-inf`.
pub fn correlation_level(x: &UnimodularSequence, mode: Mode) -> Vec<(isize, f64)> {
    let profile = autocorrelation(x, mode);
    let n = x.len();
    let r0 = profile.lags[0].re;
    let log_grid = (mode.grid_len(n) as f64).log2().max(1.0);
    let floor = ZERO_FLOOR_ULPS * f64::EPSILON * n as f64 * log_grid;
    let ni = n as isize;
    (1 - ni..ni)
        .map(|k| {
            let mag = profile.lag(k).norm();
            let db = if k == 0 {
                0.0
            } else if mag <= floor {
                f64::NEG_INFINITY
            } else {
                20.0 * (mag / r0).log10()
            };
            (k, db)
        })
        .collect()
}

/// `sum_{k in omega} |f_{k}|^2` on the aperiodic 2N grid, with 0-based bins.
pub fn spectral_power(x: &UnimodularSequence, omega: &[usize]) -> Result<f64> {
    let g = 2 * x.len();
    if let Some(&k) = omega.iter().find(|&&k| k >= g) {
        return Err(invalid(format!("bin {k} outside the {g}-bin grid")));
    }
    let plan = GridPlan::new(x.len(), Mode::Aperiodic)?;
    let f = plan.forward(&x.to_complex());
    Ok(omega.iter().map(|&k| f[k].norm_sqr()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{acf_bruteforce, isl_bruteforce};
    use crate::sequence::random_unimodular;
    use crate::transform::forward_grid;
    use std::f64::consts::PI;

    fn seq(phases: &[f64]) -> UnimodularSequence {
        UnimodularSequence::from_phases(phases.to_vec()).unwrap()
    }

    fn barker3() -> UnimodularSequence {
        seq(&[0.0, 0.0, PI])
    }

    fn assert_lags(profile: &AutocorrelationProfile, expected: &[f64]) {
        assert_eq!(profile.len(), expected.len());
        for (r, e) in profile.lags().iter().zip(expected) {
            assert!((r - C64::new(*e, 0.0)).norm() < 1e-12, "{r} vs {e}");
        }
    }

    #[test]
    fn hand_autocorrelations() {
        assert_lags(&autocorrelation(&barker3(), Mode::Aperiodic), &[3.0, 0.0, -1.0]);
        assert_lags(&autocorrelation(&seq(&[0.0; 3]), Mode::Aperiodic), &[3.0, 2.0, 1.0]);
        assert_lags(
            &autocorrelation(&seq(&[0.0, 0.0, 0.0, PI]), Mode::Periodic),
            &[4.0, 0.0, 0.0, 0.0],
        );
    }

    #[test]
    fn complex_lag_orientation_matches_definition() {
        for n in [2usize, 5, 9, 33] {
            let x = random_unimodular(n, 3).unwrap();
            for mode in [Mode::Aperiodic, Mode::Periodic] {
                let fast = autocorrelation(&x, mode);
                let brute = acf_bruteforce(&x, mode).unwrap();
                for (a, b) in fast.lags().iter().zip(brute.iter()) {
                    assert!((a - b).norm() <= 1e-10 * n as f64);
                }
            }
        }
    }

    #[test]
    fn hand_isl_values() {
        assert!((isl(&barker3(), Mode::Aperiodic) - 1.0).abs() < 1e-12);
        assert!((isl(&seq(&[0.0; 3]), Mode::Aperiodic) - 5.0).abs() < 1e-12);
        assert!((isl(&seq(&[0.0; 4]), Mode::Periodic) - 48.0).abs() < 1e-10);
        assert!((isl_freq(&seq(&[0.0, 0.0]), Mode::Aperiodic) - 1.0).abs() < 1e-12);
        assert_eq!(isl(&seq(&[1.0]), Mode::Aperiodic), 0.0);
    }

    #[test]
    fn time_and_frequency_isl_agree() {
        for n in 1..=64usize {
            for seed in 0..10u64 {
                let x = random_unimodular(n, seed * 1000 + n as u64).unwrap();
                for mode in [Mode::Aperiodic, Mode::Periodic] {
                    let t = isl(&x, mode);
                    let f = isl_freq(&x, mode);
                    assert!((t - f).abs() / t.max(1.0) <= 1e-9, "N={n} {mode}: {t} vs {f}");
                    let b = isl_bruteforce(&x, mode).unwrap();
                    assert!((t - b).abs() / b.max(1.0) <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn quartic_identity() {
        for n in [1usize, 2, 7, 16, 31, 64] {
            let x = random_unimodular(n, 11).unwrap();
            let nf = n as f64;
            let fourth = |mode| -> f64 {
                forward_grid(&x, mode).power().iter().map(|p| p * p).sum()
            };
            let ap = (fourth(Mode::Aperiodic) - 2.0 * nf.powi(3)) / (4.0 * nf);
            let pe = (fourth(Mode::Periodic) - nf.powi(3)) / nf;
            let ia = isl(&x, Mode::Aperiodic);
            let ip = isl(&x, Mode::Periodic);
            assert!((ap - ia).abs() / ia.max(1.0) <= 1e-9);
            assert!((pe - ip).abs() / ip.max(1.0) <= 1e-9);
        }
    }

    #[test]
    fn merit_factor_values() {
        assert!((merit_factor(&seq(&[0.0, 0.0])) - 2.0).abs() < 1e-12);
        assert!((merit_factor(&barker3()) - 4.5).abs() < 1e-12);
        assert!((merit_factor(&seq(&[0.0; 3])) - 0.9).abs() < 1e-12);
        assert_eq!(merit_factor(&seq(&[0.3])), f64::INFINITY);
        for n in [5usize, 40, 100] {
            let x = random_unimodular(n, 5).unwrap();
            let prod = merit_factor(&x) * 2.0 * isl(&x, Mode::Aperiodic);
            assert!((prod - (n * n) as f64).abs() / (n * n) as f64 <= 1e-12);
        }
    }

    #[test]
    fn correlation_level_barker3() {
        let levels = correlation_level(&barker3(), Mode::Aperiodic);
        let lags: Vec<isize> = levels.iter().map(|l| l.0).collect();
        assert_eq!(lags, vec![-2, -1, 0, 1, 2]);
        let expected = 20.0 * (1.0f64 / 3.0).log10();
        assert!((levels[0].1 - expected).abs() < 1e-9);
        assert!((levels[4].1 - expected).abs() < 1e-9);
        assert_eq!(levels[1].1, f64::NEG_INFINITY);
        assert_eq!(levels[3].1, f64::NEG_INFINITY);
        assert_eq!(levels[2].1, 0.0);
        assert_eq!(format!("{}", levels[1].1), "-inf");
    }

    #[test]
    fn correlation_level_is_symmetric() {
        let x = random_unimodular(20, 8).unwrap();
        let levels = correlation_level(&x, Mode::Aperiodic);
        for i in 0..levels.len() {
            let j = levels.len() - 1 - i;
            assert!((levels[i].1 - levels[j].1).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_power_cases() {
        let x = seq(&[0.0, 0.0]);
        assert!(spectral_power(&x, &[2]).unwrap().abs() < 1e-24);
        assert_eq!(spectral_power(&x, &[]).unwrap(), 0.0);
        let all: Vec<usize> = (0..4).collect();
        assert!((spectral_power(&x, &all).unwrap() - 8.0).abs() < 1e-12);
        assert!(spectral_power(&x, &[4]).is_err());

        let y = random_unimodular(50, 2).unwrap();
        let all: Vec<usize> = (0..100).collect();
        assert!((spectral_power(&y, &all).unwrap() - 5000.0).abs() < 1e-8);
    }
}
