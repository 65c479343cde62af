//! `validate`: dense oracle checks with a pass/fail table.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sidelobe::baseline::can_step;
use sidelobe::misl::{misl_step, quartic_objective};
use sidelobe::oracle::{
    acf_bruteforce, can_step_dense, dense_forward, inner_majorization_pair, lambda_max_phi,
    phi_construction_gap, quadratic_form_identity, quadratic_majorizer_gap, upper_bound_dense,
};
use sidelobe::{autocorrelation, forward_grid, isl, isl_freq, random_unimodular, Mode, UnimodularSequence, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub detail: String,
    /// Worst error observed; compared against `tolerance`.
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, detail: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            detail: detail.into(),
            value,
            tolerance,
        }
    }

    fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::new(name, format!("error: {err}"), f64::INFINITY, 0.0)
    }

    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationOutcome {
    pub checks: Vec<Check>,
}

impl ValidationOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<28} {:<40} {:>11} {:>9}  result\n", "check", "detail", "error", "tol");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<28} {:<40} {:>11.3e} {:>9.0e}  {}",
                c.name,
                c.detail,
                c.value,
                c.tolerance,
                if c.passed() { "PASS" } else { "FAIL" }
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        let _ = writeln!(out, "{} checks, {failed} failed", self.checks.len());
        out
    }
}

/// `max |a - b| / max(1, max |b|)`.
fn rel_diff(a: &[C64], b: &[C64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(1.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

fn phi_checks(checks: &mut Vec<Check>) {
    for n in 1..=8usize {
        let expected = 2.0 * (n * n) as f64;
        checks.push(match lambda_max_phi(n) {
            Ok(l) => Check::new(
                format!("lambda_max(Phi) N={n}"),
                format!("{l:.10} vs 2N^2 = {expected}"),
                (l - expected).abs() / expected,
                1e-9,
            ),
            Err(e) => Check::failed(format!("lambda_max(Phi) N={n}"), e),
        });
    }
    let worst = (1..=8).map(phi_construction_gap).collect::<sidelobe::Result<Vec<_>>>();
    checks.push(match worst {
        Ok(v) => Check::new("Phi constructions agree", "outer products vs indicator, N=1..8", v.iter().copied().fold(0.0, f64::max), 1e-9),
        Err(e) => Check::failed("Phi constructions agree", e),
    });
}

fn quadratic_identity_check(rng: &mut ChaCha20Rng) -> Check {
    let mut worst = 0.0f64;
    for n in 2..=6usize {
        for _ in 0..50 {
            let x: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            match quadratic_form_identity(n, &x) {
                Ok(r) => worst = worst.max(r),
                Err(e) => return Check::failed("quadratic-form identity", e),
            }
        }
    }
    Check::new("quadratic-form identity", "x^T(2N^2 I - Phi)x, 50 vectors, N=2..6", worst, 1e-8)
}

fn metric_checks(checks: &mut Vec<Check>, seed: u64) {
    for mode in [Mode::Aperiodic, Mode::Periodic] {
        let mut freq = 0.0f64;
        let mut brute = 0.0f64;
        for n in 1..=64usize {
            for t in 0..10u64 {
                let x = random_unimodular(n, seed.wrapping_add(1000 * n as u64 + t)).expect("n >= 1");
                let a = isl(&x, mode);
                freq = freq.max((a - isl_freq(&x, mode)).abs() / a.max(1.0));
                if n <= 32 {
                    let r = acf_bruteforce(&x, mode).expect("small n");
                    brute = brute.max(rel_diff(autocorrelation(&x, mode).lags(), &r));
                }
            }
        }
        checks.push(Check::new(format!("isl time vs freq ({mode})"), "N=1..64, 10 sequences each", freq, 1e-9));
        checks.push(Check::new(format!("autocorrelation ({mode})"), "FFT vs nested sums, N=1..32", brute, 1e-10));
    }
}

fn dense_checks(checks: &mut Vec<Check>, seed: u64) {
    for mode in [Mode::Aperiodic, Mode::Periodic] {
        let mut fwd = 0.0f64;
        let mut can = 0.0f64;
        for n in 1..=16usize {
            for t in 0..6u64 {
                let x = random_unimodular(n, seed.wrapping_add(77 * n as u64 + t)).expect("n >= 1");
                let xc = x.to_complex();
                fwd = fwd.max(rel_diff(forward_grid(&x, mode).values(), &dense_forward(&xc, mode)));
                can = can.max(rel_diff(&can_step(&x, mode).to_complex(), &can_step_dense(&xc, mode)));
            }
        }
        checks.push(Check::new(format!("forward_grid ({mode})"), "FFT vs dense A^H x, N=1..16", fwd, 1e-10));
        checks.push(Check::new(format!("can_step ({mode})"), "FFT vs dense matrices, N=1..16", can, 1e-10));
    }
}

fn majorizer_checks(checks: &mut Vec<Check>, seed: u64) {
    for mode in [Mode::Aperiodic, Mode::Periodic] {
        let mut violation = 0.0f64;
        let mut touch = 0.0f64;
        for t in 0..50u64 {
            let n = 1 + (t as usize % 16);
            let x = random_unimodular(n, seed.wrapping_add(2 * t)).expect("n >= 1");
            let anchor = random_unimodular(n, seed.wrapping_add(2 * t + 1)).expect("n >= 1");
            let (xc, ac) = (x.to_complex(), anchor.to_complex());
            let q = quartic_objective(&x, mode);
            let scale = q.max(1.0);
            violation = violation.max((q - upper_bound_dense(&xc, &ac, mode)) / scale);
            let qa = quartic_objective(&anchor, mode);
            touch = touch.max((upper_bound_dense(&ac, &ac, mode) - qa).abs() / qa.max(1.0));
            let (l, m) = inner_majorization_pair(&ac, mode);
            let lscale = (n * n * n) as f64;
            violation = violation.max(-quadratic_majorizer_gap(&l, &m, &xc, &ac) / lscale);
            touch = touch.max(quadratic_majorizer_gap(&l, &m, &ac, &ac).abs() / lscale);
        }
        checks.push(Check::new(format!("majorizers hold ({mode})"), "u(x,xk) and quadratic bound, 50 pairs", violation.max(0.0), 1e-8));
        checks.push(Check::new(format!("majorizers touch ({mode})"), "equality at x = xk", touch, 1e-8));
    }
}

fn golden_check() -> Check {
    let x = UnimodularSequence::from_phases(vec![0.0, 0.0]).expect("valid phases");
    let (next, diag) = misl_step(&x, Mode::Aperiodic);
    let p_err = diag
        .power
        .iter()
        .zip([4.0, 2.0, 0.0, 2.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let y_err = rel_diff(&diag.direction, &[C64::new(20.0, 0.0); 2]);
    let can = can_step(&x, Mode::Aperiodic);
    let fixed = rel_diff(&next.to_complex(), &x.to_complex()).max(rel_diff(&can.to_complex(), &x.to_complex()));
    let isl_err = (isl(&x, Mode::Aperiodic) - 1.0).abs();
    Check::new("fixed point x=[1,1]", "p=[4,2,0,2], y=[20,20], ISL=1", p_err.max(y_err).max(fixed).max(isl_err), 1e-12)
}

pub fn run_all(seed: u64) -> ValidationOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    phi_checks(&mut checks);
    checks.push(quadratic_identity_check(&mut rng));
    metric_checks(&mut checks, seed);
    dense_checks(&mut checks, seed);
    majorizer_checks(&mut checks, seed);
    checks.push(golden_check());
    ValidationOutcome { checks }
}
