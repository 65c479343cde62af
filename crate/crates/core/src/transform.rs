//! FFT evaluation of the frequency-grid products.
//!
//! With `F` the unnormalized DFT of size `G` (`F[m,n] = exp(-j*2*pi*m*n/G)`):
//!
//! * aperiodic, `G = 2N`: `A^H x = F [x; 0_N]` and `A z` is the first N entries of `F^H z`;
//! * periodic, `G = N`: `Â^H x = F x` and `Â z = F^H z`.
//!
//! No `1/G` factor is applied anywhere, so `A A^H = G * I`.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::sequence::UnimodularSequence;
use crate::{Mode, C64};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Forward and inverse transforms for one `(N, mode)` pair.
///
/// Plans come from a per-thread planner cache; a `GridPlan` itself is immutable and `Send + Sync`.
#[derive(Clone)]
pub struct GridPlan {
    n: usize,
    mode: Mode,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridPlan")
            .field("n", &self.n)
            .field("mode", &self.mode)
            .finish()
    }
}

impl GridPlan {
    pub fn new(n: usize, mode: Mode) -> Result<Self> {
        if n == 0 {
            return Err(invalid("sequence length must be at least 1"));
        }
        let size = mode.grid_len(n);
        let (forward, inverse) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(size), p.plan_fft_inverse(size))
        });
        Ok(Self {
            n,
            mode,
            forward,
            inverse,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn grid_len(&self) -> usize {
        self.mode.grid_len(self.n)
    }

    /// `A^H x` (or `Â^H x`). Panics if `x.len() != N`.
    pub fn forward(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n, "forward: input length");
        let mut buf = vec![C64::new(0.0, 0.0); self.grid_len()];
        buf[..self.n].copy_from_slice(x);
        self.forward.process(&mut buf);
        buf
    }

    /// `A z` (or `Â z`). Panics if `z.len()` is not the grid length.
    pub fn adjoint(&self, z: &[C64]) -> Vec<C64> {
        assert_eq!(z.len(), self.grid_len(), "adjoint: input length");
        let mut buf = z.to_vec();
        self.inverse.process(&mut buf);
        buf.truncate(self.n);
        buf
    }

    /// Unnormalized forward DFT of a full grid-length vector (used for autocorrelation).
    pub(crate) fn grid_dft(&self, z: &mut [C64]) {
        assert_eq!(z.len(), self.grid_len());
        self.forward.process(z);
    }
}

/// Values of `A^H x` (2N bins) or `Â^H x` (N bins).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    values: Vec<C64>,
    mode: Mode,
}

impl SpectrumGrid {
    pub fn new(values: Vec<C64>, mode: Mode) -> Result<Self> {
        let g = values.len();
        let ok = match mode {
            Mode::Aperiodic => g >= 2 && g.is_multiple_of(2),
            Mode::Periodic => g >= 1,
        };
        if !ok {
            return Err(invalid(format!("{g} bins is not a valid {mode} grid")));
        }
        Ok(Self { values, mode })
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Sequence length the grid belongs to.
    pub fn sequence_len(&self) -> usize {
        match self.mode {
            Mode::Aperiodic => self.values.len() / 2,
            Mode::Periodic => self.values.len(),
        }
    }

    /// `|f_p|^2` per bin.
    pub fn power(&self) -> Vec<f64> {
        self.values.iter().map(|f| f.norm_sqr()).collect()
    }
}

pub fn forward_grid(x: &UnimodularSequence, mode: Mode) -> SpectrumGrid {
    let plan = GridPlan::new(x.len(), mode).expect("sequence is nonempty");
    SpectrumGrid {
        values: plan.forward(&x.to_complex()),
        mode,
    }
}

/// `A z` for a grid of a length-`n` sequence. Errors if `z` is not exactly the grid length.
pub fn adjoint_grid(z: &[C64], n: usize, mode: Mode) -> Result<Vec<C64>> {
    let plan = GridPlan::new(n, mode)?;
    if z.len() != plan.grid_len() {
        return Err(invalid(format!(
            "{mode} grid for N = {n} has {} bins, got {}",
            plan.grid_len(),
            z.len()
        )));
    }
    Ok(plan.adjoint(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dense_adjoint, dense_forward};
    use crate::sequence::random_unimodular;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &[C64], b: &[C64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (u, v) in a.iter().zip(b) {
            assert!((u - v).norm() <= tol, "{u} vs {v}");
        }
    }

    #[test]
    fn two_ones_aperiodic() {
        let x = UnimodularSequence::from_phases(vec![0.0, 0.0]).unwrap();
        let f = forward_grid(&x, Mode::Aperiodic);
        close(
            f.values(),
            &[c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.0), c(1.0, 1.0)],
            1e-14,
        );
    }

    #[test]
    fn single_entry_gives_two_equal_bins() {
        let x = UnimodularSequence::from_phases(vec![0.0]).unwrap();
        close(forward_grid(&x, Mode::Aperiodic).values(), &[c(1.0, 0.0); 2], 1e-15);
    }

    #[test]
    fn adjoint_zero_and_hand_case() {
        let z = vec![c(0.0, 0.0); 8];
        close(&adjoint_grid(&z, 4, Mode::Aperiodic).unwrap(), &[c(0.0, 0.0); 4], 0.0);

        let z = vec![c(-8.0, 0.0), c(-6.0, 6.0), c(0.0, 0.0), c(-6.0, -6.0)];
        close(
            &adjoint_grid(&z, 2, Mode::Aperiodic).unwrap(),
            &[c(-20.0, 0.0), c(-20.0, 0.0)],
            1e-13,
        );
    }

    #[test]
    fn adjoint_length_mismatch() {
        assert!(adjoint_grid(&[c(1.0, 0.0); 3], 2, Mode::Aperiodic).is_err());
        assert!(adjoint_grid(&[c(1.0, 0.0); 4], 2, Mode::Periodic).is_err());
        assert!(adjoint_grid(&[c(1.0, 0.0); 4], 0, Mode::Periodic).is_err());
        assert!(SpectrumGrid::new(vec![c(1.0, 0.0); 3], Mode::Aperiodic).is_err());
    }

    #[test]
    fn non_power_of_two_matches_dense() {
        for &n in &[3usize, 5, 7, 12, 15] {
            let x = random_unimodular(n, n as u64).unwrap();
            for mode in [Mode::Aperiodic, Mode::Periodic] {
                let fast = forward_grid(&x, mode);
                let dense = dense_forward(&x.to_complex(), mode);
                close(fast.values(), &dense, 1e-10 * n as f64);
                let back = adjoint_grid(fast.values(), n, mode).unwrap();
                close(&back, &dense_adjoint(&dense, n, mode), 1e-9 * (n * n) as f64);
            }
        }
    }

    proptest! {
        #[test]
        fn parseval_and_round_trip(n in 1usize..64, seed in any::<u64>()) {
            let x = random_unimodular(n, seed).unwrap();
            for mode in [Mode::Aperiodic, Mode::Periodic] {
                let f = forward_grid(&x, mode);
                let g = mode.grid_len(n) as f64;
                let energy: f64 = f.power().iter().sum();
                assert_relative_eq!(energy, g * n as f64, max_relative = 1e-10);

                let back = adjoint_grid(f.values(), n, mode).unwrap();
                for (b, xi) in back.iter().zip(x.to_complex()) {
                    prop_assert!((b - xi * g).norm() <= 1e-10 * g);
                }
            }
        }
    }
}
