//! Dense brute-force references for tests and the `validate` command.
//!
//! Nothing here uses the FFT path: grid products are explicit matrix-vector products with
//! `A[n, p] = exp(j w_p n)`, and lags are literal nested sums.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sequence::{unit_phasor, UnimodularSequence};
use crate::{Mode, C64};

/// Largest N for which N^2 x N^2 matrices are built.
pub const PHI_MAX_N: usize = 12;
/// Largest N for the O(N^2) lag sums.
pub const ACF_MAX_N: usize = 4096;

fn grid_frequency(p: usize, n: usize, mode: Mode) -> f64 {
    2.0 * std::f64::consts::PI * p as f64 / mode.grid_len(n) as f64
}

/// The N x G matrix whose columns are `a_p = [1, e^{j w_p}, ..., e^{j w_p (N-1)}]`.
pub fn steering_matrix(n: usize, mode: Mode) -> DMatrix<C64> {
    let g = mode.grid_len(n);
    DMatrix::from_fn(n, g, |row, p| {
        C64::from_polar(1.0, grid_frequency(p, n, mode) * row as f64)
    })
}

/// `A^H x` by explicit matrix product.
pub fn dense_forward(x: &[C64], mode: Mode) -> Vec<C64> {
    let a = steering_matrix(x.len(), mode);
    (a.adjoint() * DVector::from_column_slice(x)).iter().copied().collect()
}

/// `A z` by explicit matrix product.
pub fn dense_adjoint(z: &[C64], n: usize, mode: Mode) -> Vec<C64> {
    let a = steering_matrix(n, mode);
    (a * DVector::from_column_slice(z)).iter().copied().collect()
}

/// One CAN/PeCAN iteration using explicit matrices.
pub fn can_step_dense(x: &[C64], mode: Mode) -> Vec<C64> {
    let f = dense_forward(x, mode);
    let v: Vec<C64> = f.into_iter().map(unit_phasor).collect();
    dense_adjoint(&v, x.len(), mode)
        .into_iter()
        .map(unit_phasor)
        .collect()
}

/// Literal `r_k = sum_n x_n conj(x_{n+k})` (or cyclic) for `k = 0..N-1`.
pub fn acf_bruteforce(x: &UnimodularSequence, mode: Mode) -> Result<Vec<C64>> {
    let n = x.len();
    if n > ACF_MAX_N {
        return Err(Error::ResourceGuard(format!(
            "brute-force autocorrelation limited to N <= {ACF_MAX_N}"
        )));
    }
    let xc = x.to_complex();
    let lags = (0..n)
        .map(|k| match mode {
            Mode::Aperiodic => (0..n - k).map(|i| xc[i] * xc[i + k].conj()).sum(),
            Mode::Periodic => (0..n).map(|i| xc[i] * xc[(i + k) % n].conj()).sum(),
        })
        .collect();
    Ok(lags)
}

pub fn isl_bruteforce(x: &UnimodularSequence, mode: Mode) -> Result<f64> {
    Ok(acf_bruteforce(x, mode)?
        .iter()
        .skip(1)
        .map(|r| r.norm_sqr())
        .sum())
}

/// `sum_p |a_p^H x|^4` by explicit matrix product.
pub fn quartic_dense(x: &[C64], mode: Mode) -> f64 {
    dense_forward(x, mode)
        .iter()
        .map(|f| f.norm_sqr().powi(2))
        .sum()
}

/// The global majorizer `u(x, x_k)` of the quartic objective, by explicit matrices:
///
/// `4 Re(x^H A (Diag(p) - (p_max + N^2) I) A^H x_k) + 4 G N (p_max + N^2) - 3 sum_p p^2`,
/// where `G` is the grid length (`8 N^2 (p_max + N^2)` in the aperiodic case).
pub fn upper_bound_dense(x: &[C64], anchor: &[C64], mode: Mode) -> f64 {
    let n = anchor.len();
    let a = steering_matrix(n, mode);
    let g = mode.grid_len(n);
    let fa = a.adjoint() * DVector::from_column_slice(anchor);
    let p: Vec<f64> = fa.iter().map(|f| f.norm_sqr()).collect();
    let p_max = p.iter().copied().fold(0.0, f64::max);
    let level = p_max + (n * n) as f64;
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(
        g,
        p.iter().map(|&pp| C64::new(pp - level, 0.0)),
    ));
    let middle = &a * diag * a.adjoint();
    let cross = (DVector::from_column_slice(x).adjoint() * middle * DVector::from_column_slice(anchor))[0];
    let fourth: f64 = p.iter().map(|pp| pp * pp).sum();
    4.0 * cross.re + 4.0 * (g * n) as f64 * level - 3.0 * fourth
}

/// The Hermitian pair `(L, M)` used for the inner majorization at `x_k`:
/// `L = A Diag(p) A^H - G N x_k x_k^H` and `M = p_max A A^H`, with `M - L` positive semidefinite.
pub fn inner_majorization_pair(anchor: &[C64], mode: Mode) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = anchor.len();
    let a = steering_matrix(n, mode);
    let g = mode.grid_len(n);
    let xk = DVector::from_column_slice(anchor);
    let fa = a.adjoint() * &xk;
    let p: Vec<f64> = fa.iter().map(|f| f.norm_sqr()).collect();
    let p_max = p.iter().copied().fold(0.0, f64::max);
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(
        g,
        p.iter().map(|&pp| C64::new(pp, 0.0)),
    ));
    let l = &a * diag * a.adjoint() - (&xk * xk.adjoint()) * C64::new((g * n) as f64, 0.0);
    let m = (&a * a.adjoint()) * C64::new(p_max, 0.0);
    (l, m)
}

/// `bound(x) - x^H L x` for the quadratic majorizer
/// `x^H M x + 2 Re(x^H (L - M) x0) + x0^H (M - L) x0`; nonnegative whenever `M - L` is PSD.
pub fn quadratic_majorizer_gap(l: &DMatrix<C64>, m: &DMatrix<C64>, x: &[C64], x0: &[C64]) -> f64 {
    let x = DVector::from_column_slice(x);
    let x0 = DVector::from_column_slice(x0);
    let quad = |mat: &DMatrix<C64>, u: &DVector<C64>, v: &DVector<C64>| (u.adjoint() * mat * v)[0];
    let diff = l - m;
    let bound = quad(m, &x, &x).re + 2.0 * quad(&diff, &x, &x0).re - quad(&diff, &x0, &x0).re;
    bound - quad(l, &x, &x).re
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_lambda_max(mat: &DMatrix<C64>) -> f64 {
    mat.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The real N^2 x N^2 matrix `sum_p vec(a_p a_p^H) vec(a_p a_p^H)^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiMatrix {
    n: usize,
    entries: DMatrix<f64>,
}

impl PhiMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

fn guard_phi(n: usize) -> Result<()> {
    if n == 0 || n > PHI_MAX_N {
        return Err(Error::ResourceGuard(format!(
            "dense Phi limited to 1 <= N <= {PHI_MAX_N}, got {n}"
        )));
    }
    Ok(())
}

/// Column-major position of `(m, n)` (0-based) in `vec(X)`.
fn vec_index(m: usize, col: usize, n: usize) -> usize {
    m + col * n
}

fn phi_from_outer_products(n: usize) -> Result<DMatrix<f64>> {
    let g = 2 * n;
    let size = n * n;
    let mut acc = DMatrix::<C64>::zeros(size, size);
    for p in 0..g {
        let w = grid_frequency(p, n, Mode::Aperiodic);
        let mut v = DVector::<C64>::zeros(size);
        for col in 0..n {
            for m in 0..n {
                v[vec_index(m, col, n)] = C64::from_polar(1.0, w * (m as f64 - col as f64));
            }
        }
        acc += &v * v.adjoint();
    }
    let max_imag = acc.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag > 1e-9 {
        return Err(Error::Consistency(format!(
            "Phi has imaginary part {max_imag:e}"
        )));
    }
    Ok(acc.map(|z| z.re))
}

fn phi_from_indicator(n: usize) -> DMatrix<f64> {
    let size = n * n;
    DMatrix::from_fn(size, size, |i, j| {
        let (m1, n1) = ((i % n) as isize, (i / n) as isize);
        let (m2, n2) = ((j % n) as isize, (j / n) as isize);
        if m1 - m2 == n1 - n2 {
            2.0 * n as f64
        } else {
            0.0
        }
    })
}

/// Largest elementwise difference between the outer-product and indicator constructions.
pub fn phi_construction_gap(n: usize) -> Result<f64> {
    guard_phi(n)?;
    Ok((phi_from_outer_products(n)? - phi_from_indicator(n)).amax())
}

/// Builds Phi by summing outer products and checks it against the closed-form indicator
/// (`2N` where `m1 - m2 = n1 - n2`, else 0).
pub fn build_phi(n: usize) -> Result<PhiMatrix> {
    guard_phi(n)?;
    let summed = phi_from_outer_products(n)?;
    let worst = (&summed - phi_from_indicator(n)).amax();
    if worst > 1e-9 {
        return Err(Error::Consistency(format!(
            "Phi constructions disagree by {worst:e} at N = {n}"
        )));
    }
    Ok(PhiMatrix {
        n,
        entries: summed,
    })
}

/// Largest eigenvalue of Phi with a corresponding unit eigenvector.
pub fn phi_top_eigenpair(n: usize) -> Result<(f64, DVector<f64>)> {
    let phi = build_phi(n)?;
    let eig = SymmetricEigen::new(phi.entries);
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    Ok((val, eig.eigenvectors.column(idx).into_owned()))
}

pub fn lambda_max_phi(n: usize) -> Result<f64> {
    Ok(phi_top_eigenpair(n)?.0)
}

/// Index class of `vec` position `i`: `k = col - row`, in `1-N ..= N-1`.
pub fn index_class(i: usize, n: usize) -> isize {
    (i / n) as isize - (i % n) as isize
}

/// `|x^T (2N^2 I - Phi) x - 2N (pairwise + weighted)|` where
/// pairwise = sum over classes of `(x_i - x_j)^2` for unordered pairs within a class and
/// weighted = `sum_i |k(i)| x_i^2`.
pub fn quadratic_form_identity(n: usize, x: &[f64]) -> Result<f64> {
    let phi = build_phi(n)?;
    let size = n * n;
    if x.len() != size {
        return Err(Error::InvalidArgument(format!(
            "vector length {} does not match N^2 = {size}",
            x.len()
        )));
    }
    let v = DVector::from_column_slice(x);
    let shifted = DMatrix::<f64>::identity(size, size) * (2.0 * (n * n) as f64) - phi.entries;
    let lhs = v.dot(&(shifted * &v));

    let mut pairwise = 0.0;
    let mut weighted = 0.0;
    for i in 0..size {
        let ki = index_class(i, n);
        weighted += ki.unsigned_abs() as f64 * x[i] * x[i];
        for j in i + 1..size {
            if index_class(j, n) == ki {
                pairwise += (x[i] - x[j]).powi(2);
            }
        }
    }
    let rhs = 2.0 * n as f64 * (pairwise + weighted);
    Ok((lhs - rhs).abs())
}
