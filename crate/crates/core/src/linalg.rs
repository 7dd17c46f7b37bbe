//! Operator norms and spectra of finite sections.
//!
//! Structured operators (weighted Toeplitz, lazily generated composition
//! columns) implement [`LinearOperator`] and are normed by power iteration on
//! `AᴴA`. Dense matrices go through `faer`.

use std::sync::Arc;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub trait LinearOperator {
    fn ncols(&self) -> usize;
    fn nrows(&self) -> usize;
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerResult {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value by power iteration on `AᴴA`, stopping when the
/// relative change of the estimate drops below `cfg.tol`.
pub fn top_singular_value<A: LinearOperator + ?Sized>(op: &A, cfg: PowerConfig) -> PowerResult {
    let n = op.ncols();
    if n == 0 || op.nrows() == 0 {
        return PowerResult {
            value: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    // deterministic start with a nonzero component along every basis vector
    let mut x: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(1.0 + 0.5 * (k as f64 * 0.7).sin(), 0.25 * (k as f64).cos()))
        .collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut sigma = 0.0;
    for it in 1..=cfg.max_iter {
        let y = op.apply(&x);
        let s = norm(&y);
        if s == 0.0 {
            return PowerResult {
                value: 0.0,
                iterations: it,
                converged: true,
            };
        }
        let mut z = op.apply_adjoint(&y);
        let nz = norm(&z);
        if nz == 0.0 {
            return PowerResult {
                value: s,
                iterations: it,
                converged: true,
            };
        }
        z.iter_mut().for_each(|v| *v /= nz);
        x = z;
        if (s - sigma).abs() <= cfg.tol * s {
            return PowerResult {
                value: s,
                iterations: it,
                converged: true,
            };
        }
        sigma = s;
    }
    // the estimate ‖Ax‖ with unit x is always a valid lower bound
    let y = op.apply(&x);
    PowerResult {
        value: norm(&y).max(sigma),
        iterations: cfg.max_iter,
        converged: false,
    }
}

/// Truncated linear convolution of length `n` through a cached FFT plan.
#[derive(Clone)]
pub struct Convolver {
    n: usize,
    size: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Convolver {
    pub fn new(n: usize) -> Self {
        let size = (2 * n).next_power_of_two().max(2);
        let mut planner = FftPlanner::new();
        Self {
            n,
            size,
            fwd: planner.plan_fft_forward(size),
            inv: planner.plan_fft_inverse(size),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn spectrum(&self, a: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![ZERO; self.size];
        buf[..a.len().min(self.n)].copy_from_slice(&a[..a.len().min(self.n)]);
        self.fwd.process(&mut buf);
        buf
    }

    /// First `n` coefficients of `a * b` given the spectrum of `a`.
    fn apply_spectrum(&self, spec: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut buf = self.spectrum(b);
        for (x, s) in buf.iter_mut().zip(spec) {
            *x *= s;
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        buf.truncate(self.n);
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }
}

/// `M[j,k] = row_scale[j]·s[j−k]·col_scale[k]` for `j ≥ k`: a diagonally
/// scaled lower-triangular Toeplitz section, applied by FFT.
pub struct ScaledToeplitz {
    conv: Convolver,
    spec: Vec<Complex64>,
    spec_adj: Vec<Complex64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
}

impl ScaledToeplitz {
    pub fn new(symbol: &[Complex64], row_scale: Vec<f64>, col_scale: Vec<f64>) -> Self {
        let n = row_scale.len();
        assert_eq!(n, col_scale.len());
        let conv = Convolver::new(n);
        let mut s: Vec<Complex64> = symbol.iter().take(n).copied().collect();
        s.resize(n, ZERO);
        let spec = conv.spectrum(&s);
        let conj: Vec<Complex64> = s.iter().map(|v| v.conj()).collect();
        let spec_adj = conv.spectrum(&conj);
        Self {
            conv,
            spec,
            spec_adj,
            row_scale,
            col_scale,
        }
    }
}

impl LinearOperator for ScaledToeplitz {
    fn ncols(&self) -> usize {
        self.col_scale.len()
    }

    fn nrows(&self) -> usize {
        self.row_scale.len()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let scaled: Vec<Complex64> = x.iter().zip(&self.col_scale).map(|(v, s)| v * s).collect();
        let mut y = self.conv.apply_spectrum(&self.spec, &scaled);
        y.iter_mut().zip(&self.row_scale).for_each(|(v, s)| *v *= s);
        y
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        // (Lᴴv)_k = Σ_{j≥k} conj(s_{j−k}) v_j = reverse(conj(s) * reverse(v))_k
        let n = self.conv.len();
        let rev: Vec<Complex64> = (0..n).map(|i| y[n - 1 - i] * self.row_scale[n - 1 - i]).collect();
        let c = self.conv.apply_spectrum(&self.spec_adj, &rev);
        (0..n).map(|k| c[n - 1 - k] * self.col_scale[k]).collect()
    }
}

/// Dense matrix operator.
pub struct DenseOperator<'a>(pub &'a Mat<Complex64>);

impl LinearOperator for DenseOperator<'_> {
    fn ncols(&self) -> usize {
        self.0.ncols()
    }

    fn nrows(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.0;
        let mut y = vec![ZERO; m.nrows()];
        for (k, &xk) in x.iter().enumerate() {
            if xk == ZERO {
                continue;
            }
            let col = m.col(k);
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += col[j] * xk;
            }
        }
        y
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let m = self.0;
        (0..m.ncols())
            .map(|k| {
                let col = m.col(k);
                (0..m.nrows()).map(|j| col[j].conj() * y[j]).sum()
            })
            .collect()
    }
}

/// Composition of two operators, `first` applied first.
pub struct Product<'a, A: ?Sized, B: ?Sized> {
    pub first: &'a A,
    pub second: &'a B,
}

impl<A: LinearOperator + ?Sized, B: LinearOperator + ?Sized> LinearOperator for Product<'_, A, B> {
    fn ncols(&self) -> usize {
        self.first.ncols()
    }

    fn nrows(&self) -> usize {
        self.second.nrows()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.second.apply(&self.first.apply(x))
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.first.apply_adjoint(&self.second.apply_adjoint(y))
    }
}

/// Largest singular value of a dense matrix.
pub fn dense_norm(m: &Mat<Complex64>) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let s = m
        .singular_values()
        .map_err(|e| Error::Linalg(format!("{e:?}")))?;
    Ok(s.first().copied().unwrap_or(0.0))
}

/// Sequential dense product `a·b`.
pub fn matmul_seq(a: &Mat<Complex64>, b: &Mat<Complex64>) -> Mat<Complex64> {
    let mut out = Mat::<Complex64>::zeros(a.nrows(), b.ncols());
    matmul(
        out.as_mut(),
        Accum::Replace,
        a.as_ref(),
        b.as_ref(),
        Complex64::new(1.0, 0.0),
        Par::Seq,
    );
    out
}

/// Lower or upper triangular with exact zeros off one side.
pub fn is_triangular(m: &Mat<Complex64>) -> bool {
    let n = m.nrows();
    if n != m.ncols() {
        return false;
    }
    let lower = (0..n).all(|k| (0..k).all(|j| m[(j, k)] == ZERO));
    lower || (0..n).all(|k| (k + 1..n).all(|j| m[(j, k)] == ZERO))
}

/// All eigenvalues of a dense square matrix. Triangular matrices return
/// their diagonal exactly; everything else goes through the Hessenberg/QR
/// eigensolver.
pub fn eigenvalues(m: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Linalg("eigenvalues of a non-square matrix".into()));
    }
    if is_triangular(m) {
        return Ok((0..m.nrows()).map(|k| m[(k, k)]).collect());
    }
    let ev = m
        .eigenvalues()
        .map_err(|e| Error::Linalg(format!("{e:?}")))?;
    Ok(ev)
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order (lower triangle read).
pub fn hermitian_eigenvalues(m: &Mat<Complex64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Linalg(format!("{e:?}")))
}
