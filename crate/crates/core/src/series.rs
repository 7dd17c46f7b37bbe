//! Truncated power series `a₀ + a₁z + … + a_N z^N` with complex coefficients.
//!
//! The truncation order is always explicit. Products take an output order;
//! every other operation keeps the order of its input unless documented.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Truncated Taylor coefficient vector; `coeffs.len() == order + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    coeffs: Vec<Complex64>,
}

impl Series {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![ZERO; order + 1],
        }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(ONE, order)
    }

    /// `z^k` at the given order (the zero series if `k > order`).
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = ONE;
        }
        s
    }

    /// Internal constructor for arithmetic whose outputs are finite by construction.
    pub(crate) fn from_vec(coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Index of the last nonzero coefficient (0 for the zero series).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Cut or zero-pad to `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, ZERO);
        Self { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Cauchy product truncated at `out_order`.
    pub fn mul_trunc(&self, other: &Series, out_order: usize) -> Self {
        let mut out = vec![ZERO; out_order + 1];
        let da = self.degree().min(out_order);
        let db = other.degree().min(out_order);
        for (i, &a) in self.coeffs[..=da].iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let top = (out_order - i).min(db);
            for (o, &b) in out[i..=i + top].iter_mut().zip(&other.coeffs[..=top]) {
                *o += a * b;
            }
        }
        Self::from_vec(out)
    }

    /// `(a z + b)·self`, same order.
    pub fn mul_linear(&self, a: Complex64, b: Complex64) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut prev = ZERO;
        for &x in &self.coeffs {
            out.push(b * x + a * prev);
            prev = x;
        }
        Self::from_vec(out)
    }

    /// `self / (c z + d)`, same order. Exact on truncations; stable when
    /// the root `-d/c` lies outside the closed unit disc.
    pub fn div_linear(&self, c: Complex64, d: Complex64) -> Result<Self> {
        if d == ZERO {
            return Err(Error::ZeroConstantTerm);
        }
        let inv = d.inv();
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut prev = ZERO;
        for &x in &self.coeffs {
            prev = (x - c * prev) * inv;
            out.push(prev);
        }
        Ok(Self::from_vec(out))
    }

    /// Multiplicative inverse truncated at `order`; requires `a₀ ≠ 0`.
    pub fn reciprocal(&self, order: usize) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = a0.inv();
        let deg = self.degree();
        let mut out = vec![ZERO; order + 1];
        out[0] = inv0;
        for n in 1..=order {
            let mut acc = ZERO;
            for j in 1..=n.min(deg) {
                acc += self.coeffs[j] * out[n - j];
            }
            out[n] = -acc * inv0;
        }
        Ok(Self::from_vec(out))
    }

    /// Quotient `self / other` truncated at `order`.
    pub fn div_trunc(&self, other: &Series, order: usize) -> Result<Self> {
        Ok(self.mul_trunc(&other.reciprocal(order)?, order))
    }

    /// Term-wise derivative; the order drops by one (order 0 gives the zero series).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_vec(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * k as f64)
                .collect(),
        )
    }

    /// Term-wise antiderivative vanishing at 0; the order grows by one.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(ZERO);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &a)| a / (k + 1) as f64),
        );
        Self::from_vec(out)
    }

    /// Horner evaluation of the truncated polynomial. Accurate on `|z| ≤ 1`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
    }

    /// `max |f|` over `samples` equispaced points of the circle of radius `r`.
    pub fn max_abs_on_circle(&self, r: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|m| {
                let z = Complex64::from_polar(r, 2.0 * PI * m as f64 / samples as f64);
                self.eval(z).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Series) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &Series {
    type Output = Series;

    /// Coefficientwise sum; the result order is the larger of the two.
    fn add(self, rhs: &Series) -> Series {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Series::from_vec((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Series {
    type Output = Series;

    fn sub(self, rhs: &Series) -> Series {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Series::from_vec((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &Series {
    type Output = Series;

    fn neg(self) -> Series {
        self.scale(-ONE)
    }
}

impl Mul<Complex64> for &Series {
    type Output = Series;

    fn mul(self, rhs: Complex64) -> Series {
        self.scale(rhs)
    }
}

/// Radius and sample count of the discrete Cauchy integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extraction {
    pub radius: f64,
    /// `None` picks the smallest power of two `≥ 4(N+1)`.
    pub samples: Option<usize>,
}

impl Default for Extraction {
    fn default() -> Self {
        Self {
            radius: 0.9,
            samples: None,
        }
    }
}

impl Extraction {
    pub fn samples_for(&self, order: usize) -> usize {
        self.samples
            .unwrap_or_else(|| (4 * (order + 1)).next_power_of_two())
    }
}

/// Taylor coefficients `a₀..a_N` of an analytic function from `M` samples on
/// the circle `|z| = r`:
///
/// `a_k ≈ (1/M) Σ_m f(r ω^m) ω^{-km} / r^k`, `ω = e^{2πi/M}`.
///
/// The aliasing error of `a_k` is `Σ_{j≥1} |a_{k+jM}| r^{jM}`; rounding is
/// amplified by `r^{-k}`, so `N` should stay moderate relative to `-1/ln r`.
pub fn coeffs_from_samples<F>(f: F, radius: f64, order: usize, samples: usize) -> Result<Series>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidRadius(radius));
    }
    let needed = 2 * (order + 1);
    if samples < needed {
        return Err(Error::TooFewSamples {
            samples,
            order,
            needed,
        });
    }
    if !samples.is_power_of_two() {
        return Err(Error::SamplesNotPowerOfTwo(samples));
    }
    let mut buf: Vec<Complex64> = (0..samples)
        .map(|m| f(Complex64::from_polar(radius, 2.0 * PI * m as f64 / samples as f64)))
        .collect();
    FftPlanner::new()
        .plan_fft_forward(samples)
        .process(&mut buf);
    let scale = 1.0 / samples as f64;
    let mut rk = 1.0;
    let coeffs = buf[..=order]
        .iter()
        .map(|&x| {
            let a = x * (scale / rk);
            rk *= radius;
            a
        })
        .collect();
    Series::new(coeffs)
}

/// [`coeffs_from_samples`] with an [`Extraction`] configuration.
pub fn extract<F>(f: F, order: usize, cfg: Extraction) -> Result<Series>
where
    F: Fn(Complex64) -> Complex64,
{
    coeffs_from_samples(f, cfg.radius, order, cfg.samples_for(order))
}

/// Polynomial of the given degree with independent standard complex Gaussian
/// coefficients, zero-padded to `order`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, degree: usize, order: usize) -> Series {
    let mut coeffs: Vec<Complex64> = (0..=degree)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    coeffs.resize(order.max(degree) + 1, ZERO);
    Series::from_vec(coeffs)
}

/// Values `f(e^{2πim/M})`, `m = 0..M`, of a series of order `< M` by one FFT.
pub fn boundary_values(f: &Series, samples: usize) -> Vec<Complex64> {
    assert!(f.order() < samples, "order must be below the sample count");
    let mut buf = vec![ZERO; samples];
    buf[..f.coeffs.len()].copy_from_slice(&f.coeffs);
    FftPlanner::new().plan_fft_inverse(samples).process(&mut buf);
    buf
}
