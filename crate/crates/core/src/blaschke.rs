//! Finite Blaschke products, their model spaces `K_B = H² ⊖ BH²`, and the
//! block decomposition `f = Σ g_k B^k` with `g_k ∈ K_B`.
//!
//! When `B(0) = 0` the spaces `B^k K_B` are mutually orthogonal in `H²` and
//! fill it, so `g_k B^k` is the orthogonal projection of `f` onto `B^k K_B`.
//! Projections are computed from boundary samples, where `B` is unimodular
//! and known in closed form.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::moebius::Moebius;
use crate::series::{boundary_values, random_polynomial, Series};
use crate::spaces::{seq_norm, SpaceWeight};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    unimodular: Complex64,
}

impl BlaschkeProduct {
    /// `λ Π b_α(z)` with `b_0(z) = z` and `b_α(z) = (|α|/α)(α − z)/(1 − ᾱz)`.
    pub fn new(zeros: Vec<Complex64>, unimodular: Complex64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::InvalidParameter(
                "a Blaschke product needs at least one zero".into(),
            ));
        }
        if let Some(&z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(Error::PointOutsideDisc(z));
        }
        if (unimodular.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "unimodular constant has modulus {}",
                unimodular.norm()
            )));
        }
        Ok(Self { zeros, unimodular })
    }

    pub fn from_zeros(zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(zeros, ONE)
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn unimodular(&self) -> Complex64 {
        self.unimodular
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn vanishes_at_origin(&self) -> bool {
        self.zeros.contains(&ZERO)
    }

    fn factor(alpha: Complex64) -> Moebius {
        if alpha == ZERO {
            return Moebius::identity();
        }
        let s = alpha.norm() / alpha;
        Moebius::new(-s, s * alpha, -alpha.conj(), ONE).expect("|α| < 1 gives a nondegenerate factor")
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(self.unimodular, |acc, &a| acc * Self::factor(a).eval(z))
    }

    /// Taylor coefficients of `B`, exact up to rounding.
    pub fn series(&self, order: usize) -> Series {
        self.mul_series(&Series::constant(self.unimodular, order))
    }

    /// `B·g` at the order of `g`.
    pub fn mul_series(&self, g: &Series) -> Series {
        self.zeros.iter().fold(g.clone(), |acc, &a| {
            Self::factor(a)
                .mul_by_self(&acc)
                .expect("Blaschke factors have poles outside the disc")
        })
    }

    /// `max ||B(ω)| − 1|` over `samples` boundary points.
    pub fn boundary_defect(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|m| {
                let z = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / samples as f64);
                (self.eval(z).norm() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Takenaka–Malmquist orthonormal basis of `K_B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBasis {
    zeros: Vec<Complex64>,
    pub functions: Vec<Series>,
    /// `H²` Gram matrix from boundary quadrature, row-major `n×n`.
    pub gram: Vec<Vec<Complex64>>,
}

impl ModelBasis {
    pub fn dim(&self) -> usize {
        self.zeros.len()
    }

    /// `e_k(z) = √(1−|α_k|²)/(1−ᾱ_k z) · Π_{j<k} b_{α_j}(z)`.
    pub fn eval(&self, k: usize, z: Complex64) -> Complex64 {
        let a = self.zeros[k];
        let head = (1.0 - a.norm_sqr()).sqrt() / (1.0 - a.conj() * z);
        self.zeros[..k]
            .iter()
            .fold(head, |acc, &b| acc * BlaschkeProduct::factor(b).eval(z))
    }

    pub fn max_gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                let want = if i == j { ONE } else { ZERO };
                worst = worst.max((g - want).norm());
            }
        }
        worst
    }
}

fn boundary_points(samples: usize) -> Vec<Complex64> {
    (0..samples)
        .map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / samples as f64))
        .collect()
}

fn quadrature_samples(order: usize) -> usize {
    (4 * (order + 1)).next_power_of_two().max(256)
}

/// Takenaka–Malmquist basis of `K_B`; zero order follows the input order.
pub fn tm_basis(b: &BlaschkeProduct, order: usize) -> ModelBasis {
    let mut functions = Vec::with_capacity(b.degree());
    let mut prefix = Series::one(order);
    for &a in &b.zeros {
        let e = prefix
            .scale(Complex64::new((1.0 - a.norm_sqr()).sqrt(), 0.0))
            .div_linear(-a.conj(), ONE)
            .expect("constant term is 1");
        functions.push(e);
        prefix = BlaschkeProduct::factor(a)
            .mul_by_self(&prefix)
            .expect("Blaschke factors have poles outside the disc");
    }
    let mut basis = ModelBasis {
        zeros: b.zeros.clone(),
        functions,
        gram: Vec::new(),
    };
    let pts = boundary_points(quadrature_samples(order));
    let vals: Vec<Vec<Complex64>> = (0..basis.dim())
        .map(|k| pts.iter().map(|&z| basis.eval(k, z)).collect())
        .collect();
    let m = pts.len() as f64;
    basis.gram = vals
        .iter()
        .map(|vi| {
            vals.iter()
                .map(|vj| vi.iter().zip(vj).map(|(x, y)| x * y.conj()).sum::<Complex64>() / m)
                .collect()
        })
        .collect();
    basis
}

/// Coordinates of `g_0..g_{K−1}` against the Takenaka–Malmquist basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub components: Vec<Vec<Complex64>>,
    pub blaschke: BlaschkeProduct,
    /// `H²` norm of `f − Σ g_k B^k` by boundary quadrature.
    pub residual: f64,
}

impl Decomposition {
    /// `‖g_k‖_{H²}` for each block (the basis is orthonormal).
    pub fn block_norms(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// `Σ_k ω(k)‖g_k‖²` with `ω(k)` the weight of the chosen space.
    pub fn weighted_energy(&self, w: SpaceWeight) -> f64 {
        self.block_norms()
            .iter()
            .enumerate()
            .map(|(k, n)| w.weight(k) * n * n)
            .sum()
    }

    /// `g_k` as a series at the given order.
    pub fn component(&self, k: usize, order: usize) -> Series {
        let basis = tm_basis(&self.blaschke, order);
        self.components[k]
            .iter()
            .zip(&basis.functions)
            .fold(Series::zero(order), |acc, (c, e)| &acc + &e.scale(*c))
    }
}

/// Cached boundary samples of `B^k e_ℓ` for repeated decompositions.
pub struct Decomposer {
    blaschke: BlaschkeProduct,
    blocks: usize,
    order: usize,
    samples: usize,
    /// `atoms[k·n + ℓ][m] = (B^k e_ℓ)(ω_m)`
    atoms: Vec<Vec<Complex64>>,
}

impl Decomposer {
    /// Plan for inputs of order `order` split into `blocks` blocks; `blocks`
    /// defaults to `⌊order / deg B⌋`.
    pub fn new(b: &BlaschkeProduct, order: usize, blocks: Option<usize>) -> Result<Self> {
        if !b.vanishes_at_origin() {
            return Err(Error::BlaschkeNotZeroAtOrigin);
        }
        let degree = b.degree();
        let blocks = blocks.unwrap_or(order / degree).max(1);
        if blocks * degree > order.max(degree) {
            return Err(Error::TooManyBlocks {
                blocks,
                degree,
                order,
            });
        }
        let samples = quadrature_samples(order);
        let pts = boundary_points(samples);
        let basis = tm_basis(b, 0);
        let bvals: Vec<Complex64> = pts.iter().map(|&z| b.eval(z)).collect();
        let mut cur: Vec<Vec<Complex64>> = (0..degree)
            .map(|l| pts.iter().map(|&z| basis.eval(l, z)).collect())
            .collect();
        let mut atoms = Vec::with_capacity(blocks * degree);
        for _ in 0..blocks {
            atoms.extend(cur.iter().cloned());
            for v in cur.iter_mut() {
                v.iter_mut().zip(&bvals).for_each(|(x, bv)| *x *= bv);
            }
        }
        Ok(Self {
            blaschke: b.clone(),
            blocks,
            order,
            samples,
            atoms,
        })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn decompose(&self, f: &Series) -> Decomposition {
        let fv = boundary_values(&f.truncate(self.order), self.samples);
        let n = self.blaschke.degree();
        let m = self.samples as f64;
        let coords: Vec<Complex64> = self
            .atoms
            .iter()
            .map(|atom| fv.iter().zip(atom).map(|(x, a)| x * a.conj()).sum::<Complex64>() / m)
            .collect();
        let mut rest = fv;
        for (c, atom) in coords.iter().zip(&self.atoms) {
            rest.iter_mut().zip(atom).for_each(|(r, a)| *r -= c * a);
        }
        let residual = (rest.iter().map(|r| r.norm_sqr()).sum::<f64>() / m).sqrt();
        Decomposition {
            components: coords.chunks(n).map(|c| c.to_vec()).collect(),
            blaschke: self.blaschke.clone(),
            residual,
        }
    }
}

/// `f = Σ_{k<K} g_k B^k + residual` with `g_k B^k` the `H²` projection of `f`
/// onto `B^k K_B`. `blocks = None` uses `⌊N / deg B⌋`, `N = f.order()`.
pub fn decompose(f: &Series, b: &BlaschkeProduct, blocks: Option<usize>) -> Result<Decomposition> {
    Ok(Decomposer::new(b, f.order(), blocks)?.decompose(f))
}

/// `Σ g_k B^k` truncated at `order`.
pub fn reconstruct(d: &Decomposition, order: usize) -> Series {
    let basis = tm_basis(&d.blaschke, order);
    let mut atoms = basis.functions.clone();
    let mut out = Series::zero(order);
    for coords in &d.components {
        for (c, atom) in coords.iter().zip(&atoms) {
            if *c != ZERO {
                out = &out + &atom.scale(*c);
            }
        }
        atoms = atoms.iter().map(|a| d.blaschke.mul_series(a)).collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub c_lo: f64,
    pub c_hi: f64,
    pub ratios: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameTrials {
    pub trials: usize,
    pub degree: usize,
    pub order: usize,
    pub seed: u64,
}

/// `‖f‖_w² / Σ_k w(k)‖g_k‖²` over random polynomials: empirical constants of
/// the norm equivalence between `f` and its block decomposition.
pub fn frame_bounds(b: &BlaschkeProduct, w: SpaceWeight, cfg: FrameTrials) -> Result<FrameBounds> {
    let dec = Decomposer::new(b, cfg.order, None)?;
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let polys: Vec<Series> = (0..cfg.trials)
        .map(|_| random_polynomial(&mut rng, cfg.degree, cfg.order))
        .collect();
    let ratios: Vec<f64> = polys
        .par_iter()
        .map(|f| seq_norm(f, w).powi(2) / dec.decompose(f).weighted_energy(w))
        .collect();
    Ok(bounds_of(ratios))
}

/// Same ratio for one fixed `f`.
pub fn frame_ratio(f: &Series, b: &BlaschkeProduct, w: SpaceWeight) -> Result<f64> {
    let d = decompose(f, b, None)?;
    Ok(seq_norm(f, w).powi(2) / d.weighted_energy(w))
}

/// Exact extremes of the same ratio over all polynomials of degree
/// `≤ degree`: the ratio is the Rayleigh quotient of `diag(w(j))` against
/// `G = Σ_k w(k) A_k A_kᴴ`, where the columns of `A_k` are the coefficients of
/// `B^k e_ℓ` up to `degree`. `B(0) = 0` makes every block with `k > degree`
/// vanish on these polynomials, so the sum is finite.
pub fn exact_frame_bounds(b: &BlaschkeProduct, w: SpaceWeight, degree: usize) -> Result<(f64, f64)> {
    if !b.vanishes_at_origin() {
        return Err(Error::BlaschkeNotZeroAtOrigin);
    }
    let n = degree + 1;
    let mut g = Mat::<Complex64>::zeros(n, n);
    let mut atoms = tm_basis(b, degree).functions;
    let sw = w.sqrt_weights(degree);
    for k in 0..=degree {
        let wk = w.weight(k);
        for a in &atoms {
            // D^{-1/2} a, so that the extremes come from one Hermitian matrix
            let v: Vec<Complex64> = a.coeffs().iter().zip(&sw).map(|(x, s)| x / s).collect();
            for c in 0..n {
                if v[c] == ZERO {
                    continue;
                }
                let vc = v[c].conj() * wk;
                for r in 0..n {
                    g[(r, c)] += v[r] * vc;
                }
            }
        }
        atoms = atoms.iter().map(|a| b.mul_series(a)).collect();
    }
    let ev = hermitian_eigenvalues(&g)?;
    let (lo, hi) = (ev[0], ev[n - 1]);
    if !(lo > 0.0) {
        return Err(Error::Linalg(format!("block Gram matrix is singular (λ_min = {lo})")));
    }
    Ok((1.0 / hi, 1.0 / lo))
}

fn bounds_of(ratios: Vec<f64>) -> FrameBounds {
    let c_lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let c_hi = ratios.iter().copied().fold(0.0, f64::max);
    FrameBounds { c_lo, c_hi, ratios }
}
