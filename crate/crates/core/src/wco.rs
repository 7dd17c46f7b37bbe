//! Weighted composition operators `W f = u·(f∘φ)`.
//!
//! Möbius self-maps act exactly in coefficient space through the
//! `·(az+b)` / `/(cz+d)` recurrences, so every column of a finite section is
//! exact up to rounding. Powers are built from the cocycle
//! `Wⁿ = T_{u₍ₙ₎} C_{φₙ}` with `u₍ₙ₎ = Π_{k<n} u∘φ_k`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    dense_norm, matmul_seq, top_singular_value, LinearOperator, PowerConfig, PowerResult,
    ScaledToeplitz,
};
use crate::moebius::{AutoClass, Moebius};
use crate::series::Series;
use crate::spaces::{multiplier_norm, SpaceWeight};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Overshoot allowed in the self-map test.
pub const SELF_MAP_TOL: f64 = 1e-9;
/// `inf |u|` threshold for "bounded away from zero".
pub const INF_TOL: f64 = 1e-6;
const GRID: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SelfMap {
    Moebius(Moebius),
    Series(Series),
}

impl SelfMap {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            SelfMap::Moebius(m) => m.eval(z),
            SelfMap::Series(s) => s.eval(z),
        }
    }

    pub fn as_moebius(&self) -> Option<&Moebius> {
        match self {
            SelfMap::Moebius(m) => Some(m),
            SelfMap::Series(_) => None,
        }
    }

    /// `g·φ` truncated at `order`.
    fn mul(&self, g: &Series, order: usize) -> Series {
        match self {
            SelfMap::Moebius(m) => m
                .mul_by_self(&g.truncate(order))
                .expect("pole outside the disc was checked on construction"),
            SelfMap::Series(s) => g.mul_trunc(s, order),
        }
    }

    /// Largest `|φ|` on 256 boundary points; `∞` for a Möbius map whose pole
    /// lies in the closed disc.
    fn sup_modulus(&self) -> f64 {
        if let SelfMap::Moebius(m) = self {
            let [_, _, c, d] = m.coefficients();
            if c.norm() >= d.norm() {
                return f64::INFINITY;
            }
        }
        (0..GRID)
            .map(|k| self.eval(Complex64::from_polar(1.0, 2.0 * PI * k as f64 / GRID as f64)).norm())
            .fold(self.eval(ZERO).norm(), f64::max)
    }
}

impl From<Moebius> for SelfMap {
    fn from(m: Moebius) -> Self {
        SelfMap::Moebius(m)
    }
}

impl From<Series> for SelfMap {
    fn from(s: Series) -> Self {
        SelfMap::Series(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wco {
    pub u: Series,
    pub phi: SelfMap,
    /// Classification, when `φ` is a disc automorphism.
    pub class: Option<AutoClass>,
}

impl Wco {
    pub fn new(u: Series, phi: impl Into<SelfMap>) -> Result<Self> {
        let phi = phi.into();
        let sup = phi.sup_modulus();
        if !(sup <= 1.0 + SELF_MAP_TOL) {
            return Err(Error::NotSelfMap(sup));
        }
        let class = phi
            .as_moebius()
            .filter(|m| m.is_disc_automorphism())
            .and_then(|m| m.classify().ok());
        Ok(Self { u, phi, class })
    }

    /// Composition operator `C_φ`.
    pub fn composition(phi: impl Into<SelfMap>) -> Result<Self> {
        Self::new(Series::one(0), phi)
    }

    pub fn identity() -> Self {
        Self::new(Series::one(0), Moebius::identity()).expect("identity is a self-map")
    }

    pub fn moebius(&self) -> Result<&Moebius> {
        self.phi.as_moebius().ok_or(Error::NotMoebius)
    }

    pub fn is_automorphism(&self) -> bool {
        self.phi.as_moebius().is_some_and(|m| m.is_disc_automorphism())
    }

    /// `c·W`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            u: self.u.scale(c),
            ..self.clone()
        }
    }

    /// Taylor coefficients of `u·(f∘φ)` up to `order`.
    pub fn apply(&self, f: &Series, order: usize) -> Series {
        let deg = f.degree();
        let mut acc = Series::constant(f.coeff(deg), order);
        for k in (0..deg).rev() {
            acc = self.phi.mul(&acc, order);
            let mut c = acc.into_coeffs();
            c[0] += f.coeff(k);
            acc = Series::from_vec(c);
        }
        self.u.mul_trunc(&acc, order)
    }

    /// `Wⁿ = T_{u₍ₙ₎} C_{φₙ}` with both symbols in closed form.
    pub fn power(&self, n: u64, order: usize) -> Result<Self> {
        let m = *self.moebius()?;
        let u = weight_iterate(&self.u, &m, n, order);
        Self::new(u, m.iterate(n))
    }

    /// Finite section in the basis `z^k/√w(k)`:
    /// `M[j,k] = √(w(j)/w(k))·[zʲ](u·φᵏ)`.
    pub fn compress(&self, w: SpaceWeight, order: usize) -> Compression {
        let n = order + 1;
        let sw = w.sqrt_weights(order);
        let mut matrix = Mat::<Complex64>::zeros(n, n);
        let mut col = self.u.truncate(order);
        for k in 0..n {
            if k > 0 {
                col = self.phi.mul(&col, order);
            }
            for (j, v) in col.coeffs().iter().enumerate() {
                matrix[(j, k)] = v * (sw[j] / sw[k]);
            }
        }
        Compression {
            matrix,
            space: w,
            order,
        }
    }

    /// Matrix-free finite section for large orders.
    pub fn section(&self, w: SpaceWeight, order: usize) -> Section<'_> {
        let sw = w.sqrt_weights(order);
        let inv: Vec<f64> = sw.iter().map(|s| s.recip()).collect();
        Section {
            multiplier: ScaledToeplitz::new(self.u.truncate(order).coeffs(), sw, vec![1.0; order + 1]),
            phi: &self.phi,
            col_scale: inv,
            order,
        }
    }

    /// `‖P_N W P_N‖` by power iteration on the matrix-free section.
    pub fn section_norm(&self, w: SpaceWeight, order: usize, cfg: PowerConfig) -> PowerResult {
        top_singular_value(&self.section(w, order), cfg)
    }

    /// `(1/(u∘φ⁻¹))·C_{φ⁻¹}`, provided `φ` is an automorphism and `u` is
    /// bounded away from zero.
    pub fn formal_inverse(&self, order: usize) -> Result<Self> {
        if !self.is_automorphism() {
            return Err(Error::NotInvertible(NOT_AUTOMORPHISM.into()));
        }
        let inf = inf_modulus(&self.u);
        if !(inf > INF_TOL) {
            return Err(Error::NotInvertible(NOT_BOUNDED_BELOW.into()));
        }
        let psi = self.moebius()?.inverse();
        let v = psi.compose_series(&self.u, order)?.reciprocal(order)?;
        Self::new(v, psi)
    }
}

/// `h₍ₙ₎ = Π_{k<n} h∘φ_k`, each factor composed exactly through `φ_k`.
pub fn weight_iterate(h: &Series, phi: &Moebius, n: u64, order: usize) -> Series {
    let mut acc = Series::one(order);
    let mut phik = Moebius::identity();
    for _ in 0..n {
        let factor = phik
            .compose_series(h, order)
            .expect("automorphism iterates have poles outside the disc");
        acc = acc.mul_trunc(&factor, order);
        phik = phi.compose(&phik);
    }
    acc
}

/// Pointwise `h₍ₙ₎(z)`.
pub fn weight_iterate_at(h: &Series, phi: &Moebius, n: u64, z: Complex64) -> Complex64 {
    let mut acc = ONE;
    let mut x = z;
    for _ in 0..n {
        acc *= h.eval(x);
        x = phi.eval(x);
    }
    acc
}

/// Minimum of `|h|` on a polar grid of the closed disc (33 radii × 256 angles).
pub fn inf_modulus(h: &Series) -> f64 {
    (0..=32)
        .flat_map(|r| {
            (0..GRID).map(move |k| {
                Complex64::from_polar(r as f64 / 32.0, 2.0 * PI * k as f64 / GRID as f64)
            })
        })
        .map(|z| h.eval(z).norm())
        .fold(f64::INFINITY, f64::min)
}

pub struct Compression {
    pub matrix: Mat<Complex64>,
    pub space: SpaceWeight,
    pub order: usize,
}

impl Compression {
    pub fn dim(&self) -> usize {
        self.order + 1
    }

    pub fn mul(&self, other: &Compression) -> Compression {
        Compression {
            matrix: matmul_seq(&self.matrix, &other.matrix),
            space: self.space,
            order: self.order,
        }
    }
}

/// Largest singular value of a compression.
pub fn op_norm(c: &Compression) -> Result<f64> {
    dense_norm(&c.matrix)
}

/// `P_N T_u C_φ P_N` applied without forming the matrix: `C_φ` by Horner in
/// `φ`, `T_u` by FFT.
pub struct Section<'a> {
    multiplier: ScaledToeplitz,
    phi: &'a SelfMap,
    col_scale: Vec<f64>,
    order: usize,
}

impl LinearOperator for Section<'_> {
    fn ncols(&self) -> usize {
        self.order + 1
    }

    fn nrows(&self) -> usize {
        self.order + 1
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.order;
        let mut acc = Series::constant(x[n] * self.col_scale[n], n);
        for k in (0..n).rev() {
            acc = self.phi.mul(&acc, n);
            let mut c = acc.into_coeffs();
            c[0] += x[k] * self.col_scale[k];
            acc = Series::from_vec(c);
        }
        self.multiplier.apply(acc.coeffs())
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let n = self.order;
        let v = self.multiplier.apply_adjoint(y);
        let mut col = Series::one(n);
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            if k > 0 {
                col = self.phi.mul(&col, n);
            }
            let dot: Complex64 = col.coeffs().iter().zip(&v).map(|(c, x)| c.conj() * x).sum();
            out.push(dot * self.col_scale[k]);
        }
        out
    }
}

pub const NOT_AUTOMORPHISM: &str = "φ is not an automorphism";
pub const NOT_BOUNDED_BELOW: &str = "h is not bounded away from zero";
pub const NOT_MULTIPLIER: &str = "multiplier norm of h does not settle";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityWitness {
    pub automorphism: bool,
    pub inf_modulus: f64,
    /// `(N, ‖P_N T_h P_N‖)` in the Dirichlet space.
    pub multiplier_norms: Vec<(usize, f64)>,
    pub multiplier_bounded: bool,
    /// Max entry error of `C(W)·C(W⁻¹) − I` on the top-left `N/2` block.
    pub block_error: Option<f64>,
    pub reasons: Vec<String>,
}

pub struct Invertibility {
    pub invertible: bool,
    pub inverse: Option<Wco>,
    pub witness: InvertibilityWitness,
}

/// Tests the sufficient conditions for invertibility and, when they hold,
/// checks the formula inverse against the compressions at order `N` in the
/// Dirichlet space.
pub fn check_invertible(w: &Wco, order: usize) -> Invertibility {
    let automorphism = w.is_automorphism();
    let inf = inf_modulus(&w.u);
    let orders = [order.max(4) / 4, order.max(4) / 2, order.max(4)];
    let multiplier_norms: Vec<(usize, f64)> = orders
        .iter()
        .map(|&n| (n, multiplier_norm(&w.u, SpaceWeight::Dirichlet, n)))
        .collect();
    let multiplier_bounded = multiplier_norms[2].1 <= multiplier_norms[1].1 * 1.05;
    let mut reasons = Vec::new();
    if !automorphism {
        reasons.push(NOT_AUTOMORPHISM.to_string());
    }
    if !(inf > INF_TOL) {
        reasons.push(NOT_BOUNDED_BELOW.to_string());
    }
    if !multiplier_bounded {
        reasons.push(NOT_MULTIPLIER.to_string());
    }
    let mut witness = InvertibilityWitness {
        automorphism,
        inf_modulus: inf,
        multiplier_norms,
        multiplier_bounded,
        block_error: None,
        reasons,
    };
    if !witness.reasons.is_empty() {
        return Invertibility {
            invertible: false,
            inverse: None,
            witness,
        };
    }
    let inverse = match w.formal_inverse(order) {
        Ok(v) => v,
        Err(e) => {
            witness.reasons.push(e.to_string());
            return Invertibility {
                invertible: false,
                inverse: None,
                witness,
            };
        }
    };
    let err = block_identity_error(w, &inverse, SpaceWeight::Dirichlet, order);
    witness.block_error = Some(err);
    Invertibility {
        invertible: true,
        inverse: Some(inverse),
        witness,
    }
}

/// `max |(C(A)·C(B))[j,k] − δ_jk|` over `j, k ≤ N/2`.
pub fn block_identity_error(a: &Wco, b: &Wco, w: SpaceWeight, order: usize) -> f64 {
    let (ca, cb) = rayon::join(|| a.compress(w, order), || b.compress(w, order));
    let p = ca.mul(&cb);
    let half = order / 2;
    (0..=half)
        .into_par_iter()
        .map(|k| {
            (0..=half)
                .map(|j| {
                    let want = if j == k { ONE } else { ZERO };
                    (p.matrix[(j, k)] - want).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn half() -> Moebius {
        Moebius::new(c(-0.5, 0.0), c(0.5, 0.0), ZERO, ONE).unwrap()
    }

    #[test]
    fn composition_only() {
        let phi = Moebius::disc_automorphism(c(0.3, 0.1), 0.4).unwrap();
        let w = Wco::composition(phi).unwrap();
        let f = Series::from_real(&[1.0, 2.0, -1.0]).unwrap();
        let out = w.apply(&f, 32);
        let z = c(0.2, -0.3);
        let want = f.eval(phi.eval(z));
        assert!((out.eval(z) - want).norm() < 1e-12);
    }

    #[test]
    fn identity_map_is_multiplication() {
        let u = Series::from_real(&[1.0, -1.0]).unwrap();
        let w = Wco::new(u.clone(), Moebius::identity()).unwrap();
        let f = Series::from_real(&[0.0, 2.0, 3.0]).unwrap();
        assert!(w.apply(&f, 8).max_abs_diff(&u.mul_trunc(&f, 8)) < 1e-15);
    }

    #[test]
    fn half_map_example() {
        let u = Series::from_real(&[1.0, -2.0, 1.0]).unwrap();
        let w = Wco::new(u, half()).unwrap();
        let out = w.apply(&Series::monomial(1, 1), 6);
        let want = Series::from_real(&[0.5, -1.5, 1.5, -0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!(out.max_abs_diff(&want) < 1e-15);
        // same map as a plain series
        let ws = Wco::new(w.u.clone(), Series::from_real(&[0.5, -0.5]).unwrap()).unwrap();
        assert!(ws.apply(&Series::monomial(1, 1), 6).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn rejects_non_self_maps() {
        let big = Series::from_real(&[0.0, 1.5]).unwrap();
        assert!(matches!(Wco::composition(big), Err(Error::NotSelfMap(_))));
        let m = Moebius::new(ONE, ZERO, ONE, c(0.5, 0.0)).unwrap();
        assert!(matches!(Wco::composition(m), Err(Error::NotSelfMap(_))));
    }

    #[test]
    fn weight_iterate_examples() {
        let h = Series::from_real(&[2.0, 1.0]).unwrap();
        let rot = Moebius::rotation(2.0 * PI / 3.0);
        assert_eq!(weight_iterate(&h, &rot, 0, 8), Series::one(8));
        let h3 = weight_iterate(&h, &rot, 3, 8);
        let want = Series::from_real(&[8.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(h3.max_abs_diff(&want) < 1e-13);
        let k = Series::constant(c(0.0, 2.0), 4);
        let p = Moebius::parabolic_normal_form(1.0, 1).unwrap();
        let k5 = weight_iterate(&k, &p, 5, 4);
        assert!((k5.coeff(0) - c(0.0, 32.0)).norm() < 1e-12);
    }

    #[test]
    fn cocycle_law() {
        let h = Series::from_real(&[2.0, 0.5, -0.25]).unwrap();
        let phi = Moebius::disc_automorphism(c(0.2, -0.1), 1.1).unwrap();
        let pts: Vec<Complex64> = (0..32)
            .map(|k| Complex64::from_polar(0.3 + 0.6 * (k as f64 / 32.0), 0.7 * k as f64))
            .collect();
        for (m, n) in [(1u64, 1u64), (3, 5), (16, 16), (7, 0)] {
            let mn = weight_iterate(&h, &phi, m + n, 128);
            let hm = weight_iterate(&h, &phi, m, 128);
            let hn = weight_iterate(&h, &phi, n, 128);
            let phim = phi.iterate(m);
            for &z in &pts {
                let lhs = mn.eval(z);
                let rhs = hm.eval(z) * hn.eval(phim.eval(z));
                assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn power_matches_iterated_apply() {
        let h = Series::from_real(&[1.5, 0.5]).unwrap();
        let phi = Moebius::disc_automorphism(c(0.3, 0.2), 0.5).unwrap();
        let w = Wco::new(h, phi).unwrap();
        let f = Series::from_real(&[0.3, -1.0, 0.5, 2.0]).unwrap();
        let order = 64;
        let mut it = f.clone();
        for _ in 0..3 {
            it = w.apply(&it, order);
        }
        let p = w.power(3, order).unwrap().apply(&f, order);
        assert!(p.max_abs_diff(&it) / it.l2_norm() < 1e-8);
        assert_eq!(w.power(1, order).unwrap().u.truncate(1), w.u.truncate(1));
        let p0 = w.power(0, order).unwrap();
        assert!(p0.moebius().unwrap().is_identity());
    }

    #[test]
    fn power_needs_moebius() {
        let w = Wco::composition(Series::from_real(&[0.0, 0.5, 0.25]).unwrap()).unwrap();
        assert_eq!(w.power(2, 8).unwrap_err(), Error::NotMoebius);
    }

    #[test]
    fn compression_examples() {
        let id = Wco::identity().compress(SpaceWeight::Dirichlet, 6);
        for j in 0..7 {
            for k in 0..7 {
                assert_eq!(id.matrix[(j, k)], if j == k { ONE } else { ZERO });
            }
        }
        let shift = Wco::new(Series::monomial(1, 1), Moebius::identity())
            .unwrap()
            .compress(SpaceWeight::Dirichlet, 6);
        for k in 0..6 {
            let want = ((k as f64 + 2.0) / (k as f64 + 1.0)).sqrt();
            assert!((shift.matrix[(k + 1, k)].re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn rotation_compression_is_triangular() {
        let theta = 0.9;
        let u = Series::from_real(&[2.0, 1.0, 0.5]).unwrap();
        let w = Wco::new(u, Moebius::rotation(theta)).unwrap();
        let comp = w.compress(SpaceWeight::Hardy, 20);
        let ev = eigenvalues(&comp.matrix).unwrap();
        for (k, l) in ev.iter().enumerate() {
            let want = Complex64::from_polar(2.0, k as f64 * theta);
            assert!((l - want).norm() < 1e-10);
        }
    }

    #[test]
    fn section_matches_dense() {
        let u = Series::from_real(&[1.0, 0.5, 0.25]).unwrap();
        for phi in [SelfMap::from(half()), SelfMap::from(Moebius::disc_automorphism(c(0.4, 0.0), 0.3).unwrap())] {
            let w = Wco::new(u.clone(), phi).unwrap();
            let dense = w.compress(SpaceWeight::Dirichlet, 40);
            let lazy = w.section_norm(SpaceWeight::Dirichlet, 40, PowerConfig::default()).value;
            let exact = op_norm(&dense).unwrap();
            assert!((lazy - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&Wco::identity().compress(SpaceWeight::Hardy, 5)).unwrap() - 1.0).abs() < 1e-14);
        let mut d = Mat::<Complex64>::zeros(3, 3);
        d[(0, 0)] = c(1.0, 0.0);
        d[(1, 1)] = c(0.0, -4.0);
        d[(2, 2)] = c(2.0, 0.0);
        let comp = Compression {
            matrix: d,
            space: SpaceWeight::Hardy,
            order: 2,
        };
        assert!((op_norm(&comp).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn linearity() {
        let w = Wco::new(
            Series::from_real(&[1.0, -0.5]).unwrap(),
            Moebius::disc_automorphism(c(-0.2, 0.3), 2.0).unwrap(),
        )
        .unwrap();
        let f = Series::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let g = Series::from_real(&[0.0, -1.0, 0.0, 4.0]).unwrap();
        let (a, b) = (c(0.5, 1.0), c(-2.0, 0.25));
        let lhs = w.apply(&(&f.scale(a) + &g.scale(b)), 40);
        let rhs = &w.apply(&f, 40).scale(a) + &w.apply(&g, 40).scale(b);
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn invertibility_examples() {
        let phi = Moebius::disc_automorphism(c(0.2, 0.1), 0.7).unwrap();
        let w = Wco::new(Series::from_real(&[2.0, 1.0]).unwrap(), phi).unwrap();
        let r = check_invertible(&w, 64);
        assert!(r.invertible, "{:?}", r.witness);
        assert!(r.witness.block_error.unwrap() < 1e-6);

        let w = Wco::new(Series::monomial(1, 1), phi).unwrap();
        let r = check_invertible(&w, 64);
        assert!(!r.invertible);
        assert!(r.witness.reasons.iter().any(|s| s.contains("not bounded away from zero")));

        let w = Wco::new(Series::from_real(&[2.0, 1.0]).unwrap(), half()).unwrap();
        let r = check_invertible(&w, 64);
        assert!(!r.invertible);
        assert!(r.witness.reasons.iter().any(|s| s.contains("φ is not an automorphism")));
    }
}
