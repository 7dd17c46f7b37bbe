//! Möbius transforms `z ↦ (az+b)/(cz+d)` stored as 2×2 matrices.
//!
//! Composition is matrix product and iteration is matrix power, so the group
//! structure is exact up to rounding. Matrices are kept normalized to
//! `ad − bc = 1`; evaluation happens only at the edges.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Band on `|p| − cos(θ/2)` inside which a map is reported parabolic.
pub const PARABOLIC_TOLERANCE: f64 = 1e-9;

/// Boundary tolerance for the automorphism test.
const BOUNDARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moebius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplier {
    /// Elliptic: argument of `φ'(a)` at the interior fixed point.
    Rotation { angle: f64 },
    /// Parabolic: `y` of the normal form fixing −1.
    Translation { y: f64 },
    /// Hyperbolic: `μ = φ'(a) ∈ (0,1)` at the attracting fixed point.
    Dilation { mu: f64 },
    None,
}

/// Classification of a disc automorphism.
///
/// `fixed_points` lists finite fixed points: `[interior, exterior]` for
/// elliptic maps (the exterior one is omitted when it is ∞), `[a]` for
/// parabolic maps and `[attracting, repelling]` for hyperbolic maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutoClass {
    pub kind: AutoKind,
    pub fixed_points: Vec<Complex64>,
    pub multiplier: Multiplier,
    /// `|p| − cos(θ/2)`; zero within rounding for parabolic maps.
    pub margin: f64,
    /// Set when the map was classified parabolic only because `margin` fell
    /// inside the tolerance band.
    pub near_parabolic: bool,
}

impl AutoClass {
    pub fn interior_fixed_point(&self) -> Option<Complex64> {
        match self.kind {
            AutoKind::Elliptic => self.fixed_points.first().copied(),
            _ => None,
        }
    }
}

impl Moebius {
    /// Builds and normalizes `(az+b)/(cz+d)`; rejects `ad − bc = 0`.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = Self { a, b, c, d };
        let det = m.det();
        if det == ZERO || !det.is_finite() {
            return Err(Error::DegenerateMoebius);
        }
        Ok(m.normalized())
    }

    pub fn identity() -> Self {
        Self {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// `z ↦ e^{iθ} z`.
    pub fn rotation(theta: f64) -> Self {
        let h = Complex64::from_polar(1.0, theta / 2.0);
        Self {
            a: h,
            b: ZERO,
            c: ZERO,
            d: h.conj(),
        }
    }

    /// `z ↦ e^{iθ}(p − z)/(1 − p̄z)`, the general disc automorphism.
    pub fn disc_automorphism(p: Complex64, theta: f64) -> Result<Self> {
        if p.norm() >= 1.0 || !p.is_finite() || !theta.is_finite() {
            return Err(Error::PointOutsideDisc(p));
        }
        let e = Complex64::from_polar(1.0, theta);
        Self::new(-e, e * p, -p.conj(), ONE)
    }

    /// `z ↦ (z + a)/(1 + āz)`, the automorphism sending 0 to `a`.
    pub fn translation_to(a: Complex64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::PointOutsideDisc(a));
        }
        Self::new(ONE, a, a.conj(), ONE)
    }

    /// `φ_a(z) = (a − z)/(1 − āz)`, the involution swapping 0 and `a`.
    pub fn involution(a: Complex64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::PointOutsideDisc(a));
        }
        Self::new(-ONE, a, -a.conj(), ONE)
    }

    /// `φ_n(z) = ((2 − niy)z − niy)/(niyz + 2 + niy)`: the n-th iterate of the
    /// parabolic automorphism fixing −1 with translation parameter `y ≠ 0`.
    pub fn parabolic_normal_form(y: f64, n: u64) -> Result<Self> {
        if y == 0.0 || !y.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "parabolic parameter y must be a nonzero real, got {y}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter(
                "closed form is defined for n ≥ 1".into(),
            ));
        }
        let t = I * (n as f64 * y);
        Self::new(2.0 - t, -t, t, 2.0 + t)
    }

    /// `ψ_j(z) = ((1+μʲ)z + (1−μʲ))/((1−μʲ)z + (1+μʲ))`: the j-th iterate of the
    /// hyperbolic automorphism with attracting fixed point 1, repelling −1.
    pub fn hyperbolic_normal_form(mu: f64, j: u64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "hyperbolic multiplier must lie in (0,1), got {mu}"
            )));
        }
        if j == 0 {
            return Err(Error::InvalidParameter(
                "closed form is defined for j ≥ 1".into(),
            ));
        }
        let m = mu.powi(j.min(i32::MAX as u64) as i32);
        let p = Complex64::new(1.0 + m, 0.0);
        let q = Complex64::new(1.0 - m, 0.0);
        Self::new(p, q, q, p)
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    fn normalized(self) -> Self {
        let s = self.det().sqrt().inv();
        let mut m = Self {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        };
        // fix the ±1 ambiguity so that equal maps get equal matrices
        let lead = [m.a, m.b, m.c, m.d]
            .into_iter()
            .find(|x| x.norm() > 1e-300)
            .unwrap_or(ONE);
        if lead.re < 0.0 || (lead.re == 0.0 && lead.im < 0.0) {
            m = Self {
                a: -m.a,
                b: -m.b,
                c: -m.c,
                d: -m.d,
            };
        }
        m
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        self.det() / (den * den)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Moebius) -> Moebius {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .normalized()
    }

    pub fn inverse(&self) -> Moebius {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
        .normalized()
    }

    /// `φ_n = φ∘⋯∘φ` (n times) by binary powering; `n = 0` is the identity.
    pub fn iterate(&self, n: u64) -> Moebius {
        let mut result = Self::identity();
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        result
    }

    /// `g⁻¹ ∘ self ∘ g`.
    pub fn conjugate_by(&self, g: &Moebius) -> Moebius {
        g.inverse().compose(self).compose(g)
    }

    pub fn is_identity(&self) -> bool {
        let scale = [self.a, self.b, self.c, self.d]
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        let tol = 1e-13 * scale.max(1.0);
        self.b.norm() <= tol && self.c.norm() <= tol && (self.a - self.d).norm() <= tol
    }

    /// Same map up to the sign of the normalized matrix, relative to the
    /// largest entry.
    pub fn approx_eq(&self, other: &Moebius, tol: f64) -> bool {
        let x = self.normalized();
        let y = other.normalized();
        let scale = x
            .coefficients()
            .iter()
            .chain(y.coefficients().iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let diff = |s: f64| {
            x.coefficients()
                .iter()
                .zip(y.coefficients())
                .map(|(u, v)| (u - v * s).norm())
                .fold(0.0, f64::max)
        };
        diff(1.0).min(diff(-1.0)) <= tol * scale
    }

    /// Maps three boundary points onto the unit circle and sends 0 inside.
    pub fn is_disc_automorphism(&self) -> bool {
        let on_circle = [ONE, I, -ONE].into_iter().all(|z| {
            let den = self.c * z + self.d;
            den.norm() > 1e-300 && (self.eval(z).norm() - 1.0).abs() < BOUNDARY_TOL
        });
        on_circle && self.d.norm() > 1e-300 && self.eval(ZERO).norm() < 1.0
    }

    /// `(p, θ)` with `φ(z) = e^{iθ}(p − z)/(1 − p̄z)`, `θ ∈ (−π, π]`.
    pub fn automorphism_params(&self) -> Result<(Complex64, f64)> {
        if !self.is_disc_automorphism() {
            return Err(Error::NotAutomorphism);
        }
        let p = -self.b / self.a;
        let mut theta = (-self.a / self.d).arg();
        if theta <= -PI {
            theta += 2.0 * PI;
        }
        Ok((p, theta))
    }

    /// Roots of `cz² + (d − a)z − b = 0`; `∞` is omitted when `c = 0`.
    pub fn fixed_points(&self) -> Vec<Complex64> {
        let scale = self.a.norm().max(self.d.norm()).max(1.0);
        if self.c.norm() <= 1e-15 * scale {
            let dm = self.d - self.a;
            if dm.norm() <= 1e-15 * scale {
                return Vec::new();
            }
            return vec![self.b / dm];
        }
        let qa = self.c;
        let qb = self.d - self.a;
        let qc = -self.b;
        let disc = (qb * qb - 4.0 * qa * qc).sqrt();
        // avoid cancellation by picking the larger-magnitude denominator
        let s = if (qb + disc).norm() >= (qb - disc).norm() {
            qb + disc
        } else {
            qb - disc
        };
        let r1 = -s / (2.0 * qa);
        let r2 = if s.norm() > 0.0 { -2.0 * qc / s } else { r1 };
        vec![r1, r2]
    }

    /// Classifies with the default parabolic band.
    pub fn classify(&self) -> Result<AutoClass> {
        self.classify_with_tolerance(PARABOLIC_TOLERANCE)
    }

    /// Kind from the trichotomy `|p|` vs `cos(θ/2)`; fixed points from the
    /// quadratic; multiplier from the derivative at a fixed point.
    pub fn classify_with_tolerance(&self, tol: f64) -> Result<AutoClass> {
        let (p, theta) = self.automorphism_params()?;
        let margin = p.norm() - (theta / 2.0).cos();
        if self.is_identity() {
            return Ok(AutoClass {
                kind: AutoKind::Identity,
                fixed_points: Vec::new(),
                multiplier: Multiplier::None,
                margin,
                near_parabolic: false,
            });
        }
        let roots = self.fixed_points();
        if margin.abs() <= tol {
            let a = if self.c.norm() > 0.0 {
                (self.a - self.d) / (2.0 * self.c)
            } else {
                roots.first().copied().unwrap_or(ONE)
            };
            let a = a / a.norm();
            let y = self.parabolic_translation(a);
            return Ok(AutoClass {
                kind: AutoKind::Parabolic,
                fixed_points: vec![a],
                multiplier: Multiplier::Translation { y },
                margin,
                near_parabolic: margin != 0.0 && margin.abs() > 1e-15,
            });
        }
        if margin < 0.0 {
            let (interior, exterior): (Vec<_>, Vec<_>) =
                roots.into_iter().partition(|z| z.norm() < 1.0);
            let a = interior.first().copied().unwrap_or(ZERO);
            let mut fixed_points = vec![a];
            fixed_points.extend(exterior);
            let angle = self.derivative(a).arg();
            Ok(AutoClass {
                kind: AutoKind::Elliptic,
                fixed_points,
                multiplier: Multiplier::Rotation { angle },
                margin,
                near_parabolic: false,
            })
        } else {
            let mut pts: Vec<(Complex64, f64)> = roots
                .into_iter()
                .map(|z| (z, self.derivative(z).norm()))
                .collect();
            pts.sort_by(|x, y| x.1.total_cmp(&y.1));
            let mu = pts[0].1;
            Ok(AutoClass {
                kind: AutoKind::Hyperbolic,
                fixed_points: pts.iter().map(|(z, _)| z / z.norm()).collect(),
                multiplier: Multiplier::Dilation { mu },
                margin,
                near_parabolic: false,
            })
        }
    }

    /// `y` such that `R⁻¹∘self∘R` is the parabolic normal form, where `R`
    /// rotates −1 onto the fixed point `a`.
    fn parabolic_translation(&self, a: Complex64) -> f64 {
        let r = Self::rotation((-a).arg());
        let n = self.conjugate_by(&r);
        let [na, nb, nc, nd] = n.coefficients();
        let sign = if (na + nd).re < 0.0 { -1.0 } else { 1.0 };
        // normal form /2: [[1 − iy/2, −iy/2], [iy/2, 1 + iy/2]]
        let from_c = (sign * nc * -2.0 * I).re;
        let from_b = (sign * nb * 2.0 * I).re;
        0.5 * (from_c + from_b)
    }

    /// `sup_D |φ'| = (1+|α|)/(1−|α|)` with `α = φ⁻¹(0)`, evaluated as
    /// `(|c|+|d|)²/|det|` to avoid cancellation near the boundary.
    /// `grid` boundary samples cross-check the analytic value.
    pub fn derivative_sup(&self, grid: usize) -> Result<f64> {
        if !self.is_disc_automorphism() {
            return Err(Error::NotAutomorphism);
        }
        let sum = self.c.norm() + self.d.norm();
        let analytic = sum * sum / self.det().norm();
        if grid > 0 {
            let sampled = self.derivative_grid_max(grid);
            if sampled > analytic * (1.0 + 1e-8) {
                return Err(Error::Linalg(format!(
                    "boundary derivative {sampled} exceeds analytic sup {analytic}"
                )));
            }
        }
        Ok(analytic)
    }

    /// `max |φ'|` over `grid` equispaced boundary points.
    pub fn derivative_grid_max(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|m| {
                let z = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / grid as f64);
                self.derivative(z).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Canonical representative and conjugator `g` with `g⁻¹∘φ∘g = canonical`:
    /// a rotation about 0 (elliptic), the parabolic normal form fixing −1
    /// (parabolic), or `ψ_μ` fixing ±1 with 1 attracting (hyperbolic).
    pub fn conjugate_to_canonical(&self) -> Result<(Moebius, Moebius)> {
        let class = self.classify()?;
        let g = match class.kind {
            AutoKind::Identity => return Err(Error::IdentityMap),
            AutoKind::Elliptic => Self::translation_to(class.fixed_points[0])?,
            AutoKind::Parabolic => Self::rotation((-class.fixed_points[0]).arg()),
            AutoKind::Hyperbolic => {
                let a = class.fixed_points[0];
                let b = class.fixed_points[1];
                Self::boundary_frame(a, b)?
            }
        };
        Ok((self.conjugate_by(&g), g))
    }

    /// Disc automorphism with `g(1) = a`, `g(−1) = b`, `g(i)` on the
    /// counterclockwise arc from `a` to `b`.
    fn boundary_frame(a: Complex64, b: Complex64) -> Result<Self> {
        let mut arc = (b / a).arg();
        if arc <= 0.0 {
            arc += 2.0 * PI;
        }
        let mid = a * Complex64::from_polar(1.0, arc / 2.0);
        // cross-ratio maps sending (1, −1, i) and (a, b, mid) to (0, ∞, 1)
        let s = Self::cross_ratio_map(ONE, -ONE, I)?;
        let t = Self::cross_ratio_map(a, b, mid)?;
        Ok(t.inverse().compose(&s))
    }

    fn cross_ratio_map(z1: Complex64, z2: Complex64, z3: Complex64) -> Result<Self> {
        // z ↦ (z − z1)(z3 − z2) / ((z − z2)(z3 − z1))
        let k = z3 - z2;
        let l = z3 - z1;
        Self::new(k, -z1 * k, l, -z2 * l)
    }

    /// Taylor coefficients of `f∘self`, computed exactly in coefficient space
    /// by Horner's rule with `·(az+b)` and `/(cz+d)` recurrences. Requires the
    /// pole `−d/c` to lie outside the closed disc.
    pub fn compose_series(&self, f: &Series, order: usize) -> Result<Series> {
        let deg = f.degree();
        let mut acc = Series::constant(f.coeff(deg), order);
        for k in (0..deg).rev() {
            acc = self.mul_by_self(&acc)?;
            let mut coeffs = acc.into_coeffs();
            coeffs[0] += f.coeff(k);
            acc = Series::from_vec(coeffs);
        }
        Ok(acc)
    }

    /// `g·φ` truncated at the order of `g`.
    pub fn mul_by_self(&self, g: &Series) -> Result<Series> {
        g.mul_linear(self.a, self.b).div_linear(self.c, self.d)
    }

    /// Taylor series of the map itself.
    pub fn series(&self, order: usize) -> Result<Series> {
        self.mul_by_self(&Series::one(order))
    }
}

/// Rational approximation `p/q` of `angle/2π` (mod 1) with `q ≤ max_q` and
/// error below `tol`, found from continued-fraction convergents.
pub fn rational_turns(angle: f64, max_q: u64, tol: f64) -> Option<(u64, u64)> {
    let x = (angle / (2.0 * PI)).rem_euclid(1.0);
    if x < tol || 1.0 - x < tol {
        return Some((0, 1));
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as u64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_q {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() < tol {
            return Some((h2 % k2, k2));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac <= 0.0 {
            return None;
        }
        r = frac.recip();
    }
    None
}
