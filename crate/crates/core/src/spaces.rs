//! Coefficient models of the Dirichlet, Hardy and Bergman spaces.
//!
//! All three are weighted ℓ² spaces of Taylor coefficients,
//! `‖f‖² = Σ w(k)|a_k|²` with `w(k) = (k+1)^s` and `s = 1, 0, −1`. The Dirichlet
//! weight is equivalent (not equal) to the integral norm
//! `|f(0)|² + ∫|f'|² dA`, which is kept here only as an oracle.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{top_singular_value, PowerConfig, PowerResult, ScaledToeplitz};
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceWeight {
    Dirichlet,
    Hardy,
    Bergman,
}

impl SpaceWeight {
    pub const ALL: [SpaceWeight; 3] = [Self::Dirichlet, Self::Hardy, Self::Bergman];

    pub fn exponent(self) -> i32 {
        match self {
            Self::Dirichlet => 1,
            Self::Hardy => 0,
            Self::Bergman => -1,
        }
    }

    pub fn weight(self, k: usize) -> f64 {
        ((k + 1) as f64).powi(self.exponent())
    }

    pub fn sqrt_weights(self, order: usize) -> Vec<f64> {
        (0..=order).map(|k| self.weight(k).sqrt()).collect()
    }
}

impl fmt::Display for SpaceWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dirichlet => "dirichlet",
            Self::Hardy => "hardy",
            Self::Bergman => "bergman",
        })
    }
}

impl FromStr for SpaceWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(Self::Dirichlet),
            "hardy" | "h2" => Ok(Self::Hardy),
            "bergman" | "a2" => Ok(Self::Bergman),
            other => Err(Error::InvalidParameter(format!("unknown space '{other}'"))),
        }
    }
}

/// `sqrt(Σ w(k)|a_k|²)`.
pub fn seq_norm(f: &Series, w: SpaceWeight) -> f64 {
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(k, a)| w.weight(k) * a.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `Σ w(k) a_k conj(b_k)`.
pub fn inner(f: &Series, g: &Series, w: SpaceWeight) -> Complex64 {
    f.coeffs()
        .iter()
        .zip(g.coeffs())
        .enumerate()
        .map(|(k, (a, b))| a * b.conj() * w.weight(k))
        .sum()
}

/// Unweighted pairing `Σ a_k conj(b_k)`, the duality between the Dirichlet
/// and Bergman coefficient spaces.
pub fn dual_pair(f: &Series, g: &Series) -> Complex64 {
    f.coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| a * b.conj())
        .sum()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `sqrt(|a₀|² + (1/π)∫_D |f'|² dA)` by Gauss–Legendre in the radius and the
/// trapezoid rule in the angle.
pub fn dirichlet_norm_integral(
    f: &Series,
    radial_steps: usize,
    angular_steps: usize,
) -> Result<f64> {
    if radial_steps < 64 || angular_steps < 64 {
        return Err(Error::InvalidParameter(
            "quadrature grids need at least 64 nodes per direction".into(),
        ));
    }
    let df = f.derivative();
    let (nodes, weights) = gauss_legendre(radial_steps);
    let mut total = 0.0;
    for (x, wr) in nodes.iter().zip(&weights) {
        let r = 0.5 * (x + 1.0);
        let ring: f64 = (0..angular_steps)
            .map(|m| {
                let z = Complex64::from_polar(r, 2.0 * PI * m as f64 / angular_steps as f64);
                df.eval(z).norm_sqr()
            })
            .sum::<f64>()
            * (2.0 * PI / angular_steps as f64);
        total += 0.5 * wr * ring * r;
    }
    Ok((f.coeff(0).norm_sqr() + total / PI).sqrt())
}

/// Reproducing kernel of the Dirichlet coefficient space at `w`:
/// `K_w = Σ conj(w)^k/(k+1) z^k`, so that `inner(f, K_w, Dirichlet) = f(w)`.
pub fn dirichlet_kernel(w: Complex64, order: usize) -> Result<Series> {
    if w.norm() >= 1.0 || !w.is_finite() {
        return Err(Error::PointOutsideDisc(w));
    }
    let wc = w.conj();
    let mut p = Complex64::new(1.0, 0.0);
    let coeffs = (0..=order)
        .map(|k| {
            let c = p / (k + 1) as f64;
            p *= wc;
            c
        })
        .collect();
    Series::new(coeffs)
}

/// Finite section `P_N T_u P_N` in the basis `z^k/√w(k)`.
pub fn multiplier_section(u: &Series, w: SpaceWeight, order: usize) -> ScaledToeplitz {
    let rows = w.sqrt_weights(order);
    let cols = rows.iter().map(|s| s.recip()).collect();
    ScaledToeplitz::new(u.truncate(order).coeffs(), rows, cols)
}

/// Norm of `P_N T_u P_N`: a lower bound for the multiplier norm of `u`,
/// nondecreasing in `N`.
pub fn multiplier_norm(u: &Series, w: SpaceWeight, order: usize) -> f64 {
    multiplier_norm_with(u, w, order, PowerConfig::default()).value
}

pub fn multiplier_norm_with(
    u: &Series,
    w: SpaceWeight,
    order: usize,
    cfg: PowerConfig,
) -> PowerResult {
    top_singular_value(&multiplier_section(u, w, order), cfg)
}

/// Norm of `f ↦ h'·f` from the Dirichlet coefficient space (order `N`) to the
/// Bergman coefficient space (order `N`): a lower bound for the Carleson
/// constant of `|h'|² dA`.
pub fn carleson_norm_surrogate(h: &Series, order: usize) -> f64 {
    let dh = h.derivative().truncate(order);
    let rows: Vec<f64> = SpaceWeight::Bergman.sqrt_weights(order);
    let cols: Vec<f64> = SpaceWeight::Dirichlet
        .sqrt_weights(order)
        .iter()
        .map(|s| s.recip())
        .collect();
    let op = ScaledToeplitz::new(dh.coeffs(), rows, cols);
    top_singular_value(&op, PowerConfig::default()).value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn norms_of_z() {
        let z = Series::monomial(1, 1);
        assert!((seq_norm(&z, SpaceWeight::Dirichlet) - 2f64.sqrt()).abs() < 1e-15);
        assert!((seq_norm(&z, SpaceWeight::Hardy) - 1.0).abs() < 1e-15);
        assert!((seq_norm(&z, SpaceWeight::Bergman) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn integral_norm_closed_forms() {
        let z = Series::monomial(1, 1);
        assert!((dirichlet_norm_integral(&z, 64, 64).unwrap() - 1.0).abs() < 1e-12);
        let k = Series::constant(c(3.0, -4.0), 0);
        assert!((dirichlet_norm_integral(&k, 64, 64).unwrap() - 5.0).abs() < 1e-12);
        let z2 = Series::monomial(2, 2);
        assert!((dirichlet_norm_integral(&z2, 64, 64).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(dirichlet_norm_integral(&z2, 8, 64).is_err());
    }

    #[test]
    fn pairing_examples() {
        let z = Series::monomial(1, 3);
        assert_eq!(dual_pair(&z, &z), c(1.0, 0.0));
        let z2 = Series::monomial(2, 3);
        assert_eq!(dual_pair(&z, &z2), c(0.0, 0.0));
    }

    #[test]
    fn kernel_reproduces() {
        let k0 = dirichlet_kernel(c(0.0, 0.0), 5).unwrap();
        assert_eq!(k0, Series::one(5));
        let f = Series::monomial(2, 10);
        let k = dirichlet_kernel(c(0.5, 0.0), 10).unwrap();
        assert!((inner(&f, &k, SpaceWeight::Dirichlet) - c(0.25, 0.0)).norm() < 1e-15);
        assert!(dirichlet_kernel(c(1.0, 0.0), 4).is_err());
    }

    #[test]
    fn kernel_norm_against_logarithm() {
        let w = 0.7f64;
        let n = 400;
        let k = dirichlet_kernel(c(w, 0.0), n).unwrap();
        let got = seq_norm(&k, SpaceWeight::Dirichlet).powi(2);
        let exact = -(1.0 - w * w).ln() / (w * w);
        let r = w * w;
        let tail = r.powi(n as i32 + 1) / ((n + 2) as f64 * (1.0 - r));
        assert!((exact - got).abs() <= tail + 1e-14, "{got} vs {exact}");
    }

    #[test]
    fn multiplier_norm_examples() {
        let k = Series::constant(c(0.0, 3.0), 0);
        assert!((multiplier_norm(&k, SpaceWeight::Dirichlet, 40) - 3.0).abs() < 1e-9);
        let z = Series::monomial(1, 1);
        assert!((multiplier_norm(&z, SpaceWeight::Dirichlet, 50) - 2f64.sqrt()).abs() < 1e-8);
        assert!((multiplier_norm(&z, SpaceWeight::Hardy, 50) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn carleson_surrogate_examples() {
        assert_eq!(carleson_norm_surrogate(&Series::constant(c(2.0, 0.0), 0), 16), 0.0);
        let z = Series::monomial(1, 1);
        assert!((carleson_norm_surrogate(&z, 32) - 1.0).abs() < 1e-9);
        let z2 = Series::monomial(2, 2);
        assert!((carleson_norm_surrogate(&z2, 32) - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn space_names_round_trip() {
        for w in SpaceWeight::ALL {
            assert_eq!(w.to_string().parse::<SpaceWeight>().unwrap(), w);
        }
        assert!("sobolev".parse::<SpaceWeight>().is_err());
    }
}
