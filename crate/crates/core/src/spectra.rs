//! Predicted spectra of invertible weighted composition operators with
//! automorphic symbol, and the numerical evidence compared against them:
//! eigenvalues of finite sections and Gelfand radius sequences
//! `r_n = ‖P_N Wⁿ P_N‖^{1/n}`.
//!
//! Finite sections of non-normal operators can pollute, so eigenvalue clouds
//! are reported as evidence only.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigenvalues;
use crate::moebius::{rational_turns, AutoKind, Moebius, Multiplier};
use crate::spaces::SpaceWeight;
use crate::wco::{inf_modulus, op_norm, weight_iterate_at, Compression, Wco, INF_TOL};

/// Largest denominator accepted as a rational rotation number.
pub const MAX_PERIOD: u64 = 64;
/// Continued-fraction tolerance for the rational test.
pub const PERIOD_TOL: f64 = 1e-12;
/// Default size cap for dense eigenvalue computations.
pub const EIG_CAP: usize = 2049;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", content = "params", rename_all = "lowercase")]
pub enum Shape {
    Circle { radius: f64 },
    /// `{λ : λᵐ ∈ closure of h₍ₘ₎(D)}`; `image` samples `h₍ₘ₎` on the circle
    /// and on a polar grid of the disc.
    RootSet { m: u64, image: Vec<[f64; 2]> },
    Annulus { inner: f64, outer: f64 },
    PointSet { points: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumModel {
    #[serde(flatten)]
    pub shape: Shape,
    /// Which branch produced the model.
    pub provenance: String,
    /// The model is an outer bound rather than the spectrum itself.
    pub containment_only: bool,
}

impl SpectrumModel {
    /// Radii of the model: `[r]` for a circle, `[inner, outer]` for an annulus.
    pub fn radii(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Circle { radius } => vec![*radius],
            Shape::Annulus { inner, outer } => vec![*inner, *outer],
            _ => Vec::new(),
        }
    }

    /// Distance from `λ` to the model set (for root sets, measured between
    /// `λᵐ` and the sampled image).
    pub fn distance(&self, lambda: Complex64) -> f64 {
        match &self.shape {
            Shape::Circle { radius } => (lambda.norm() - radius).abs(),
            Shape::Annulus { inner, outer } => {
                let r = lambda.norm();
                (inner - r).max(r - outer).max(0.0)
            }
            Shape::PointSet { points } => points
                .iter()
                .map(|p| (lambda - Complex64::new(p[0], p[1])).norm())
                .fold(f64::INFINITY, f64::min),
            Shape::RootSet { m, image } => {
                let lm = lambda.powu(*m as u32);
                image
                    .iter()
                    .map(|p| (lm - Complex64::new(p[0], p[1])).norm())
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn image_samples(w: &Wco, phi: &Moebius, m: u64) -> Vec<[f64; 2]> {
    let boundary = (0..64).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 64.0));
    let disc = std::iter::once(Complex64::new(0.0, 0.0)).chain((1..4).flat_map(|r| {
        (0..16).map(move |k| Complex64::from_polar(r as f64 / 4.0, 2.0 * PI * k as f64 / 16.0))
    }));
    boundary
        .chain(disc)
        .map(|z| pair(weight_iterate_at(&w.u, phi, m, z)))
        .collect()
}

fn require_bounded_below(w: &Wco) -> Result<()> {
    let inf = inf_modulus(&w.u);
    if inf > INF_TOL {
        Ok(())
    } else {
        Err(Error::NotInvertible(format!(
            "h is not bounded away from zero (inf |h| = {inf:.3e})"
        )))
    }
}

/// Spectrum predicted from the dynamics of `φ` and the values of `h` at its
/// fixed points.
pub fn predicted_spectrum(w: &Wco) -> Result<SpectrumModel> {
    let phi = *w.moebius()?;
    if !phi.is_disc_automorphism() {
        return Err(Error::NotAutomorphism);
    }
    let class = phi.classify()?;
    let model = match class.kind {
        AutoKind::Identity => {
            if w.u.degree() == 0 {
                SpectrumModel {
                    shape: Shape::PointSet {
                        points: vec![pair(w.u.coeff(0))],
                    },
                    provenance: "identity map, constant symbol".into(),
                    containment_only: false,
                }
            } else {
                SpectrumModel {
                    shape: Shape::RootSet {
                        m: 1,
                        image: image_samples(w, &phi, 1),
                    },
                    provenance: "identity map: closure of h(D)".into(),
                    containment_only: false,
                }
            }
        }
        AutoKind::Elliptic => {
            let a = class.fixed_points[0];
            let angle = match class.multiplier {
                Multiplier::Rotation { angle } => angle,
                _ => unreachable!("elliptic maps carry a rotation multiplier"),
            };
            match rational_turns(angle, MAX_PERIOD, PERIOD_TOL) {
                Some((p, q)) => SpectrumModel {
                    shape: Shape::RootSet {
                        m: q,
                        image: image_samples(w, &phi, q),
                    },
                    provenance: format!("elliptic, rotation number {p}/{q}"),
                    containment_only: false,
                },
                None => {
                    require_bounded_below(w)?;
                    SpectrumModel {
                        shape: Shape::Circle {
                            radius: w.u.eval(a).norm(),
                        },
                        provenance: format!(
                            "elliptic, irrational rotation number (no p/q with q <= {MAX_PERIOD})"
                        ),
                        containment_only: false,
                    }
                }
            }
        }
        AutoKind::Parabolic => {
            require_bounded_below(w)?;
            let a = class.fixed_points[0];
            SpectrumModel {
                shape: Shape::Circle {
                    radius: w.u.eval(a).norm(),
                },
                provenance: if class.near_parabolic {
                    "parabolic (inside tolerance band)".into()
                } else {
                    "parabolic".into()
                },
                containment_only: false,
            }
        }
        AutoKind::Hyperbolic => {
            require_bounded_below(w)?;
            let mu = match class.multiplier {
                Multiplier::Dilation { mu } => mu,
                _ => unreachable!("hyperbolic maps carry a dilation multiplier"),
            };
            let ha = w.u.eval(class.fixed_points[0]).norm();
            let hb = w.u.eval(class.fixed_points[1]).norm();
            SpectrumModel {
                shape: Shape::Annulus {
                    inner: ha.min(hb) * mu,
                    outer: ha.max(hb) / mu,
                },
                provenance: "hyperbolic".into(),
                containment_only: true,
            }
        }
    };
    Ok(model)
}

/// All eigenvalues of a compression.
pub fn eig_cloud(c: &Compression) -> Result<Vec<Complex64>> {
    eig_cloud_capped(c, EIG_CAP)
}

pub fn eig_cloud_capped(c: &Compression, cap: usize) -> Result<Vec<Complex64>> {
    if c.dim() > cap {
        return Err(Error::SizeCap {
            size: c.dim(),
            cap,
        });
    }
    eigenvalues(&c.matrix)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusSequence {
    /// `(n, r_n)` with strictly increasing `n`.
    pub entries: Vec<(u64, f64)>,
    pub order: usize,
    pub limit_guess: f64,
}

impl RadiusSequence {
    pub fn at(&self, n: u64) -> Option<f64> {
        self.entries.iter().find(|(k, _)| *k == n).map(|(_, r)| *r)
    }
}

/// `r_n = ‖P_N Wⁿ P_N‖^{1/n}` for each `n` (sorted, deduplicated, `n ≥ 1`).
pub fn radius_sequence(w: &Wco, space: SpaceWeight, order: usize, n_list: &[u64]) -> Result<RadiusSequence> {
    w.moebius()?;
    let mut ns: Vec<u64> = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() || ns[0] == 0 {
        return Err(Error::InvalidParameter("radius sequence needs n >= 1".into()));
    }
    let entries = ns
        .par_iter()
        .map(|&n| {
            let c = w.power(n, order)?.compress(space, order);
            Ok((n, op_norm(&c)?.powf(1.0 / n as f64)))
        })
        .collect::<Result<Vec<_>>>()?;
    let limit_guess = entries.last().map(|e| e.1).unwrap_or(0.0);
    Ok(RadiusSequence {
        entries,
        order,
        limit_guess,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GrowthKind {
    Elliptic { theta: f64 },
    Parabolic { y: f64 },
    Hyperbolic { mu: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: u64,
    pub sup: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub kind: GrowthKind,
    pub rows: Vec<GrowthRow>,
    pub min: f64,
    pub max: f64,
    /// `max / min` of the normalized column.
    pub spread: f64,
    /// Least-squares slope of `ln sup` against `ln n` (elliptic, parabolic)
    /// or against `n` (hyperbolic).
    pub fitted_slope: f64,
}

/// `sup_D |φₙ'|` from the closed-form iterates, normalized by `n`
/// (parabolic) or `μ⁻ⁿ` (hyperbolic).
pub fn growth_probe(kind: GrowthKind, n_list: &[u64]) -> Result<GrowthTable> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::InvalidParameter("growth probe needs n >= 1".into()));
    }
    let rows = n_list
        .iter()
        .map(|&n| {
            let (map, norm) = match kind {
                GrowthKind::Elliptic { theta } => (Moebius::rotation(theta * n as f64), 1.0),
                GrowthKind::Parabolic { y } => (Moebius::parabolic_normal_form(y, n)?, n as f64),
                GrowthKind::Hyperbolic { mu } => {
                    (Moebius::hyperbolic_normal_form(mu, n)?, mu.powi(-(n as i32)))
                }
            };
            let sup = map.derivative_sup(0)?;
            Ok(GrowthRow {
                n,
                sup,
                normalized: sup / norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min = rows.iter().map(|r| r.normalized).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.normalized).fold(0.0, f64::max);
    let xs: Vec<f64> = rows
        .iter()
        .map(|r| match kind {
            GrowthKind::Hyperbolic { .. } => r.n as f64,
            _ => (r.n as f64).ln(),
        })
        .collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.sup.ln()).collect();
    Ok(GrowthTable {
        kind,
        min,
        max,
        spread: max / min,
        fitted_slope: slope(&xs, &ys),
        rows,
    })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub const DEFAULT_DELTA: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusEntry {
    pub order: usize,
    /// Fraction of eigenvalues with `inner/(1+δ) ≤ |λ| ≤ outer·(1+δ)`.
    pub containment_fraction: f64,
    pub histogram: Vec<HistogramBin>,
    pub radius_sequence: RadiusSequence,
    pub inverse_radius_sequence: RadiusSequence,
}

/// Exploratory: no pass/fail is attached to any field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusProbe {
    pub inner: f64,
    pub outer: f64,
    pub delta: f64,
    pub entries: Vec<AnnulusEntry>,
    pub exploratory: bool,
}

pub fn annulus_probe(
    w: &Wco,
    space: SpaceWeight,
    orders: &[usize],
    n_list: &[u64],
    delta: f64,
) -> Result<AnnulusProbe> {
    let model = predicted_spectrum(w)?;
    let (inner, outer) = match model.shape {
        Shape::Annulus { inner, outer } => (inner, outer),
        _ => {
            return Err(Error::InvalidParameter(
                "annulus probe needs a hyperbolic automorphism".into(),
            ))
        }
    };
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be >= 0, got {delta}")));
    }
    let lo = inner / (1.0 + delta);
    let hi = outer * (1.0 + delta);
    let entries = orders
        .iter()
        .map(|&order| {
            let inv = w.formal_inverse(order)?;
            let cloud = eig_cloud(&w.compress(space, order))?;
            let inside = cloud
                .iter()
                .filter(|l| (lo..=hi).contains(&l.norm()))
                .count();
            Ok(AnnulusEntry {
                order,
                containment_fraction: inside as f64 / cloud.len().max(1) as f64,
                histogram: histogram(&cloud, hi * 1.25, 24),
                radius_sequence: radius_sequence(w, space, order, n_list)?,
                inverse_radius_sequence: radius_sequence(&inv, space, order, n_list)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnnulusProbe {
        inner,
        outer,
        delta,
        entries,
        exploratory: true,
    })
}

/// Radial histogram of `|λ|` on `[0, top]`; values above `top` land in the
/// last bin.
fn histogram(cloud: &[Complex64], top: f64, bins: usize) -> Vec<HistogramBin> {
    let width = top / bins as f64;
    let mut counts = vec![0usize; bins];
    for l in cloud {
        let b = ((l.norm() / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lo: i as f64 * width,
            hi: (i + 1) as f64 * width,
            count,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    #[serde(rename = "N")]
    pub order: usize,
    pub space: String,
    pub branch: String,
    pub decisions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub predicted: SpectrumModel,
    pub eigenvalues: Vec<[f64; 2]>,
    pub radius_sequence: Vec<(u64, f64)>,
    pub inverse_radius_sequence: Option<Vec<(u64, f64)>>,
    pub distances: Vec<f64>,
    pub metadata: ReportMetadata,
}

impl SpectrumReport {
    /// Eigenvalue cloud as `re,im` lines.
    pub fn eigenvalues_csv(&self) -> String {
        let mut s = String::from("re,im\n");
        for [re, im] in &self.eigenvalues {
            s.push_str(&format!("{re:.17e},{im:.17e}\n"));
        }
        s
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }
}

/// Predicted model, eigenvalue cloud, and radius sequences of `W` and of its
/// formula inverse (when the invertibility conditions hold).
pub fn spectrum_report(w: &Wco, space: SpaceWeight, order: usize, n_list: &[u64]) -> Result<SpectrumReport> {
    let predicted = predicted_spectrum(w)?;
    let mut decisions = vec![format!("branch: {}", predicted.provenance)];
    if predicted.containment_only {
        decisions.push("predicted set is a containment bound".into());
    }
    let compression = w.compress(space, order);
    let cloud = eig_cloud(&compression)?;
    let radius = radius_sequence(w, space, order, n_list)?;
    let inverse = match w.formal_inverse(order) {
        Ok(inv) => Some(radius_sequence(&inv, space, order, n_list)?.entries),
        Err(e) => {
            decisions.push(format!("inverse radius sequence skipped: {e}"));
            None
        }
    };
    let distances = cloud.iter().map(|&l| predicted.distance(l)).collect();
    Ok(SpectrumReport {
        metadata: ReportMetadata {
            order,
            space: space.to_string(),
            branch: predicted.provenance.clone(),
            decisions,
            seed: None,
        },
        predicted,
        eigenvalues: cloud.into_iter().map(pair).collect(),
        radius_sequence: radius.entries,
        inverse_radius_sequence: inverse,
        distances,
    })
}
