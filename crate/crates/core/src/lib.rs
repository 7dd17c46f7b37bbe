//! Numerical toolkit for weighted composition operators `f ↦ u·(f∘φ)` acting on
//! the Dirichlet, Hardy and Bergman spaces of the unit disc.
//!
//! Every function lives as a truncated Taylor coefficient vector ([`Series`]).
//! Disc automorphisms are 2×2 matrices ([`Moebius`]) composed by matrix product,
//! and operators are studied through their finite sections in a weight-orthonormal
//! monomial basis ([`Compression`]).
//!
//! Module map:
//! - [`series`]: truncated power-series arithmetic and Cauchy-integral extraction.
//! - [`moebius`]: Möbius algebra, classification of automorphisms, normal forms.
//! - [`spaces`]: coefficient norms, dual pairing, kernels, multiplier norms.
//! - [`blaschke`]: finite Blaschke products, model spaces, block decompositions.
//! - [`wco`]: weighted composition operators, powers, compressions, inverses.
//! - [`spectra`]: predicted spectra, eigenvalue clouds, Gelfand radius sequences.

pub mod blaschke;
pub mod error;
pub mod linalg;
pub mod moebius;
pub mod series;
pub mod spaces;
pub mod spectra;
pub mod wco;

pub use blaschke::{BlaschkeProduct, Decomposition, ModelBasis};
pub use error::{Error, Result};
pub use moebius::{AutoClass, AutoKind, Moebius, Multiplier};
pub use num_complex::Complex64;
pub use series::Series;
pub use spaces::SpaceWeight;
pub use spectra::{RadiusSequence, SpectrumModel, SpectrumReport};
pub use wco::{Compression, SelfMap, Wco};
