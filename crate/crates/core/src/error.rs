use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series must have at least one coefficient")]
    EmptySeries,
    #[error("series coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("extraction radius {0} is outside (0, 1)")]
    InvalidRadius(f64),
    #[error("{samples} samples cannot resolve order {order}: need at least {needed}")]
    TooFewSamples {
        samples: usize,
        order: usize,
        needed: usize,
    },
    #[error("sample count {0} is not a power of two")]
    SamplesNotPowerOfTwo(usize),
    #[error("division by a series with vanishing constant term")]
    ZeroConstantTerm,
    #[error("degenerate Möbius matrix (ad - bc = 0)")]
    DegenerateMoebius,
    #[error("map is not an automorphism of the unit disc")]
    NotAutomorphism,
    #[error("the identity map has no canonical form")]
    IdentityMap,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point {0} is not inside the open unit disc")]
    PointOutsideDisc(Complex64),
    #[error("Blaschke product must vanish at the origin (B(0)=0)")]
    BlaschkeNotZeroAtOrigin,
    #[error("{blocks} blocks of degree {degree} exceed order {order}")]
    TooManyBlocks {
        blocks: usize,
        degree: usize,
        order: usize,
    },
    #[error("symbol is not a self-map of the disc: sup |phi| = {0}")]
    NotSelfMap(f64),
    #[error("operation requires a Möbius self-map")]
    NotMoebius,
    #[error("operator is not invertible: {0}")]
    NotInvertible(String),
    #[error("matrix size {size} exceeds the dense eigensolver cap {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}
