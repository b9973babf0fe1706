use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("gram matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("gram matrix has odd diagonal entry at index {index}; lattice is not even")]
    OddDiagonal { index: usize },

    #[error("gram matrix is degenerate (determinant 0)")]
    Degenerate,

    #[error("proposed basis is not of full rank")]
    NotFullRank,

    #[error("proposed basis spans a proper sublattice of index {index}")]
    ProperSublattice { index: BigInt },

    #[error("matrix is not an isometry: entry ({row}, {col}) of MᵀAM is {found}, expected {expected}")]
    NotIsometry {
        row: usize,
        col: usize,
        expected: BigInt,
        found: BigInt,
    },

    #[error("reflection is not integral on basis vector {basis_index}")]
    ReflectionNotIntegral { basis_index: usize },

    #[error("cannot reflect in an isotropic vector")]
    IsotropicReflection,

    #[error("isometries act on different lattices")]
    LatticeMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("quadratic field mismatch: √{left} vs √{right}")]
    FieldMismatch { left: BigInt, right: BigInt },

    #[error("{0} is a perfect square; not a real quadratic field")]
    SquareRadicand(BigInt),

    #[error("chamber reduction exceeded {cap} steps; trajectory pairings with anchor: {trajectory:?}")]
    ReductionCapExceeded { cap: usize, trajectory: Vec<BigInt> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ell = {0} violates the standing hypothesis ell > 5")]
    EllOutOfRange(i64),

    #[error("no isometry with eigenvalue > 1 survives the filters within entry bound {entry_bound}; increase the bound")]
    NoGenerator { entry_bound: u64 },

    #[error("enumeration box {box_size} too small: {reason}")]
    BoxTooSmall { box_size: i64, reason: String },

    #[error("independent routes disagree: {0}")]
    RouteDisagreement(String),

    #[error("duplicate class in orbit: {0}")]
    DuplicateOrbitClass(String),

    #[error("point is not on the curve")]
    OffCurve,

    #[error("curve is singular (4p³ + 27q² = 0)")]
    SingularCurve,

    #[error("curve shape does not admit an automorphism of order {order}: {reason}")]
    ShapeMismatch { order: u32, reason: String },

    #[error("composition does not simplify to the identity; residual numerator {residual}")]
    SimplificationFailed { residual: String },

    #[error("inconsistent group-law convention across samples: {0}")]
    InconsistentConvention(String),

    #[error("parse error: {0}")]
    Parse(String),
}
