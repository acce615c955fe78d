use thiserror::Error;

use crate::algebra::Field;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("algebra mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a point of the hyperbolic space (form value {0})")]
    NotTimelike(f64),
    #[error("not a boundary point (form value {0})")]
    NotNull(f64),
    #[error("representative is not in the associative locus")]
    NonAssociative,
    #[error("tangent vector is not unit or not orthogonal to its base (defect {0})")]
    BadTangent(f64),
    #[error("boundary points must be pairwise distinct")]
    RepeatedBoundaryPoint,
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("pairing is not real (imaginary norm {0})")]
    NonRealPairing(f64),
    #[error("parameter {0} exceeds the evaluation range")]
    ParameterRange(f64),
    #[error("hypotheses not satisfied: {0}")]
    Hypotheses(&'static str),
    #[error("geodesics do not intersect")]
    NotIntersecting,
    #[error("unsupported for this space: {0}")]
    Unsupported(&'static str),
    #[error("tree degree must be at least 3, got {0}")]
    BadDegree(usize),
    #[error("malformed tree word: {0}")]
    BadWord(String),
    #[error("internal error: {0}")]
    Internal(&'static str),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
