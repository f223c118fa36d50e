use crate::layout::Axis;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node count must be at least 1")]
    ZeroNodes,
    #[error("nodes {0} and {1} coincide")]
    DuplicateNodes(usize, usize),
    #[error("point ({0}, {1}, {2}) lies outside the reference cube")]
    OutsideReferenceCube(f64, f64, f64),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(&'static str),
    #[error("index {index} out of range for extent {extent}")]
    IndexOutOfRange { index: usize, extent: usize },
    #[error("column axis {0:?} is not the unit-stride dimension")]
    NonUnitStride(Axis),
    #[error("axes {0:?} and {1:?} are not the two fastest dimensions")]
    NonAdjacentFusion(Axis, Axis),
    #[error("invalid slice request: {0}")]
    InvalidSlice(&'static str),
    #[error("gemm leading dimension of {operand} is {ld}, needs at least {min}")]
    LeadingDimension { operand: char, ld: usize, min: usize },
    #[error("gemm operand {operand} holds {len} values, needs {needed}")]
    OperandTooSmall { operand: char, len: usize, needed: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("scratch arena was built for a different variant or configuration")]
    ArenaMismatch,
    #[error("dense operator of dimension {0} exceeds the 4096 guard")]
    OperatorTooLarge(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("non-finite update in element {0}")]
    Unstable(usize),
}
