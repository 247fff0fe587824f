use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum UhlError {
    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("matrix is singular (|det| = {0:.3e})")]
    Singular(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("invalid qubit subset mask {mask:#b} for N = {n}")]
    BadSubset { mask: u64, n: usize },
    #[error("N = {0} out of supported range")]
    NOutOfRange(usize),
    #[error("vector length {got} does not match 2N+1 = {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("coordinates outside chart domain: {0}")]
    ChartDomain(String),
    #[error("state on or too close to the ball boundary (|u| = {0})")]
    BoundaryState(f64),
    #[error("direction is not tangent to the sphere (n·dn = {0:.3e})")]
    NotTangent(f64),
    #[error("geodesic endpoints coincide")]
    CollinearDegenerate,
    #[error("degenerate triangle: vertices {0} and {1} coincide")]
    DegenerateTriangle(usize, usize),
    #[error("loop is not closed")]
    OpenLoop,
    #[error("unitary is not of rotation form (residual {0:.3e})")]
    NotRotationForm(f64),
    #[error("loop does not start at the anchor point")]
    LoopAnchorMismatch,
    #[error("gamma index out of range: {0}")]
    IndexRange(usize),
    #[error("unsupported qubit pair ({0},{1})")]
    UnsupportedPair(usize, usize),
    #[error("not a density matrix: {0}")]
    NotState(String),
}

pub type Result<T> = std::result::Result<T, UhlError>;
