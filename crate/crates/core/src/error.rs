use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical kernels and the analyses built on them.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular to working precision (pivot {pivot:e} at stage {stage})")]
    Singular { stage: usize, pivot: f64 },

    #[error("QR iteration did not converge on active block {lo}..={hi} after {sweeps} sweeps")]
    NoConvergence { lo: usize, hi: usize, sweeps: usize },

    #[error("contour touches spectrum at w = {w}")]
    ContourTouchesSpectrum { w: Complex64 },

    #[error("clusters too close: separation {separation:e} does not exceed 10 * gap ({gap:e})")]
    ClustersTooClose { separation: f64, gap: f64 },

    #[error("cluster index {index} out of range ({count} clusters)")]
    NoSuchCluster { index: usize, count: usize },

    #[error("spectrum has {count} clusters; use the spectral decomposition instead")]
    MultipleClusters { count: usize },

    #[error("values {i} and {j} coincide (distance {distance:e})")]
    CoincidentValues { i: usize, j: usize, distance: f64 },

    #[error("operator is singular: 0 lies in its spectrum")]
    SingularOperator,

    #[error("operator is not decomposable: {0}")]
    NotDecomposable(String),

    #[error("no basis with condition estimate <= {cap} after {attempts} draws")]
    CondCapUnsatisfied { cap: f64, attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
