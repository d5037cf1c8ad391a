pub mod poly;
pub mod qr;
pub mod scalar;

pub use poly::{chebyshev_nodes, Interpolant, ZPoly};
pub use qr::{DenseMatrix, PivotedQr};
pub use scalar::{
    max_abs, set_working_precision, working_epsilon, working_precision, Scalar, DEFAULT_PRECISION,
    MIN_PRECISION,
};
