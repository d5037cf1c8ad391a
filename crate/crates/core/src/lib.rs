//! Positive one-point commuting difference operators.
//!
//! The crate builds second-order operators `L2 = (T + U_n)^2 + W_n`, the
//! dressing data `(S_n, Q_n)` that produce their commuting partners of odd
//! order, and independent checks of the resulting spectral curves
//! `w^2 = F(z)`. A discrete Lamé operator and one rank-2 pair are included.

pub mod curve;
pub mod dressing;
pub mod error;
pub mod families;
pub mod lame;
pub mod num;
pub mod opalg;
pub mod pipeline;
pub mod rank2;
pub mod spectral;

pub use curve::HyperellipticCurve;
pub use error::{Error, Result};
pub use num::{Scalar, ZPoly};
pub use opalg::{CoeffSeq, DiffOp, Window};
