//! Difference operators `Σ_j u_j(n) T^j` with tabulated coefficients.

mod op;
mod seq;

pub use op::{CoeffFn, DiffOp, OperatorDoc};
pub use seq::{CoeffSeq, Window};

/// Window-underflow error for the part of `wanted` outside `have`.
pub fn missing_window(wanted: Window, have: Window) -> crate::error::Error {
    seq::missing(wanted, have)
}
