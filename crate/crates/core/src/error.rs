use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-finite value produced")]
    NonFinite,

    #[error("window underflow: indices {missing_lo}..={missing_hi} requested, {available_lo}..={available_hi} available")]
    Window {
        missing_lo: i64,
        missing_hi: i64,
        available_lo: i64,
        available_hi: i64,
    },

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("degenerate denominator in {context} at n = {n} (|value| = {magnitude:e})")]
    Degenerate {
        context: &'static str,
        n: i64,
        magnitude: f64,
    },

    #[error("duplicate interpolation node at z = {0}")]
    DuplicateNode(f64),

    #[error("too few samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("inconsistent initial data: division residual {residual:e} at n = {n}")]
    Inconsistent { n: i64, residual: f64 },

    #[error("rank deficiency: null space dimension {found}, expected {expected}")]
    RankDeficient { expected: usize, found: usize },

    #[error("no solution: residual {residual:e} exceeds tolerance")]
    NoSolution { residual: f64 },

    #[error("pole of chi_{n} at z = {z}")]
    Pole { n: i64, z: f64 },

    #[error("branch error: F({at}) = {value} is negative")]
    Branch { at: f64, value: f64 },

    #[error("operators do not commute: residual {residual:e} (scale {scale:e})")]
    NotCommuting { residual: f64, scale: f64 },

    #[error("interpolation inconsistent: residual {residual:e}")]
    Interpolation { residual: f64 },

    #[error("argument {x} lies within {distance:e} of a lattice point")]
    Lattice { x: f64, distance: f64 },

    #[error("Newton iteration did not converge after {iterations} steps; residual trace {trace:?}")]
    NoConvergence { iterations: usize, trace: Vec<f64> },

    #[error("operator is not monic positive: {0}")]
    NotMonic(String),
}
