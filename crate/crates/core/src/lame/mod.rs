//! The discrete Lamé operator on an `ε`-lattice, its continuum limit, and the
//! genus-one check that its spectral curve does not depend on `ε`.

pub mod discrete;
pub mod independence;
pub mod weierstrass;

pub use discrete::{
    ag_build, continuum_check, continuum_sweep, default_sweep_steps, lame_l2, lame_l2_monic, select_a2_interpretation, A2Interpretation, A2Selection,
    ContinuumSweep, LameDiscretization, TestFunction,
};
pub use independence::{
    elliptic_orbit, fit_elliptic_parameters, lame_curve_independence, perturbation_control, EllipticFit, LameCurveReport, NewtonOptions, PerturbationReport,
    StepCurve, DEFAULT_SPAN,
};
pub use weierstrass::{Invariants, WeierstrassContext, LATTICE_MARGIN};
