use posdiff::families::FamilySpec;
use posdiff::lame::{
    continuum_sweep, default_sweep_steps, lame_curve_independence, NewtonOptions, TestFunction, WeierstrassContext,
};
use posdiff::num::chebyshev_nodes;
use posdiff::pipeline::Verification;
use posdiff::rank2::verify_rank2;
use posdiff::spectral::default_nodes;
use posdiff::Scalar;
use serde::Serialize;
use serde_json::json;

use crate::config::{LameConfig, RunConfig};
use crate::failure::Failure;

/// Largest cross-step deviation of the normalized Lamé curve.
pub const LAME_DEVIATION_TOL: f64 = 1e-4;
/// Smallest accepted continuum-limit slope.
pub const MIN_SLOPE: f64 = 0.8;
/// Largest accepted mismatch between the rank-2 characteristic polynomial and `(w^2 − R)^2`.
pub const RANK2_CURVE_TOL: f64 = 1e-7;

pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub result: serde_json::Value,
    /// Extra files written next to the report: `(suffix, contents)`.
    pub attachments: Vec<(String, String)>,
}

fn value(x: impl Serialize) -> Result<serde_json::Value, Failure> {
    Ok(serde_json::to_value(x)?)
}

fn e(x: &Scalar) -> String {
    format!("{:.3e}", x.to_f64())
}

fn family(cfg: &RunConfig) -> Result<&FamilySpec, Failure> {
    cfg.family
        .as_ref()
        .ok_or_else(|| Failure::Usage("no family given (use --family or a config file)".into()))
}

fn label(spec: &FamilySpec) -> String {
    format!("{:?} g={}", spec.kind, spec.g).to_lowercase()
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = family(cfg)?;
    let v = Verification::run(spec, cfg.window()?, cfg.tolerance)?;
    let report = v.report(cfg.tolerance)?;
    let summary = format!(
        "{}: commutator {}, master {}, four-term {}",
        label(spec),
        e(&report.commutator_residual),
        e(&report.master_residual),
        e(&report.linear_residual)
    );
    Ok(Outcome {
        passed: report.passed,
        summary,
        result: value(&report)?,
        attachments: Vec::new(),
    })
}

pub fn curve(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = family(cfg)?;
    let v = Verification::run(spec, cfg.window()?, cfg.tolerance)?;
    let (lo, hi) = cfg.z_bounds();
    let nodes = default_nodes(spec.g, &lo, &hi);
    let report = v.curve(&nodes, &cfg.base_points, cfg.tolerance)?;
    let dressing = v.state.curve();
    let scale = dressing.lower().iter().fold(Scalar::one(), |m, c| m.max(c.abs()));
    let distance = report
        .matched_curve
        .as_ref()
        .and_then(|c| c.distance(dressing))
        .map(|d| d / &scale);
    let passed = distance.as_ref().is_some_and(|d| *d <= cfg.tolerance) && report.base_independence_residual <= cfg.tolerance;
    let summary = match &distance {
        Some(d) => format!(
            "{}: lower coefficients {:?}, relative distance to dressing curve {}, base independence {}",
            label(spec),
            report.matched_curve.iter().flat_map(|c| c.lower().iter().map(Scalar::to_f64)).collect::<Vec<_>>(),
            e(d),
            e(&report.base_independence_residual)
        ),
        None => format!("{}: trace does not vanish (norm {})", label(spec), e(&report.trace_norm())),
    };
    Ok(Outcome {
        passed,
        summary,
        result: json!({
            "curve": value(report.to_doc())?,
            "dressing_curve": value(dressing.lower())?,
            "relative_distance": value(distance)?,
        }),
        attachments: Vec::new(),
    })
}

pub fn partner(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = family(cfg)?;
    let window = cfg.window()?;
    let v = Verification::run(spec, window, cfg.tolerance)?;
    let commutator = v.commutator_residual()?;
    let op = v.partner.restrict(window)?;
    let doc = op.to_doc();
    let passed = commutator <= cfg.tolerance;
    let summary = format!("{}: L{} built, commutator {}", label(spec), doc.order, e(&commutator));
    Ok(Outcome {
        passed,
        summary,
        result: json!({
            "family": value(spec)?,
            "order": doc.order,
            "commutator_residual": value(&commutator)?,
        }),
        attachments: vec![("operator.json".into(), serde_json::to_string_pretty(&doc)? + "\n")],
    })
}

fn lame_steps(lame: &LameConfig) -> Vec<Scalar> {
    match &lame.eps {
        Some(list) => list.clone(),
        None if lame.g == 1 => vec![Scalar::ratio(1, 10), Scalar::ratio(1, 20)],
        None => default_sweep_steps(),
    }
}

pub fn lame(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let lame = cfg.lame.clone().unwrap_or_default();
    let ctx = WeierstrassContext::new(&lame.g2, &lame.g3)?;
    let steps = lame_steps(&lame);
    if steps.len() < 2 {
        return Err(Failure::Usage(format!("need at least two lattice steps, got {}", steps.len())));
    }
    let sweep = continuum_sweep(&ctx, lame.g, lame.a2_interpretation, &lame.x0, &steps, TestFunction::COSINE)?;
    let slope = sweep.slope;
    let mut passed = slope.is_some_and(|s| s >= MIN_SLOPE);
    let mut summary = match slope {
        Some(s) => format!("g={}: continuum slope {s:.3}", lame.g),
        None => format!("g={}: no continuum slope", lame.g),
    };
    let independence = if lame.g == 1 {
        let opts = NewtonOptions::default();
        let report = lame_curve_independence(&ctx, &steps, &lame.x0, lame.span, &opts, cfg.tolerance)?;
        let newton = report.steps.iter().map(|s| s.fit.residual.clone()).fold(Scalar::zero(), Scalar::max);
        passed &= report.deviation <= LAME_DEVIATION_TOL && newton <= opts.tolerance;
        summary.push_str(&format!(", curve deviation {}, Newton residual {}", e(&report.deviation), e(&newton)));
        Some(report)
    } else {
        None
    };
    Ok(Outcome {
        passed,
        summary,
        result: json!({
            "lame": value(&lame)?,
            "eps": value(&steps)?,
            "continuum": value(&sweep)?,
            "independence": value(&independence)?,
        }),
        attachments: Vec::new(),
    })
}

pub fn rank2(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (lo, hi) = cfg.z_bounds();
    let mut nodes = chebyshev_nodes(8, &lo, &hi);
    nodes.push(Scalar::zero());
    let report = verify_rank2(cfg.window()?, &nodes, 0, cfg.tolerance)?;
    let passed = report.commutator_residual <= cfg.tolerance && report.curve.mismatch <= RANK2_CURVE_TOL;
    let summary = format!(
        "(2,0,0): commutator {}, char poly vs (w^2 - R)^2 {}",
        e(&report.commutator_residual),
        e(&report.curve.mismatch)
    );
    Ok(Outcome {
        passed,
        summary,
        result: value(report.to_doc())?,
        attachments: Vec::new(),
    })
}
