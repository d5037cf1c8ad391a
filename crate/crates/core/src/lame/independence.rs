//! Genus one: the monic discrete Lamé operator is matched with the
//! elliptic family, whose curve is then compared across steps.

use serde::{Deserialize, Serialize};

use super::discrete::{lame_l2_monic, LameDiscretization};
use super::WeierstrassContext;
use crate::error::{Error, Result};
use crate::families::{elliptic_family, second_order, EllipticFamily};
use crate::num::{chebyshev_nodes, working_epsilon, DenseMatrix, PivotedQr, Scalar};
use crate::opalg::{CoeffSeq, DiffOp, Window};
use crate::spectral::{extract_curve, CurveDoc};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Number of lattice equations `U_n + U_{n+1} = s_n`, `n = 0..equations`.
    pub equations: usize,
    pub max_iterations: usize,
    /// Largest admissible final residual.
    pub tolerance: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            equations: 8,
            max_iterations: 60,
            tolerance: 1e-8,
        }
    }
}

/// Curve `w^2 = z^3 + c2 z^2 + c1 z + c0` and starting point `γ0`, in units
/// where the operator is monic, together with the fit diagnostics.
///
/// `theta` holds `(c2/ε^2, c1/ε^4, c0/ε^6, γ0/ε^2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticFit {
    pub eps: Scalar,
    pub theta: [Scalar; 4],
    pub sigma0: i8,
    pub sigma_r: i8,
    pub residual: Scalar,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

impl EllipticFit {
    fn monic(&self) -> [Scalar; 4] {
        let e2 = self.eps.square();
        [
            &self.theta[0] * &e2,
            &self.theta[1] * e2.square(),
            &self.theta[2] * e2.powi(3),
            &self.theta[3] * &e2,
        ]
    }

    pub fn c2(&self) -> Scalar {
        self.monic()[0].clone()
    }

    pub fn c1(&self) -> Scalar {
        self.monic()[1].clone()
    }

    pub fn c0(&self) -> Scalar {
        self.monic()[2].clone()
    }
}

struct Orbit {
    k: Scalar,
    c: [Scalar; 3],
    y_r: Scalar,
}

impl Orbit {
    fn new(monic: &[Scalar; 4], k: &Scalar, sigma_r: i8) -> Option<(Orbit, Scalar)> {
        let [c2, c1, c0, _] = monic;
        let f = |x: &Scalar| x.powi(3) + c2 * x.square() + c1 * x + c0;
        let fk = f(k);
        if fk.is_sign_negative() {
            return None;
        }
        let y_r = if sigma_r < 0 { -fk.sqrt() } else { fk.sqrt() };
        let f0 = f(&monic[3]);
        if f0.is_sign_negative() {
            return None;
        }
        Some((
            Orbit {
                k: k.clone(),
                c: [c0.clone(), c1.clone(), c2.clone()],
                y_r,
            },
            f0.sqrt(),
        ))
    }

    /// `P + (K, ±y_R)` by the chord rule, and the chord slope.
    fn step(&self, p: &(Scalar, Scalar), forward: bool) -> Option<((Scalar, Scalar), Scalar)> {
        let y_r = if forward { self.y_r.clone() } else { -self.y_r.clone() };
        let dx = &self.k - &p.0;
        if dx.is_zero() {
            return None;
        }
        let lambda = (&y_r - &p.1) / dx;
        let x3 = lambda.square() - &self.c[2] - &p.0 - &self.k;
        let y3 = -(&p.1 + &lambda * (&x3 - &p.0));
        Some(((x3, y3), lambda))
    }
}

fn residuals(theta: &[Scalar; 4], eps: &Scalar, k: &Scalar, s: &[Scalar], sigma0: i8, sigma_r: i8) -> Option<Vec<Scalar>> {
    let fit = EllipticFit {
        eps: eps.clone(),
        theta: theta.clone(),
        sigma0,
        sigma_r,
        residual: Scalar::zero(),
        iterations: 0,
        trace: Vec::new(),
    };
    let (orbit, y0) = Orbit::new(&fit.monic(), k, sigma_r)?;
    let mut p = (fit.monic()[3].clone(), if sigma0 < 0 { -y0 } else { y0 });
    let mut u = Vec::with_capacity(s.len() + 1);
    for _ in 0..=s.len() {
        let (next, lambda) = orbit.step(&p, true)?;
        u.push(-lambda);
        p = next;
    }
    let r: Vec<Scalar> = s.iter().enumerate().map(|(n, sn)| &u[n] + &u[n + 1] - sn).collect();
    r.iter().all(Scalar::is_finite).then_some(r)
}

fn max_norm(r: &[Scalar]) -> Scalar {
    r.iter().fold(Scalar::zero(), |acc, v| acc.max(v.abs()))
}

fn newton(start: [Scalar; 4], eps: &Scalar, k: &Scalar, s: &[Scalar], sigma0: i8, sigma_r: i8, opts: &NewtonOptions) -> Option<EllipticFit> {
    let mut theta = start;
    let mut r = residuals(&theta, eps, k, s, sigma0, sigma_r)?;
    let mut norm = max_norm(&r);
    let mut trace = vec![norm.to_f64()];
    let h0 = working_epsilon().sqrt();
    let floor = working_epsilon() * 1e3;
    let mut iterations = 0;
    while iterations < opts.max_iterations && norm > floor {
        iterations += 1;
        let mut jac = DenseMatrix::zeros(r.len(), 4);
        for j in 0..4 {
            let h = &h0 * theta[j].abs().max(Scalar::one());
            let mut probe = theta.clone();
            probe[j] += &h;
            let rp = residuals(&probe, eps, k, s, sigma0, sigma_r)?;
            for i in 0..r.len() {
                jac.set(i, j, (&rp[i] - &r[i]) / &h);
            }
        }
        let rhs: Vec<Scalar> = r.iter().map(|v| -v.clone()).collect();
        let step = PivotedQr::new(jac).solve(&rhs, 0.0).ok()?;
        let mut damping = Scalar::one();
        let mut accepted = None;
        while damping > 1e-6 {
            let trial: [Scalar; 4] = std::array::from_fn(|j| &theta[j] + &damping * &step[j]);
            if let Some(rt) = residuals(&trial, eps, k, s, sigma0, sigma_r) {
                let nt = max_norm(&rt);
                if nt < norm {
                    accepted = Some((trial, rt, nt));
                    break;
                }
            }
            damping /= 2i64;
        }
        let Some((t, rt, nt)) = accepted else { break };
        theta = t;
        r = rt;
        norm = nt;
        trace.push(norm.to_f64());
    }
    Some(EllipticFit {
        eps: eps.clone(),
        theta,
        sigma0,
        sigma_r,
        residual: norm,
        iterations,
        trace,
    })
}

/// Recovers the elliptic-family parameters of `ε^2 L2` at genus one by a
/// damped Newton iteration with a finite-difference Jacobian, trying each
/// branch-sign pair from the start `c = 0`, `γ0 = ε^2 ℘(x0)`.
pub fn fit_elliptic_parameters(ctx: &WeierstrassContext, disc: &LameDiscretization, opts: &NewtonOptions) -> Result<EllipticFit> {
    fit_with_shift(ctx, disc, opts, &Scalar::zero())
}

fn fit_with_shift(ctx: &WeierstrassContext, disc: &LameDiscretization, opts: &NewtonOptions, shift: &Scalar) -> Result<EllipticFit> {
    if disc.g != 1 {
        return Err(Error::Domain("parameter recovery is implemented for genus one only".into()));
    }
    if opts.equations < 6 {
        return Err(Error::TooFewSamples {
            needed: 6,
            got: opts.equations,
        });
    }
    let eps = &disc.eps;
    let k = ctx.wp(eps)? * eps.square();
    let s = (0..opts.equations as i64)
        .map(|n| Ok((disc.ag(ctx, &disc.x_at(n))? + shift) * eps))
        .collect::<Result<Vec<_>>>()?;
    let start = [Scalar::zero(), Scalar::zero(), Scalar::zero(), ctx.wp(&disc.x0)?];
    let mut best: Option<EllipticFit> = None;
    for (sigma0, sigma_r) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let Some(fit) = newton(start.clone(), eps, &k, &s, sigma0, sigma_r, opts) else { continue };
        if fit.residual <= opts.tolerance {
            return Ok(fit);
        }
        if best.as_ref().is_none_or(|b| fit.residual < b.residual) {
            best = Some(fit);
        }
    }
    Err(Error::NoConvergence {
        iterations: best.as_ref().map_or(0, |b| b.iterations),
        trace: best.map(|b| b.trace).unwrap_or_default(),
    })
}

/// `γ_n` and the signed roots `y_n` along the orbit `P_{n+1} = P_n + R`.
pub fn elliptic_orbit(ctx: &WeierstrassContext, fit: &EllipticFit, window: Window) -> Result<(CoeffSeq, Vec<i8>)> {
    let k = ctx.wp(&fit.eps)? * fit.eps.square();
    let monic = fit.monic();
    let (orbit, y0) = Orbit::new(&monic, &k, fit.sigma_r).ok_or(Error::Branch {
        at: monic[3].to_f64(),
        value: -1.0,
    })?;
    let origin = (monic[3].clone(), if fit.sigma0 < 0 { -y0 } else { y0 });
    let degenerate = |n: i64| Error::Degenerate {
        context: "orbit point coincides with K",
        n,
        magnitude: 0.0,
    };
    let mut points = std::collections::BTreeMap::new();
    points.insert(0i64, origin.clone());
    let mut p = origin.clone();
    for n in 1..=window.hi().max(0) {
        p = orbit.step(&p, true).ok_or_else(|| degenerate(n))?.0;
        points.insert(n, p.clone());
    }
    p = origin;
    for n in (window.lo().min(0)..0).rev() {
        p = orbit.step(&p, false).ok_or_else(|| degenerate(n))?.0;
        points.insert(n, p.clone());
    }
    let gamma = CoeffSeq::try_from_fn(window, |n| Ok(points[&n].0.clone()))?;
    let signs = window.iter().map(|n| points[&n].1.signum_i8()).collect();
    Ok((gamma, signs))
}

/// One step of the independence check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCurve {
    pub eps: Scalar,
    pub fit: EllipticFit,
    /// `sup |ε^2 L2 − ((T + U)^2 + W)|` on the window.
    pub operator_mismatch: Scalar,
    pub commutator_residual: Scalar,
    pub curve: CurveDoc,
    /// Lower coefficients `(c0/ε^6, c1/ε^4, c2/ε^2)` of the extracted curve.
    pub normalized_curve: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LameCurveReport {
    pub g2: Scalar,
    pub g3: Scalar,
    pub x0: Scalar,
    pub steps: Vec<StepCurve>,
    /// Largest difference of normalized coefficients between steps.
    pub deviation: Scalar,
}

/// Span `[0, span]` of the lattice window used per step.
pub const DEFAULT_SPAN: i64 = 16;

/// Genus-one pair `(ε^2 L2, L3)` for one step, with `L3` from the fitted elliptic family.
pub struct MonicPair {
    pub l2: DiffOp,
    pub family: EllipticFamily,
    pub fit: EllipticFit,
}

pub fn monic_pair(ctx: &WeierstrassContext, disc: &LameDiscretization, span: i64, opts: &NewtonOptions) -> Result<MonicPair> {
    let fit = fit_elliptic_parameters(ctx, disc, opts)?;
    let (gamma, signs) = elliptic_orbit(ctx, &fit, Window::new(0, span + 1)?)?;
    let family = elliptic_family(&fit.c2(), &fit.c1(), &fit.c0(), &gamma, |n| signs[n as usize])?;
    let l2 = lame_l2_monic(disc, ctx, Window::new(0, span - 1)?)?;
    Ok(MonicPair { l2, family, fit })
}

pub fn lame_curve_independence(ctx: &WeierstrassContext, eps_list: &[Scalar], x0: &Scalar, span: i64, opts: &NewtonOptions, tolerance: f64) -> Result<LameCurveReport> {
    if eps_list.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let nodes = chebyshev_nodes(8, &Scalar::from_i64(-4), &Scalar::from_i64(4));
    let mut steps = Vec::with_capacity(eps_list.len());
    for eps in eps_list {
        let disc = LameDiscretization::new(1, eps.clone(), x0.clone())?;
        let pair = monic_pair(ctx, &disc, span, opts)?;
        let rebuilt = second_order(&pair.family.u, &pair.family.w)?;
        let common = rebuilt.window().intersect(&pair.l2.window())?;
        let operator_mismatch = pair.l2.restrict(common)?.sub(&rebuilt.restrict(common)?)?.sup_norm();
        let l3 = &pair.family.l3;
        let comm = pair.l2.commutator(l3)?;
        let commutator_residual = comm.residual_norm() / (pair.l2.sup_norm() * l3.sup_norm());
        let report = extract_curve(&pair.l2, l3, &nodes, &[1, 2, 3], tolerance)?;
        let curve = report.matched_curve.as_ref().ok_or(Error::Interpolation {
            residual: report.trace_norm().to_f64(),
        })?;
        let e2 = eps.square();
        let normalized_curve = curve
            .lower()
            .iter()
            .enumerate()
            .map(|(j, c)| c / e2.powi(3 - j as i32))
            .collect();
        steps.push(StepCurve {
            eps: eps.clone(),
            fit: pair.fit,
            operator_mismatch,
            commutator_residual,
            curve: report.to_doc(),
            normalized_curve,
        });
    }
    let mut deviation = Scalar::zero();
    for s in &steps[1..] {
        for (a, b) in s.normalized_curve.iter().zip(&steps[0].normalized_curve) {
            deviation = deviation.max((a - b).abs());
        }
    }
    Ok(LameCurveReport {
        g2: ctx.g2().clone(),
        g3: ctx.g3().clone(),
        x0: x0.clone(),
        steps,
        deviation,
    })
}

/// Relative commutator of `ε^2 L2` with `A1` shifted by `delta` against the
/// unshifted fit's `L3`, and the residual of refitting the shifted operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub delta: Scalar,
    pub commutator_residual: Scalar,
    pub refit_residual: Option<Scalar>,
}

pub fn perturbation_control(ctx: &WeierstrassContext, disc: &LameDiscretization, delta: &Scalar, span: i64, opts: &NewtonOptions) -> Result<PerturbationReport> {
    let pair = monic_pair(ctx, disc, span, opts)?;
    let shifted = pair
        .l2
        .add(&DiffOp::monomial(pair.l2.window(), 1, delta * &disc.eps))?;
    let l3 = &pair.family.l3;
    let comm = shifted.commutator(l3)?;
    let commutator_residual = comm.residual_norm() / (shifted.sup_norm() * l3.sup_norm());
    let refit_residual = match fit_with_shift(ctx, disc, opts, delta) {
        Ok(fit) => Some(fit.residual),
        Err(Error::NoConvergence { trace, .. }) => trace.last().map(|&v| Scalar::from_f64(v)),
        Err(e) => return Err(e),
    };
    Ok(PerturbationReport {
        delta: delta.clone(),
        commutator_residual,
        refit_residual,
    })
}
