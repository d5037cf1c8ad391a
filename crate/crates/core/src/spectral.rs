//! Spectral curves of commuting pairs, computed from the action of one
//! operator on the kernel of the other.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::num::{chebyshev_nodes, DenseMatrix, Scalar, ZPoly};
use crate::opalg::{CoeffSeq, DiffOp, Window};

/// Extra positions used to measure how far `L_act ψ` leaves the kernel.
pub const CLOSURE_GUARD: usize = 4;

/// Solves `(L − z) ψ = 0` forward from `m` initial values at `n0..n0+m−1`.
pub fn kernel_extend(l: &DiffOp, z: &Scalar, n0: i64, init: &[Scalar], length: usize) -> Result<CoeffSeq> {
    let m = l.require_monic_positive()? as usize;
    if init.len() != m {
        return Err(Error::Domain(format!("order {m} needs {m} initial values, got {}", init.len())));
    }
    if length < m {
        return Err(Error::Domain(format!("length {length} is shorter than the order {m}")));
    }
    let last = n0 + (length - m) as i64 - 1;
    if length > m {
        let needed = Window::new(n0, last)?;
        if !l.window().covers(&needed) {
            return Err(crate::opalg::missing_window(needed, l.window()));
        }
    }
    let mut psi = init.to_vec();
    psi.reserve(length - m);
    for n in n0..=last {
        let base = (n - n0) as usize;
        let mut next = z * &psi[base];
        for j in 0..m {
            let u = l.coeff_at(j as i64, n)?;
            if !u.is_zero() {
                next -= u * &psi[base + j];
            }
        }
        psi.push(next.finite()?);
    }
    CoeffSeq::from_values(n0, psi)
}

/// The matrix of `L_act` on `ker(L_base − z)` in the basis with unit data at `n0..n0+m−1`.
#[derive(Clone, Debug)]
pub struct ActionMatrix {
    pub z: Scalar,
    pub base: i64,
    pub entries: DenseMatrix,
    /// Relative distance of `L_act ψ_i` from the kernel at the guard positions.
    pub closure_defect: Scalar,
}

/// A pair checked for commutation, ready to produce action matrices.
#[derive(Clone, Debug)]
pub struct ActionPair<'a> {
    base: &'a DiffOp,
    act: &'a DiffOp,
    base_order: usize,
    act_order: usize,
    /// Relative commutator residual measured at construction.
    pub commutator_residual: Scalar,
}

impl<'a> ActionPair<'a> {
    pub fn new(base: &'a DiffOp, act: &'a DiffOp, tolerance: f64) -> Result<Self> {
        let base_order = base.require_monic_positive()? as usize;
        if !act.is_positive() {
            return Err(Error::NotMonic("acting operator has negative shifts".into()));
        }
        let act_order = act.order().unwrap_or(0).max(0) as usize;
        let comm = base.commutator(act)?;
        let scale = base.sup_norm() * act.sup_norm();
        let residual = comm.residual_norm();
        let relative = if scale.is_zero() { residual.clone() } else { &residual / &scale };
        if relative > tolerance {
            return Err(Error::NotCommuting {
                residual: residual.to_f64(),
                scale: scale.to_f64(),
            });
        }
        Ok(ActionPair {
            base,
            act,
            base_order,
            act_order,
            commutator_residual: relative,
        })
    }

    pub fn base_order(&self) -> usize {
        self.base_order
    }

    pub fn act_order(&self) -> usize {
        self.act_order
    }

    pub fn matrix(&self, z: &Scalar, n0: i64) -> Result<ActionMatrix> {
        let m = self.base_order;
        let span = m + CLOSURE_GUARD;
        let length = span + self.act_order;
        let mut entries = DenseMatrix::zeros(m, m);
        let mut defect = Scalar::zero();
        let target = Window::new(n0, n0 + span as i64 - 1)?;
        for i in 0..m {
            let init: Vec<Scalar> = (0..m).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect();
            let psi = kernel_extend(self.base, z, n0, &init, length)?;
            let image = self.act.apply_on(&psi, target)?;
            let head: Vec<Scalar> = (0..m).map(|j| image.get(n0 + j as i64).cloned()).collect::<Result<_>>()?;
            for (j, v) in head.iter().enumerate() {
                entries.set(j, i, v.clone());
            }
            let back = kernel_extend(self.base, z, n0, &head, span)?;
            let magnitude = image.sup_norm().max(back.sup_norm());
            for n in target.iter() {
                let diff = (image.get(n)? - back.get(n)?).abs();
                let rel = if magnitude.is_zero() { diff } else { diff / &magnitude };
                defect = defect.max(rel);
            }
        }
        Ok(ActionMatrix {
            z: z.clone(),
            base: n0,
            entries,
            closure_defect: defect,
        })
    }
}

/// Commutation is checked first; see [`ActionPair`].
pub fn action_matrix(base: &DiffOp, act: &DiffOp, z: &Scalar, n0: i64, tolerance: f64) -> Result<ActionMatrix> {
    ActionPair::new(base, act, tolerance)?.matrix(z, n0)
}

/// `2g + 6` Chebyshev nodes on `[lo, hi]`: `2g + 2` for the determinant plus four guards.
pub fn default_nodes(g: usize, lo: &Scalar, hi: &Scalar) -> Vec<Scalar> {
    chebyshev_nodes(2 * g + 6, lo, hi)
}

/// Interpolated trace and determinant of the action matrix.
#[derive(Clone, Debug)]
pub struct CurveReport {
    pub genus: usize,
    pub trace_poly: ZPoly,
    pub det_poly: ZPoly,
    /// Largest coefficient disagreement across base points, relative to the coefficient size.
    pub base_independence_residual: Scalar,
    pub closure_defect: Scalar,
    pub interpolation_residual: Scalar,
    pub commutator_residual: Scalar,
    pub base_points: Vec<i64>,
    pub matched_curve: Option<HyperellipticCurve>,
}

impl CurveReport {
    pub fn trace_norm(&self) -> Scalar {
        self.trace_poly.max_coeff()
    }

    pub fn to_doc(&self) -> CurveDoc {
        CurveDoc {
            g: self.genus,
            trace: pad(&self.trace_poly, self.genus + 1),
            det: pad(&self.det_poly, 2 * self.genus + 2),
            curve: self.matched_curve.as_ref().map(|c| c.lower().to_vec()),
            base_points: self.base_points.clone(),
            base_independence_residual: self.base_independence_residual.clone(),
            closure_defect: self.closure_defect.clone(),
            interpolation_residual: self.interpolation_residual.clone(),
            commutator_residual: self.commutator_residual.clone(),
        }
    }
}

fn pad(p: &ZPoly, len: usize) -> Vec<Scalar> {
    (0..len.max(p.coeffs().len())).map(|k| p.coeff(k)).collect()
}

/// Serialized [`CurveReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveDoc {
    pub g: usize,
    pub trace: Vec<Scalar>,
    pub det: Vec<Scalar>,
    pub curve: Option<Vec<Scalar>>,
    pub base_points: Vec<i64>,
    pub base_independence_residual: Scalar,
    pub closure_defect: Scalar,
    pub interpolation_residual: Scalar,
    pub commutator_residual: Scalar,
}

/// Trace and determinant of the `2 × 2` action of `act` on `ker(base − z)`,
/// interpolated in `z` with degree bounds `g` and `2g + 1`.
pub fn extract_curve(base: &DiffOp, act: &DiffOp, z_nodes: &[Scalar], base_points: &[i64], tolerance: f64) -> Result<CurveReport> {
    let pair = ActionPair::new(base, act, tolerance)?;
    if pair.base_order() != 2 {
        return Err(Error::Domain("curve extraction expects a second-order base operator".into()));
    }
    if pair.act_order() % 2 == 0 {
        return Err(Error::Domain("curve extraction expects an odd-order partner".into()));
    }
    let g = (pair.act_order() - 1) / 2;
    if z_nodes.len() < 2 * g + 2 {
        return Err(Error::TooFewSamples {
            needed: 2 * g + 2,
            got: z_nodes.len(),
        });
    }
    if base_points.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: base_points.len(),
        });
    }

    let mut per_base = Vec::with_capacity(base_points.len());
    let mut closure = Scalar::zero();
    let mut interp_residual = Scalar::zero();
    for &n0 in base_points {
        let mats: Vec<ActionMatrix> = z_nodes
            .par_iter()
            .map(|z| pair.matrix(z, n0))
            .collect::<Result<Vec<_>>>()?;
        let mut traces = Vec::with_capacity(mats.len());
        let mut dets = Vec::with_capacity(mats.len());
        for m in &mats {
            closure = closure.clone().max(m.closure_defect.clone());
            let e = &m.entries;
            traces.push((m.z.clone(), e.trace()));
            dets.push((m.z.clone(), e.get(0, 0) * e.get(1, 1) - e.get(0, 1) * e.get(1, 0)));
        }
        let trace_fit = ZPoly::interpolate(&traces, g, tolerance)?;
        let det_fit = ZPoly::interpolate(&dets, 2 * g + 1, tolerance)?;
        // Traces that vanish identically leave nothing to be relative to.
        let trace_scale = det_fit.poly.max_coeff().max(Scalar::one());
        let trace_abs = traces
            .iter()
            .fold(Scalar::zero(), |acc, (_, t)| acc.max(t.abs()));
        let trace_misfit = if trace_fit.consistent { Scalar::zero() } else { trace_fit.residual.clone() * trace_abs / &trace_scale };
        interp_residual = interp_residual.max(det_fit.residual.clone()).max(trace_misfit);
        if !det_fit.consistent {
            return Err(Error::Interpolation {
                residual: det_fit.residual.to_f64(),
            });
        }
        per_base.push((trace_fit.poly, det_fit.poly));
    }
    if interp_residual > tolerance {
        return Err(Error::Interpolation {
            residual: interp_residual.to_f64(),
        });
    }

    let (trace_poly, det_poly) = per_base[0].clone();
    let coeff_scale = det_poly.max_coeff().max(Scalar::one());
    let mut spread = Scalar::zero();
    for (t, d) in &per_base[1..] {
        spread = spread.max((t - &trace_poly).max_coeff()).max((d - &det_poly).max_coeff());
    }
    let base_independence_residual = spread / &coeff_scale;

    let neg_det = -&det_poly;
    let matched_curve = if trace_poly.max_coeff() <= coeff_scale.clone() * tolerance {
        HyperellipticCurve::from_poly(&neg_det, tolerance.sqrt().min(1e-6)).ok()
    } else {
        None
    };
    Ok(CurveReport {
        genus: g,
        trace_poly,
        det_poly,
        base_independence_residual,
        closure_defect: closure,
        interpolation_residual: interp_residual,
        commutator_residual: pair.commutator_residual.clone(),
        base_points: base_points.to_vec(),
        matched_curve,
    })
}

/// Comparison of a 4 × 4 action's characteristic polynomial with `(w^2 − R(z))^2`.
#[derive(Clone, Debug)]
pub struct Rank2CurveReport {
    /// Largest of `|p3|, |p2 + 2R|, |p1|, |p0 − R^2|` over the nodes.
    pub mismatch: Scalar,
    /// The same, divided by `max(1, R^2)` at each node.
    pub relative_mismatch: Scalar,
    pub closure_defect: Scalar,
    pub commutator_residual: Scalar,
    /// `(z, [p0, p1, p2, p3], R(z))` per node.
    pub samples: Vec<(Scalar, Vec<Scalar>, Scalar)>,
}

pub fn rank2_curve_check(l4: &DiffOp, l6: &DiffOp, r: &ZPoly, z_nodes: &[Scalar], n0: i64, tolerance: f64) -> Result<Rank2CurveReport> {
    let pair = ActionPair::new(l4, l6, tolerance)?;
    if pair.base_order() != 4 {
        return Err(Error::Domain("rank-2 check expects a fourth-order base operator".into()));
    }
    let mats: Vec<ActionMatrix> = z_nodes
        .par_iter()
        .map(|z| pair.matrix(z, n0))
        .collect::<Result<Vec<_>>>()?;
    let mut mismatch = Scalar::zero();
    let mut relative = Scalar::zero();
    let mut closure = Scalar::zero();
    let mut samples = Vec::with_capacity(mats.len());
    for m in mats {
        closure = closure.max(m.closure_defect.clone());
        let p = m.entries.char_poly();
        let rz = r.eval(&m.z)?;
        let worst = p[3]
            .abs()
            .max((&p[2] + &rz * 2i64).abs())
            .max(p[1].abs())
            .max((&p[0] - rz.square()).abs());
        relative = relative.max(&worst / rz.square().max(Scalar::one()));
        mismatch = mismatch.max(worst);
        samples.push((m.z, p, rz));
    }
    Ok(Rank2CurveReport {
        mismatch,
        relative_mismatch: relative,
        closure_defect: closure,
        commutator_residual: pair.commutator_residual.clone(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(lo: i64, hi: i64) -> Window {
        Window::new(lo, hi).unwrap()
    }

    #[test]
    fn free_operator_kernel() {
        let t2 = DiffOp::shift(w(-10, 10), 2);
        let z = Scalar::from_i64(3);
        let psi = kernel_extend(&t2, &z, 0, &[Scalar::one(), Scalar::zero()], 8).unwrap();
        for k in 0..4 {
            assert_eq!(*psi.get(2 * k).unwrap(), z.powi(k as i32));
            assert!(psi.get(2 * k + 1).unwrap().is_zero());
        }
        let zero = kernel_extend(&t2, &z, 0, &[Scalar::zero(), Scalar::zero()], 6).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn kernel_extend_reports_window_underflow() {
        let t2 = DiffOp::shift(w(0, 3), 2);
        let err = kernel_extend(&t2, &Scalar::one(), 0, &[Scalar::one(), Scalar::one()], 10).unwrap_err();
        assert!(matches!(err, Error::Window { .. }));
    }

    #[test]
    fn self_action_is_scalar() {
        let window = w(-12, 12);
        let l2 = DiffOp::new(
            window,
            [
                (2, CoeffSeq::constant(window, Scalar::one())),
                (1, CoeffSeq::from_fn(window, |n| Scalar::from_i64(n).cos()).unwrap()),
                (0, CoeffSeq::from_fn(window, |n| Scalar::ratio(n, 7)).unwrap()),
            ],
        )
        .unwrap();
        let z = Scalar::ratio(5, 4);
        let m = action_matrix(&l2, &l2, &z, 0, 1e-12).unwrap();
        assert!((m.entries.get(0, 0) - &z).abs() < 1e-30);
        assert!(m.entries.get(0, 1).abs() < 1e-30);
        assert!(m.closure_defect < 1e-30);
        let id = DiffOp::identity(window);
        let m = action_matrix(&l2, &id, &z, 0, 1e-12).unwrap();
        assert_eq!(m.entries, DenseMatrix::identity(2));
    }

    #[test]
    fn non_commuting_inputs_rejected() {
        let window = w(-8, 8);
        let l2 = DiffOp::new(
            window,
            [
                (2, CoeffSeq::constant(window, Scalar::one())),
                (0, CoeffSeq::from_fn(window, Scalar::from_i64).unwrap()),
            ],
        )
        .unwrap();
        let t = DiffOp::shift(window, 1);
        assert!(matches!(
            action_matrix(&l2, &t, &Scalar::one(), 0, 1e-9),
            Err(Error::NotCommuting { .. })
        ));
    }
}
