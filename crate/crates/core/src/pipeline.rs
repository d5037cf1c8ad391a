//! End-to-end checks for one family: dressing data, the constructed
//! partner, and the residuals that certify them.

use serde::{Deserialize, Serialize};

use crate::dressing::{linear_residual, DressingState, Residual};
use crate::error::Result;
use crate::families::{Family, FamilySpec};
use crate::num::{Scalar, ZPoly};
use crate::opalg::{CoeffSeq, DiffOp, Window};
use crate::spectral::{extract_curve, CurveReport};

/// A family with its dressing data and partner on a verification window.
#[derive(Clone, Debug)]
pub struct Verification {
    pub window: Window,
    pub family: Family,
    pub l2: DiffOp,
    pub state: DressingState,
    pub partner: DiffOp,
}

impl Verification {
    pub fn run(spec: &FamilySpec, window: Window, tolerance: f64) -> Result<Self> {
        let family = Family::build(spec, window)?;
        let l2 = family.l2()?;
        let state = family.dressing(tolerance)?;
        // [L2, L] on the window needs L up to 2g + 1 positions past its right end
        let reach = 2 * spec.g as i64 + 3;
        let partner = state.build_partner_op(&l2, window.grow(2, reach)?)?;
        Ok(Verification {
            window,
            family,
            l2,
            state,
            partner,
        })
    }

    /// `‖[L2, L_{2g+1}]‖ / (‖L2‖ ‖L_{2g+1}‖)` on the window.
    pub fn commutator_residual(&self) -> Result<Scalar> {
        let l2 = self.l2.restrict(self.partner.window().intersect(&self.l2.window())?)?;
        let comm = l2.commutator(&self.partner)?.restrict(self.window)?;
        Ok(comm.residual_norm() / (l2.sup_norm() * self.partner.sup_norm()))
    }

    /// Worst relative master-identity residual on the window.
    pub fn master_residual(&self) -> Result<Scalar> {
        let window = self.state.master_window()?.intersect(&self.window)?;
        let all = window.iter().map(|n| self.state.verify_master(n)).collect::<Result<Vec<_>>>()?;
        Ok(Residual::worst(all).relative())
    }

    /// Worst relative four-term residual on the window.
    pub fn linear_residual(&self) -> Result<Scalar> {
        let window = self.state.linear_window()?.intersect(&self.window)?;
        let all = window
            .iter()
            .map(|n| self.state.residual_linear_norm(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Residual::worst(all).relative())
    }

    pub fn curve(&self, z_nodes: &[Scalar], base_points: &[i64], tolerance: f64) -> Result<CurveReport> {
        let l2 = self.l2.restrict(self.partner.window().intersect(&self.l2.window())?)?;
        extract_curve(&l2, &self.partner, z_nodes, base_points, tolerance)
    }

    pub fn report(&self, tolerance: f64) -> Result<VerifyReport> {
        let commutator_residual = self.commutator_residual()?;
        let master_residual = self.master_residual()?;
        let linear_residual = self.linear_residual()?;
        let passed = commutator_residual <= tolerance && master_residual <= tolerance && linear_residual <= tolerance;
        Ok(VerifyReport {
            family: self.family.spec.clone(),
            window: self.window,
            tolerance,
            partner_order: self.partner.order().unwrap_or(0),
            curve: self.state.curve().lower().to_vec(),
            w_sign: self.family.w_sign,
            conjectural: self.family.conjectural,
            commutator_residual,
            master_residual,
            linear_residual,
            leading_law_residual: self.state.leading_law_residual()?,
            passed,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub family: FamilySpec,
    pub window: Window,
    pub tolerance: f64,
    pub partner_order: i64,
    /// Lower coefficients of the curve found by the dressing.
    pub curve: Vec<Scalar>,
    pub w_sign: Option<i8>,
    pub conjectural: bool,
    pub commutator_residual: Scalar,
    pub master_residual: Scalar,
    pub linear_residual: Scalar,
    pub leading_law_residual: Scalar,
    pub passed: bool,
}

/// Worst relative size of `R_n + R_{−n−1}` for `n` in `window`, where `R` is
/// the four-term residual of the given `S`.
pub fn skew_residual(u: &CoeffSeq, w: &CoeffSeq, s: impl Fn(i64) -> ZPoly, window: Window) -> Result<Scalar> {
    let r = |n: i64| -> Result<(ZPoly, Scalar)> {
        let polys = [s(n - 1), s(n), s(n + 1), s(n + 2)];
        let us = [u.get(n - 1)?, u.get(n)?, u.get(n + 1)?, u.get(n + 2)?];
        let ws = [w.get(n)?, w.get(n + 1)?];
        let refs = [&polys[0], &polys[1], &polys[2], &polys[3]];
        let res = linear_residual(refs, us, ws);
        Ok((crate::dressing::linear_residual_poly(refs, us, ws), res.scale))
    };
    let mut worst = Scalar::zero();
    for n in window.iter() {
        let (a, sa) = r(n)?;
        let (b, sb) = r(-n - 1)?;
        let scale = sa.max(sb);
        let sum = (&a + &b).max_coeff();
        worst = worst.max(if scale.is_zero() { sum } else { sum / scale });
    }
    Ok(worst)
}
