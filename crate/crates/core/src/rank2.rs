//! A fourth-order operator with a sixth-order partner whose common
//! eigenspaces are two-dimensional.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::num::{Scalar, ZPoly};
use crate::opalg::{CoeffSeq, DiffOp, Window};
use crate::spectral::{rank2_curve_check, Rank2CurveReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2Params {
    pub a2: Scalar,
    pub a1: Scalar,
    pub a0: Scalar,
}

impl Rank2Params {
    pub fn new(a2: Scalar, a1: Scalar, a0: Scalar) -> Self {
        Rank2Params { a2, a1, a0 }
    }

    /// The only parameters with a known sixth-order partner.
    pub fn special() -> Self {
        Rank2Params::new(Scalar::from_i64(2), Scalar::zero(), Scalar::zero())
    }

    /// Coefficients `[c0, c1, c2, c3, 1]` of `L4` at `n`.
    pub fn l4_coeffs(&self, n: i64) -> [Scalar; 5] {
        let (a2, a1, a0) = (&self.a2, &self.a1, &self.a0);
        let n = Scalar::from_i64(n);
        let c3 = a2 * n.square() + a1 * &n + a0;
        let c2 = Scalar::ratio(3, 8)
            * (a1 + a2 * (&n - 1i64))
            * &n
            * (a0 * 2i64 + a1 * (&n - 1i64) + a2 * (n.square() - &n - 2i64));
        let c1 = Scalar::ratio(-1, 16)
            * (a0 + a1 * (&n - 1i64) + a2 * (&n - 2i64) * &n)
            * (a0.square() * 2i64
                - a1.square() * (&n - 2i64) * &n
                - a0 * (a1 + a2 * 2i64 * (&n - 1i64).square() + a1 * 2i64 * &n)
                - a1 * a2 * (n.powi(3) * 2i64 - n.square() * 6i64 - &n + 2i64)
                - a2.square() * &n * (n.powi(3) - n.square() * 4i64 - &n + 10i64));
        let c0 = Scalar::ratio(1, 256)
            * (a1 + a2 * (&n - 3i64))
            * &n
            * (a0 * 2i64 - a2 * 4i64 + (&n - 3i64) * (a1 + a2 * &n))
            * (a0.square() * -4i64
                + a1.square() * (&n - 2i64) * (&n - 1i64)
                + a2.square() * (&n - 2i64) * (&n - 1i64) * ((&n - 3i64) * &n - 6i64)
                + a0 * 2i64 * (a1 * &n + a2 * ((&n - 3i64) * &n + 4i64))
                + a1 * a2 * (&n * (&n * (&n * 2i64 - 9i64) + 5i64) + 6i64));
        [c0, c1, c2, c3, Scalar::one()]
    }

    /// `R(z)` with `w^2 = R(z)` the curve of the pair.
    pub fn curve_factor(&self) -> ZPoly {
        let (a2, a1, a0) = (&self.a2, &self.a1, &self.a0);
        let first = (a0 - a1) * (a0 - a2) * (a0 * (a0 * 2i64 - a1) - (a0 + a1) * a2 * 2i64);
        let second = (a0.square() * -2i64 + a1.square() + a0 * a2 * 4i64 + (a1 - a2 * 2i64) * a2 * 3i64).square();
        let p = ZPoly::linear(first, Scalar::from_i64(32));
        let q = ZPoly::linear(second, Scalar::from_i64(256));
        (&p * &p * &q).scale(&Scalar::ratio(1, 262_144))
    }
}

pub fn build_l4(p: &Rank2Params, window: Window) -> Result<DiffOp> {
    from_rows(window, window.iter().map(|n| p.l4_coeffs(n)).collect())
}

/// Operator whose coefficient of `T^k` at `window.lo() + i` is `rows[i][k]`.
fn from_rows<const K: usize>(window: Window, rows: Vec<[Scalar; K]>) -> Result<DiffOp> {
    let terms = (0..K)
        .map(|k| Ok((k as i64, CoeffSeq::from_values(window.lo(), rows.iter().map(|r| r[k].clone()).collect())?)))
        .collect::<Result<Vec<_>>>()?;
    DiffOp::new(window, terms)
}

/// Coefficients `[c0..c5, 1]` of the partner at `(a2, a1, a0) = (2, 0, 0)`.
pub fn l6_special_coeffs(n: i64) -> [Scalar; 7] {
    let m = Scalar::from_i64(n);
    let nm = |k: i64| &m - k;
    let c0 = Scalar::ratio(1, 64)
        * nm(4)
        * nm(3)
        * nm(2)
        * nm(1)
        * &m
        * (&m + 1i64)
        * (nm(3) * &m - 6i64)
        * (nm(4) * nm(3) * &m * (&m + 1i64) - 6i64);
    let u = nm(2) * &m;
    let c1 = Scalar::ratio(1, 16) * u.square() * (&u * (&u - 5i64) * (&u * 3i64 - 11i64) + 12i64);
    let v = nm(1) * &m;
    let c2 = Scalar::ratio(1, 16) * nm(2) * nm(1) * &m * (&m + 1i64) * (&v * (&v * 15i64 - 38i64) - 36i64);
    let c3 = Scalar::ratio(1, 2) * m.square() * (m.square() - 2i64) * (m.square() * 5i64 + 7i64);
    let s = &m * (&m + 1i64);
    let c4 = Scalar::ratio(1, 4) * (&s * (&s * 15i64 + 32i64) - 6i64);
    let c5 = m.square() * 3i64 + &m * 6i64 + 8i64;
    [c0, c1, c2, c3, c4, c5, Scalar::one()]
}

pub fn build_l6_special(window: Window) -> Result<DiffOp> {
    from_rows(window, window.iter().map(l6_special_coeffs).collect())
}

#[derive(Clone, Debug)]
pub struct Rank2Report {
    pub params: Rank2Params,
    pub curve_factor: ZPoly,
    /// `‖[L4, L6]‖ / (‖L4‖ ‖L6‖)` on the window.
    pub commutator_residual: Scalar,
    pub curve: Rank2CurveReport,
}

impl Rank2Report {
    pub fn to_doc(&self) -> Rank2Doc {
        Rank2Doc {
            params: self.params.clone(),
            curve_factor: self.curve_factor.coeffs().to_vec(),
            commutator_residual: self.commutator_residual.clone(),
            mismatch: self.curve.mismatch.clone(),
            relative_mismatch: self.curve.relative_mismatch.clone(),
            closure_defect: self.curve.closure_defect.clone(),
            nodes: self.curve.samples.iter().map(|(z, _, _)| z.clone()).collect(),
            char_polys: self.curve.samples.iter().map(|(_, p, _)| p.clone()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2Doc {
    pub params: Rank2Params,
    pub curve_factor: Vec<Scalar>,
    pub commutator_residual: Scalar,
    pub mismatch: Scalar,
    pub relative_mismatch: Scalar,
    pub closure_defect: Scalar,
    pub nodes: Vec<Scalar>,
    pub char_polys: Vec<Vec<Scalar>>,
}

/// Builds the special pair on `window` and compares the action's
/// characteristic polynomial with `(w^2 − R(z))^2` at `z_nodes`.
pub fn verify_rank2(window: Window, z_nodes: &[Scalar], n0: i64, tolerance: f64) -> Result<Rank2Report> {
    let params = Rank2Params::special();
    let l4 = build_l4(&params, window)?;
    let l6 = build_l6_special(window)?;
    let r = params.curve_factor();
    let curve = rank2_curve_check(&l4, &l6, &r, z_nodes, n0, tolerance)?;
    Ok(Rank2Report {
        params,
        curve_factor: r,
        commutator_residual: curve.commutator_residual.clone(),
        curve,
    })
}
