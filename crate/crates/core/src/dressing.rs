//! Dressing data `(S_n, Q_n)` for `L2 = (T + U_n)^2 + W_n` and the odd-order
//! partner they determine.
//!
//! The common eigenfunction satisfies `ψ(n+1)/ψ(n) = χ_n = (S_n + w)/Q_n` on
//! the curve `w^2 = F(z)`, and the polynomials obey
//! `F = S_n^2 + (z − U_n^2 − W_n) Q_n Q_{n+1}` together with
//! `Q_n = −(S_{n−1} + S_n)/(U_{n−1} + U_n)`.

use serde::{Deserialize, Serialize};

use crate::curve::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::num::{DenseMatrix, PivotedQr, Scalar, ZPoly};
use crate::opalg::{CoeffSeq, DiffOp, Window};

/// Relative size below which a denominator counts as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// An absolute residual together with the magnitude of the terms it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub value: Scalar,
    pub scale: Scalar,
}

impl Residual {
    pub fn relative(&self) -> Scalar {
        if self.scale.is_zero() {
            self.value.clone()
        } else {
            &self.value / &self.scale
        }
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.value <= self.scale.clone().max(Scalar::from_f64(f64::MIN_POSITIVE)) * tolerance
    }

    /// Elementwise worst case over several residuals.
    pub fn worst(items: impl IntoIterator<Item = Residual>) -> Residual {
        let mut out = Residual {
            value: Scalar::zero(),
            scale: Scalar::zero(),
        };
        let mut worst_rel = Scalar::from_i64(-1);
        for r in items {
            let rel = r.relative();
            if rel > worst_rel {
                worst_rel = rel;
                out = r;
            }
        }
        out
    }
}

/// A sequence of polynomials indexed by `n` over a window.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySeq {
    window: Window,
    polys: Vec<ZPoly>,
}

impl PolySeq {
    pub fn new(lo: i64, polys: Vec<ZPoly>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::EmptyWindow("polynomial sequence with no entries".into()));
        }
        let window = Window::new(lo, lo + polys.len() as i64 - 1)?;
        Ok(PolySeq { window, polys })
    }

    pub fn try_from_fn(window: Window, f: impl Fn(i64) -> Result<ZPoly>) -> Result<Self> {
        let polys = window.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(PolySeq { window, polys })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, n: i64) -> Result<&ZPoly> {
        if !self.window.contains(n) {
            return Err(Error::Window {
                missing_lo: n,
                missing_hi: n,
                available_lo: self.window.lo(),
                available_hi: self.window.hi(),
            });
        }
        Ok(&self.polys[(n - self.window.lo()) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &ZPoly)> {
        self.window.iter().zip(&self.polys)
    }

    /// Sequence of the `z^k` coefficients.
    pub fn coeff_seq(&self, k: usize) -> CoeffSeq {
        CoeffSeq::from_values(self.window.lo(), self.polys.iter().map(|p| p.coeff(k)).collect())
            .expect("non-empty window")
    }
}

/// A point `(z, w)` with `w^2 = F(z)`; `branch` is the sign of `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePointSample {
    pub z: Scalar,
    pub w: Scalar,
    pub branch: i8,
}

impl CurvePointSample {
    pub fn on_curve(curve: &HyperellipticCurve, z: Scalar, branch: i8) -> Result<Self> {
        let f = curve.eval(&z)?;
        if f.is_sign_negative() {
            return Err(Error::Branch {
                at: z.to_f64(),
                value: f.to_f64(),
            });
        }
        let sign = if branch < 0 { -1 } else { 1 };
        Ok(CurvePointSample {
            w: f.sqrt() * sign as i64,
            z,
            branch: sign,
        })
    }

    pub fn conjugate(&self) -> Self {
        CurvePointSample {
            z: self.z.clone(),
            w: -&self.w,
            branch: -self.branch,
        }
    }
}

/// `(U, W, F, S, Q)` tied together.
#[derive(Clone, Debug, PartialEq)]
pub struct DressingState {
    u: CoeffSeq,
    w: CoeffSeq,
    curve: HyperellipticCurve,
    s: PolySeq,
    q: PolySeq,
}

fn degenerate(context: &'static str, n: i64, value: &Scalar) -> Error {
    Error::Degenerate {
        context,
        n,
        magnitude: value.abs().to_f64(),
    }
}

/// `Q = −(S_prev + S_cur)/(U_prev + U_cur)`.
pub fn q_from_s(s_prev: &ZPoly, s_cur: &ZPoly, u_prev: &Scalar, u_cur: &Scalar, n: i64) -> Result<ZPoly> {
    let denom = u_prev + u_cur;
    let scale = u_prev.abs().max(u_cur.abs());
    if denom.is_zero() || denom.abs() <= scale * DEGENERACY_THRESHOLD {
        return Err(degenerate("U_{n-1} + U_n", n, &denom));
    }
    let factor = -denom.recip();
    Ok((s_prev + s_cur).scale(&factor))
}

fn z_minus(c: &Scalar) -> ZPoly {
    ZPoly::linear(-c, Scalar::one())
}

/// The four-term linear residual at `n`, built from `S_{n−1..n+2}`,
/// `U_{n−1..n+2}` and `W_n, W_{n+1}`. Zero for valid dressing data; skew
/// under `n → −n−1` for even data.
pub fn linear_residual(s: [&ZPoly; 4], u: [&Scalar; 4], w: [&Scalar; 2]) -> Residual {
    let [sm, s0, s1, s2] = s;
    let [um, u0, u1, u2] = u;
    let [w0, w1] = w;
    let left = u1 + u2;
    let right = um + u0;
    let t1 = sm * &z_minus(&(u0.square() + w0));
    let t2 = s0 * &z_minus(&(w0 - u0 * u1 - um * (u0 + u1)));
    let t3 = s1 * &z_minus(&(w1 - u0 * u1 - (u0 + u1) * u2));
    let t4 = s2 * &z_minus(&(u1.square() + w1));
    let a = (&t1 + &t2).scale(&left);
    let b = (&t3 + &t4).scale(&right);
    let poly = &a - &b;
    let scale = [t1.scale(&left), t2.scale(&left), t3.scale(&right), t4.scale(&right)]
        .iter()
        .fold(Scalar::zero(), |acc, t| acc.max(t.max_coeff()));
    Residual {
        value: poly.max_coeff(),
        scale,
    }
}

/// Polynomial form of [`linear_residual`].
pub fn linear_residual_poly(s: [&ZPoly; 4], u: [&Scalar; 4], w: [&Scalar; 2]) -> ZPoly {
    let [sm, s0, s1, s2] = s;
    let [um, u0, u1, u2] = u;
    let [w0, w1] = w;
    let a = (sm * &z_minus(&(u0.square() + w0)) + s0 * &z_minus(&(w0 - u0 * u1 - um * (u0 + u1)))).scale(&(u1 + u2));
    let b = (s1 * &z_minus(&(w1 - u0 * u1 - (u0 + u1) * u2)) + s2 * &z_minus(&(u1.square() + w1))).scale(&(um + u0));
    &a - &b
}

impl DressingState {
    /// Checks `deg S_n ≤ g` and `deg Q_n = g`. Windows must be consistent
    /// (`Q` known wherever `S` is, except possibly at the left end); the
    /// leading-coefficient law is measured by [`Self::leading_law_residual`].
    pub fn new(u: CoeffSeq, w: CoeffSeq, curve: HyperellipticCurve, s: PolySeq, q: PolySeq) -> Result<Self> {
        let g = curve.genus();
        for (n, p) in s.iter() {
            if p.degree().is_some_and(|d| d > g) {
                return Err(Error::Domain(format!("S_{n} has degree above {g}")));
            }
        }
        for (n, p) in q.iter() {
            if p.degree() != Some(g) {
                return Err(Error::Domain(format!("Q_{n} has degree {:?}, expected {g}", p.degree())));
            }
        }
        Ok(DressingState { u, w, curve, s, q })
    }

    /// `max |[z^g] S_n + U_n| / max(‖S_n‖, |U_n|, 1)` over the indices where both are known.
    pub fn leading_law_residual(&self) -> Result<Scalar> {
        let g = self.genus();
        let window = self.s.window().intersect(&self.u.window())?;
        let mut worst = Scalar::zero();
        for n in window.iter() {
            let (s, u) = (self.s.get(n)?, self.u.get(n)?);
            let scale = s.max_coeff().max(u.abs()).max(Scalar::one());
            worst = worst.max((s.coeff(g) + u).abs() / scale);
        }
        Ok(worst)
    }

    /// Builds `Q` from `S` by the quotient rule; `Q` is known on `S`'s window minus its first index.
    pub fn from_s(u: CoeffSeq, w: CoeffSeq, curve: HyperellipticCurve, s: PolySeq) -> Result<Self> {
        let sw = s.window();
        let qw = Window::new(sw.lo() + 1, sw.hi())?;
        let q = PolySeq::try_from_fn(qw, |n| q_from_s(s.get(n - 1)?, s.get(n)?, u.get(n - 1)?, u.get(n)?, n))?;
        Self::new(u, w, curve, s, q)
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    pub fn u(&self) -> &CoeffSeq {
        &self.u
    }

    pub fn w(&self) -> &CoeffSeq {
        &self.w
    }

    pub fn curve(&self) -> &HyperellipticCurve {
        &self.curve
    }

    pub fn s(&self) -> &PolySeq {
        &self.s
    }

    pub fn q(&self) -> &PolySeq {
        &self.q
    }

    /// `F − S_n^2 − (z − U_n^2 − W_n) Q_n Q_{n+1}`.
    pub fn master_poly(&self, n: i64) -> Result<(ZPoly, Scalar)> {
        let f = self.curve.poly();
        let sn = self.s.get(n)?;
        let un = self.u.get(n)?;
        let s2 = sn * sn;
        let qq = z_minus(&(un.square() + self.w.get(n)?)) * (self.q.get(n)? * self.q.get(n + 1)?);
        let scale = f.max_coeff().max(s2.max_coeff()).max(qq.max_coeff());
        Ok((&(&f - &s2) - &qq, scale))
    }

    /// Largest coefficient of the master identity residual at `n`.
    pub fn verify_master(&self, n: i64) -> Result<Residual> {
        let (poly, scale) = self.master_poly(n)?;
        Ok(Residual {
            value: poly.max_coeff(),
            scale,
        })
    }

    fn linear_inputs(&self, n: i64) -> Result<([&ZPoly; 4], [&Scalar; 4], [&Scalar; 2])> {
        Ok((
            [self.s.get(n - 1)?, self.s.get(n)?, self.s.get(n + 1)?, self.s.get(n + 2)?],
            [self.u.get(n - 1)?, self.u.get(n)?, self.u.get(n + 1)?, self.u.get(n + 2)?],
            [self.w.get(n)?, self.w.get(n + 1)?],
        ))
    }

    /// The four-term residual polynomial at `n`.
    pub fn residual_linear(&self, n: i64) -> Result<ZPoly> {
        let (s, u, w) = self.linear_inputs(n)?;
        Ok(linear_residual_poly(s, u, w))
    }

    /// Size of the four-term residual relative to its terms.
    pub fn residual_linear_norm(&self, n: i64) -> Result<Residual> {
        let (s, u, w) = self.linear_inputs(n)?;
        Ok(linear_residual(s, u, w))
    }

    /// Indices where `verify_master` can be evaluated.
    pub fn master_window(&self) -> Result<Window> {
        let qw = self.q.window();
        Window::new(qw.lo().max(self.s.window().lo()), qw.hi() - 1)?.intersect(&self.u.window())
    }

    /// Indices where `residual_linear` can be evaluated.
    pub fn linear_window(&self) -> Result<Window> {
        let sw = self.s.window();
        let uw = self.u.window();
        Window::new(sw.lo().max(uw.lo()) + 1, (sw.hi().min(uw.hi()) - 2).min(self.w.window().hi() - 1))
    }

    pub fn chi_eval(&self, n: i64, p: &CurvePointSample) -> Result<Scalar> {
        let q = self.q.get(n)?;
        let qz = q.eval(&p.z)?;
        let magnitude = q
            .coeffs()
            .iter()
            .enumerate()
            .fold(Scalar::zero(), |acc, (k, c)| acc.max(c.abs() * p.z.abs().powi(k as i32)));
        if qz.is_zero() || qz.abs() <= magnitude * DEGENERACY_THRESHOLD {
            return Err(Error::Pole { n, z: p.z.to_f64() });
        }
        ((self.s.get(n)?.eval(&p.z)? + &p.w) / qz).finite()
    }

    /// `−z + U_n^2 + W_n + χ_n (U_n + U_{n+1} + χ_{n+1})`.
    pub fn chi_riccati_residual(&self, n: i64, p: &CurvePointSample) -> Result<Residual> {
        let chi0 = self.chi_eval(n, p)?;
        let chi1 = self.chi_eval(n + 1, p)?;
        let un = self.u.get(n)?;
        let un1 = self.u.get(n + 1)?;
        let base = un.square() + self.w.get(n)? - &p.z;
        let prod = &chi0 * (un + un1 + &chi1);
        let scale = base.abs().max(prod.abs()).max(p.z.abs());
        Ok(Residual {
            value: (base + prod).abs(),
            scale,
        })
    }

    /// `χ_n(z, w) χ_n(z, −w) Q_n^2 + (z − U_n^2 − W_n) Q_{n+1} Q_n` at `p.z`.
    pub fn branch_product_residual(&self, n: i64, p: &CurvePointSample) -> Result<Residual> {
        let a = self.chi_eval(n, p)?;
        let b = self.chi_eval(n, &p.conjugate())?;
        let qn = self.q.get(n)?.eval(&p.z)?;
        let qn1 = self.q.get(n + 1)?.eval(&p.z)?;
        let lhs = a * b * qn.square();
        let rhs = (&p.z - self.u.get(n)?.square() - self.w.get(n)?) * qn1 * qn;
        let scale = lhs.abs().max(rhs.abs());
        Ok(Residual {
            value: (lhs + rhs).abs(),
            scale,
        })
    }

    /// `ψ(n)` as a product of `χ_k`, normalized by `ψ(0) = 1`.
    pub fn baker_akhiezer(&self, p: &CurvePointSample, n: i64) -> Result<Scalar> {
        let mut psi = Scalar::one();
        if n >= 0 {
            for k in 0..n {
                psi *= self.chi_eval(k, p)?;
            }
        } else {
            for k in n..0 {
                let chi = self.chi_eval(k, p)?;
                if chi.is_zero() || chi.abs() <= Scalar::from_f64(DEGENERACY_THRESHOLD) * psi.abs().min(Scalar::one()) {
                    return Err(degenerate("chi_k on the product path", k, &chi));
                }
                psi /= chi;
            }
        }
        psi.finite()
    }

    /// `ψ` on a whole window, accumulated in one pass.
    pub fn ba_sequence(&self, p: &CurvePointSample, window: Window) -> Result<CoeffSeq> {
        let mut values = Vec::with_capacity(window.len());
        let mut psi = self.baker_akhiezer(p, window.lo())?;
        for n in window.iter() {
            values.push(psi.clone());
            if n < window.hi() {
                psi *= self.chi_eval(n, p)?;
            }
        }
        CoeffSeq::from_values(window.lo(), values)
    }

    /// `Σ_k q_{n,k} T L2^k − Σ_k s_{n,k} L2^k`, restricted to `target`.
    pub fn build_partner_op(&self, l2: &DiffOp, target: Window) -> Result<DiffOp> {
        let g = self.genus();
        let shift = DiffOp::shift(l2.window(), 1);
        let mut acc: Option<DiffOp> = None;
        let mut power = DiffOp::identity(l2.window());
        for k in 0..=g {
            if k > 0 {
                power = power.mul(l2)?;
            }
            let q_part = shift.mul(&power)?.scale_left(&self.q.coeff_seq(k))?;
            let s_part = power.scale_left(&self.s.coeff_seq(k))?;
            let term = q_part.sub(&s_part)?;
            acc = Some(match acc {
                Some(a) => a.add(&term)?,
                None => term,
            });
        }
        let op = acc.expect("genus is at least one");
        if !op.window().covers(&target) {
            return Err(crate::opalg::missing_window(target, op.window()));
        }
        op.restrict(target)
    }

    /// Sup difference of `(L2 − z) f` and `(T + U_n + U_{n+1} + χ_{n+1})(T − χ_n) f`.
    pub fn factorization_check(&self, l2: &DiffOp, p: &CurvePointSample, f: &CoeffSeq) -> Result<Residual> {
        let qw = self.q.window();
        let chi_window = qw.intersect(&self.s.window())?.intersect(&Window::new(qw.lo(), self.u.window().hi() - 1)?)?;
        let chi = CoeffSeq::try_from_fn(chi_window, |n| self.chi_eval(n, p))?;
        let right = DiffOp::new(chi_window, [(1, CoeffSeq::constant(chi_window, Scalar::one())), (0, chi.map(|c| -c))])?;
        let left_window = Window::new(chi_window.lo(), chi_window.hi() - 1)?;
        let left0 = CoeffSeq::try_from_fn(left_window, |n| {
            Ok(self.u.get(n)? + self.u.get(n + 1)? + chi.get(n + 1)?)
        })?;
        let left = DiffOp::new(left_window, [(1, CoeffSeq::constant(left_window, Scalar::one())), (0, left0)])?;
        let product = left.mul(&right)?;
        let lhs = l2.minus_constant(&p.z)?.apply(f)?;
        let rhs = product.apply(f)?;
        let window = lhs.window().intersect(&rhs.window())?;
        let mut value = Scalar::zero();
        let mut scale = Scalar::zero();
        for n in window.iter() {
            let a = lhs.get(n)?;
            let b = rhs.get(n)?;
            value = value.max((a - b).abs());
            scale = scale.max(a.abs()).max(b.abs());
        }
        let fscale = f.sup_norm() * l2.sup_norm().max(p.z.abs());
        Ok(Residual {
            value,
            scale: scale.max(fscale),
        })
    }

    pub fn to_doc(&self) -> DressingDoc {
        DressingDoc {
            g: self.genus(),
            curve: self.curve.lower().to_vec(),
            s_window: self.s.window(),
            q_window: self.q.window(),
            uw_window: self.u.window().intersect(&self.w.window()).unwrap_or(self.u.window()),
            s: self.s.polys.iter().map(|p| p.coeffs().to_vec()).collect(),
            q: self.q.polys.iter().map(|p| p.coeffs().to_vec()).collect(),
            u: self.u.values().to_vec(),
            w: self.w.values().to_vec(),
        }
    }
}

/// Serialized dressing state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DressingDoc {
    pub g: usize,
    pub curve: Vec<Scalar>,
    pub s_window: Window,
    pub q_window: Window,
    pub uw_window: Window,
    #[serde(rename = "S")]
    pub s: Vec<Vec<Scalar>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<Scalar>>,
    #[serde(rename = "U")]
    pub u: Vec<Scalar>,
    #[serde(rename = "W")]
    pub w: Vec<Scalar>,
}

/// Per-step division residuals of [`solve_partner_recursive`].
#[derive(Clone, Debug)]
pub struct RecursionLog {
    pub steps: Vec<(i64, Residual)>,
}

impl RecursionLog {
    pub fn worst(&self) -> Residual {
        Residual::worst(self.steps.iter().map(|(_, r)| r.clone()))
    }
}

fn divide_step(
    f: &ZPoly,
    sn: &ZPoly,
    factor: &ZPoly,
    known_q: &ZPoly,
    n: i64,
    tolerance: f64,
) -> Result<(ZPoly, Residual)> {
    let num = f - &(sn * sn);
    let den = factor * known_q;
    let (quot, rem) = num.div_exact(&den)?;
    let residual = Residual {
        value: rem,
        scale: num.max_coeff().max(f.max_coeff()),
    };
    if !residual.within(tolerance) {
        return Err(Error::Inconsistent {
            n,
            residual: residual.relative().to_f64(),
        });
    }
    Ok((quot, residual))
}

/// Runs the master identity as a recursion from `(S_{n0−1}, S_{n0})` across `range`.
///
/// Forward: `Q_{n+1} = (F − S_n^2)/((z − U_n^2 − W_n) Q_n)`, then
/// `S_{n+1} = −(U_n + U_{n+1}) Q_{n+1} − S_n`. Backward steps use the same
/// identity solved for `Q_n`.
pub fn solve_partner_recursive(
    u: &CoeffSeq,
    w: &CoeffSeq,
    curve: &HyperellipticCurve,
    s_init: (ZPoly, ZPoly),
    n0: i64,
    range: Window,
    tolerance: f64,
) -> Result<(DressingState, RecursionLog)> {
    if !(range.lo() < n0 && n0 <= range.hi()) {
        return Err(Error::Domain(format!("seed index {n0} must satisfy lo < n0 <= hi for {range}")));
    }
    let f = curve.poly();
    let factor = |n: i64| -> Result<ZPoly> { Ok(z_minus(&(u.get(n)?.square() + w.get(n)?))) };
    let mut log = Vec::new();
    let (s_prev, s_cur) = s_init;
    let q0 = q_from_s(&s_prev, &s_cur, u.get(n0 - 1)?, u.get(n0)?, n0)?;

    let mut s_fwd = vec![s_cur.clone()];
    let mut q_fwd = vec![q0.clone()];
    for n in n0..range.hi() {
        let idx = (n - n0) as usize;
        let (q_next, res) = divide_step(&f, &s_fwd[idx], &factor(n)?, &q_fwd[idx], n, tolerance)?;
        log.push((n, res));
        let s_next = -(q_next.scale(&(u.get(n)? + u.get(n + 1)?)) + &s_fwd[idx]);
        s_fwd.push(s_next);
        q_fwd.push(q_next);
    }

    let mut s_bwd = vec![s_prev];
    let mut q_bwd: Vec<ZPoly> = Vec::new();
    let mut q_right = q0;
    for n in (range.lo()..n0).rev() {
        let sn = s_bwd.last().expect("seeded").clone();
        let (qn, res) = divide_step(&f, &sn, &factor(n)?, &q_right, n, tolerance)?;
        log.push((n, res));
        if n > range.lo() {
            let s_before = -(qn.scale(&(u.get(n - 1)? + u.get(n)?)) + &sn);
            s_bwd.push(s_before);
        }
        q_bwd.push(qn.clone());
        q_right = qn;
    }

    s_bwd.reverse();
    q_bwd.reverse();
    let mut s_all = s_bwd;
    s_all.extend(s_fwd);
    let mut q_all = q_bwd;
    q_all.extend(q_fwd);
    log.sort_by_key(|(n, _)| *n);
    let state = DressingState::new(
        u.clone(),
        w.clone(),
        curve.clone(),
        PolySeq::new(range.lo(), s_all)?,
        PolySeq::new(range.lo(), q_all)?,
    )?;
    Ok((state, RecursionLog { steps: log }))
}

/// Function systems in `n` used to expand `S_n`.
#[derive(Clone, Debug, PartialEq)]
pub enum BasisKind {
    /// `cos((2k+1)n)`, `k = 0..=g`.
    OddCosines,
    /// `n^(2k)`, `k = 0..=g+1`.
    EvenPowers,
    /// `n^k`, `k = 0..=2g+2`; for polynomial data with a linear term.
    AllPowers,
    /// `a^((2k+1)n)`, `k = 0..=g`.
    OddGeometric { a: Scalar },
}

impl BasisKind {
    pub fn len(&self, g: usize) -> usize {
        match self {
            BasisKind::OddCosines | BasisKind::OddGeometric { .. } => g + 1,
            BasisKind::EvenPowers => g + 2,
            BasisKind::AllPowers => 2 * g + 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BasisKind::OddCosines => "odd-cosines",
            BasisKind::EvenPowers => "even-powers",
            BasisKind::AllPowers => "all-powers",
            BasisKind::OddGeometric { .. } => "odd-geometric",
        }
    }

    pub fn eval(&self, i: usize, n: i64) -> Scalar {
        let i = i as i64;
        match self {
            BasisKind::OddCosines => Scalar::from_i64((2 * i + 1) * n).cos(),
            BasisKind::EvenPowers => Scalar::from_i64(n).powi((2 * i) as i32),
            BasisKind::AllPowers => Scalar::from_i64(n).powi(i as i32),
            BasisKind::OddGeometric { a } => a.powi(((2 * i + 1) * n) as i32),
        }
    }
}

/// Solution of the linear residual equations in a function basis.
#[derive(Clone, Debug)]
pub struct AnsatzSolution {
    pub basis: BasisKind,
    pub genus: usize,
    /// `S_n = Σ_i φ_i(n) coeffs[i](z)`.
    pub coeffs: Vec<ZPoly>,
    pub curve: HyperellipticCurve,
    /// Largest relative residual of the sampled equations after normalization.
    pub residual: Scalar,
    /// Smallest retained pivot over the largest, showing how clearly rank `cols − 1` was detected.
    pub pivot_gap: Scalar,
    /// Largest disagreement of the curve recovered at different `n`.
    pub curve_spread: Scalar,
}

impl AnsatzSolution {
    pub fn s_at(&self, n: i64) -> ZPoly {
        self.coeffs
            .iter()
            .enumerate()
            .fold(ZPoly::zero(), |acc, (i, c)| &acc + &c.scale(&self.basis.eval(i, n)))
    }

    pub fn s_seq(&self, window: Window) -> Result<PolySeq> {
        PolySeq::try_from_fn(window, |n| Ok(self.s_at(n)))
    }

    /// Full dressing state with `S` on `window` and `Q` on `window` minus its first index.
    pub fn state(&self, u: &CoeffSeq, w: &CoeffSeq, window: Window) -> Result<DressingState> {
        DressingState::from_s(u.clone(), w.clone(), self.curve.clone(), self.s_seq(window)?)
    }
}

/// Options for [`ansatz_solve`].
#[derive(Clone, Debug)]
pub struct AnsatzOptions {
    /// Sample indices `n ∈ [−half_width, half_width]`; `None` picks `g + 3`.
    pub half_width: Option<i64>,
    pub tolerance: f64,
}

impl Default for AnsatzOptions {
    fn default() -> Self {
        AnsatzOptions {
            half_width: None,
            tolerance: 1e-9,
        }
    }
}

/// Solves the four-term residual equations for `S_n` in the given basis.
///
/// Each unknown is the `z^k` coefficient of one basis function. The rows are
/// the `z`-coefficients of the residual at sampled `n`, so the system is
/// homogeneous with a one-dimensional solution space; the scale is fixed by
/// making the `z^g` coefficient of `S_n` equal `−U_n`. The curve is read off
/// the master identity.
pub fn ansatz_solve(basis: &BasisKind, g: usize, u: &CoeffSeq, w: &CoeffSeq, options: &AnsatzOptions) -> Result<AnsatzSolution> {
    if g == 0 {
        return Err(Error::Domain("genus must be at least 1".into()));
    }
    let nb = basis.len(g);
    let cols = nb * (g + 1);
    let h = options.half_width.unwrap_or(g as i64 + 3);
    let samples = Window::new(-h, h)?;
    let needed = samples.grow(1, 2)?;
    if !u.window().covers(&needed) || !w.window().covers(&samples.grow(0, 1)?) {
        return Err(crate::opalg::missing_window(needed, u.window()));
    }

    let zero = Scalar::zero();
    let phi = |i: usize, n: i64| basis.eval(i, n);
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for n in samples.iter() {
        let uu = [u.get(n - 1)?, u.get(n)?, u.get(n + 1)?, u.get(n + 2)?];
        let ww = [w.get(n)?, w.get(n + 1)?];
        let mut block = vec![vec![zero.clone(); cols]; g + 2];
        for i in 0..nb {
            let values = [phi(i, n - 1), phi(i, n), phi(i, n + 1), phi(i, n + 2)];
            for k in 0..=g {
                let unit = ZPoly::monomial(k, Scalar::one());
                let s: Vec<ZPoly> = values.iter().map(|v| unit.scale(v)).collect();
                let r = linear_residual_poly([&s[0], &s[1], &s[2], &s[3]], uu, ww);
                for (row, slot) in block.iter_mut().enumerate() {
                    slot[i * (g + 1) + k] = r.coeff(row);
                }
            }
        }
        rows.extend(block);
    }

    for row in rows.iter_mut() {
        let m = crate::num::max_abs(row.iter());
        if !m.is_zero() {
            let inv = m.recip();
            for v in row.iter_mut() {
                *v *= &inv;
            }
        }
    }
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    let mut col_scale = vec![Scalar::one(); cols];
    for (j, cs) in col_scale.iter_mut().enumerate() {
        let norm: Scalar = rows.iter().map(|r| r[j].square()).sum();
        if !norm.is_zero() {
            *cs = norm.sqrt().recip();
        }
    }
    for row in rows.iter_mut() {
        for (v, cs) in row.iter_mut().zip(&col_scale) {
            *v *= cs;
        }
    }

    let matrix = DenseMatrix::from_rows(rows);
    let qr = PivotedQr::new(matrix.clone());
    let prec = crate::num::working_precision() as f64;
    let rank_tol = 2f64.powf(-0.6 * prec).max(1e-300);
    let diag = qr.r_diag();
    let rank = qr.rank(rank_tol);
    if rank + 1 != cols {
        return Err(Error::RankDeficient {
            expected: 1,
            found: cols - rank,
        });
    }
    let pivot_gap = &diag[rank - 1] / &diag[0];
    let y = qr.null_vector(rank_tol)?;
    let x: Vec<Scalar> = y.iter().zip(&col_scale).map(|(a, b)| a * b).collect();

    let lead = |n: i64| -> Scalar { (0..nb).map(|i| phi(i, n) * &x[i * (g + 1) + g]).sum() };
    let mut num = Scalar::zero();
    let mut den = Scalar::zero();
    for n in samples.iter() {
        let t = lead(n);
        num -= u.get(n)? * &t;
        den += t.square();
    }
    if den.is_zero() {
        return Err(Error::NoSolution { residual: f64::INFINITY });
    }
    let lambda = num / den;
    let coeffs: Vec<ZPoly> = (0..nb)
        .map(|i| ZPoly::new((0..=g).map(|k| &x[i * (g + 1) + k] * &lambda).collect()))
        .collect();

    let provisional = AnsatzSolution {
        basis: basis.clone(),
        genus: g,
        coeffs,
        curve: HyperellipticCurve::new(g, vec![Scalar::zero(); 2 * g + 1])?,
        residual: Scalar::zero(),
        pivot_gap,
        curve_spread: Scalar::zero(),
    };

    let mut residual = Scalar::zero();
    for n in samples.iter() {
        let s: Vec<ZPoly> = (n - 1..=n + 2).map(|m| provisional.s_at(m)).collect();
        let r = linear_residual(
            [&s[0], &s[1], &s[2], &s[3]],
            [u.get(n - 1)?, u.get(n)?, u.get(n + 1)?, u.get(n + 2)?],
            [w.get(n)?, w.get(n + 1)?],
        );
        residual = residual.max(r.relative());
        let law = (provisional.s_at(n).coeff(g) + u.get(n)?).abs();
        residual = residual.max(law / u.get(n)?.abs().max(Scalar::one()));
    }
    if residual > options.tolerance {
        return Err(Error::NoSolution {
            residual: residual.to_f64(),
        });
    }

    let mut curves: Vec<ZPoly> = Vec::new();
    for n in -2..=2i64 {
        let sm = provisional.s_at(n - 1);
        let s0 = provisional.s_at(n);
        let s1 = provisional.s_at(n + 1);
        let (Ok(q0), Ok(q1)) = (
            q_from_s(&sm, &s0, u.get(n - 1)?, u.get(n)?, n),
            q_from_s(&s0, &s1, u.get(n)?, u.get(n + 1)?, n + 1),
        ) else {
            continue;
        };
        let f = &(&s0 * &s0) + &(z_minus(&(u.get(n)?.square() + w.get(n)?)) * (&q0 * &q1));
        curves.push(f);
    }
    let Some(reference) = curves.first().cloned() else {
        return Err(Error::NoSolution { residual: f64::INFINITY });
    };
    let spread = curves
        .iter()
        .fold(Scalar::zero(), |acc, f| acc.max((f - &reference).max_coeff()))
        / reference.max_coeff().max(Scalar::one());
    if spread > options.tolerance {
        return Err(Error::NoSolution {
            residual: spread.to_f64(),
        });
    }
    let curve = HyperellipticCurve::from_poly(&reference, options.tolerance)?;
    Ok(AnsatzSolution {
        curve,
        residual,
        curve_spread: spread,
        ..provisional
    })
}
