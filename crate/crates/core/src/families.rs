//! Closed-form coefficient families for `L2 = (T + U_n)^2 + W_n` and the
//! printed fixtures used to check them.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::HyperellipticCurve;
use crate::dressing::{ansatz_solve, AnsatzOptions, AnsatzSolution, BasisKind, DressingState, PolySeq};
use crate::error::{Error, Result};
use crate::num::{Scalar, ZPoly};
use crate::opalg::{CoeffSeq, DiffOp, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Trig,
    Poly,
    Geom,
    Elliptic,
}

impl FamilyKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "trig" => Ok(FamilyKind::Trig),
            "poly" => Ok(FamilyKind::Poly),
            "geom" => Ok(FamilyKind::Geom),
            "elliptic" => Ok(FamilyKind::Elliptic),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }
}

/// `{"kind": "trig", "g": 2, "params": {"r1": "1.0"}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub g: usize,
    #[serde(default)]
    pub params: BTreeMap<String, Scalar>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, g: usize) -> Self {
        FamilySpec {
            kind,
            g,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: Scalar) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    fn param(&self, name: &str) -> Option<&Scalar> {
        self.params.get(name)
    }

    fn param_or(&self, name: &str, default: i64) -> Scalar {
        self.param(name).cloned().unwrap_or_else(|| Scalar::from_i64(default))
    }

    fn required(&self, name: &str) -> Result<Scalar> {
        self.param(name)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("{:?} family needs parameter {name}", self.kind)))
    }

    /// Checks the parameter constraints of each family.
    pub fn validate(&self) -> Result<()> {
        if self.g == 0 {
            return Err(Error::Domain("genus must be at least 1".into()));
        }
        let known: &[&str] = match self.kind {
            FamilyKind::Trig => &["r1"],
            FamilyKind::Poly => &["a2", "a1", "a0"],
            FamilyKind::Geom => &["beta", "a", "w_sign"],
            FamilyKind::Elliptic => &["c2", "c1", "c0", "gamma_seed", "gamma_lo", "gamma_hi"],
        };
        if let Some(extra) = self.params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Domain(format!("parameter {extra} does not apply to {:?}", self.kind)));
        }
        match self.kind {
            FamilyKind::Trig => {
                if self.required("r1")?.is_zero() {
                    return Err(Error::Domain("trig family requires r1 != 0".into()));
                }
            }
            FamilyKind::Poly => {
                if self.required("a2")?.is_zero() {
                    return Err(Error::Domain("poly family requires a2 != 0".into()));
                }
            }
            FamilyKind::Geom => {
                if self.required("beta")?.is_zero() {
                    return Err(Error::Domain("geom family requires beta != 0".into()));
                }
                let a = self.required("a")?;
                if a.is_zero() || a.abs() == 1.0 {
                    return Err(Error::Domain("geom family requires a not in {0, 1, -1}".into()));
                }
            }
            FamilyKind::Elliptic => {
                if self.g != 1 {
                    return Err(Error::Domain("elliptic family has genus 1".into()));
                }
                let lo = self.param_or("gamma_lo", 2);
                let hi = self.param_or("gamma_hi", 3);
                if lo >= hi {
                    return Err(Error::Domain("gamma range must have gamma_lo < gamma_hi".into()));
                }
            }
        }
        Ok(())
    }
}

/// `U_n = r1 cos n`, `W_n = r1^2 sin(g) sin(g+1) / (2 cos^2(g + 1/2)) cos 2n`.
pub fn trig_family(g: usize, r1: &Scalar, window: Window) -> Result<(CoeffSeq, CoeffSeq)> {
    if r1.is_zero() {
        return Err(Error::Domain("trig family requires r1 != 0".into()));
    }
    let gs = Scalar::from_i64(g as i64);
    let half = Scalar::ratio(1, 2);
    let amp = r1.square() * gs.sin() * (&gs + 1i64).sin() / ((&gs + &half).cos().square() * 2i64);
    let u = CoeffSeq::from_fn(window, |n| r1 * Scalar::from_i64(n).cos())?;
    let w = CoeffSeq::from_fn(window, |n| &amp * Scalar::from_i64(2 * n).cos())?;
    Ok((u, w))
}

/// `U_n = a2 n^2 + a1 n + a0`, `W_n = −g(g+1) a2 n (a2 n + a1)`.
pub fn poly_family(g: usize, a2: &Scalar, a0: &Scalar, a1: Option<&Scalar>, window: Window) -> Result<(CoeffSeq, CoeffSeq)> {
    if a2.is_zero() {
        return Err(Error::Domain("poly family requires a2 != 0".into()));
    }
    let a1 = a1.cloned().unwrap_or_else(Scalar::zero);
    let gg = (g * (g + 1)) as i64;
    let u = CoeffSeq::from_fn(window, |n| {
        let ns = Scalar::from_i64(n);
        a2 * ns.square() + &a1 * &ns + a0
    })?;
    let w = CoeffSeq::from_fn(window, |n| {
        let ns = Scalar::from_i64(n);
        -(a2 * &ns * (a2 * &ns + &a1)) * gg
    })?;
    Ok((u, w))
}

/// `U_n = β a^n`, `W_n = sign · (a^{2g} + a^{2g+2} − a^{4g+2} − 1)/(a^{2g+1} + 1)^2 · β^2 a^{2n}`.
pub fn geom_family(g: usize, beta: &Scalar, a: &Scalar, w_sign: i8, window: Window) -> Result<(CoeffSeq, CoeffSeq)> {
    if beta.is_zero() {
        return Err(Error::Domain("geom family requires beta != 0".into()));
    }
    if a.is_zero() || a.abs() == 1.0 {
        return Err(Error::Domain("geom family requires a not in {0, 1, -1}".into()));
    }
    let g = g as i32;
    let denom = (a.powi(2 * g + 1) + 1i64).square();
    if denom.is_zero() {
        return Err(Error::Degenerate {
            context: "a^(2g+1) + 1",
            n: 0,
            magnitude: 0.0,
        });
    }
    let ratio = (a.powi(2 * g) + a.powi(2 * g + 2) - a.powi(4 * g + 2) - 1i64) / denom;
    let ratio = if w_sign < 0 { -ratio } else { ratio };
    let u = CoeffSeq::from_fn(window, |n| beta * a.powi(n as i32))?;
    let w = CoeffSeq::from_fn(window, |n| &ratio * beta.square() * a.powi(2 * n as i32))?;
    Ok((u, w))
}

/// Genus-one family parametrized by an arbitrary sequence `γ_n`.
#[derive(Clone, Debug)]
pub struct EllipticFamily {
    pub curve: HyperellipticCurve,
    pub u: CoeffSeq,
    pub w: CoeffSeq,
    pub gamma: CoeffSeq,
    /// `σ_n √F(γ_n)`.
    pub root: CoeffSeq,
    pub l3: DiffOp,
}

impl EllipticFamily {
    /// `S_n = −U_n (z − γ_n) + σ_n √F(γ_n)` and `Q_n = z − γ_n`.
    pub fn dressing(&self) -> Result<DressingState> {
        let window = self.u.window();
        let s = PolySeq::try_from_fn(window, |n| {
            let u = self.u.get(n)?;
            Ok(ZPoly::linear(u * self.gamma.get(n)? + self.root.get(n)?, -u))
        })?;
        let q = PolySeq::try_from_fn(window, |n| Ok(ZPoly::linear(Scalar::zero() - self.gamma.get(n)?, Scalar::one())))?;
        DressingState::new(self.u.clone(), self.w.clone(), self.curve.clone(), s, q)
    }
}

/// Builds `U`, `W` and the third-order partner from `γ_n` and branch signs.
///
/// `U_n = −(σ_n √F(γ_n) + σ_{n+1} √F(γ_{n+1}))/(γ_n − γ_{n+1})`,
/// `W_n = −c2 − γ_n − γ_{n+1}`. `sigma(n)` gives the sign of each root.
pub fn elliptic_family(c2: &Scalar, c1: &Scalar, c0: &Scalar, gamma: &CoeffSeq, sigma: impl Fn(i64) -> i8) -> Result<EllipticFamily> {
    let curve = HyperellipticCurve::new(1, vec![c0.clone(), c1.clone(), c2.clone()])?;
    let gw = gamma.window();
    let root = CoeffSeq::try_from_fn(gw, |n| {
        let x = gamma.get(n)?;
        let f = curve.eval(x)?;
        if f.is_sign_negative() {
            return Err(Error::Branch {
                at: x.to_f64(),
                value: f.to_f64(),
            });
        }
        let r = f.sqrt();
        Ok(if sigma(n) < 0 { -r } else { r })
    })?;
    let uw = Window::new(gw.lo(), gw.hi() - 1)?;
    let u = CoeffSeq::try_from_fn(uw, |n| {
        let d = gamma.get(n)? - gamma.get(n + 1)?;
        let scale = gamma.get(n)?.abs().max(gamma.get(n + 1)?.abs());
        if d.is_zero() || d.abs() <= scale * crate::dressing::DEGENERACY_THRESHOLD {
            return Err(Error::Degenerate {
                context: "gamma_n - gamma_{n+1}",
                n,
                magnitude: d.abs().to_f64(),
            });
        }
        Ok(-(root.get(n)? + root.get(n + 1)?) / d)
    })?;
    let w = CoeffSeq::try_from_fn(uw, |n| Ok(-c2 - gamma.get(n)? - gamma.get(n + 1)?))?;
    let lw = Window::new(uw.lo(), uw.hi() - 2)?;
    let l3 = DiffOp::new(
        lw,
        [
            (3, CoeffSeq::constant(lw, Scalar::one())),
            (2, CoeffSeq::try_from_fn(lw, |n| Ok(u.get(n)? + u.get(n + 1)? + u.get(n + 2)?))?),
            (
                1,
                CoeffSeq::try_from_fn(lw, |n| {
                    let (a, b) = (u.get(n)?, u.get(n + 1)?);
                    Ok(a.square() + b.square() + a * b + w.get(n)? - gamma.get(n + 2)?)
                })?,
            ),
            (
                0,
                CoeffSeq::try_from_fn(lw, |n| {
                    let a = u.get(n)?;
                    Ok(-root.get(n)? + a * (a.square() + w.get(n)? - gamma.get(n)?))
                })?,
            ),
        ],
    )?;
    Ok(EllipticFamily {
        curve,
        u,
        w,
        gamma: gamma.clone(),
        root,
        l3,
    })
}

/// `γ_n` drawn uniformly from `[lo, hi)` with a seeded generator, in window order.
pub fn random_gamma(window: Window, seed: u64, lo: &Scalar, hi: &Scalar) -> Result<CoeffSeq> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = window
        .iter()
        .map(|_| lo + (hi - lo) * rng.gen::<f64>())
        .collect();
    CoeffSeq::from_values(window.lo(), values)
}

/// `L2 = T^2 + (U_n + U_{n+1}) T + U_n^2 + W_n` on the window where `U_{n+1}` is known.
pub fn second_order(u: &CoeffSeq, w: &CoeffSeq) -> Result<DiffOp> {
    let uw = u.window().intersect(&w.window())?;
    let window = Window::new(uw.lo(), uw.hi().min(u.window().hi() - 1))?;
    DiffOp::new(
        window,
        [
            (2, CoeffSeq::constant(window, Scalar::one())),
            (1, CoeffSeq::try_from_fn(window, |n| Ok(u.get(n)? + u.get(n + 1)?))?),
            (0, CoeffSeq::try_from_fn(window, |n| Ok(u.get(n)?.square() + w.get(n)?))?),
        ],
    )
}

/// A family instantiated on a window.
#[derive(Clone, Debug)]
pub struct Family {
    pub spec: FamilySpec,
    pub u: CoeffSeq,
    pub w: CoeffSeq,
    pub basis: Option<BasisKind>,
    pub elliptic: Option<EllipticFamily>,
    /// Sign used for `W` in the geometric family.
    pub w_sign: Option<i8>,
    /// Whether the commutation claim for this parameter set is only conjectured.
    pub conjectural: bool,
}

/// Extra indices tabulated on each side of a verification window.
pub fn padding(g: usize) -> i64 {
    4 * g as i64 + 6
}

impl Family {
    /// Tabulates the family so operators of order up to `2g + 1` and their
    /// commutators are known on `window`. For the geometric family the sign of
    /// `W` comes from the spec's `w_sign` if present, otherwise `+1`.
    pub fn build(spec: &FamilySpec, window: Window) -> Result<Family> {
        spec.validate()?;
        let g = spec.g;
        let pad = padding(g);
        let table = window.grow(pad, pad)?;
        let mut family = Family {
            spec: spec.clone(),
            u: CoeffSeq::constant(table, Scalar::zero()),
            w: CoeffSeq::constant(table, Scalar::zero()),
            basis: None,
            elliptic: None,
            w_sign: None,
            conjectural: false,
        };
        match spec.kind {
            FamilyKind::Trig => {
                let (u, w) = trig_family(g, &spec.required("r1")?, table)?;
                family.u = u;
                family.w = w;
                family.basis = Some(BasisKind::OddCosines);
            }
            FamilyKind::Poly => {
                let a1 = spec.param("a1").filter(|a| !a.is_zero());
                let (u, w) = poly_family(g, &spec.required("a2")?, &spec.param_or("a0", 0), a1, table)?;
                family.u = u;
                family.w = w;
                family.conjectural = a1.is_some();
                family.basis = Some(if a1.is_some() { BasisKind::AllPowers } else { BasisKind::EvenPowers });
            }
            FamilyKind::Geom => {
                let a = spec.required("a")?;
                let sign = if spec.param_or("w_sign", 1).is_sign_negative() { -1 } else { 1 };
                let (u, w) = geom_family(g, &spec.required("beta")?, &a, sign, table)?;
                family.u = u;
                family.w = w;
                family.w_sign = Some(sign);
                family.basis = Some(BasisKind::OddGeometric { a });
            }
            FamilyKind::Elliptic => {
                let seed = spec.param_or("gamma_seed", 1).to_f64();
                if !(0.0..=u64::MAX as f64).contains(&seed) || seed.fract() != 0.0 {
                    return Err(Error::Domain("gamma_seed must be a non-negative integer".into()));
                }
                let gamma = random_gamma(table.grow(0, 1)?, seed as u64, &spec.param_or("gamma_lo", 2), &spec.param_or("gamma_hi", 3))?;
                let ell = elliptic_family(
                    &spec.param_or("c2", 0),
                    &spec.param_or("c1", -1),
                    &spec.param_or("c0", 0),
                    &gamma,
                    |_| 1,
                )?;
                family.u = ell.u.clone();
                family.w = ell.w.clone();
                family.elliptic = Some(ell);
            }
        }
        Ok(family)
    }

    pub fn genus(&self) -> usize {
        self.spec.g
    }

    pub fn l2(&self) -> Result<DiffOp> {
        second_order(&self.u, &self.w)
    }

    /// Solves for `S_n` in the family's basis (not used for the elliptic family).
    pub fn ansatz(&self, tolerance: f64) -> Result<AnsatzSolution> {
        let basis = self
            .basis
            .as_ref()
            .ok_or_else(|| Error::Domain("family has closed-form dressing data".into()))?;
        ansatz_solve(
            basis,
            self.genus(),
            &self.u,
            &self.w,
            &AnsatzOptions {
                half_width: None,
                tolerance,
            },
        )
    }

    /// Dressing data on the tabulated window.
    pub fn dressing(&self, tolerance: f64) -> Result<DressingState> {
        if let Some(ell) = &self.elliptic {
            return ell.dressing();
        }
        let sol = self.ansatz(tolerance)?;
        let uw = self.u.window();
        sol.state(&self.u, &self.w, Window::new(uw.lo(), uw.hi() - 1)?)
    }
}

/// Outcome of trying both signs of `W` in the geometric family.
#[derive(Clone, Debug)]
pub struct SignResolution {
    pub chosen: i8,
    /// Relative commutator residual per sign; `None` when no partner could be built.
    pub residuals: Vec<(i8, Option<Scalar>)>,
}

/// Picks the sign of `W` for which the constructed partner commutes with `L2`.
pub fn resolve_geom_sign(g: usize, beta: &Scalar, a: &Scalar, window: Window, tolerance: f64) -> Result<SignResolution> {
    let mut residuals = Vec::new();
    for sign in [1i8, -1] {
        let spec = FamilySpec::new(FamilyKind::Geom, g)
            .with("beta", beta.clone())
            .with("a", a.clone())
            .with("w_sign", Scalar::from_i64(sign as i64));
        let attempt = (|| -> Result<Scalar> {
            let fam = Family::build(&spec, window)?;
            let l2 = fam.l2()?;
            let state = fam.dressing(tolerance)?;
            let partner = state.build_partner_op(&l2, window.grow(3, 3)?)?;
            let comm = l2.commutator(&partner)?.restrict(window)?;
            Ok(comm.residual_norm() / (l2.sup_norm() * partner.sup_norm()))
        })();
        residuals.push((sign, attempt.ok()));
    }
    let chosen = residuals
        .iter()
        .filter_map(|(s, r)| r.as_ref().map(|r| (*s, r.clone())))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(s, _)| s)
        .ok_or(Error::NoSolution { residual: f64::INFINITY })?;
    Ok(SignResolution { chosen, residuals })
}

/// Closed forms printed alongside the families, for comparison in tests.
pub mod fixtures {
    use super::*;

    fn one_minus_2cos1() -> Scalar {
        1i64 - Scalar::one().cos() * 2i64
    }

    /// `A_1(z)` in `S_n = A_3 cos 3n + A_1 cos n` for the genus-one trig family.
    pub fn trig_g1_a1(r1: &Scalar) -> ZPoly {
        let d = one_minus_2cos1().square();
        let c1 = Scalar::one().cos();
        let c2 = Scalar::from_i64(2).cos();
        let constant = -(r1 * r1.square() * (c1 * 5i64 - c2 * 2i64 - 3i64)) / (d * 2i64);
        ZPoly::linear(constant, -r1)
    }

    /// `A_3` with denominator `(1 − 2 cos 1)^3`, the value the residual equations produce.
    pub fn trig_g1_a3(r1: &Scalar) -> Scalar {
        r1 * r1.square() * Scalar::ratio(1, 2).sin().square() / one_minus_2cos1().powi(3)
    }

    /// `A_3` exactly as printed, with denominator `(2 cos 1 − 1)^3`.
    pub fn trig_g1_a3_printed(r1: &Scalar) -> Scalar {
        -trig_g1_a3(r1)
    }

    /// `(z − e1)^2 (z − e2)` for the genus-one trig family.
    pub fn trig_g1_curve(r1: &Scalar) -> HyperellipticCurve {
        let d = one_minus_2cos1().square();
        let e1 = r1.square() * Scalar::ratio(1, 2).sin().powi(4) * 4i64 / &d;
        let e2 = r1.square() * (one_minus_2cos1() + Scalar::from_i64(2).cos()) / &d;
        let f = ZPoly::linear(-&e1, Scalar::one()) * ZPoly::linear(-&e1, Scalar::one()) * ZPoly::linear(-e2, Scalar::one());
        HyperellipticCurve::from_poly(&f, 1e-20).expect("monic cubic")
    }

    /// Genus-one `S_n` of the polynomial family with `a1 = 0`.
    pub fn poly_g1_s(a2: &Scalar, a0: &Scalar, n: i64) -> ZPoly {
        let ns = Scalar::from_i64(n);
        let n2 = ns.square();
        let quarter = Scalar::ratio(1, 4);
        let c0 = a2 * a2.square() * n2.square()
            + &quarter * a2 * (a0 * a2 * 12i64 - a2.square() * 9i64) * &n2
            + &quarter * (a0.square() * a2 * 8i64 - a0 * a2.square() * 5i64 + a2 * a2.square());
        let c1 = -(a2 * &n2) - a0;
        ZPoly::linear(c0, c1)
    }

    /// The printed genus-one `Q_n`; it equals `Q_{n+1}` of the quotient rule.
    pub fn poly_g1_q_printed(a2: &Scalar, a0: &Scalar, n: i64) -> ZPoly {
        let nn = Scalar::from_i64(4 * n * (n + 1) - 3);
        let c0 = -(Scalar::ratio(1, 4) * a2 * (a0 * 8i64 + a2 * nn));
        ZPoly::linear(c0, Scalar::one())
    }

    /// `(1/16)(z + a2^2 − 2 a0 a2)(4z + a2^2 − 4 a0 a2)^2`.
    pub fn poly_g1_curve(a2: &Scalar, a0: &Scalar) -> HyperellipticCurve {
        let f1 = ZPoly::linear(a2.square() - a0 * a2 * 2i64, Scalar::one());
        let f2 = ZPoly::linear(a2.square() - a0 * a2 * 4i64, Scalar::from_i64(4));
        let f = (f1 * (&f2 * &f2)).scale(&Scalar::ratio(1, 16));
        HyperellipticCurve::from_poly(&f, 1e-20).expect("monic cubic")
    }

    /// The printed genus-one third-order partner of the polynomial family.
    pub fn poly_g1_l3(a2: &Scalar, a0: &Scalar, window: Window) -> Result<DiffOp> {
        let q = Scalar::ratio(1, 4);
        let n_ = |n: i64| Scalar::from_i64(n);
        DiffOp::new(
            window,
            [
                (3, CoeffSeq::constant(window, Scalar::one())),
                (2, CoeffSeq::from_fn(window, |n| a2 * n_(3 * n * n + 6 * n + 5) + a0 * 3i64)?),
                (
                    1,
                    CoeffSeq::from_fn(window, |n| {
                        &q * (a2 * n_(2 * n * n + 2 * n + 1) + a0 * 2i64) * (a2 * n_(6 * n * n + 6 * n - 1) + a0 * 6i64)
                    })?,
                ),
                (
                    0,
                    CoeffSeq::from_fn(window, |n| {
                        &q * (a2 * n_(2 * n * n - 2 * n - 1) + a0 * 2i64)
                            * (a2 * n_(n * n - 1) + a0)
                            * (a2 * n_(2 * n * n + 2 * n - 1) + a0 * 2i64)
                    })?,
                ),
            ],
        )
    }

    fn geom_d(a: &Scalar) -> Scalar {
        a.square() - a + 1i64
    }

    /// Genus-one `S_n = −β a^n z + (a−1)^2 β^3 a^{3n+2}/(a^2−a+1)^3`.
    pub fn geom_g1_s(a: &Scalar, beta: &Scalar, n: i64) -> ZPoly {
        let n = n as i32;
        let c0 = (a - 1i64).square() * beta.powi(3) * a.powi(3 * n + 2) / geom_d(a).powi(3);
        ZPoly::linear(c0, -(beta * a.powi(n)))
    }

    /// Genus-one `Q_n = z − (a−1)^2 β^2 a^{2n}/(a^2−a+1)^2`.
    pub fn geom_g1_q(a: &Scalar, beta: &Scalar, n: i64) -> ZPoly {
        let c0 = -((a - 1i64).square() * beta.square() * a.powi(2 * n as i32) / geom_d(a).square());
        ZPoly::linear(c0, Scalar::one())
    }

    /// The printed genus-one third-order partner of the geometric family.
    pub fn geom_g1_l3(a: &Scalar, beta: &Scalar, window: Window) -> Result<DiffOp> {
        let s = a.square() + a + 1i64;
        let d = geom_d(a);
        DiffOp::new(
            window,
            [
                (3, CoeffSeq::constant(window, Scalar::one())),
                (2, CoeffSeq::from_fn(window, |n| &s * beta * a.powi(n as i32))?),
                (1, CoeffSeq::from_fn(window, |n| &s * beta.square() * a.powi(2 * n as i32 + 1) / &d)?),
                (0, CoeffSeq::from_fn(window, |n| beta.powi(3) * a.powi(3 * n as i32 + 3) / d.powi(3))?),
            ],
        )
    }

    /// The genus-one elliptic partner with the constant term taken literally
    /// as printed (`+√F(γ_n)` regardless of the branch used in `U`).
    pub fn elliptic_l3_printed(fam: &EllipticFamily) -> Result<DiffOp> {
        let window = fam.l3.window();
        let literal = CoeffSeq::try_from_fn(window, |n| {
            let u = fam.u.get(n)?;
            Ok(fam.root.get(n)?.abs() + u * (u.square() + fam.w.get(n)? - fam.gamma.get(n)?))
        })?;
        let mut terms: Vec<(i64, CoeffSeq)> = fam.l3.terms().filter(|(d, _)| *d != 0).map(|(d, s)| (d, s.clone())).collect();
        terms.push((0, literal));
        DiffOp::new(window, terms)
    }
}
