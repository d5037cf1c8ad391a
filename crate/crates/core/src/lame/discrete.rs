use serde::{Deserialize, Serialize};

use super::WeierstrassContext;
use crate::error::{Error, Result};
use crate::num::{PivotedQr, DenseMatrix, Scalar};
use crate::opalg::{CoeffSeq, DiffOp, Window};

/// How the unbalanced bracket in the printed `A2` is closed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum A2Interpretation {
    /// `−3/2 (ζ(ε) + ζ(3ε) + ζ(x−2ε) − ζ(x+2ε))`.
    #[default]
    Wrapped,
    /// `−3/2 (ζ(ε) + ζ(3ε)) + ζ(x−2ε) − ζ(x+2ε)`.
    ScalarWeights,
}

impl A2Interpretation {
    pub const ALL: [A2Interpretation; 2] = [A2Interpretation::Wrapped, A2Interpretation::ScalarWeights];

    pub fn name(self) -> &'static str {
        match self {
            A2Interpretation::Wrapped => "wrapped",
            A2Interpretation::ScalarWeights => "scalar_weights",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "wrapped" => Ok(A2Interpretation::Wrapped),
            "scalar_weights" => Ok(A2Interpretation::ScalarWeights),
            other => Err(Error::Parse(format!("unknown A2 interpretation {other:?}"))),
        }
    }
}

/// The lattice `x_n = x0 + n ε` with genus `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LameDiscretization {
    pub g: usize,
    pub eps: Scalar,
    pub x0: Scalar,
    pub a2_interpretation: A2Interpretation,
}

impl LameDiscretization {
    pub fn new(g: usize, eps: Scalar, x0: Scalar) -> Result<Self> {
        if g == 0 {
            return Err(Error::Domain("genus must be at least 1".into()));
        }
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::Domain(format!("step must be positive, got {}", eps.to_f64())));
        }
        Ok(LameDiscretization {
            g,
            eps,
            x0,
            a2_interpretation: A2Interpretation::default(),
        })
    }

    pub fn with_a2(mut self, a2: A2Interpretation) -> Self {
        self.a2_interpretation = a2;
        self
    }

    pub fn x_at(&self, n: i64) -> Scalar {
        &self.x0 + &self.eps * n
    }

    /// `A_g(x, ε)`.
    pub fn ag(&self, ctx: &WeierstrassContext, x: &Scalar) -> Result<Scalar> {
        ag_build(ctx, self.g, &self.eps, self.a2_interpretation)(x)
    }
}

/// `x ↦ A_g(x, ε)`.
pub fn ag_build<'a>(ctx: &'a WeierstrassContext, g: usize, eps: &'a Scalar, a2: A2Interpretation) -> impl Fn(&Scalar) -> Result<Scalar> + 'a {
    move |x: &Scalar| {
        let z = |k: i64| ctx.zeta(&(eps * k));
        // ζ(x − kε) − ζ(x + kε)
        let odd_pair = |k: i64| -> Result<Scalar> { Ok(ctx.zeta(&(x - eps * k))? - ctx.zeta(&(x + eps * k))?) };
        if g % 2 == 1 {
            let mut value = -(z(1)? * 2i64) - odd_pair(1)?;
            for k in 1..=((g - 1) / 2) as i64 {
                value *= Scalar::one() + odd_pair(2 * k + 1)? / (z(1)? + z(4 * k + 1)?);
            }
            Ok(value)
        } else {
            let scalar_part = (z(1)? + z(3)?) * Scalar::ratio(-3, 2);
            let mut value = match a2 {
                A2Interpretation::Wrapped => scalar_part + odd_pair(2)? * Scalar::ratio(-3, 2),
                A2Interpretation::ScalarWeights => scalar_part + odd_pair(2)?,
            };
            for k in 2..=(g / 2) as i64 {
                value *= Scalar::one() + odd_pair(2 * k)? / (z(1)? + z(4 * k - 1)?);
            }
            Ok(value)
        }
    }
}

/// `T^2/ε^2 + A_g(x_n, ε) T/ε + ℘(ε)` on `window`.
pub fn lame_l2(disc: &LameDiscretization, ctx: &WeierstrassContext, window: Window) -> Result<DiffOp> {
    let eps = &disc.eps;
    let a = CoeffSeq::try_from_fn(window, |n| Ok(disc.ag(ctx, &disc.x_at(n))? / eps))?;
    DiffOp::new(
        window,
        [
            (2, CoeffSeq::constant(window, eps.square().recip())),
            (1, a),
            (0, CoeffSeq::constant(window, ctx.wp(eps)?)),
        ],
    )
}

/// `ε^2 L2`, monic at `T^2`; its spectral parameter is `ε^2 z`.
pub fn lame_l2_monic(disc: &LameDiscretization, ctx: &WeierstrassContext, window: Window) -> Result<DiffOp> {
    let eps = &disc.eps;
    let s = CoeffSeq::try_from_fn(window, |n| Ok(disc.ag(ctx, &disc.x_at(n))? * eps))?;
    DiffOp::new(
        window,
        [
            (2, CoeffSeq::constant(window, Scalar::one())),
            (1, s),
            (0, CoeffSeq::constant(window, ctx.wp(eps)? * eps.square())),
        ],
    )
}

/// A function with a known second derivative.
#[derive(Clone, Copy)]
pub struct TestFunction {
    pub name: &'static str,
    pub value: fn(&Scalar) -> Scalar,
    pub second: fn(&Scalar) -> Scalar,
}

impl TestFunction {
    pub const COSINE: TestFunction = TestFunction {
        name: "cos",
        value: |x| x.cos(),
        second: |x| -x.cos(),
    };

    pub const ZERO: TestFunction = TestFunction {
        name: "zero",
        value: |_| Scalar::zero(),
        second: |_| Scalar::zero(),
    };
}

/// `|(L2 f)(x) − f''(x) + g(g+1) ℘(x) f(x)|`.
pub fn continuum_check(disc: &LameDiscretization, ctx: &WeierstrassContext, f: TestFunction, x: &Scalar) -> Result<Scalar> {
    let eps = &disc.eps;
    let fx = (f.value)(x);
    let l2f = (f.value)(&(x + eps * 2i64)) / eps.square() + disc.ag(ctx, x)? * (f.value)(&(x + eps)) / eps + ctx.wp(eps)? * &fx;
    let g = disc.g as i64;
    let target = (f.second)(x) - ctx.wp(x)? * (g * (g + 1)) * &fx;
    Ok((l2f - target).abs())
}

/// Errors of [`continuum_check`] over a list of steps and their fitted
/// log-log slope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumSweep {
    pub g: usize,
    pub a2_interpretation: A2Interpretation,
    pub x: Scalar,
    pub eps: Vec<Scalar>,
    pub errors: Vec<Scalar>,
    /// Least-squares slope of `log error` against `log ε`; `None` when an error vanishes.
    pub slope: Option<f64>,
}

pub fn continuum_sweep(ctx: &WeierstrassContext, g: usize, a2: A2Interpretation, x: &Scalar, eps_list: &[Scalar], f: TestFunction) -> Result<ContinuumSweep> {
    if eps_list.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: eps_list.len(),
        });
    }
    let mut errors = Vec::with_capacity(eps_list.len());
    for eps in eps_list {
        let disc = LameDiscretization::new(g, eps.clone(), x.clone())?.with_a2(a2);
        errors.push(continuum_check(&disc, ctx, f, x)?);
    }
    let slope = log_log_slope(eps_list, &errors)?;
    Ok(ContinuumSweep {
        g,
        a2_interpretation: a2,
        x: x.clone(),
        eps: eps_list.to_vec(),
        errors,
        slope,
    })
}

fn log_log_slope(xs: &[Scalar], ys: &[Scalar]) -> Result<Option<f64>> {
    if ys.iter().any(|y| y.is_zero()) {
        return Ok(None);
    }
    let rows = xs.iter().map(|x| vec![Scalar::one(), x.ln()]).collect();
    let rhs: Vec<Scalar> = ys.iter().map(Scalar::ln).collect();
    let fit = PivotedQr::new(DenseMatrix::from_rows(rows)).solve(&rhs, 0.0)?;
    Ok(Some(fit[1].to_f64()))
}

/// Sweeps every [`A2Interpretation`] at genus two and picks the best slope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct A2Selection {
    pub chosen: A2Interpretation,
    pub sweeps: Vec<ContinuumSweep>,
}

pub fn select_a2_interpretation(ctx: &WeierstrassContext, x: &Scalar, eps_list: &[Scalar]) -> Result<A2Selection> {
    let sweeps = A2Interpretation::ALL
        .iter()
        .map(|&a2| continuum_sweep(ctx, 2, a2, x, eps_list, TestFunction::COSINE))
        .collect::<Result<Vec<_>>>()?;
    let chosen = sweeps
        .iter()
        .max_by(|a, b| a.slope.unwrap_or(f64::NEG_INFINITY).total_cmp(&b.slope.unwrap_or(f64::NEG_INFINITY)))
        .map(|s| s.a2_interpretation)
        .unwrap_or_default();
    Ok(A2Selection { chosen, sweeps })
}

/// `ε_k = 0.01 / 2^k`, `k = 0..4`.
pub fn default_sweep_steps() -> Vec<Scalar> {
    (0..4).map(|k| Scalar::ratio(1, 100 << k)).collect()
}
