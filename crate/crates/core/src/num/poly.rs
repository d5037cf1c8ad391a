use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::qr::{DenseMatrix, PivotedQr};
use super::scalar::{max_abs, working_epsilon, Scalar};
use crate::error::{Error, Result};

/// Dense polynomial in the spectral parameter; `coeffs[k]` multiplies `z^k`.
///
/// Construction only strips exact trailing zeros. Numerical trimming is an
/// explicit step (`trimmed`, `normalized`) so callers can see what was cut.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZPoly {
    coeffs: Vec<Scalar>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        ZPoly::new(vec![c])
    }

    /// `c0 + c1 z`.
    pub fn linear(c0: Scalar, c1: Scalar) -> Self {
        ZPoly::new(vec![c0, c1])
    }

    pub fn monomial(k: usize, c: Scalar) -> Self {
        let mut coeffs = vec![Scalar::zero(); k + 1];
        coeffs[k] = c;
        ZPoly::new(coeffs)
    }

    pub fn from_f64(coeffs: &[f64]) -> Self {
        ZPoly::new(coeffs.iter().map(|&c| Scalar::from_f64(c)).collect())
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn max_coeff(&self) -> Scalar {
        max_abs(&self.coeffs)
    }

    /// Drops trailing coefficients with `|c| <= rel * max|c|`.
    pub fn trimmed(&self, rel: f64) -> ZPoly {
        let threshold = self.max_coeff() * rel;
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.abs() <= threshold) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    /// Trimming at `1e-3 * tolerance` relative to the largest coefficient.
    pub fn normalized(&self, tolerance: f64) -> ZPoly {
        self.trimmed(1e-3 * tolerance)
    }

    pub fn eval(&self, z: &Scalar) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc.finite()
    }

    pub fn scale(&self, c: &Scalar) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Long division by `den`. Returns the quotient and the largest
    /// remainder coefficient; deciding whether that is small enough is up to
    /// the caller.
    pub fn div_exact(&self, den: &ZPoly) -> Result<(ZPoly, Scalar)> {
        let den_lead = den.leading();
        let den_scale = den.max_coeff();
        if den.is_zero() || den_lead.abs() <= den_scale * working_epsilon() {
            return Err(Error::Domain("division by a numerically zero polynomial".into()));
        }
        let dd = den.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((ZPoly::zero(), self.max_coeff()));
        }
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - dd;
        let mut quot = vec![Scalar::zero(); qlen];
        for k in (0..qlen).rev() {
            let q = &rem[k + dd] / &den_lead;
            for (j, d) in den.coeffs.iter().enumerate() {
                rem[k + j] -= &q * d;
            }
            quot[k] = q;
        }
        let residual = max_abs(&rem[..dd]);
        for c in &quot {
            if !c.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok((ZPoly::new(quot), residual))
    }

    /// Least-squares fit of degree at most `bound`. Samples beyond
    /// `bound + 1` feed a consistency residual, relative to the largest
    /// sample magnitude, which is compared against `tolerance`.
    pub fn interpolate(samples: &[(Scalar, Scalar)], bound: usize, tolerance: f64) -> Result<Interpolant> {
        if samples.len() < bound + 1 {
            return Err(Error::TooFewSamples {
                needed: bound + 1,
                got: samples.len(),
            });
        }
        let spread = samples
            .iter()
            .fold(Scalar::zero(), |acc, (z, _)| acc.max(z.abs()));
        let h = if spread.is_zero() { Scalar::one() } else { spread };
        let separation = &h * working_epsilon() * 16i64;
        for (i, (zi, _)) in samples.iter().enumerate() {
            for (zj, _) in &samples[..i] {
                if (zi - zj).abs() <= separation {
                    return Err(Error::DuplicateNode(zi.to_f64()));
                }
            }
        }
        let mut vandermonde = DenseMatrix::zeros(samples.len(), bound + 1);
        for (i, (z, _)) in samples.iter().enumerate() {
            let t = z / &h;
            let mut power = Scalar::one();
            for k in 0..=bound {
                vandermonde.set(i, k, power.clone());
                power *= &t;
            }
        }
        let rhs: Vec<Scalar> = samples.iter().map(|(_, v)| v.clone()).collect();
        let qr = PivotedQr::new(vandermonde);
        let scaled = qr.solve(&rhs, 0.0)?;
        let mut coeffs = Vec::with_capacity(bound + 1);
        let mut hk = Scalar::one();
        for b in scaled {
            coeffs.push(b / &hk);
            hk *= &h;
        }
        let poly = ZPoly::new(coeffs);
        let value_scale = max_abs(rhs.iter()).max(Scalar::from_f64(f64::MIN_POSITIVE));
        let mut worst = Scalar::zero();
        for (z, v) in samples {
            worst = worst.max((poly.eval(z)? - v).abs());
        }
        let residual = worst / value_scale;
        let consistent = residual <= tolerance;
        Ok(Interpolant {
            poly,
            residual,
            consistent,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Interpolant {
    pub poly: ZPoly,
    /// Largest misfit at the sample nodes, relative to the largest sample.
    pub residual: Scalar,
    pub consistent: bool,
}

/// `count` Chebyshev points of the first kind mapped onto `[lo, hi]`.
pub fn chebyshev_nodes(count: usize, lo: &Scalar, hi: &Scalar) -> Vec<Scalar> {
    let mid = (lo + hi) / 2i64;
    let half = (hi - lo) / 2i64;
    let pi = Scalar::pi();
    (0..count)
        .map(|k| {
            let angle = &pi * (2 * k as i64 + 1) / (2 * count as i64);
            &mid + &half * angle.cos()
        })
        .collect()
}

impl Add<&ZPoly> for &ZPoly {
    type Output = ZPoly;
    fn add(self, rhs: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ZPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub<&ZPoly> for &ZPoly {
    type Output = ZPoly;
    fn sub(self, rhs: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ZPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul<&ZPoly> for &ZPoly {
    type Output = ZPoly;
    fn mul(self, rhs: &ZPoly) -> ZPoly {
        if self.is_zero() || rhs.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<ZPoly> for ZPoly {
            type Output = ZPoly;
            fn $method(self, rhs: ZPoly) -> ZPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ZPoly> for ZPoly {
            type Output = ZPoly;
            fn $method(self, rhs: &ZPoly) -> ZPoly {
                (&self).$method(rhs)
            }
        }
        impl $tr<ZPoly> for &ZPoly {
            type Output = ZPoly;
            fn $method(self, rhs: ZPoly) -> ZPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> ZPoly {
        ZPoly::new(c.iter().map(|&x| Scalar::from_i64(x)).collect())
    }

    #[test]
    fn horner() {
        assert_eq!(p(&[1, 0, 1]).eval(&Scalar::from_i64(2)).unwrap(), 5.0);
        assert_eq!(ZPoly::zero().eval(&Scalar::from_i64(7)).unwrap(), 0.0);
        assert_eq!(p(&[0, 0, 0, 1]).eval(&Scalar::from_i64(3)).unwrap(), 27.0);
    }

    #[test]
    fn eval_overflow_is_an_error() {
        let inf = Scalar::one() / Scalar::zero();
        assert!(p(&[0, 1]).eval(&inf).is_err());
    }

    #[test]
    fn product_of_linear_factors() {
        assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
        assert!((&p(&[1, 2]) * &ZPoly::zero()).is_zero());
    }

    #[test]
    fn exact_division() {
        let (q, r) = p(&[-1, 0, 1]).div_exact(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        let (q, r) = p(&[0, 0, 1]).div_exact(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert_eq!(r, 1.0);
        assert!(p(&[1]).div_exact(&ZPoly::zero()).is_err());
    }

    #[test]
    fn trimming_is_relative() {
        let q = ZPoly::new(vec![Scalar::one(), Scalar::from_f64(1e-40)]);
        assert_eq!(q.degree(), Some(1));
        assert_eq!(q.normalized(1e-9).degree(), Some(0));
    }

    #[test]
    fn interpolation_recovers_square() {
        let samples: Vec<_> = [-1i64, 0, 2]
            .iter()
            .map(|&z| (Scalar::from_i64(z), Scalar::from_i64(z * z)))
            .collect();
        let fit = ZPoly::interpolate(&samples, 2, 1e-20).unwrap();
        assert!((fit.poly.clone() - p(&[0, 0, 1])).max_coeff() < 1e-30);
        assert!(fit.consistent);
    }

    #[test]
    fn interpolation_of_constant() {
        let samples: Vec<_> = (0..4)
            .map(|z| (Scalar::from_i64(z), Scalar::from_i64(7)))
            .collect();
        let fit = ZPoly::interpolate(&samples, 0, 1e-20).unwrap();
        assert_eq!(fit.poly.trimmed(1e-25).degree(), Some(0));
    }

    #[test]
    fn interpolation_of_negated_cubic_at_chebyshev_nodes() {
        let cubic = p(&[1, 2, 3, 1]);
        let nodes = chebyshev_nodes(8, &Scalar::from_i64(-2), &Scalar::from_i64(2));
        let samples: Vec<_> = nodes.iter().map(|z| (z.clone(), -cubic.eval(z).unwrap())).collect();
        let fit = ZPoly::interpolate(&samples, 3, 1e-20).unwrap();
        let expected = p(&[-1, -2, -3, -1]);
        assert!((fit.poly - expected).max_coeff() < 1e-12);
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let samples = vec![
            (Scalar::one(), Scalar::one()),
            (Scalar::one(), Scalar::from_i64(2)),
        ];
        assert!(matches!(ZPoly::interpolate(&samples, 1, 1e-9), Err(Error::DuplicateNode(_))));
    }

    #[test]
    fn inconsistent_samples_are_flagged() {
        let samples: Vec<_> = (0..5)
            .map(|z| (Scalar::from_i64(z), Scalar::from_i64(z * z * z)))
            .collect();
        let fit = ZPoly::interpolate(&samples, 1, 1e-9).unwrap();
        assert!(!fit.consistent);
    }
}
