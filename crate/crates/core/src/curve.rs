use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{Scalar, ZPoly};

/// `w^2 = F(z)` with `F` monic of degree `2g + 1`; only the lower
/// coefficients `c_0..c_{2g}` are stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperellipticCurve {
    genus: usize,
    lower: Vec<Scalar>,
}

impl HyperellipticCurve {
    pub fn new(genus: usize, lower: Vec<Scalar>) -> Result<Self> {
        if genus == 0 {
            return Err(Error::Domain("genus must be at least 1".into()));
        }
        if lower.len() != 2 * genus + 1 {
            return Err(Error::Domain(format!(
                "genus {genus} needs {} lower coefficients, got {}",
                2 * genus + 1,
                lower.len()
            )));
        }
        if lower.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(HyperellipticCurve { genus, lower })
    }

    /// Reads the curve off a polynomial that must be numerically monic of odd
    /// degree. Trailing coefficients below `tolerance` in absolute value are
    /// dropped, since the expected leading coefficient is one.
    pub fn from_poly(f: &ZPoly, tolerance: f64) -> Result<Self> {
        let mut coeffs = f.coeffs().to_vec();
        while coeffs.last().is_some_and(|c| c.abs() <= tolerance) {
            coeffs.pop();
        }
        let f = ZPoly::new(coeffs);
        let degree = f.degree().unwrap_or(0);
        if degree.is_multiple_of(2) {
            return Err(Error::Domain(format!("curve polynomial has even degree {degree}")));
        }
        let lead = f.leading();
        if (&lead - 1i64).abs() > tolerance {
            return Err(Error::Domain(format!("curve polynomial is not monic (leading {lead:?})")));
        }
        let genus = (degree - 1) / 2;
        Self::new(genus, f.coeffs()[..degree].to_vec())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn lower(&self) -> &[Scalar] {
        &self.lower
    }

    pub fn poly(&self) -> ZPoly {
        let mut coeffs = self.lower.clone();
        coeffs.push(Scalar::one());
        ZPoly::new(coeffs)
    }

    pub fn eval(&self, z: &Scalar) -> Result<Scalar> {
        self.poly().eval(z)
    }

    /// Largest difference of the lower coefficients.
    pub fn distance(&self, other: &HyperellipticCurve) -> Option<Scalar> {
        (self.genus == other.genus).then(|| {
            self.lower
                .iter()
                .zip(&other.lower)
                .fold(Scalar::zero(), |acc, (a, b)| acc.max((a - b).abs()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cuspidal_cubic() {
        let c = HyperellipticCurve::new(1, vec![Scalar::zero(); 3]).unwrap();
        assert_eq!(c.eval(&Scalar::from_i64(3)).unwrap(), 27.0);
    }

    #[test]
    fn rejects_wrong_length_and_zero_genus() {
        assert!(HyperellipticCurve::new(1, vec![Scalar::zero(); 2]).is_err());
        assert!(HyperellipticCurve::new(0, vec![Scalar::zero()]).is_err());
    }

    #[test]
    fn from_poly_requires_monic_odd() {
        let f = ZPoly::from_f64(&[1.0, 2.0, 3.0, 1.0]);
        let c = HyperellipticCurve::from_poly(&f, 1e-9).unwrap();
        assert_eq!(c.genus(), 1);
        assert!(HyperellipticCurve::from_poly(&ZPoly::from_f64(&[1.0, 0.0, 2.0]), 1e-9).is_err());
        assert!(HyperellipticCurve::from_poly(&ZPoly::from_f64(&[1.0, 0.0, 0.0, 2.0]), 1e-9).is_err());
    }
}
