use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{working_epsilon, Scalar};

/// Arguments closer than this to a lattice point are rejected.
pub const LATTICE_MARGIN: f64 = 1e-6;

/// `℘` and `ζ` for a rectangular lattice, from the invariants of
/// `℘'^2 = 4℘^3 − g2 ℘ − g3` with positive discriminant.
///
/// Evaluation uses the Fourier expansions in the nome `q = exp(−π ω3/ω1)`;
/// the half-periods come from the arithmetic-geometric mean.
#[derive(Clone, Debug)]
pub struct WeierstrassContext {
    g2: Scalar,
    g3: Scalar,
    roots: [Scalar; 3],
    omega1: Scalar,
    omega3: Scalar,
    eta1: Scalar,
    /// `q^{2k} / (1 − q^{2k})` for `k = 1..`.
    weights: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Invariants {
    pub g2: Scalar,
    pub g3: Scalar,
}

impl Default for Invariants {
    fn default() -> Self {
        Invariants {
            g2: Scalar::from_i64(4),
            g3: Scalar::zero(),
        }
    }
}

impl WeierstrassContext {
    pub fn new(g2: &Scalar, g3: &Scalar) -> Result<Self> {
        if !g2.is_finite() || !g3.is_finite() {
            return Err(Error::NonFinite);
        }
        let disc = g2.powi(3) - g3.square() * 27i64;
        if disc <= 0.0 {
            return Err(Error::Domain(format!(
                "invariants g2 = {}, g3 = {} do not give a rectangular lattice (discriminant {})",
                g2.to_f64(),
                g3.to_f64(),
                disc.to_f64()
            )));
        }
        // t^3 + p t + q = 0 with p = −g2/4, q = −g3/4; three real roots.
        let p = g2 / -4i64;
        let q = g3 / -4i64;
        let amp = (&p / -3i64).sqrt() * 2i64;
        let phase = ((&q * 3i64 / (&p * 2i64)) * (Scalar::from_i64(-3) / &p).sqrt()).acos() / 3i64;
        let third = Scalar::pi() * 2i64 / 3i64;
        let mut roots = [
            &amp * phase.cos(),
            &amp * (&phase - &third).cos(),
            &amp * (&phase - &third * 2i64).cos(),
        ];
        roots.sort_by(|a, b| b.total_cmp(a));
        let [e1, e2, e3] = &roots;
        let pi = Scalar::pi();
        let omega1 = &pi / ((e1 - e3).sqrt().agm(&(e1 - e2).sqrt()) * 2i64);
        let omega3 = &pi / ((e1 - e3).sqrt().agm(&(e2 - e3).sqrt()) * 2i64);
        let nome = (-(&pi * &omega3 / &omega1)).exp();
        let q2 = nome.square();
        let eps = working_epsilon();
        let mut weights = Vec::new();
        let mut power = q2.clone();
        loop {
            let w = &power / (Scalar::one() - &power);
            let k = weights.len() + 1;
            if w.clone() * (k * k) as i64 <= eps.clone() * 1e-3 {
                break;
            }
            weights.push(w);
            power *= &q2;
        }
        let sum: Scalar = weights.iter().enumerate().map(|(i, w)| w * (i as i64 + 1)).sum();
        let eta1 = pi.square() / (&omega1 * 12i64) * (Scalar::one() - sum * 24i64);
        Ok(WeierstrassContext {
            g2: g2.clone(),
            g3: g3.clone(),
            roots,
            omega1,
            omega3,
            eta1,
            weights,
        })
    }

    /// `g2 = 4, g3 = 0`.
    pub fn lemniscatic() -> Self {
        Self::new(&Scalar::from_i64(4), &Scalar::zero()).expect("lemniscatic invariants are valid")
    }

    pub fn invariants(&self) -> Invariants {
        Invariants {
            g2: self.g2.clone(),
            g3: self.g3.clone(),
        }
    }

    pub fn g2(&self) -> &Scalar {
        &self.g2
    }

    pub fn g3(&self) -> &Scalar {
        &self.g3
    }

    /// `e1 > e2 > e3`.
    pub fn roots(&self) -> &[Scalar; 3] {
        &self.roots
    }

    pub fn real_halfperiod(&self) -> &Scalar {
        &self.omega1
    }

    /// `|ω3|` for the imaginary half-period `ω3`.
    pub fn imag_halfperiod(&self) -> &Scalar {
        &self.omega3
    }

    /// `ζ(ω1)`.
    pub fn eta1(&self) -> &Scalar {
        &self.eta1
    }

    /// Distance from `x` to the nearest real lattice point `2 ω1 k`.
    pub fn lattice_distance(&self, x: &Scalar) -> Scalar {
        let period = &self.omega1 * 2i64;
        let k = (x / &period).to_f64().round();
        (x - &period * Scalar::from_f64(k)).abs()
    }

    pub fn check_off_lattice(&self, x: &Scalar) -> Result<()> {
        let d = self.lattice_distance(x);
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        if d < LATTICE_MARGIN {
            return Err(Error::Lattice {
                x: x.to_f64(),
                distance: d.to_f64(),
            });
        }
        Ok(())
    }

    fn angle(&self, x: &Scalar) -> Scalar {
        Scalar::pi() * x / &self.omega1
    }

    pub fn zeta(&self, x: &Scalar) -> Result<Scalar> {
        self.check_off_lattice(x)?;
        let pi = Scalar::pi();
        let t = self.angle(x);
        let mut series = Scalar::zero();
        for (i, w) in self.weights.iter().enumerate() {
            series += w * (&t * (i as i64 + 1)).sin();
        }
        let half = &pi / (&self.omega1 * 2i64);
        let value = &self.eta1 * x / &self.omega1 + &half * (&t / 2i64).cot() + series * pi * 2i64 / &self.omega1;
        value.finite()
    }

    pub fn wp(&self, x: &Scalar) -> Result<Scalar> {
        self.check_off_lattice(x)?;
        let pi = Scalar::pi();
        let t = self.angle(x);
        let mut series = Scalar::zero();
        for (i, w) in self.weights.iter().enumerate() {
            let k = i as i64 + 1;
            series += w * k * (&t * k).cos();
        }
        let half = &pi / (&self.omega1 * 2i64);
        let value = -(&self.eta1 / &self.omega1) + half.square() / (&t / 2i64).sin().square() - series * pi.square() * 2i64 / self.omega1.square();
        value.finite()
    }

    pub fn wp_prime(&self, x: &Scalar) -> Result<Scalar> {
        self.check_off_lattice(x)?;
        let pi = Scalar::pi();
        let t = self.angle(x);
        let mut series = Scalar::zero();
        for (i, w) in self.weights.iter().enumerate() {
            let k = i as i64 + 1;
            series += w * (k * k) * (&t * k).sin();
        }
        let half = &pi / (&self.omega1 * 2i64);
        let s = (&t / 2i64).sin();
        let value = -(half.powi(3) * 2i64 * (&t / 2i64).cos() / s.powi(3)) + series * pi.powi(3) * 2i64 / self.omega1.powi(3);
        value.finite()
    }

    /// `℘'^2 − (4℘^3 − g2 ℘ − g3)` at `x`.
    pub fn ode_residual(&self, x: &Scalar) -> Result<Scalar> {
        let p = self.wp(x)?;
        let dp = self.wp_prime(x)?;
        Ok(dp.square() - (p.powi(3) * 4i64 - &self.g2 * &p - &self.g3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> Scalar {
        Scalar::from_f64(x)
    }

    #[test]
    fn lemniscatic_roots_and_period() {
        let ctx = WeierstrassContext::lemniscatic();
        let [e1, e2, e3] = ctx.roots();
        assert!((e1 - 1i64).abs() < 1e-30);
        assert!(e2.abs() < 1e-30);
        assert!((e3 + 1i64).abs() < 1e-30);
        // ω1 = Γ(1/4)^2 / (4 √(2π)) for g2 = 4
        assert!((ctx.real_halfperiod() - s(1.3110287771460599)).abs() < 1e-15);
        assert!((ctx.real_halfperiod() - ctx.imag_halfperiod()).abs() < 1e-30);
        assert!((ctx.wp(ctx.real_halfperiod()).unwrap() - e1).abs() < 1e-28);
    }

    #[test]
    fn laurent_leading_term() {
        let ctx = WeierstrassContext::lemniscatic();
        let x = s(1e-3);
        let diff = ctx.wp(&x).unwrap() - x.square().recip();
        assert!(diff.abs() <= ctx.g2() * x.square() / 20i64 * (1.0 + 1e-3));
    }

    #[test]
    fn zeta_derivative_is_minus_wp() {
        let ctx = WeierstrassContext::new(&s(7.0), &s(-2.5)).unwrap();
        let h = s(1e-12);
        for x in [0.3, 0.7, 1.1, -0.45, 2.2] {
            let x = s(x);
            let d = (ctx.zeta(&(&x + &h)).unwrap() - ctx.zeta(&(&x - &h)).unwrap()) / (&h * 2i64);
            assert!((d + ctx.wp(&x).unwrap()).abs() < 1e-12);
            let dp = (ctx.wp(&(&x + &h)).unwrap() - ctx.wp(&(&x - &h)).unwrap()) / (&h * 2i64);
            assert!((dp - ctx.wp_prime(&x).unwrap()).abs() < 1e-12);
            assert!(ctx.ode_residual(&x).unwrap().abs() < 1e-25);
        }
    }

    #[test]
    fn parity_and_quasi_periodicity() {
        let ctx = WeierstrassContext::lemniscatic();
        let x = s(0.37);
        assert!((ctx.zeta(&x).unwrap() + ctx.zeta(&-&x).unwrap()).abs() < 1e-30);
        assert!((ctx.wp(&x).unwrap() - ctx.wp(&-&x).unwrap()).abs() < 1e-30);
        let period = ctx.real_halfperiod() * 2i64;
        let shifted = ctx.zeta(&(&x + &period)).unwrap() - ctx.zeta(&x).unwrap();
        assert!((shifted - ctx.eta1() * 2i64).abs() < 1e-28);
    }

    #[test]
    fn lattice_points_rejected() {
        let ctx = WeierstrassContext::lemniscatic();
        assert!(matches!(ctx.zeta(&Scalar::zero()), Err(Error::Lattice { .. })));
        let near = ctx.real_halfperiod() * 2i64 + s(1e-8);
        assert!(matches!(ctx.wp(&near), Err(Error::Lattice { .. })));
    }

    #[test]
    fn complex_lattice_rejected() {
        assert!(WeierstrassContext::new(&s(0.0), &s(1.0)).is_err());
    }
}
