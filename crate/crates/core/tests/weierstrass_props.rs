use posdiff::lame::WeierstrassContext;
use posdiff::Scalar;
use proptest::prelude::*;

/// Invariants with positive discriminant `g2^3 − 27 g3^2`, so the lattice is rectangular.
fn invariants() -> impl Strategy<Value = (f64, f64)> {
    (0.5f64..12.0, -0.95f64..0.95).prop_map(|(g2, t)| (g2, t * (g2.powi(3) / 27.0).sqrt()))
}

fn context(g2: f64, g3: f64) -> WeierstrassContext {
    WeierstrassContext::new(&Scalar::from_f64(g2), &Scalar::from_f64(g3)).unwrap()
}

/// A point at fraction `f` of the real period, kept away from the lattice.
fn point(ctx: &WeierstrassContext, f: f64) -> Scalar {
    ctx.real_halfperiod() * Scalar::from_f64(2.0 * f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn zeta_derivative_is_minus_wp((g2, g3) in invariants(), f in 0.05f64..0.95) {
        let ctx = context(g2, g3);
        let x = point(&ctx, f);
        let h = Scalar::from_f64(1e-10);
        let d = (ctx.zeta(&(&x + &h)).unwrap() - ctx.zeta(&(&x - &h)).unwrap()) / (&h * 2i64);
        let p = ctx.wp(&x).unwrap();
        prop_assert!((d + &p).abs() <= p.abs().max(Scalar::one()) * 1e-8);
    }

    #[test]
    fn wp_solves_its_ode((g2, g3) in invariants(), f in 0.05f64..0.95) {
        let ctx = context(g2, g3);
        let x = point(&ctx, f);
        let scale = ctx.wp(&x).unwrap().abs().max(Scalar::one()).powi(3);
        prop_assert!(ctx.ode_residual(&x).unwrap().abs() <= scale * 1e-25);
    }

    #[test]
    fn parity((g2, g3) in invariants(), f in 0.05f64..0.95) {
        let ctx = context(g2, g3);
        let x = point(&ctx, f);
        let neg = -x.clone();
        let scale = ctx.wp(&x).unwrap().abs().max(Scalar::one());
        prop_assert!((ctx.zeta(&x).unwrap() + ctx.zeta(&neg).unwrap()).abs() <= scale.clone() * 1e-28);
        prop_assert!((ctx.wp(&x).unwrap() - ctx.wp(&neg).unwrap()).abs() <= scale.clone() * 1e-28);
        prop_assert!((ctx.wp_prime(&x).unwrap() + ctx.wp_prime(&neg).unwrap()).abs() <= scale.powi(2) * 1e-28);
    }

    #[test]
    fn homogeneity((g2, g3) in invariants(), f in 0.05f64..0.95, lambda in 0.5f64..2.0) {
        // ℘(λx; λ^-4 g2, λ^-6 g3) = λ^-2 ℘(x; g2, g3)
        let ctx = context(g2, g3);
        let scaled = context(g2 / lambda.powi(4), g3 / lambda.powi(6));
        let x = point(&ctx, f);
        let l = Scalar::from_f64(lambda);
        let lhs = scaled.wp(&(&x * &l)).unwrap();
        let rhs = ctx.wp(&x).unwrap() / l.square();
        prop_assert!((&lhs - &rhs).abs() <= rhs.abs().max(Scalar::one()) * 1e-14);
    }

    #[test]
    fn roots_are_half_period_values((g2, g3) in invariants()) {
        let ctx = context(g2, g3);
        let e1 = ctx.roots().iter().cloned().fold(Scalar::from_f64(f64::MIN), Scalar::max);
        let p = ctx.wp(ctx.real_halfperiod()).unwrap();
        prop_assert!((p - &e1).abs() <= e1.abs().max(Scalar::one()) * 1e-25);
    }
}
