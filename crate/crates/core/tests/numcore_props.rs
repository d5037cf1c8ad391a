use posdiff::num::{chebyshev_nodes, DenseMatrix};
use posdiff::{HyperellipticCurve, Scalar, ZPoly};
use proptest::prelude::*;

fn poly_strategy(max_degree: usize) -> impl Strategy<Value = ZPoly> {
    prop::collection::vec(-3.0f64..3.0, 1..=max_degree + 1).prop_map(|c| ZPoly::from_f64(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interpolation_recovers_polynomial(p in poly_strategy(7), extra in 0usize..4) {
        let bound = p.degree().unwrap_or(0);
        let nodes = chebyshev_nodes(bound + 1 + extra, &Scalar::from_i64(-2), &Scalar::from_i64(2));
        let samples: Vec<(Scalar, Scalar)> = nodes.iter().map(|z| (z.clone(), p.eval(z).unwrap())).collect();
        let fit = ZPoly::interpolate(&samples, bound, 1e-12).unwrap();
        prop_assert!(fit.consistent);
        let scale = p.max_coeff().max(Scalar::one());
        prop_assert!((&fit.poly - &p).max_coeff() <= scale * 1e-10);
    }

    #[test]
    fn exact_division_undoes_multiplication(p in poly_strategy(5), q in poly_strategy(3)) {
        prop_assume!(q.leading().abs() > 0.1);
        let (quot, rem) = (&p * &q).div_exact(&q).unwrap();
        let scale = (&p * &q).max_coeff().max(Scalar::one());
        prop_assert!(rem <= scale.clone() * 1e-25);
        prop_assert!((&quot - &p).max_coeff() <= scale * 1e-20);
    }

    #[test]
    fn product_degree_adds(p in poly_strategy(5), q in poly_strategy(5)) {
        prop_assume!(p.leading().abs() > 1e-3 && q.leading().abs() > 1e-3);
        prop_assert_eq!((&p * &q).degree(), Some(p.degree().unwrap() + q.degree().unwrap()));
    }

    #[test]
    fn product_evaluates_pointwise(p in poly_strategy(6), q in poly_strategy(6), z in -3.0f64..3.0) {
        let z = Scalar::from_f64(z);
        let lhs = (&p * &q).eval(&z).unwrap();
        let rhs = p.eval(&z).unwrap() * q.eval(&z).unwrap();
        prop_assert!((&lhs - &rhs).abs() <= lhs.abs().max(Scalar::one()) * 1e-28);
    }

    #[test]
    fn char_poly_of_companion(c in prop::collection::vec(-4.0f64..4.0, 1..6)) {
        // companion matrix of w^m + c_{m-1} w^{m-1} + ... + c_0
        let m = c.len();
        let mut a = DenseMatrix::zeros(m, m);
        for i in 1..m {
            a.set(i, i - 1, Scalar::one());
        }
        for (i, ci) in c.iter().enumerate() {
            a.set(i, m - 1, Scalar::from_f64(-ci));
        }
        let p = a.char_poly();
        for (pi, ci) in p.iter().zip(&c) {
            prop_assert!((pi - Scalar::from_f64(*ci)).abs() < 1e-25);
        }
    }

    #[test]
    fn decimal_text_round_trip(x in -1e12f64..1e12) {
        let s = Scalar::from_f64(x) / 7i64;
        prop_assert_eq!(Scalar::parse(&s.to_decimal()).unwrap(), s);
    }

    #[test]
    fn monic_odd_polynomials_are_curves(c in prop::collection::vec(-5.0f64..5.0, 3..=3)) {
        let mut coeffs = c.clone();
        coeffs.push(1.0);
        let curve = HyperellipticCurve::from_poly(&ZPoly::from_f64(&coeffs), 1e-12).unwrap();
        prop_assert_eq!(curve.genus(), 1);
        prop_assert_eq!(curve.poly(), ZPoly::from_f64(&coeffs));
    }
}

#[test]
fn known_interpolation_case() {
    // −F(z) for F = z^3 + 3z^2 + 2z + 1 from samples
    let f = ZPoly::from_f64(&[-1.0, -2.0, -3.0, -1.0]);
    let nodes = chebyshev_nodes(7, &Scalar::from_i64(-2), &Scalar::from_i64(2));
    let samples: Vec<_> = nodes.iter().map(|z| (z.clone(), f.eval(z).unwrap())).collect();
    let fit = ZPoly::interpolate(&samples, 3, 1e-12).unwrap();
    assert!((&fit.poly - &f).max_coeff() < 1e-12);
}

#[test]
fn underdetermined_interpolation_is_flagged() {
    let f = ZPoly::from_f64(&[0.0, 0.0, 0.0, 0.0, 1.0]);
    let nodes = chebyshev_nodes(8, &Scalar::from_i64(-2), &Scalar::from_i64(2));
    let samples: Vec<_> = nodes.iter().map(|z| (z.clone(), f.eval(z).unwrap())).collect();
    let fit = ZPoly::interpolate(&samples, 3, 1e-9).unwrap();
    assert!(!fit.consistent);
}
