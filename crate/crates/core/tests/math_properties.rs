use num_complex::Complex64;
use proptest::prelude::*;
use turbulink::math::{gamma_fn, gauss_hermite_rule, hermite_poly, TruncatedBivariateSeries};

fn series(max_i: usize, max_j: usize, c: &[i8]) -> TruncatedBivariateSeries {
    TruncatedBivariateSeries::from_fn(max_i, max_j, |i, j| {
        Complex64::new(c[i * (max_j + 1) + j] as f64, c[(i + j) % c.len()] as f64)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn hermite_rule_integrates_monomials(n in 2usize..=64, k in 0usize..128) {
        prop_assume!(k < 2 * n);
        let rule = gauss_hermite_rule(n).unwrap();
        let got = rule.integrate(|x| x.powi(k as i32));
        let scale: f64 = rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .map(|(x, w)| w * x.abs().powi(k as i32))
            .sum();
        if k % 2 == 1 {
            prop_assert!(got.abs() <= 1e-12 * scale);
        } else {
            // Gamma((k+1)/2) through its recurrence from sqrt(pi)
            let want = (2..=k)
                .step_by(2)
                .fold(std::f64::consts::PI.sqrt(), |acc, j| acc * (j as f64 - 1.0) / 2.0);
            prop_assert!((got / want - 1.0).abs() <= 1e-12, "n={} k={}: {} vs {}", n, k, got, want);
        }
    }

    #[test]
    fn hermite_three_term_recurrence(n in 1usize..=20, x in -5.0f64..5.0) {
        let h = |m| hermite_poly(m, x).unwrap();
        let lhs = h(n + 1);
        let rhs = 2.0 * x * h(n) - 2.0 * n as f64 * h(n - 1);
        let scale = lhs.abs().max((2.0 * x * h(n)).abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn gamma_functional_equation(x in -20.0f64..20.0) {
        prop_assume!(x > 0.0 || (x - x.round()).abs() > 1e-3);
        prop_assume!((x + 1.0 - (x + 1.0).round()).abs() > 1e-3 || x + 1.0 > 0.0);
        let a = gamma_fn(x + 1.0).unwrap();
        let b = x * gamma_fn(x).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs(), "{} {}", a, b);
    }

    #[test]
    fn series_product_commutes_and_associates(
        mi in 0usize..4,
        mj in 0usize..4,
        a in prop::collection::vec(-4i8..=4, 16),
        b in prop::collection::vec(-4i8..=4, 16),
        c in prop::collection::vec(-4i8..=4, 16),
    ) {
        let (x, y, z) = (series(mi, mj, &a), series(mi, mj, &b), series(mi, mj, &c));
        prop_assert_eq!(x.product(&y), y.product(&x));
        prop_assert_eq!(x.product(&y).product(&z), x.product(&y.product(&z)));
    }
}
