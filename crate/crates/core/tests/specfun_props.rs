use flrw_blowup::specfun::{sphere_integral, BesselContext, Phi};
use flrw_blowup::{ModelParams64, Nonlinearity};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_is_even_in_order(nu in 0.0f64..3.0, t in 0.1f64..30.0) {
        let a = BesselContext::new(nu).bessel_k(t).unwrap();
        let b = BesselContext::new(-nu).bessel_k(t).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn bessel_identities_hold(nu in 0.0f64..3.0, t in 0.1f64..30.0) {
        let r = BesselContext::new(nu).identity_residuals(t).unwrap();
        prop_assert!(r.ode <= 1e-8, "ode {}", r.ode);
        prop_assert!(r.recurrence <= 1e-8, "recurrence {}", r.recurrence);
    }

    #[test]
    fn phi_is_positive_and_decreasing(
        n in 2u32..=4,
        alpha in 0.0f64..0.95,
        mu in 0.0f64..3.0,
        t in 1.0f64..20.0,
        r in 0.0f64..10.0,
    ) {
        let m = ModelParams64::new(n, alpha, mu, 2.0, 0.1, 1.0, Nonlinearity::TimeDerivative);
        let phi = Phi::new(&m).unwrap();
        prop_assert!(phi.phi(t, r).unwrap() > 0.0);
        prop_assert!(phi.phi_t(t, r).unwrap() < 0.0);
    }

    #[test]
    fn sphere_integral_is_a_laplacian_eigenfunction(n in 2u32..=3, r in 0.2f64..8.0) {
        let f = |x: f64| sphere_integral::<f64>(n, x).unwrap();
        let lap = |h: f64| {
            let (f0, fp, fm) = (f(r), f(r + h), f(r - h));
            (fp - 2.0 * f0 + fm) / (h * h) + (n as f64 - 1.0) / r * (fp - fm) / (2.0 * h)
        };
        // Richardson step removes the O(h^2) term
        let h = 0.02 * r.min(1.0);
        let est = (4.0 * lap(h) - lap(2.0 * h)) / 3.0;
        let f0 = f(r);
        prop_assert!((est - f0).abs() <= 1e-8 * f0, "{} vs {}", est, f0);
    }

    #[test]
    fn ratio_bound_dominates_samples(nu in -2.0f64..3.0, alpha in 0.0f64..0.9, t in 1.0f64..1e4) {
        let ctx = BesselContext::new(nu);
        let m = ctx.ratio_bound(1.0, alpha).unwrap();
        let s = t.powf(1.0 - alpha) / (1.0 - alpha);
        prop_assert!(ctx.ratio(s).unwrap() <= m, "ratio {} > {}", ctx.ratio(s).unwrap(), m);
    }
}
