mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rest_state_is_preserved(b in basin()) {
        for scheme in SCHEMES {
            let dev = rest_state_deviation(&b, scheme, 100);
            prop_assert!(dev <= 1e-12, "{scheme}: {dev:e}");
        }
    }

    #[test]
    fn unit_tracer_stays_unit(b in basin()) {
        for scheme in SCHEMES {
            let dev = unit_tracer_deviation(&b, scheme, 50);
            prop_assert!(dev <= 1e-10, "{scheme}: {dev:e}");
        }
    }

    #[test]
    fn surface_transfer_closes(b in basin(), u in prop::collection::vec(-2.0f64..2.0, 1..7)) {
        prop_assert!(surface_transfer_defect(&b, &u) <= 1e-12);
    }

    #[test]
    fn free_surface_matrix_is_symmetric(
        t in prop::collection::vec(0.0f64..50.0, 4..30),
        l in any::<bool>(),
        r in any::<bool>(),
    ) {
        prop_assert!(free_surface_asymmetry(&t, l, r) <= 1e-13);
    }

    #[test]
    fn thomas_matches_dense(sys in tridiagonal(8)) {
        let x = sys.solve().unwrap();
        let y = dense_solve(&sys);
        prop_assert!(max_diff(&x, &y) <= 1e-10);
        prop_assert!(sys.residual(&x) <= 1e-10 * (max_abs(&sys.rhs) + 1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn closed_basin_conserves_volume(b in basin()) {
        for scheme in SCHEMES {
            let drift = closed_basin_mass_drift(&b, scheme, 1000);
            prop_assert!(drift <= 1e-10, "{scheme}: {drift:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tracer_stays_bounded_and_conserved(
        b in basin(),
        rho in prop::collection::vec(0.0f64..1.0, 2..9),
        dt in prop::sample::select(vec![0.5, 5.0, 60.0]),
    ) {
        for scheme in SCHEMES {
            let (over, drift) = tracer_bounds_and_mass(&b, &rho, scheme, 50, dt);
            prop_assert!(over <= 1e-12, "{scheme}: overshoot {over:e}");
            prop_assert!(drift <= 1e-10, "{scheme}: mass drift {drift:e}");
        }
    }
}
