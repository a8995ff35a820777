use bosonstar::extension::{poisson_extend, quadratic_form_with, TGrid};
use bosonstar::linearization::{assemble_l_plus_at, sqrt_laplacian_sector};
use bosonstar::potentials::newton_potential;
use bosonstar::transform::{apply_half_laplacian, forward_transform, inverse_transform};
use bosonstar::{inner_product, mass, sup_distance, RadialGrid, RadialProfile};
use proptest::prelude::*;

fn grid() -> RadialGrid {
    RadialGrid::new(128, 20.0).unwrap()
}

fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, 0.0..4.0f64, 0.6..2.0f64), 1..4)
}

fn profile(g: &RadialGrid, b: &[(f64, f64, f64)]) -> RadialProfile {
    RadialProfile::from_fn(g, |r| b.iter().map(|(a, c, w)| a * (-((r - c) / w).powi(2)).exp()).sum()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip(b in bumps()) {
        let f = profile(&grid(), &b);
        let back = inverse_transform(&forward_transform(&f));
        prop_assert!(sup_distance(&f, &back) <= 1e-12 * f.sup_norm().max(1e-300));
    }

    #[test]
    fn half_laplacian_is_positive(b in bumps()) {
        let f = profile(&grid(), &b);
        let e = inner_product(&f, &apply_half_laplacian(&f)).unwrap();
        prop_assert!(e >= 0.0);
    }

    #[test]
    fn mass_is_quadratic(b in bumps(), c in 0.1..10.0f64) {
        let f = profile(&grid(), &b);
        let m = mass(&f);
        prop_assert!((mass(&f.scaled(c)) - c * c * m).abs() <= 1e-12 * c * c * m);
    }

    #[test]
    fn shifted_potential_is_monotone(b in bumps()) {
        let f = profile(&grid(), &b);
        let p = newton_potential(&f);
        let phi = p.phi().values();
        let tol = 1e-9 * p.v0();
        prop_assert!(phi[0] >= -tol);
        prop_assert!(phi.windows(2).all(|w| w[1] >= w[0] - tol));
    }

    #[test]
    fn sector_operators_are_weighted_symmetric(b in bumps(), ell in 0usize..4) {
        let g = grid();
        let u = profile(&g, &b);
        prop_assert!(sqrt_laplacian_sector(ell, &g).unwrap().symmetry_defect() <= 1e-10);
        prop_assert!(assemble_l_plus_at(ell, &u, 1.0).unwrap().symmetry_defect() <= 1e-10);
    }

    #[test]
    fn extension_trace_and_form_split(b in bumps()) {
        let g = grid();
        let u = profile(&g, &b);
        let tg = TGrid::new(32, 10.0).unwrap();
        let ext = poisson_extend(&u, tg);
        let trace = ext.trace();
        prop_assert_eq!(trace.values(), u.values());
        let coef = newton_potential(&u).phi().map(|_, v| v - 1.0);
        let form = quadratic_form_with(&coef, &ext).unwrap();
        prop_assert_eq!(form.value, form.dirichlet_part + form.boundary_part);
        prop_assert!(form.dirichlet_part >= 0.0);
    }
}
