use proptest::prelude::*;
use shla::chart::builtin_flat_torus;
use shla::expr::Expr;
use shla::oracle::grassmann::{brute_force, grassmann_is_coisotropic, sample, GrassmannPoint};
use shla::oracle::{graph_coisotropy_defect, master_residual, omega_u_closedness, thickened_sample, validity_radius, zero_section_kernel};
use shla::randgen::{curved_chart, form, form_in};
use shla::sampling::rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn thickened_form_is_closed_with_kernel_of_rank_r(seed in 0u64..10_000, r in 1usize..=3) {
        let c = curved_chart(1, r, seed);
        for tp in thickened_sample(&c, 3, 0.2, seed) {
            prop_assert!(omega_u_closedness(&c, &tp) < 1e-6);
            prop_assert_eq!(zero_section_kernel(&c, &tp.point), r);
        }
    }

    #[test]
    fn graph_test_agrees_with_master_residual(seed in 0u64..10_000) {
        let c = curved_chart(1, 2, seed);
        let pts = c.sample(16, seed);
        let s = form(&c, 1, 2, seed + 1);
        let radius = validity_radius(&c, &s, &pts, 1.0).unwrap();
        let s = s.scale(&Expr::frac(((radius * 0.4) * 1e3).round() as i64, 1000));
        let d = graph_coisotropy_defect(&c, &s, &pts).unwrap();
        let m = master_residual(&c, &s, &pts).unwrap();
        prop_assert_eq!(d < 1e-8, m < 1e-7, "defect {} master {}", d, m);
    }

    #[test]
    fn transverse_only_sections_are_coisotropic(seed in 0u64..10_000) {
        let c = builtin_flat_torus();
        let s = form_in(&["y1"], 2, 1, 3, seed);
        let pts = c.sample(16, seed);
        prop_assert!(graph_coisotropy_defect(&c, &s, &pts).unwrap() < 1e-8);
        prop_assert!(master_residual(&c, &s, &pts).unwrap() < 1e-7);
    }

    #[test]
    fn grassmann_condition_agrees_with_brute_force(seed in any::<u64>(), n in 1usize..=4, k in 0usize..=4) {
        prop_assume!(k <= n);
        let mut g = rng(seed);
        for _ in 0..20 {
            let gp = sample(n, k, &mut g);
            prop_assert_eq!(grassmann_is_coisotropic(&gp).0, brute_force(&gp).0);
        }
    }
}

#[test]
fn model_subspace_is_coisotropic_in_every_dimension() {
    for n in 1..=5 {
        for k in 0..=n {
            let gp = GrassmannPoint::zero(n, k);
            assert!(grassmann_is_coisotropic(&gp).0 && brute_force(&gp).0, "n={n} k={k}");
        }
    }
}
