use proptest::prelude::*;
use rand::SeedableRng;

use qrf_core::harness::builtin;
use qrf_core::linalg::{check_positive, DensityState, Operator};
use qrf_core::observables::canonical_pvm;
use qrf_core::relativisation::{
    g_twirl, gamma_restrict, h_twirl, random_complex, random_hermitian, yen_E_on_G, yen_x, RelativisationContext,
    SampleRng,
};
use qrf_core::representations::{restricted_invariance_check, subgroup_invariance_deviation};

fn ctx(name: &str, base: usize) -> RelativisationContext {
    let s = builtin(name).unwrap();
    let base = base % s.frame_action.n_points();
    RelativisationContext::new(
        s.system_rep(None).unwrap(),
        canonical_pvm(&s.frame_action).unwrap(),
        base,
    )
    .unwrap()
}

fn spaces() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["z4", "s3", "d4"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn yen_is_linear_and_positive(name in spaces(), base in 0usize..4, seed: u64, s in -2.0f64..2.0) {
        let c = ctx(name, base);
        let mut rng = SampleRng::seed_from_u64(seed);
        let a = h_twirl(c.system_rep(), c.stabiliser(), &random_complex(c.system_dim(), &mut rng)).unwrap();
        let b = h_twirl(c.system_rep(), c.stabiliser(), &random_complex(c.system_dim(), &mut rng)).unwrap();
        let lhs = yen_x(&c, &(&a + &b.scale(s))).unwrap().operator;
        let rhs = &yen_x(&c, &a).unwrap().operator + &yen_x(&c, &b).unwrap().operator.scale(s);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        let positive = &a * &a.adjoint();
        prop_assert!(check_positive(&yen_x(&c, &positive).unwrap().operator).holds);
    }

    #[test]
    fn yen_e_lands_in_invariants(name in spaces(), seed: u64) {
        let c = ctx(name, 0);
        let a = random_complex(c.system_dim(), &mut SampleRng::seed_from_u64(seed));
        let t = yen_E_on_G(&c, &a).unwrap();
        prop_assert!(t.invariance_residual < 1e-9);
        prop_assert!(c.joint_rep().invariance_residual(&t.operator) < 1e-9);
    }

    #[test]
    fn gamma_is_unital_and_positive(name in spaces(), seed: u64, y in 0usize..4) {
        let c = ctx(name, 0);
        let n = c.n_points();
        let mut rng = SampleRng::seed_from_u64(seed);
        let w = random_complex(n, &mut rng);
        let ww = &w * &w.adjoint();
        let omega = DensityState::new(ww.scale(1.0 / ww.trace().re)).unwrap();
        let joint = c.system_dim() * n;
        let unit = gamma_restrict(&omega, &Operator::identity(joint)).unwrap();
        prop_assert!(unit.max_abs_diff(&Operator::identity(c.system_dim())) < 1e-10);
        let t = random_complex(joint, &mut rng);
        let image = gamma_restrict(&omega, &(&t * &t.adjoint())).unwrap();
        prop_assert!(check_positive(&image).holds);
        // localised restriction of a relativised twirl is the translated twirl
        let a = h_twirl(c.system_rep(), c.stabiliser(), &random_hermitian(c.system_dim(), &mut rng)).unwrap();
        let y = y % n;
        let r = gamma_restrict(&DensityState::basis(n, y), &yen_x(&c, &a).unwrap().operator).unwrap();
        let g = c.frame().action().transporter(c.base_x(), y).unwrap();
        prop_assert!(r.distance(&c.system_rep().conjugate(g, &a)) < 1e-9);
    }

    #[test]
    fn twirls_are_idempotent_projections(name in spaces(), seed: u64) {
        let c = ctx(name, 1);
        let a = random_complex(c.system_dim(), &mut SampleRng::seed_from_u64(seed));
        let h = h_twirl(c.system_rep(), c.stabiliser(), &a).unwrap();
        prop_assert!(h_twirl(c.system_rep(), c.stabiliser(), &h).unwrap().max_abs_diff(&h) < 1e-12);
        prop_assert!(restricted_invariance_check(c.system_rep(), c.stabiliser(), &h).unwrap());
        let g = g_twirl(c.system_rep(), &a).unwrap();
        prop_assert!(g_twirl(c.system_rep(), &h).unwrap().max_abs_diff(&g) < 1e-12);
        prop_assert!(c.system_rep().generator_residual(&g) < 1e-12);
    }

    #[test]
    fn invariance_gate_matches_full_deviation(name in spaces(), seed: u64, scale in 0.0f64..1e-6) {
        let c = ctx(name, 0);
        let mut rng = SampleRng::seed_from_u64(seed);
        let base = h_twirl(c.system_rep(), c.stabiliser(), &random_hermitian(c.system_dim(), &mut rng)).unwrap();
        // perturbations straddling the threshold
        let a = &base + &random_hermitian(c.system_dim(), &mut rng).scale(scale * 1e-3);
        let dev = subgroup_invariance_deviation(c.system_rep(), c.stabiliser(), &a).unwrap();
        let gate = restricted_invariance_check(c.system_rep(), c.stabiliser(), &a).unwrap();
        prop_assert_eq!(gate, dev <= 1e-9);
        prop_assert_eq!(yen_x(&c, &a).is_ok(), gate);
        // residual over generators vanishes with the full residual
        let full = c.system_rep().invariance_residual(&a);
        let gens = c.system_rep().generator_residual(&a);
        prop_assert!(gens <= full + 1e-15);
        prop_assert!(full <= 24.0 * gens + 1e-12);
    }
}
