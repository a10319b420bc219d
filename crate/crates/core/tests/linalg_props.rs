use proptest::prelude::*;
use rand::SeedableRng;

use qrf_core::linalg::{hermitian_eigen, operator_norm, tensor, top_eigenvector, trace_of_product, Operator, C64};
use qrf_core::relativisation::{random_complex, random_hermitian, SampleRng};

fn ops(seed: u64, dims: &[usize]) -> Vec<Operator> {
    let mut rng = SampleRng::seed_from_u64(seed);
    dims.iter().map(|&d| random_complex(d, &mut rng)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kronecker_mixed_product(seed: u64, p in 1usize..4, q in 1usize..4) {
        let v = ops(seed, &[p, p, q, q]);
        let lhs = &tensor(&v[0], &v[2]).unwrap() * &tensor(&v[1], &v[3]).unwrap();
        let rhs = tensor(&(&v[0] * &v[1]), &(&v[2] * &v[3])).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        let adj = tensor(&v[0], &v[2]).unwrap().adjoint();
        prop_assert!(adj.max_abs_diff(&tensor(&v[0].adjoint(), &v[2].adjoint()).unwrap()) < 1e-15);
        let tr = tensor(&v[0], &v[2]).unwrap().trace();
        prop_assert!((tr - v[0].trace() * v[2].trace()).norm() < 1e-10);
    }

    #[test]
    fn norms_behave(seed: u64, d in 1usize..6) {
        let v = ops(seed, &[d, d]);
        let (a, b) = (&v[0], &v[1]);
        prop_assert!(operator_norm(&(a * b)) <= operator_norm(a) * operator_norm(b) + 1e-10);
        prop_assert!(operator_norm(&(a + b)) <= operator_norm(a) + operator_norm(b) + 1e-10);
        prop_assert!((operator_norm(&a.adjoint()) - operator_norm(a)).abs() < 1e-10);
        // C*-identity
        let n = operator_norm(a);
        prop_assert!((operator_norm(&(&a.adjoint() * a)) - n * n).abs() < 1e-9 * (1.0 + n * n));
    }

    #[test]
    fn hermitian_eigen_reconstructs(seed: u64, d in 1usize..7) {
        let mut rng = SampleRng::seed_from_u64(seed);
        let h = random_hermitian(d, &mut rng);
        let (vals, vecs) = hermitian_eigen(&h).unwrap();
        prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let diag = Operator::diagonal(&vals);
        let u = Operator::new(vecs).unwrap();
        let rebuilt = &(&u * &diag) * &u.adjoint();
        prop_assert!(rebuilt.max_abs_diff(&h) < 1e-10);
        let spectral = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!((spectral - operator_norm(&h)).abs() < 1e-10);

        let (top, v) = top_eigenvector(&h).unwrap();
        prop_assert!((top - vals[0]).abs() < 1e-10);
        let first = v.iter().find(|c| c.norm() > 1e-9).unwrap();
        prop_assert!(first.im.abs() < 1e-12 && first.re > 0.0);
    }

    #[test]
    fn trace_pairing_is_bilinear(seed: u64, d in 1usize..5, s in -3.0f64..3.0) {
        let v = ops(seed, &[d, d, d]);
        let lhs = trace_of_product(&(&v[0] + &v[1].scale(s)), &v[2]);
        let rhs = trace_of_product(&v[0], &v[2]) + trace_of_product(&v[1], &v[2]) * C64::new(s, 0.0);
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn operator_json_round_trips(seed: u64, d in 1usize..5) {
        let a = &ops(seed, &[d])[0];
        let text = serde_json::to_string(a).unwrap();
        let back: Operator = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, a);
    }
}
