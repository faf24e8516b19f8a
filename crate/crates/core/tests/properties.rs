use kmsketch_core::kmeans::{accuracy, objective, ClusterAssignment};
use kmsketch_core::linalg::{frobenius_norm, multiply, qr_orthonormalize, spectral_norm, SPECTRAL_MAX_ITERS, SPECTRAL_TOL};
use kmsketch_core::sketch::{mailman_multiply, naive_sign_multiply, random_sign_sketch, randomized_sampling, sampling_probabilities};
use kmsketch_core::svd::projection_residual;
use kmsketch_core::Matrix;
use proptest::prelude::*;

fn matrix(rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> impl Strategy<Value = Matrix> {
    (rows, cols).prop_flat_map(|(m, n)| {
        prop::collection::vec(-10.0f64..10.0, m * n).prop_map(move |v| Matrix::new(m, n, v).unwrap())
    })
}

fn spec(a: &Matrix) -> f64 {
    spectral_norm(a, SPECTRAL_TOL, SPECTRAL_MAX_ITERS).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_submultiplicative(a in matrix(1..8, 1..8), seed in any::<u64>()) {
        let mut rng = kmsketch_core::rng::SeedRng::new(seed);
        let b = Matrix::from_fn(a.cols(), 5, |_, _| rng.normal());
        let ab = multiply(&a, &b).unwrap();
        let slack = 1e-9 * (1.0 + frobenius_norm(&a) * frobenius_norm(&b));
        prop_assert!(frobenius_norm(&ab) <= frobenius_norm(&a) * frobenius_norm(&b) + slack);
        prop_assert!(frobenius_norm(&ab) <= spec(&a) * frobenius_norm(&b) + slack);
        prop_assert!(spec(&a) <= frobenius_norm(&a) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn projection_contracts(a in matrix(2..9, 3..9), width in 1usize..4, seed in any::<u64>()) {
        let mut rng = kmsketch_core::rng::SeedRng::new(seed);
        let y = Matrix::from_fn(a.cols(), width, |_, _| rng.normal());
        let z = qr_orthonormalize(&y).unwrap();
        let resid = projection_residual(&a, &z).unwrap();
        prop_assert!(frobenius_norm(&resid) <= frobenius_norm(&a) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn accuracy_ignores_cluster_ids(labels in prop::collection::vec(0usize..3, 3..20), perm in Just([2usize, 0, 1])) {
        let points = Matrix::from_fn(labels.len(), 2, |i, j| (i * 3 + j) as f64);
        let truth: Vec<usize> = labels.iter().map(|&l| (l + 1) % 3).collect();
        let a = ClusterAssignment::from_labels(&points, labels.clone(), 3).unwrap();
        let b = ClusterAssignment::from_labels(&points, labels.iter().map(|&l| perm[l]).collect(), 3).unwrap();
        prop_assert_eq!(accuracy(&a, &truth).unwrap(), accuracy(&b, &truth).unwrap());
        prop_assert!((accuracy(&a, &truth).unwrap() - 1.0).abs() < 1e-15);
        prop_assert_eq!(objective(&points, &a).unwrap(), objective(&points, &b).unwrap());
    }

    #[test]
    fn mailman_equals_naive(a in matrix(1..6, 1..80), r in 1usize..30, seed in any::<u64>()) {
        let sk = random_sign_sketch(a.cols(), r, seed).unwrap();
        let fast = mailman_multiply(&a, &sk).unwrap();
        let slow = naive_sign_multiply(&a, &sk).unwrap();
        prop_assert!(fast.sub(&slow).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn sampling_plan_is_consistent(z in matrix(1..30, 1..5), r in 1usize..40, seed in any::<u64>()) {
        prop_assume!(!z.is_zero());
        let p = sampling_probabilities(&z).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        let plan = randomized_sampling(&z, r, seed).unwrap();
        prop_assert_eq!(plan.indices.len(), r);
        prop_assert_eq!(plan.weights.len(), r);
        for (&i, &w) in plan.indices.iter().zip(&plan.weights) {
            prop_assert!(p[i] > 0.0);
            prop_assert!((w - 1.0 / (r as f64 * p[i]).sqrt()).abs() <= 1e-12 * w);
        }
    }
}
