use matdist_core::distribution::{corner_distributions_equal, exact_corner_distribution, DEFAULT_BUDGET};
use matdist_core::fixtures::{random_function, random_permutation, random_pure_function, CorpusShape};
use matdist_core::rng::DetRng;
use matdist_core::symmetry::{congruence_group, simplicity_decision};
use matdist_core::tensor::{exact_tensor_corner, TensorFunction, ValueTensor};
use proptest::prelude::*;

fn small() -> CorpusShape {
    CorpusShape {
        max_rows: 3,
        max_cols: 3,
        ..CorpusShape::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relabeling_preserves_every_invariant(seed in any::<u64>()) {
        let mut rng = DetRng::new(seed, 0);
        let f = random_function(&mut rng, small());
        let rows = random_permutation(&mut rng, f.n_rows());
        let cols = random_permutation(&mut rng, f.n_cols());
        let g = f.reordered(&rows, &cols);
        prop_assert_eq!(f.canonical_form(), g.canonical_form());
        prop_assert!(f.is_isomorphic(&g));
        prop_assert!(corner_distributions_equal(&f, &g, 3, DEFAULT_BUDGET).unwrap());
        prop_assert_eq!(congruence_group(&f).unwrap().order(), congruence_group(&g).unwrap().order());
    }

    #[test]
    fn purification_is_idempotent_and_invisible(seed in any::<u64>()) {
        let mut rng = DetRng::new(seed, 1);
        let f = random_function(&mut rng, small());
        let (p, _) = f.purify();
        prop_assert!(p.is_pure());
        prop_assert_eq!(&p.purify().0, &p);
        prop_assert!(corner_distributions_equal(&f, &p, 2, DEFAULT_BUDGET).unwrap());
        prop_assert_eq!(simplicity_decision(&f).unwrap(), simplicity_decision(&p).unwrap());
    }

    #[test]
    fn canonical_equality_matches_corner_equality(seed in any::<u64>()) {
        let mut rng = DetRng::new(seed, 2);
        let f = random_pure_function(&mut rng, small());
        let g = random_pure_function(&mut rng, small());
        let k = f.n_rows().max(f.n_cols()).max(g.n_rows()).max(g.n_cols()) + 1;
        prop_assert_eq!(
            f.canonical_form() == g.canonical_form(),
            corner_distributions_equal(&f, &g, k, DEFAULT_BUDGET).unwrap()
        );
    }

    #[test]
    fn binary_tensors_match_matrices(seed in any::<u64>(), k in 1usize..=2) {
        let mut rng = DetRng::new(seed, 3);
        let f = random_function(&mut rng, small());
        let m = exact_corner_distribution(&f, k, DEFAULT_BUDGET).unwrap();
        let t = exact_tensor_corner(&TensorFunction::from(&f), k, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(m.len(), t.len());
        for (matrix, p) in m.iter() {
            let cube = ValueTensor::new(2, k, matrix.cells().to_vec()).unwrap();
            prop_assert_eq!(&t.probability(&cube), p);
        }
    }

    #[test]
    fn restriction_is_consistent(seed in any::<u64>()) {
        let mut rng = DetRng::new(seed, 4);
        let f = random_function(&mut rng, small());
        let d3 = exact_corner_distribution(&f, 3, DEFAULT_BUDGET).unwrap();
        for k in 1..=2 {
            prop_assert_eq!(d3.restrict(k).unwrap(), exact_corner_distribution(&f, k, DEFAULT_BUDGET).unwrap());
        }
    }
}
