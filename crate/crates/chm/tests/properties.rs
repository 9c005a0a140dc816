use std::f64::consts::TAU;

use chm::analysis::{dephase, haagerup_invariants, is_hadamard};
use chm::catalogue;
use chm::construct::tensor;
use chm::io::{parse_matrix, serialize_matrix};
use chm::{apply_equivalence, DiagonalPhase, EquivalenceWitness, PermutationVector, PhaseValue};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn permutation(n: usize) -> impl Strategy<Value = PermutationVector> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|map| PermutationVector::new(map).unwrap())
}

fn diagonal(n: usize) -> impl Strategy<Value = DiagonalPhase> {
    prop::collection::vec(0.0..TAU, n)
        .prop_map(|v| DiagonalPhase::new(v.into_iter().map(PhaseValue::from_radians).collect()))
}

fn exact_diagonal(n: usize) -> impl Strategy<Value = DiagonalPhase> {
    prop::collection::vec((0i64..60, 1i64..=60), n)
        .prop_map(|v| DiagonalPhase::new(v.into_iter().map(|(p, q)| PhaseValue::turns(p, q)).collect()))
}

fn witness(n: usize) -> impl Strategy<Value = EquivalenceWitness> {
    (diagonal(n), permutation(n), permutation(n), diagonal(n))
        .prop_map(|(d1, p1, p2, d2)| EquivalenceWitness { d1, p1, p2, d2 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn turns_reduce_into_the_unit_interval(p in -500i64..500, q in 1i64..100) {
        let r = PhaseValue::turns(p, q).exact().unwrap();
        prop_assert!(r >= num::Rational64::from_integer(0));
        prop_assert!(r < num::Rational64::from_integer(1));
        let back = PhaseValue::turns(p, q).radians();
        let expected = (p as f64 / q as f64).rem_euclid(1.0) * TAU;
        prop_assert!((back - expected).abs() < 1e-12);
    }

    #[test]
    fn exact_phase_sums_match_products(a in (0i64..24, 1i64..24), b in (0i64..24, 1i64..24)) {
        let x = PhaseValue::turns(a.0, a.1);
        let y = PhaseValue::turns(b.0, b.1);
        let z = x.add(&y);
        prop_assert!(z.is_exact());
        prop_assert!((z.to_complex() - x.to_complex() * y.to_complex()).norm() < 1e-12);
    }

    #[test]
    fn lambda_is_invariant_under_equivalence(a in 0.0..TAU, b in 0.0..TAU, w in witness(6)) {
        let m = catalogue::get("F6", &[a, b]).unwrap();
        let image = apply_equivalence(&m, &w).unwrap();
        let l0 = haagerup_invariants(&m, Some(1e-8));
        let l1 = haagerup_invariants(&image, Some(1e-8));
        prop_assert!(l0.same_set(&l1));
    }

    #[test]
    fn equivalence_preserves_the_hadamard_property(c in 0.0..TAU, w in witness(6)) {
        let m = catalogue::get("D6", &[c]).unwrap();
        prop_assert!(is_hadamard(&apply_equivalence(&m, &w).unwrap(), None).pass);
    }

    #[test]
    fn witness_inverse_undoes_the_transform(w in witness(5)) {
        let m = catalogue::fourier(5).unwrap();
        let image = apply_equivalence(&m, &w).unwrap();
        let back = apply_equivalence(&image, &w.inverse()).unwrap();
        prop_assert!(back.max_distance(&m) < 1e-12);
    }

    #[test]
    fn dephasing_is_idempotent(a in 0.0..TAU, d1 in diagonal(4), d2 in diagonal(4)) {
        let m = catalogue::get("F4", &[a]).unwrap();
        let w = EquivalenceWitness { d1, d2, ..EquivalenceWitness::identity(4) };
        let once = dephase(&apply_equivalence(&m, &w).unwrap()).h;
        let twice = dephase(&once).h;
        prop_assert!(once.is_dephased());
        prop_assert!(twice.max_distance(&once) < 1e-12);
        prop_assert!(once.max_distance(&m) < 1e-12);
    }

    #[test]
    fn exact_documents_round_trip(d1 in exact_diagonal(6), d2 in exact_diagonal(6)) {
        let m = catalogue::fourier(6).unwrap();
        let w = EquivalenceWitness { d1, d2, ..EquivalenceWitness::identity(6) };
        let image = apply_equivalence(&m, &w).unwrap();
        prop_assert!(image.is_exact());
        let back = parse_matrix(&serialize_matrix(&image)).unwrap();
        prop_assert!(back.exactly_equal(&image));
    }

    #[test]
    fn numeric_documents_round_trip(params in prop::collection::vec(0.0..TAU, 4)) {
        let m = catalogue::get("F10", &params).unwrap();
        let back = parse_matrix(&serialize_matrix(&m)).unwrap();
        prop_assert_eq!(back.values(), m.values());
    }

    #[test]
    fn tensor_products_of_family_members_are_hadamard(a in 0.0..TAU, b in 0.0..TAU, c in 0.0..TAU) {
        let x = catalogue::get("F4", &[a]).unwrap();
        let y = catalogue::get("F6", &[b, c]).unwrap();
        prop_assert!(is_hadamard(&tensor(&x, &y), None).pass);
    }

    #[test]
    fn catalogue_entries_are_hadamard(
        ids in subsequence(catalogue::list().into_iter().map(|e| e.id).collect::<Vec<_>>(), 4),
        seed in prop::collection::vec(0.0..TAU, 17),
    ) {
        for id in ids {
            let e = catalogue::entry(&id).unwrap();
            let m = catalogue::get(&id, &seed[..e.param_count]).unwrap();
            prop_assert!(is_hadamard(&m, Some(e.hadamard_tol())).pass, "{}", id);
        }
    }
}
