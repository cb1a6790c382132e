//! Property tests for cross-module invariants. Instances come from the seeded
//! generators, so proptest drives the seed.

use proptest::prelude::*;

use zhps::circuits::{circuit_to_diagram, circuit_to_pathsum, Circuit, GateKind};
use zhps::diagram::{iso_equal, normalize};
use zhps::numeric::Phase;
use zhps::oracle::{compare, eval_diagram, eval_pathsum, eval_raw, CompareMode, OracleOptions};
use zhps::pathsum::compose_pathsums;
use zhps::random;
use zhps::rules::graphical::{fourier_hyper_pivot, hyper_pivot};
use zhps::rules::{self, simplify, Match, Policy};
use zhps::selfcheck;
use zhps::translate::{pathsum_to_zh, zh_to_pathsum, TranslateOptions};
use zhps::verify::{verify_circuits, Proof, Status, VerifyOptions};

const TOL: f64 = 1e-9;

fn oracle() -> OracleOptions {
    OracleOptions::default()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn pathsum_rules_remove_variables_and_track_scalars(seed in any::<u64>(), which in 0usize..4) {
        let mut r = random::rng(seed);
        let inst = [
            selfcheck::instance_elim,
            selfcheck::instance_omega,
            selfcheck::instance_hh,
            selfcheck::instance_case,
        ][which];
        let Ok((e, m)) = inst(&mut r) else { return Ok(()) };
        let after = rules::apply(&e, &m).unwrap();
        let removed = e.num_vars() - after.num_vars();
        let d_pow2 = after.scalar.pow2 - e.scalar.pow2;
        let d_phase = after.scalar.phase - e.scalar.phase;
        match m {
            Match::Elim { .. } => prop_assert_eq!((removed, d_pow2, d_phase), (1, 2, Phase::ZERO)),
            Match::Omega { conjugate, .. } => {
                let ph = if conjugate { Phase::new(7, 8) } else { Phase::new(1, 8) };
                prop_assert_eq!((removed, d_pow2, d_phase), (1, 1, ph));
            }
            // A constant produced by the substitution moves into the scalar
            // phase, so only the power of two is fixed here.
            Match::HH { .. } | Match::Case { .. } => prop_assert_eq!((removed, d_pow2), (2, 2)),
        }
    }

    #[test]
    fn simplify_terminates_within_variable_count(seed in any::<u64>()) {
        let e = random::pathsum(&mut random::rng(seed), 8, 10);
        let (out, trace) = simplify(&e, &Policy::pathsum()).unwrap();
        prop_assert!(trace.len() <= e.num_vars());
        prop_assert_eq!(trace.steps.last().map_or(e.num_vars(), |s| s.size_after), out.num_vars());
        let (a, b) = (eval_pathsum(&e, oracle()).unwrap(), eval_pathsum(&out, oracle()).unwrap());
        prop_assert!(compare(&a, &b, CompareMode::ExactScalar, TOL).is_equal());
    }

    #[test]
    fn hyper_pivot_is_a_special_fourier_hyper_pivot(seed in any::<u64>()) {
        let Ok((d, h)) = selfcheck::instance_pivot(&mut random::rng(seed), false) else { return Ok(()) };
        let a = hyper_pivot(&d, h).unwrap();
        let b = fourier_hyper_pivot(&d, h).unwrap();
        prop_assert!(iso_equal(&a, &b));
    }

    #[test]
    fn diagram_and_translation_agree(seed in any::<u64>()) {
        let d = random::diagram(&mut random::rng(seed), 6, 8);
        let e = zh_to_pathsum(&d, TranslateOptions::default()).unwrap();
        let (a, b) = (eval_diagram(&d, oracle()).unwrap(), eval_pathsum(&e, oracle()).unwrap());
        prop_assert!(compare(&a, &b, CompareMode::ExactScalar, TOL).is_equal());
    }

    #[test]
    fn raw_diagram_agrees_with_its_path_sum(seed in any::<u64>()) {
        let raw = random::raw_diagram(&mut random::rng(seed), 5, 7);
        let d = normalize(&raw);
        let Ok(e) = zh_to_pathsum(&d, TranslateOptions { inexact: true }) else { return Ok(()) };
        let (a, b) = (eval_raw(&raw, oracle()).unwrap(), eval_pathsum(&e, oracle()).unwrap());
        prop_assert!(compare(&a, &b, CompareMode::ExactScalar, TOL).is_equal());
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let d = normalize(&random::raw_diagram(&mut random::rng(seed), 6, 8));
        let again = normalize(&d.to_raw());
        prop_assert!(iso_equal(&d, &again));
        let sets: std::collections::BTreeSet<_> = d.hboxes.values().map(|b| b.neighbors.clone()).collect();
        prop_assert_eq!(sets.len(), d.hboxes.len());
    }

    #[test]
    fn composition_is_matrix_product(seed in any::<u64>(), width in 1usize..=3) {
        let mut r = random::rng(seed);
        let a = random::circuit(&mut r, width, 4, &random::CIRCUIT_GATES);
        let b = random::circuit(&mut r, width, 4, &random::CIRCUIT_GATES);
        let (pa, pb) = (circuit_to_pathsum(&a), circuit_to_pathsum(&b));
        let ab = compose_pathsums(&pa, &pb).unwrap();
        let product = eval_pathsum(&pb, oracle()).unwrap().matmul(&eval_pathsum(&pa, oracle()).unwrap());
        prop_assert!(compare(&eval_pathsum(&ab, oracle()).unwrap(), &product, CompareMode::ExactScalar, TOL).is_equal());
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn circuit_compilations_agree(seed in any::<u64>(), width in 1usize..=4, gates in 1usize..=15) {
        let kinds = [
            GateKind::TOF, GateKind::H, GateKind::CNOT, GateKind::T, GateKind::Tdg, GateKind::S,
            GateKind::Z, GateKind::X, GateKind::CZ, GateKind::CCZ, GateKind::SWAP,
        ];
        let c = random::circuit(&mut random::rng(seed), width, gates, &kinds);
        // Wide circuits can exceed the oracle cap; those cases are rejected,
        // not passed.
        let (a, b) = (eval_raw(&circuit_to_diagram(&c), oracle()), eval_pathsum(&circuit_to_pathsum(&c), oracle()));
        let over_cap = |r: &zhps::Result<_>| matches!(r, Err(zhps::Error::CapExceeded { .. }));
        prop_assume!(!over_cap(&a) && !over_cap(&b));
        let (a, b) = (a.unwrap(), b.unwrap());
        prop_assert!(compare(&a, &b, CompareMode::ExactScalar, TOL).is_equal());
    }

    /// Equal needs a proof, Unequal needs evidence, and the verdict always
    /// matches a direct comparison of the two unitaries.
    #[test]
    fn verify_matches_the_oracle(seed in any::<u64>(), width in 1usize..=3, engine_diagram in any::<bool>()) {
        let mut r = random::rng(seed);
        let a = random::circuit(&mut r, width, 6, &random::CIRCUIT_GATES);
        let mut b = a.clone();
        if seed % 2 == 0 {
            let extra = random::circuit(&mut r, width, 1, &random::CIRCUIT_GATES);
            b = b.then(&extra);
        }
        let opts = VerifyOptions {
            engine: if engine_diagram { zhps::verify::Engine::Diagram } else { zhps::verify::Engine::PathSum },
            ..VerifyOptions::default()
        };
        let rep = verify_circuits(&a, &b, &opts).unwrap();
        let same = compare(
            &eval_pathsum(&circuit_to_pathsum(&a), oracle()).unwrap(),
            &eval_pathsum(&circuit_to_pathsum(&b), oracle()).unwrap(),
            CompareMode::ExactScalar,
            TOL,
        )
        .is_equal();
        match rep.status {
            Status::Equal => {
                prop_assert!(same);
                prop_assert!(rep.proof != Proof::None);
            }
            Status::Unequal => {
                prop_assert!(!same);
                prop_assert!(rep.evidence.is_some());
            }
            other => prop_assert!(false, "unexpected {other}"),
        }
    }
}

#[test]
fn pathsum_roundtrip_through_diagram_json() {
    let mut r = random::rng(12);
    for _ in 0..50 {
        let e = random::pathsum(&mut r, 6, 8);
        let d = zhps::diagram::Diagram::from_json(&pathsum_to_zh(&e).to_json()).unwrap();
        assert_eq!(zh_to_pathsum(&d, TranslateOptions::default()).unwrap(), e);
    }
}

#[test]
fn empty_circuit_is_identity() {
    for w in 0..3 {
        let rep = verify_circuits(&Circuit::new(w), &Circuit::new(w), &VerifyOptions::default()).unwrap();
        assert_eq!((rep.status, rep.proof), (Status::Equal, Proof::Rewriting));
    }
}
