//! Randomized structural invariants tying the model-level operations, the
//! closed forms, and the enumeration oracle together.

mod common;

use common::*;
use rand::prelude::*;
use rand::rngs::SmallRng;

use gpmc_core::algebra::FuzzyVector;
use gpmc_core::automata::{AcceptanceMode, FuzzyAutomaton};
use gpmc_core::gpks::Letter;
use gpmc_core::gpoltl::{self, CheckError, Formula, Measure};
use gpmc_core::oracle::{self, OracleConfig, OracleStart};
use gpmc_core::patterns;
use gpmc_core::poss::Poss;

#[test]
fn cylinder_possibility_is_the_supremum_over_extending_lassos() {
    let mut rng = SmallRng::seed_from_u64(4001);
    for round in 0..120 {
        let m = random_model(&mut rng);
        let n = m.state_count();
        // Random fragment, not necessarily following positive transitions.
        let len = rng.random_range(1..=3usize);
        let fragment: Vec<usize> = (0..len).map(|_| rng.random_range(0..n)).collect();

        let cfg = OracleConfig {
            max_prefix: n + 2,
            max_cycle: n,
            start: OracleStart::State(fragment[0]),
        };
        let mut best = Poss::ZERO;
        oracle::for_each_lasso(&m, &cfg, &mut |lasso| {
            let mut unrolled = lasso.prefix.clone();
            while unrolled.len() < fragment.len() {
                unrolled.extend_from_slice(&lasso.cycle);
            }
            if unrolled[..fragment.len()] == fragment[..] {
                best = best.max(m.path_possibility(lasso).unwrap());
            }
        });
        assert_eq!(
            m.cylinder_possibility(&fragment).unwrap(),
            best,
            "round {round}, fragment {fragment:?}"
        );
    }
}

#[test]
fn total_possibility_aggregates_single_state_cylinders() {
    let mut rng = SmallRng::seed_from_u64(4002);
    for _ in 0..100 {
        let m = random_model(&mut rng);
        let by_cylinders = (0..m.state_count())
            .map(|s| m.cylinder_possibility(&[s]).unwrap())
            .max()
            .unwrap();
        assert_eq!(m.total_possibility(), by_cylinders);
    }
}

#[test]
fn path_sup_is_stable_under_one_step_unfolding() {
    let mut rng = SmallRng::seed_from_u64(4003);
    for _ in 0..100 {
        let m = random_model(&mut rng);
        let sup = m.path_sup();
        for s in 0..m.state_count() {
            let unfolded = (0..m.state_count())
                .map(|t| m.trans().get(s, t).min(sup.get(t)))
                .max()
                .unwrap();
            assert_eq!(sup.get(s), unfolded);
        }
    }
}

#[test]
fn pattern_results_are_monotone_in_the_argument() {
    let mut rng = SmallRng::seed_from_u64(4004);
    for _ in 0..100 {
        let m = random_model(&mut rng);
        let n = m.state_count();
        let b = random_state_vector(&mut rng, n);
        let bigger = b.join(&random_state_vector(&mut rng, n)).unwrap();
        let c = random_state_vector(&mut rng, n);
        let k = rng.random_range(0..=(2 * n) as u32);
        type Op = fn(&gpmc_core::Gpks, &FuzzyVector) -> Result<FuzzyVector, gpmc_core::AlgebraError>;
        let unary: [Op; 4] = [
            patterns::eventually,
            patterns::always,
            patterns::repeated_reachability,
            patterns::persistence,
        ];
        for op in unary {
            assert!(op(&m, &b).unwrap().le(&op(&m, &bigger).unwrap()));
        }
        assert!(patterns::until(&m, &c, &b)
            .unwrap()
            .le(&patterns::until(&m, &c, &bigger).unwrap()));
        assert!(patterns::bounded_until(&m, &c, &b, k)
            .unwrap()
            .le(&patterns::bounded_until(&m, &c, &bigger, k).unwrap()));
    }
}

#[test]
fn necessity_never_exceeds_possibility_on_normal_models() {
    let mut rng = SmallRng::seed_from_u64(4005);
    for _ in 0..100 {
        let m = normalize(&random_model(&mut rng));
        let b = random_state_vector(&mut rng, m.state_count());
        use gpmc_core::patterns::{necessity, possibility, Pattern, PatternKind};
        for kind in [
            PatternKind::Now(b.clone()),
            PatternKind::Eventually(b.clone()),
            PatternKind::Always(b.clone()),
            PatternKind::RepeatedlyEventually(b.clone()),
            PatternKind::EventuallyForever(b.clone()),
        ] {
            let pattern = Pattern::new(kind);
            let ne = necessity(&m, &pattern).unwrap();
            let po = possibility(&m, &pattern).unwrap();
            assert!(ne.le(&po), "necessity exceeded possibility");
        }
    }
}

fn random_propositional(rng: &mut SmallRng, depth: u32) -> Formula {
    let atom = |rng: &mut SmallRng| {
        Formula::Atom(if rng.random_bool(0.5) { "a" } else { "b" }.to_string())
    };
    if depth == 0 {
        return match rng.random_range(0..4) {
            0 => Formula::True,
            _ => atom(rng),
        };
    }
    let sub = |rng: &mut SmallRng| Box::new(random_propositional(rng, depth - 1));
    match rng.random_range(0..5) {
        0 => Formula::Not(sub(rng)),
        1 => Formula::And(sub(rng), sub(rng)),
        2 => Formula::Or(sub(rng), sub(rng)),
        3 => Formula::Implies(sub(rng), sub(rng)),
        _ => atom(rng),
    }
}

fn random_supported_formula(rng: &mut SmallRng) -> Formula {
    let e = random_propositional(rng, 2);
    let mut formula = match rng.random_range(0..8) {
        0 => e,
        1 => Formula::Eventually(Box::new(e)),
        2 => Formula::BoundedEventually(Box::new(e), rng.random_range(0..6)),
        3 => Formula::Always(Box::new(e)),
        4 => Formula::Until(Box::new(e), Box::new(random_propositional(rng, 2))),
        5 => Formula::BoundedUntil(
            Box::new(e),
            Box::new(random_propositional(rng, 2)),
            rng.random_range(0..6),
        ),
        6 => Formula::Always(Box::new(Formula::Eventually(Box::new(e)))),
        _ => Formula::Eventually(Box::new(Formula::Always(Box::new(e)))),
    };
    for _ in 0..rng.random_range(0..=2usize) {
        formula = Formula::Next(Box::new(formula));
    }
    formula
}

/// The closed-form state evaluation of every supported formula, including
/// next-shifted ones, agrees with the path-level supremum and infimum.
#[test]
fn supported_formulas_match_the_path_oracle() {
    let mut rng = SmallRng::seed_from_u64(4006);
    for round in 0..120 {
        let m = random_model(&mut rng);
        let n = m.state_count();
        let phi = random_supported_formula(&mut rng);
        let po = gpoltl::check_vector(&m, &phi, Measure::Po).unwrap();
        let ne = match gpoltl::check_vector(&m, &phi, Measure::Ne) {
            Ok(v) => Some(v),
            Err(CheckError::NoClosedDual) => None,
            Err(other) => panic!("unexpected error: {other}"),
        };
        for s in 0..n {
            let cfg = OracleConfig {
                max_prefix: n + 4,
                max_cycle: n,
                start: OracleStart::State(s),
            };
            let expected_po =
                oracle::oracle_po(&m, &cfg, |lasso| gpoltl::path_eval(&m, &phi, lasso)).unwrap();
            assert_eq!(po.get(s), expected_po, "round {round}, {phi}, state {s}");
            if let Some(ne) = &ne {
                let expected_ne = oracle::oracle_ne(&m, &cfg, |lasso| {
                    gpoltl::path_eval(&m, &phi, lasso)
                })
                .unwrap();
                assert_eq!(ne.get(s), expected_ne, "round {round}, {phi}, state {s}");
            }
        }
    }
}

#[test]
fn finite_acceptance_matches_run_enumeration() {
    let mut rng = SmallRng::seed_from_u64(4007);
    for round in 0..150 {
        let states = rng.random_range(2..=3usize);
        let mut automaton = random_buchi(&mut rng, &["a".into(), "b".into()], states);
        automaton = finite_variant(&automaton);
        let word: Vec<Letter> = (0..rng.random_range(0..=4usize))
            .map(|_| random_letter(&mut rng))
            .collect();
        let expected = enumerate_runs(&automaton, &word);
        assert_eq!(
            automaton.accept_finite(&word).unwrap(),
            expected,
            "round {round}"
        );

        // Raising an accepting degree never lowers acceptance.
        let bumped = bump_accepting(&automaton);
        assert!(bumped.accept_finite(&word).unwrap() >= expected);
    }
}

/// Same automaton with finite-word acceptance.
fn finite_variant(a: &FuzzyAutomaton) -> FuzzyAutomaton {
    FuzzyAutomaton::new(
        a.states().to_vec(),
        a.ap().to_vec(),
        AcceptanceMode::Finite,
        a.initial().clone(),
        a.accepting().clone(),
        a.transitions().to_vec(),
        a.extra_letters().to_vec(),
    )
}

fn bump_accepting(a: &FuzzyAutomaton) -> FuzzyAutomaton {
    FuzzyAutomaton::new(
        a.states().to_vec(),
        a.ap().to_vec(),
        a.mode(),
        a.initial().clone(),
        FuzzyVector::ones(a.state_count()),
        a.transitions().to_vec(),
        a.extra_letters().to_vec(),
    )
}

/// Finite-word acceptance by explicit enumeration of all state sequences.
fn enumerate_runs(a: &FuzzyAutomaton, word: &[Letter]) -> Poss {
    let k = a.state_count();
    let mut best = Poss::ZERO;
    let mut stack: Vec<(usize, usize, Poss)> = (0..k)
        .map(|q| (q, 0, a.initial().get(q)))
        .collect();
    while let Some((q, consumed, value)) = stack.pop() {
        if value.is_zero() {
            continue;
        }
        if consumed == word.len() {
            best = best.max(value.min(a.accepting().get(q)));
            continue;
        }
        for q2 in 0..k {
            let step = a.delta(q, &word[consumed], q2);
            stack.push((q2, consumed + 1, value.min(step)));
        }
    }
    best
}

#[test]
fn oracle_necessity_on_certain_paths_returns_the_property_value() {
    // All path possibilities are 1, so the implication infimum is just the
    // constant property value.
    let m = gpmc_core::format::model_from_json(
        r#"{
            "states": ["u", "v"],
            "ap": [],
            "initial": {"u": "1", "v": "1"},
            "transitions": [
                {"from": "u", "to": "v", "p": "1"},
                {"from": "v", "to": "u", "p": "1"},
                {"from": "u", "to": "u", "p": "1"},
                {"from": "v", "to": "v", "p": "1"}
            ],
            "labels": {}
        }"#,
    )
    .unwrap();
    for c in ["0", "0.3", "0.7", "1"] {
        let cfg = OracleConfig::for_state(&m, 0).with_bounds(3, 2);
        let got = oracle::oracle_ne::<()>(&m, &cfg, |_| Ok(poss(c))).unwrap();
        assert_eq!(got, poss(c));
    }
}
