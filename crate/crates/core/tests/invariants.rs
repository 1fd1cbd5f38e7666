use proptest::prelude::*;
use std::collections::HashSet;
use std::sync::OnceLock;
use tricon_core::bench::LIST_ORDER;
use tricon_core::kb::{derive_relations, DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE};
use tricon_core::planner::{apply_step, brute_force_min_plan, check_step, enumerate_applicable, Outcome, Planner};
use tricon_core::verifier::{check_plan_symbolic, single_field_mutations};
use tricon_core::{Catalog, KnowledgeBase, Plan, PlannerConfig, Problem, State};
use tricon_core::Strategy as Search;

struct Fixture {
    catalog: Catalog,
    kb: KnowledgeBase,
    planner: Planner,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let catalog = Catalog::builtin();
        let kb = derive_relations(&catalog, DEFAULT_PROBES, DEFAULT_TOLERANCE, DEFAULT_SEED).unwrap();
        let planner = Planner::new(&kb);
        Fixture { catalog, kb, planner }
    })
}

fn state_from(mask: &[bool]) -> State {
    let full = State::full(fixture().kb.counts);
    let mut s = State::default();
    for (o, keep) in full.objects().zip(mask) {
        if *keep {
            s.insert(o);
        }
    }
    s
}

fn mask() -> impl proptest::strategy::Strategy<Value = Vec<bool>> {
    let n = State::full(fixture().kb.counts).len();
    prop::collection::vec(prop::bool::weighted(0.35), n)
}

fn triple() -> impl proptest::strategy::Strategy<Value = [&'static str; 3]> {
    prop::sample::subsequence(LIST_ORDER.to_vec(), 3).prop_map(|v| [v[0], v[1], v[2]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_matches_step_conditions(m in mask()) {
        let f = fixture();
        let s = state_from(&m);
        let applicable = enumerate_applicable(&s, &f.kb);
        let set: HashSet<_> = applicable.iter().cloned().collect();
        prop_assert_eq!(set.len(), applicable.len());
        for step in applicable.iter().take(40) {
            prop_assert!(check_step(&s, step, &f.kb).is_ok(), "{}", step.display(&f.catalog));
            let next = apply_step(&s, step, &f.kb).unwrap();
            prop_assert_eq!(next, s.with(step.produced));
            prop_assert_eq!(next.len(), s.len() + 1);
            let plan = Plan { steps: vec![step.clone()] };
            for mutant in single_field_mutations(&plan, &f.catalog) {
                let m = &mutant.steps[0];
                prop_assert_eq!(check_step(&s, m, &f.kb).is_ok(), set.contains(m), "{}", m.display(&f.catalog));
            }
        }
    }

    #[test]
    fn plans_are_valid_and_monotone(names in triple()) {
        let f = fixture();
        let problem = Problem::from_names(&f.catalog, names).unwrap();
        let config = PlannerConfig { max_steps: 6, ..PlannerConfig::default() };
        let r = f.planner.solve(&problem, &config);
        match &r.plan {
            Some(plan) => {
                prop_assert_eq!(r.outcome, Outcome::Solved);
                prop_assert!(plan.len() <= config.max_steps);
                prop_assert!(check_plan_symbolic(plan, &problem, &f.kb).accepted());
                let states = plan.states(&problem);
                for w in states.windows(2) {
                    prop_assert!(w[0].is_subset(&w[1]) && w[1].len() == w[0].len() + 1);
                }
            }
            None => prop_assert_eq!(r.outcome, Outcome::NoPlan),
        }
    }

    #[test]
    fn strategies_find_equal_lengths(names in triple()) {
        let f = fixture();
        let problem = Problem::from_names(&f.catalog, names).unwrap();
        let lengths: Vec<_> = Search::ALL
            .into_iter()
            .map(|strategy| f.planner.solve(&problem, &PlannerConfig { max_steps: 6, strategy, ..PlannerConfig::default() }).plan.map(|p| p.len()))
            .collect();
        prop_assert!(lengths.iter().all(|l| *l == lengths[0]), "{:?}", lengths);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn planner_matches_exhaustive_search_on_short_plans(names in triple()) {
        let f = fixture();
        let problem = Problem::from_names(&f.catalog, names).unwrap();
        let oracle = brute_force_min_plan(&problem, &f.kb, 3).unwrap().map(|p| p.len());
        let found = f.planner.solve(&problem, &PlannerConfig { max_steps: 3, ..PlannerConfig::default() }).plan.map(|p| p.len());
        prop_assert_eq!(found, oracle);
    }
}

#[test]
fn reinserting_stored_tuples_changes_nothing() {
    let f = fixture();
    let mut kb = f.kb.clone();
    for rel in f.kb.tuples() {
        kb.insert(rel);
    }
    assert_eq!(kb.len(), f.kb.len());
    assert_eq!(kb.tuples(), f.kb.tuples());
}
