use tricon_core::bench::{builtin_problems, curate, extended_catalog, problem_file, ProblemStatus, CURATION_HEADER, CURATION_SEED};
use tricon_core::kb::{derive_relations, DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE};
use tricon_core::PlannerConfig;

#[test]
fn shipped_list_is_reproducible() {
    let catalog = extended_catalog();
    let kb = derive_relations(&catalog, DEFAULT_PROBES, DEFAULT_TOLERANCE, DEFAULT_SEED).unwrap();
    let records = curate(&catalog, &kb, &PlannerConfig::default(), CURATION_SEED);
    assert_eq!(records, builtin_problems());
    assert_eq!(problem_file(&records, CURATION_HEADER), include_str!("../data/wernick.csv"));
}

#[test]
fn status_counts() {
    let list = builtin_problems();
    assert_eq!(list.len(), 139);
    let count = |s: ProblemStatus| list.iter().filter(|r| r.status == s).count();
    assert_eq!(count(ProblemStatus::Redundant), 3);
    assert_eq!(count(ProblemStatus::LocusDependent), 23);
    assert!(count(ProblemStatus::Solvable) >= 40);
    assert_eq!(count(ProblemStatus::Unsolvable), 0);
}
