//! Status assignment for the shipped problem list.

use super::classify::{classify, Determination};
use super::problems::{nonsymmetric_triples, ProblemRecord, ProblemStatus};
use crate::catalog::Catalog;
use crate::kb::KnowledgeBase;
use crate::planner::{Planner, PlannerConfig, Problem};
use crate::verifier::check_plan;
use std::fmt::Write;

pub const CURATION_SEED: u64 = 7;

pub const CURATION_HEADER: &str = "\
Non-symmetric three-point triangle problems over the sixteen classical points
A B C O Ma Mb Mc G Ha Hb Hc H Ta Tb Tc I, one per orbit under relabeling of the
vertices, {A, B, C} omitted. Ids follow this enumeration order.
Statuses are computed by examples/curate_problems.rs:
  redundant, locus-dependent: numerical rank of the Jacobian of (A, B, C) -> givens
  solvable: a construction over data/catalog_extended.json was found and verified
  unknown: determined, but no construction over that catalog within 11 steps
No problem is marked unsolvable; nonexistence of a construction is not established here.";

/// Catalog with extra named objects, used only to find witness constructions.
pub fn extended_catalog() -> Catalog {
    Catalog::from_json(include_str!("../../data/catalog_extended.json")).expect("extended catalog parses")
}

/// Statuses for the non-symmetric triples: `redundant` and `locus-dependent`
/// from the Jacobian rank; `solvable` when a construction over `catalog`
/// exists and passes both verifier checks; `unknown` otherwise.
pub fn curate(catalog: &Catalog, kb: &KnowledgeBase, config: &PlannerConfig, seed: u64) -> Vec<ProblemRecord> {
    let planner = Planner::new(kb);
    nonsymmetric_triples()
        .into_iter()
        .enumerate()
        .map(|(i, names)| {
            let problem = Problem::from_names(catalog, names).expect("list points are in the catalog");
            let status = match classify(catalog, problem.given, seed) {
                Determination::Redundant => ProblemStatus::Redundant,
                Determination::LocusDependent => ProblemStatus::LocusDependent,
                Determination::Determined => {
                    let witness = planner.solve(&problem, config).plan;
                    match witness {
                        Some(plan) if check_plan(&plan, &problem, kb, catalog).is_ok_and(|r| r.accepted()) => {
                            ProblemStatus::Solvable
                        }
                        _ => ProblemStatus::Unknown,
                    }
                }
            };
            ProblemRecord { id: format!("W{:03}", i + 1), given: names.map(String::from), status }
        })
        .collect()
}

/// Problem-file text for `records`, preceded by `header` as comment lines.
pub fn problem_file(records: &[ProblemRecord], header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("id,given1,given2,given3,status\n");
    for r in records {
        let _ = writeln!(out, "{},{},{}", r.id, r.given.join(","), r.status);
    }
    out
}
