//! Exhaustive breadth-first search, kept deliberately simple to serve as a
//! reference for the optimized planner.

use super::step::{apply_step, enumerate_applicable};
use super::{Plan, Problem, State};
use crate::kb::KnowledgeBase;
use rustc_hash::FxHashMap;
use thiserror::Error;

pub const ORACLE_STATE_LIMIT: usize = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute-force search exceeded {0} states")]
    ResourceLimit(usize),
}

/// A plan of minimal length at most `depth_limit`, or `None` if there is none.
///
/// States that still miss more goal points than there are steps left are not
/// expanded; this never discards a plan within the limit.
pub fn brute_force_min_plan(problem: &Problem, kb: &KnowledgeBase, depth_limit: usize) -> Result<Option<Plan>, OracleError> {
    let s0 = problem.initial_state();
    if problem.is_goal(&s0) {
        return Ok(Some(Plan::default()));
    }
    let mut parent: FxHashMap<State, State> = FxHashMap::default();
    parent.insert(s0, s0);
    let mut frontier = vec![s0];
    for depth in 1..=depth_limit {
        let mut next = Vec::new();
        for s in &frontier {
            if problem.missing_goals(s) > depth_limit - (depth - 1) {
                continue;
            }
            for step in enumerate_applicable(s, kb) {
                let t = apply_step(s, &step, kb).expect("enumerated steps apply");
                if parent.contains_key(&t) {
                    continue;
                }
                parent.insert(t, *s);
                if problem.is_goal(&t) {
                    return Ok(Some(reconstruct(&parent, t, s0, kb)));
                }
                next.push(t);
            }
            if parent.len() > ORACLE_STATE_LIMIT {
                return Err(OracleError::ResourceLimit(ORACLE_STATE_LIMIT));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(None)
}

fn reconstruct(parent: &FxHashMap<State, State>, goal: State, s0: State, kb: &KnowledgeBase) -> Plan {
    let mut chain = vec![goal];
    while *chain.last().unwrap() != s0 {
        chain.push(parent[chain.last().unwrap()]);
    }
    chain.reverse();
    let steps = chain
        .windows(2)
        .map(|w| {
            enumerate_applicable(&w[0], kb)
                .into_iter()
                .find(|st| w[0].with(st.produced) == w[1])
                .expect("parent link comes from an applicable step")
        })
        .collect();
    Plan { steps }
}
