//! Depth-first search over states with a failed-state memo and a relaxed
//! reachability bound, driven by the three length strategies.

use super::step::{enumerate_applicable, requirements};
use super::{Plan, PlannerConfig, Problem, State, Step, Strategy};
use crate::catalog::{ObjectId, ObjectKind};
use crate::kb::KnowledgeBase;
use rustc_hash::FxHashMap;
use serde::Serialize;
use std::time::{Duration, Instant};

const MEMO_LIMIT: usize = 1 << 23;
const CLOCK_EVERY: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    NoPlan,
    TimedOut,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Expanded nodes by depth (number of steps from the initial state).
    pub nodes_per_depth: Vec<u64>,
    pub nodes: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub plan: Option<Plan>,
    pub outcome: Outcome,
    pub stats: SearchStats,
}

/// A ground action: a step together with everything that must be known for it.
#[derive(Clone, Debug)]
struct Action {
    pre: State,
    produced: ObjectId,
    step: Step,
}

/// Ground actions compiled once from a knowledge base; reusable across problems.
#[derive(Clone, Debug)]
pub struct Planner {
    actions: Vec<Action>,
    /// Per produced object, its actions in step order.
    by_object: Vec<(ObjectId, Vec<usize>)>,
}

impl Planner {
    pub fn new(kb: &KnowledgeBase) -> Planner {
        let full = State::full(kb.counts);
        let mut actions: Vec<Action> = full
            .objects()
            .flat_map(|o| {
                enumerate_applicable(&full.without(o), kb)
                    .into_iter()
                    .map(|step| Action { pre: requirements(&step), produced: step.produced, step })
            })
            .collect();
        actions.sort_by(|a, b| a.step.cmp(&b.step));
        let by_object = full
            .objects()
            .map(|o| (o, (0..actions.len()).filter(|i| actions[*i].produced == o).collect::<Vec<_>>()))
            .filter(|(_, v)| !v.is_empty())
            .collect();
        Planner { actions, by_object }
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    /// First applicable action per producible object, goal points first.
    fn successors(&self, s: &State, problem: &Problem) -> Vec<usize> {
        let mut out: Vec<(bool, usize)> = self
            .by_object
            .iter()
            .filter(|(o, _)| !s.contains(*o))
            .filter_map(|(o, acts)| {
                let first = acts.iter().copied().find(|i| self.actions[*i].pre.is_subset(s))?;
                let is_goal = matches!(o, ObjectId::Point(p) if problem.goal.contains(p));
                Some((!is_goal, first))
            })
            .collect();
        out.sort_unstable();
        out.into_iter().map(|(_, i)| i).collect()
    }

    /// Layers of relaxed reachability needed to reach the goal (at most `cap + 1`).
    fn relaxed_depth(&self, s: &State, problem: &Problem, cap: usize) -> usize {
        let mut cur = *s;
        for layer in 1..=cap {
            let mut next = cur;
            for (o, acts) in &self.by_object {
                if !cur.contains(*o) && acts.iter().any(|i| self.actions[*i].pre.is_subset(&cur)) {
                    next.insert(*o);
                }
            }
            if problem.is_goal(&next) {
                return layer;
            }
            if next == cur {
                break;
            }
            cur = next;
        }
        cap + 1
    }

    pub fn solve(&self, problem: &Problem, config: &PlannerConfig) -> SolveResult {
        let start = Instant::now();
        let mut search = Search {
            planner: self,
            problem,
            bound: 0,
            branch_and_bound: false,
            failed: FxHashMap::default(),
            path: Vec::new(),
            best: None,
            stats: SearchStats { nodes_per_depth: vec![0; config.max_steps + 1], ..SearchStats::default() },
            deadline: config.timeout.map(|t| start + t),
        };
        let s0 = problem.initial_state();
        let outcome = if problem.is_goal(&s0) {
            search.best = Some(Vec::new());
            Ok(())
        } else {
            search.run(config, s0)
        };
        let mut stats = search.stats;
        stats.elapsed = start.elapsed();
        let plan = search.best.map(|idx| Plan { steps: idx.iter().map(|i| self.actions[*i].step.clone()).collect() });
        let outcome = match (outcome, &plan) {
            (Err(TimedOut), _) => Outcome::TimedOut,
            (Ok(()), Some(_)) => Outcome::Solved,
            (Ok(()), None) => Outcome::NoPlan,
        };
        let plan = if outcome == Outcome::TimedOut { None } else { plan };
        SolveResult { plan, outcome, stats }
    }
}

/// Solves `problem` with a freshly compiled [`Planner`].
pub fn solve(problem: &Problem, kb: &KnowledgeBase, config: &PlannerConfig) -> SolveResult {
    Planner::new(kb).solve(problem, config)
}

#[derive(Debug)]
struct TimedOut;

struct Search<'a> {
    planner: &'a Planner,
    problem: &'a Problem,
    bound: usize,
    branch_and_bound: bool,
    /// State → largest remaining budget known to be insufficient.
    failed: FxHashMap<State, u8>,
    path: Vec<usize>,
    best: Option<Vec<usize>>,
    stats: SearchStats,
    deadline: Option<Instant>,
}

impl Search<'_> {
    fn run(&mut self, config: &PlannerConfig, s0: State) -> Result<(), TimedOut> {
        match config.strategy {
            Strategy::Linear => {
                for n in 1..=config.max_steps {
                    self.bound = n;
                    if self.dfs(s0, 0)? {
                        break;
                    }
                }
            }
            Strategy::Minimization => {
                self.branch_and_bound = true;
                self.bound = config.max_steps;
                self.dfs(s0, 0)?;
            }
            Strategy::Incremental => {
                self.branch_and_bound = true;
                let mut lo = 1;
                while lo <= config.max_steps {
                    let hi = (lo + config.window - 1).min(config.max_steps);
                    self.bound = hi;
                    if self.dfs(s0, 0)? {
                        break;
                    }
                    lo = hi + 1;
                }
            }
        }
        Ok(())
    }

    fn dfs(&mut self, s: State, depth: usize) -> Result<bool, TimedOut> {
        if self.problem.is_goal(&s) {
            self.best = Some(self.path.clone());
            self.bound = depth.saturating_sub(1);
            return Ok(true);
        }
        if depth >= self.bound {
            return Ok(false);
        }
        let budget = self.bound - depth;
        if self.failed.get(&s).is_some_and(|f| *f as usize >= budget) {
            return Ok(false);
        }
        let missing = self.problem.missing_goals(&s);
        if missing > budget || self.planner.relaxed_depth(&s, self.problem, budget) > budget {
            self.remember(s, budget);
            return Ok(false);
        }
        self.stats.nodes += 1;
        self.stats.nodes_per_depth[depth] += 1;
        if self.stats.nodes.is_multiple_of(CLOCK_EVERY) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(TimedOut);
        }
        let mut found = false;
        for a in self.planner.successors(&s, self.problem) {
            if depth >= self.bound {
                break;
            }
            self.path.push(a);
            let hit = self.dfs(s.with(self.planner.actions[a].produced), depth + 1);
            self.path.pop();
            if hit? {
                found = true;
                if !self.branch_and_bound {
                    return Ok(true);
                }
            }
        }
        if !found {
            self.remember(s, budget);
        }
        Ok(found)
    }

    fn remember(&mut self, s: State, budget: usize) {
        if self.failed.len() < MEMO_LIMIT || self.failed.contains_key(&s) {
            let e = self.failed.entry(s).or_insert(0);
            *e = (*e).max(budget as u8);
        }
    }
}

impl Planner {
    /// Number of compiled actions producing objects of `kind`.
    pub fn actions_producing(&self, kind: ObjectKind) -> usize {
        self.actions.iter().filter(|a| a.produced.kind() == kind).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::kb::{derive_relations, DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE};
    use crate::planner::apply_step;
    use std::sync::OnceLock;

    fn fixture() -> &'static (Catalog, KnowledgeBase, Planner) {
        static F: OnceLock<(Catalog, KnowledgeBase, Planner)> = OnceLock::new();
        F.get_or_init(|| {
            let cat = Catalog::builtin();
            let kb = derive_relations(&cat, DEFAULT_PROBES, DEFAULT_TOLERANCE, DEFAULT_SEED).unwrap();
            let planner = Planner::new(&kb);
            (cat, kb, planner)
        })
    }

    fn solve_names(names: [&str; 3], strategy: Strategy) -> SolveResult {
        let (cat, _, planner) = fixture();
        let problem = Problem::from_names(cat, names).unwrap();
        planner.solve(&problem, &PlannerConfig::with_strategy(strategy))
    }

    #[test]
    fn vertices_given_needs_no_steps() {
        for s in Strategy::ALL {
            let r = solve_names(["A", "B", "C"], s);
            assert_eq!(r.outcome, Outcome::Solved);
            assert_eq!(r.plan.unwrap().len(), 0);
        }
    }

    #[test]
    fn strategies_return_the_same_plan() {
        let (_, kb, _) = fixture();
        for names in [["A", "B", "Ma"], ["Ma", "Mb", "Mc"], ["A", "B", "H"], ["A", "O", "H"]] {
            let plans: Vec<_> = Strategy::ALL.iter().map(|s| solve_names(names, *s)).collect();
            let (cat, _, _) = fixture();
            let problem = Problem::from_names(cat, names).unwrap();
            let plan = plans[0].plan.clone().unwrap();
            for r in &plans[1..] {
                assert_eq!(r.plan.as_ref(), Some(&plan), "{names:?}");
            }
            let mut s = problem.initial_state();
            for step in &plan.steps {
                s = apply_step(&s, step, kb).unwrap();
            }
            assert!(problem.is_goal(&s));
        }
    }

    #[test]
    fn timeout_is_reported() {
        let (cat, _, planner) = fixture();
        let problem = Problem::from_names(cat, ["A", "G", "Ma"]).unwrap();
        let cfg = PlannerConfig { timeout: Some(Duration::ZERO), ..PlannerConfig::default() };
        let r = planner.solve(&problem, &cfg);
        assert!(matches!(r.outcome, Outcome::TimedOut | Outcome::NoPlan));
        assert!(r.plan.is_none());
    }

    #[test]
    fn deterministic_statistics() {
        let a = solve_names(["Ma", "Mb", "Mc"], Strategy::Incremental);
        let b = solve_names(["Ma", "Mb", "Mc"], Strategy::Incremental);
        assert_eq!(a.stats.nodes_per_depth, b.stats.nodes_per_depth);
        assert_eq!(a.plan, b.plan);
    }
}
