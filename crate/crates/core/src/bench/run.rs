//! Batch solving of a problem list under several strategies.

use super::problems::{ProblemRecord, ProblemStatus};
use crate::catalog::Catalog;
use crate::kb::KnowledgeBase;
use crate::planner::{Outcome, Planner, PlannerConfig, ProblemError, Strategy};
use crate::verifier::{check_plan_numeric, check_plan_symbolic, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE};
use rayon::prelude::*;
use serde::Serialize;
use std::time::{Duration, Instant};
use thiserror::Error;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub strategies: Vec<Strategy>,
    /// Shared search settings; the strategy field is overridden per run.
    pub planner: PlannerConfig,
    /// Worker threads; 1 runs everything on the calling thread.
    pub parallelism: usize,
    pub verify_samples: usize,
    pub verify_tolerance: f64,
    pub verify_seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            strategies: Strategy::ALL.to_vec(),
            planner: PlannerConfig { timeout: Some(DEFAULT_TIMEOUT), ..PlannerConfig::default() },
            parallelism: 1,
            verify_samples: DEFAULT_SAMPLES,
            verify_tolerance: DEFAULT_TOLERANCE,
            verify_seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("problem {id}: {source}")]
    Problem { id: String, source: ProblemError },
    #[error(transparent)]
    Config(#[from] crate::planner::ConfigError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("numeric verification: {0}")]
    Verify(#[from] crate::verifier::VerifyError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub id: String,
    pub given: String,
    pub status: ProblemStatus,
    pub strategy: Strategy,
    /// Found a plan that passed both verifier checks.
    pub solved: bool,
    pub outcome: Outcome,
    pub length: Option<usize>,
    /// Whether the plan passed verification; empty when no plan was found.
    pub verified: Option<bool>,
    pub nodes: u64,
    pub time_s: f64,
    /// Steps separated by `; `.
    pub plan: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub runs: usize,
    pub solved: usize,
    pub avg_time_s: Option<f64>,
    pub median_time_s: Option<f64>,
    pub avg_time_solved_s: Option<f64>,
    /// Over solved rows only.
    pub avg_length: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summaries: Vec<StrategySummary>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[m] } else { (s[m - 1] + s[m]) / 2.0 })
}

impl StrategySummary {
    pub fn from_rows(strategy: Strategy, rows: &[BenchRow]) -> StrategySummary {
        let mine: Vec<&BenchRow> = rows.iter().filter(|r| r.strategy == strategy).collect();
        let times: Vec<f64> = mine.iter().map(|r| r.time_s).collect();
        let solved: Vec<&&BenchRow> = mine.iter().filter(|r| r.solved).collect();
        let solved_times: Vec<f64> = solved.iter().map(|r| r.time_s).collect();
        let lengths: Vec<f64> = solved.iter().filter_map(|r| r.length).map(|l| l as f64).collect();
        StrategySummary {
            strategy,
            runs: mine.len(),
            solved: solved.len(),
            avg_time_s: mean(&times),
            median_time_s: median(&times),
            avg_time_solved_s: mean(&solved_times),
            avg_length: mean(&lengths),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn csv_text<T: Serialize>(records: impl IntoIterator<Item = T>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

#[derive(Serialize)]
struct SummaryCsvRow {
    strategy: Strategy,
    runs: usize,
    solved: usize,
    avg_time_s: String,
    median_time_s: String,
    avg_time_solved_s: String,
    avg_length: String,
}

impl BenchReport {
    pub fn new(rows: Vec<BenchRow>, strategies: &[Strategy]) -> BenchReport {
        let summaries = strategies.iter().map(|s| StrategySummary::from_rows(*s, &rows)).collect();
        BenchReport { rows, summaries }
    }

    pub fn rows_csv(&self) -> String {
        csv_text(&self.rows)
    }

    pub fn summary_csv(&self) -> String {
        csv_text(self.summaries.iter().map(|s| SummaryCsvRow {
            strategy: s.strategy,
            runs: s.runs,
            solved: s.solved,
            avg_time_s: opt(s.avg_time_s),
            median_time_s: opt(s.median_time_s),
            avg_time_solved_s: opt(s.avg_time_solved_s),
            avg_length: opt(s.avg_length),
        }))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Survival data: per strategy, the solve times of solved runs in
    /// increasing order against the number of problems solved by then.
    pub fn survival_csv(&self) -> String {
        let mut out = String::from("strategy,solved,time_s\n");
        for s in &self.summaries {
            let mut t: Vec<f64> = self.rows.iter().filter(|r| r.strategy == s.strategy && r.solved).map(|r| r.time_s).collect();
            t.sort_by(f64::total_cmp);
            for (i, x) in t.iter().enumerate() {
                out.push_str(&format!("{},{},{x:.6}\n", s.strategy.name(), i + 1));
            }
        }
        out
    }

    /// Length comparison data: one line per problem, one column per strategy.
    pub fn lengths_csv(&self) -> String {
        let strategies: Vec<Strategy> = self.summaries.iter().map(|s| s.strategy).collect();
        let mut out = String::from("id");
        for s in &strategies {
            out.push(',');
            out.push_str(s.name());
        }
        out.push('\n');
        let mut ids: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !ids.contains(&r.id.as_str()) {
                ids.push(&r.id);
            }
        }
        for id in ids {
            out.push_str(id);
            for s in &strategies {
                out.push(',');
                let row = self.rows.iter().find(|r| r.id == id && r.strategy == *s);
                if let Some(l) = row.filter(|r| r.solved).and_then(|r| r.length) {
                    out.push_str(&l.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    /// The rows with time fields cleared, for comparing runs.
    pub fn timeless_rows(&self) -> Vec<BenchRow> {
        self.rows.iter().map(|r| BenchRow { time_s: 0.0, ..r.clone() }).collect()
    }
}

/// Solves every (problem, strategy) pair with a per-run timeout and verifies
/// each plan before counting it solved. Rows come back in problem order, then
/// strategy order, regardless of parallelism.
pub fn run_benchmark(
    problems: &[ProblemRecord],
    catalog: &Catalog,
    kb: &KnowledgeBase,
    config: &BenchConfig,
) -> Result<BenchReport, BenchError> {
    config.planner.validate()?;
    let resolved = problems
        .iter()
        .map(|p| p.to_problem(catalog).map_err(|source| BenchError::Problem { id: p.id.clone(), source }))
        .collect::<Result<Vec<_>, _>>()?;
    let planner = Planner::new(kb);
    let jobs: Vec<(usize, Strategy)> =
        (0..problems.len()).flat_map(|i| config.strategies.iter().map(move |s| (i, *s))).collect();
    let run = |&(i, strategy): &(usize, Strategy)| -> Result<BenchRow, BenchError> {
        let (record, problem) = (&problems[i], &resolved[i]);
        let cfg = PlannerConfig { strategy, ..config.planner };
        let start = Instant::now();
        let result = planner.solve(problem, &cfg);
        let time_s = start.elapsed().as_secs_f64();
        let verified = match &result.plan {
            Some(plan) => {
                let sym = check_plan_symbolic(plan, problem, kb);
                let ok = sym.accepted()
                    && check_plan_numeric(plan, problem, catalog, config.verify_samples, config.verify_tolerance, config.verify_seed)?
                        .accepted();
                Some(ok)
            }
            None => None,
        };
        Ok(BenchRow {
            id: record.id.clone(),
            given: record.given.join(","),
            status: record.status,
            strategy,
            solved: verified == Some(true),
            outcome: result.outcome,
            length: result.plan.as_ref().map(|p| p.len()),
            verified,
            nodes: result.stats.nodes,
            time_s,
            plan: result.plan.map(|p| p.to_text(catalog).trim_end().replace('\n', "; ")),
        })
    };
    let rows = if config.parallelism <= 1 {
        jobs.iter().map(run).collect::<Result<Vec<_>, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallelism)
            .build()
            .map_err(|e| BenchError::Pool(e.to_string()))?;
        pool.install(|| jobs.par_iter().map(run).collect::<Result<Vec<_>, _>>())?
    };
    Ok(BenchReport::new(rows, &config.strategies))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{derive_relations, DEFAULT_PROBES, DEFAULT_SEED as KB_SEED, DEFAULT_TOLERANCE as KB_TOL};

    fn record(id: &str, given: [&str; 3]) -> ProblemRecord {
        ProblemRecord { id: id.into(), given: given.map(String::from), status: ProblemStatus::Solvable }
    }

    fn setup() -> (Catalog, KnowledgeBase) {
        let cat = Catalog::builtin();
        let kb = derive_relations(&cat, DEFAULT_PROBES, KB_TOL, KB_SEED).unwrap();
        (cat, kb)
    }

    #[test]
    fn midpoint_problem_under_all_strategies() {
        let (cat, kb) = setup();
        let report = run_benchmark(&[record("W2", ["A", "B", "Ma"])], &cat, &kb, &BenchConfig::default()).unwrap();
        assert_eq!(report.rows.len(), 3);
        for r in &report.rows {
            assert!(r.solved && r.verified == Some(true));
            assert_eq!(r.length, Some(1));
        }
        assert_eq!(report.summaries.iter().map(|s| s.solved).collect::<Vec<_>>(), vec![1, 1, 1]);
        assert!(report.summaries.iter().all(|s| s.avg_length == Some(1.0)));
        let header = report.summary_csv().lines().next().unwrap().to_string();
        assert_eq!(header, "strategy,runs,solved,avg_time_s,median_time_s,avg_time_solved_s,avg_length");
        assert_eq!(report.lengths_csv(), "id,linear,minimization,incremental\nW2,1,1,1\n");
    }

    #[test]
    fn empty_list() {
        let (cat, kb) = setup();
        let report = run_benchmark(&[], &cat, &kb, &BenchConfig::default()).unwrap();
        assert!(report.rows.is_empty());
        for s in &report.summaries {
            assert_eq!((s.runs, s.solved, s.avg_time_s, s.avg_length), (0, 0, None, None));
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let (cat, kb) = setup();
        let list = [record("a", ["A", "B", "H"]), record("b", ["Ma", "Mb", "Mc"]), record("c", ["A", "G", "Ma"])];
        let serial = run_benchmark(&list, &cat, &kb, &BenchConfig::default()).unwrap();
        let parallel = run_benchmark(&list, &cat, &kb, &BenchConfig { parallelism: 4, ..BenchConfig::default() }).unwrap();
        assert_eq!(serial.timeless_rows(), parallel.timeless_rows());
        let unsolved: Vec<_> = serial.rows.iter().filter(|r| r.id == "c").collect();
        assert!(unsolved.iter().all(|r| !r.solved && r.outcome == Outcome::NoPlan && r.length.is_none()));
    }

    #[test]
    fn summary_statistics() {
        let row = |solved: bool, length: Option<usize>, t: f64| BenchRow {
            id: "x".into(),
            given: "A,B,C".into(),
            status: ProblemStatus::Unknown,
            strategy: Strategy::Linear,
            solved,
            outcome: Outcome::Solved,
            length,
            verified: Some(solved),
            nodes: 0,
            time_s: t,
            plan: None,
        };
        let rows = vec![row(true, Some(2), 1.0), row(false, None, 5.0), row(true, Some(5), 3.0), row(false, Some(7), 9.0)];
        let s = StrategySummary::from_rows(Strategy::Linear, &rows);
        assert_eq!(s.solved, 2);
        assert_eq!(s.avg_time_s, Some(4.5));
        assert_eq!(s.median_time_s, Some(4.0));
        assert_eq!(s.avg_time_solved_s, Some(2.0));
        assert_eq!(s.avg_length, Some(3.5));
    }
}
