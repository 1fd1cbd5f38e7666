//! Benchmark harness: problem lists, batch solving and reports.

mod classify;
mod curate;
mod problems;
mod run;

pub use classify::{classify, jacobian_rank, Determination};
pub use problems::{builtin_problems, nonsymmetric_triples, parse_problem_file, ProblemFileError, ProblemRecord, ProblemStatus, LIST_ORDER};
pub use run::{run_benchmark, BenchConfig, BenchError, BenchReport, BenchRow, StrategySummary, DEFAULT_TIMEOUT};
pub use curate::{curate, extended_catalog, problem_file, CURATION_HEADER, CURATION_SEED};
