//! Problem lists: `id,given1,given2,given3,status` with `#` comments.

use crate::catalog::Catalog;
use crate::planner::{Problem, ProblemError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemStatus {
    Solvable,
    Redundant,
    LocusDependent,
    Unsolvable,
    Unknown,
}

impl ProblemStatus {
    pub fn name(self) -> &'static str {
        match self {
            ProblemStatus::Solvable => "solvable",
            ProblemStatus::Redundant => "redundant",
            ProblemStatus::LocusDependent => "locus-dependent",
            ProblemStatus::Unsolvable => "unsolvable",
            ProblemStatus::Unknown => "unknown",
        }
    }
}

impl fmt::Display for ProblemStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            ProblemStatus::Solvable,
            ProblemStatus::Redundant,
            ProblemStatus::LocusDependent,
            ProblemStatus::Unsolvable,
            ProblemStatus::Unknown,
        ]
        .into_iter()
        .find(|st| st.name() == s)
        .ok_or_else(|| format!("unknown status `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub id: String,
    pub given: [String; 3],
    pub status: ProblemStatus,
}

impl ProblemRecord {
    pub fn to_problem(&self, catalog: &Catalog) -> Result<Problem, ProblemError> {
        Problem::from_names(catalog, [&self.given[0], &self.given[1], &self.given[2]].map(|s| s.as_str()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("problem file line {line}: {message}")]
pub struct ProblemFileError {
    pub line: usize,
    pub message: String,
}

/// Parses a problem list, checking every point name against `catalog`.
pub fn parse_problem_file(text: &str, catalog: &Catalog) -> Result<Vec<ProblemRecord>, ProblemFileError> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| ProblemFileError { line: i + 1, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        }
        if fields[0] == "id" {
            continue;
        }
        let given = [fields[1], fields[2], fields[3]];
        if given.iter().any(|g| g.is_empty()) {
            return Err(err("empty point name".into()));
        }
        if let Some(g) = given.iter().find(|g| catalog.point(g).is_none()) {
            return Err(err(format!("unknown point `{g}`")));
        }
        if given[0] == given[1] || given[0] == given[2] || given[1] == given[2] {
            return Err(err("given points must be distinct".into()));
        }
        let status = fields[4].parse().map_err(err)?;
        if !ids.insert(fields[0].to_string()) {
            return Err(err(format!("duplicate id `{}`", fields[0])));
        }
        out.push(ProblemRecord { id: fields[0].to_string(), given: given.map(String::from), status });
    }
    Ok(out)
}

/// The shipped list of non-symmetric triangle problems.
pub fn builtin_problems() -> Vec<ProblemRecord> {
    parse_problem_file(include_str!("../../data/wernick.csv"), &Catalog::builtin()).expect("builtin problem list parses")
}

/// The sixteen classical points in list order.
pub const LIST_ORDER: [&str; 16] = [
    "A", "B", "C", "O", "Ma", "Mb", "Mc", "G", "Ha", "Hb", "Hc", "H", "Ta", "Tb", "Tc", "I",
];

/// One representative per orbit of three-point subsets under relabeling of
/// the vertices, the least in list order; `{A, B, C}` itself is left out.
pub fn nonsymmetric_triples() -> Vec<[&'static str; 3]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    // vertex-indexed families start at 0, 4, 8 and 12; the rest are fixed
    let image = |i: usize, p: &[usize; 3]| match i {
        0..=2 => p[i],
        4..=6 => 4 + p[i - 4],
        8..=10 => 8 + p[i - 8],
        12..=14 => 12 + p[i - 12],
        x => x,
    };
    let mut reps = BTreeSet::new();
    for a in 0..16 {
        for b in a + 1..16 {
            for c in b + 1..16 {
                let rep = PERMS
                    .iter()
                    .map(|p| {
                        let mut v = [image(a, p), image(b, p), image(c, p)];
                        v.sort();
                        v
                    })
                    .min()
                    .unwrap();
                reps.insert(rep);
            }
        }
    }
    reps.remove(&[0, 1, 2]);
    reps.into_iter().map(|r| r.map(|i| LIST_ORDER[i])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<ProblemRecord>, ProblemFileError> {
        parse_problem_file(text, &Catalog::builtin())
    }

    #[test]
    fn parses_comments_and_header() {
        let text = "# list\nid,given1,given2,given3,status\nW1, A, B, Ma, solvable\n\nW102,A,G,O,redundant\n";
        let recs = parse(text).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].given, ["A", "B", "Ma"].map(String::from));
        assert_eq!(recs[1].given, ["A", "G", "O"].map(String::from));
        assert_eq!(recs[1].status, ProblemStatus::Redundant);
        assert_eq!(parse("").unwrap(), vec![]);
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse("W1,A,B,Ma,solvable\nW2,A,B\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse("W1,A,B,Ma,easy\n").unwrap_err();
        assert!(e.message.contains("unknown status"));
        let e = parse("W1,A,B,Ma,solvable\nW1,A,B,G,solvable\n").unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = parse("W1,A,A,Ma,solvable\n").unwrap_err();
        assert!(e.message.contains("distinct"));
        let e = parse("# c\nW1,A,B,Q,solvable\n").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (2, "unknown point `Q`"));
    }

    #[test]
    fn orbit_count() {
        let t = nonsymmetric_triples();
        // C(16,3) = 560 subsets; Burnside over the six relabelings gives 140 orbits
        assert_eq!(t.len(), 139);
        assert_eq!(t[0], ["A", "B", "O"]);
    }
}
