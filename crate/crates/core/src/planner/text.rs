//! Plan files: one step per line, `Kind(arg, ...) -> produced`. Blank lines
//! and lines starting with `#` are ignored.

use super::{Plan, Step, StepKind};
use crate::catalog::{Catalog, ObjectId};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("plan line {line}: {message}")]
pub struct PlanParseError {
    pub line: usize,
    pub message: String,
}

impl Plan {
    pub fn to_text(&self, catalog: &Catalog) -> String {
        self.steps.iter().map(|s| format!("{}\n", s.display(catalog))).collect()
    }

    pub fn parse(text: &str, catalog: &Catalog) -> Result<Plan, PlanParseError> {
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| PlanParseError { line: i + 1, message };
            steps.push(parse_step(line, catalog).map_err(err)?);
        }
        Ok(Plan { steps })
    }
}

fn parse_step(line: &str, catalog: &Catalog) -> Result<Step, String> {
    let (call, produced) = line.split_once("->").ok_or("expected `->`")?;
    let (kind, rest) = call.trim().split_once('(').ok_or("expected `(`")?;
    let inner = rest.trim_end().strip_suffix(')').ok_or("expected `)`")?;
    let kind: StepKind = kind.trim().parse()?;
    let lookup = |name: &str| catalog.lookup(name).ok_or_else(|| format!("unknown object `{name}`"));
    let args: Vec<ObjectId> = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(lookup)
        .collect::<Result<_, _>>()?;
    let sig = kind.signature();
    if args.len() != sig.len() {
        return Err(format!("{kind} takes {} arguments, got {}", sig.len(), args.len()));
    }
    for (a, k) in args.iter().zip(sig) {
        if a.kind() != *k {
            return Err(format!("{kind}: `{}` is a {}, expected a {k}", catalog.name(*a), a.kind()));
        }
    }
    let produced = lookup(produced.trim())?;
    if produced.kind() != kind.produces() {
        return Err(format!("{kind} produces a {}, not `{}`", kind.produces(), catalog.name(produced)));
    }
    Ok(Step::new(kind, &args, produced))
}
