//! Structural checks on emitted model and data text.

use super::eval::LoadedModel;
use super::syntax::{parse, Expr, Item, TypeInst};
use super::GOAL_LINE;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LintReport {
    pub issues: Vec<String>,
}

impl LintReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks delimiters, declarations of every referenced identifier, one
/// transition block per enumerator of `ConsType`, the goal line, and that the
/// model loads with its data.
pub fn lint(model: &str, data: &str) -> LintReport {
    let mut issues = Vec::new();
    let (model_items, data_items) = match (parse(model), parse(data)) {
        (Ok(m), Ok(d)) => (m, d),
        (m, d) => {
            if let Err(e) = m {
                issues.push(format!("model: {e}"));
            }
            if let Err(e) = d {
                issues.push(format!("data: {e}"));
            }
            return LintReport { issues };
        }
    };

    let mut declared: BTreeSet<String> = ["true", "false"].iter().map(|s| s.to_string()).collect();
    let mut cons_types: Vec<String> = Vec::new();
    for it in model_items.iter().chain(&data_items) {
        match &it.item {
            Item::Enum { name, members } => {
                declared.insert(name.clone());
                for m in members.iter().flatten() {
                    declared.insert(m.clone());
                }
                if name == "ConsType" {
                    cons_types = members.clone().unwrap_or_default();
                }
            }
            Item::Decl { name, .. } => {
                declared.insert(name.clone());
            }
            Item::Assign { value: Expr::Set(items), .. } => {
                // enum definitions in data
                for e in items {
                    if let Expr::Ident(m) = e {
                        declared.insert(m.clone());
                    }
                }
            }
            _ => {}
        }
    }
    for it in model_items.iter().chain(&data_items) {
        let mut refs = BTreeSet::new();
        item_refs(&it.item, &mut Vec::new(), &mut refs);
        for r in refs.difference(&declared) {
            issues.push(format!("line {}: `{r}` is not declared", it.line));
        }
    }

    let mut blocks: BTreeMap<String, usize> = BTreeMap::new();
    for it in &model_items {
        if let Item::Constraint(e) = &it.item {
            if let Some(kind) = transition_kind(e) {
                *blocks.entry(kind).or_default() += 1;
            }
        }
    }
    if cons_types.is_empty() {
        issues.push("enum ConsType is missing or empty".into());
    }
    for k in &cons_types {
        match blocks.get(k).copied().unwrap_or(0) {
            1 => {}
            c => issues.push(format!("{c} transition blocks for {k}")),
        }
    }
    for k in blocks.keys().filter(|k| !cons_types.contains(k)) {
        issues.push(format!("transition block for unknown step kind {k}"));
    }
    if !model.lines().any(|l| l == GOAL_LINE) {
        issues.push("goal constraint missing".into());
    }
    let solves = model_items.iter().filter(|it| matches!(it.item, Item::Solve(_))).count();
    if solves != 1 {
        issues.push(format!("{solves} solve items"));
    }
    if issues.is_empty() {
        if let Err(e) = LoadedModel::load(model, data) {
            issues.push(format!("model does not load: {e}"));
        }
    }
    LintReport { issues }
}

/// The step kind guarded by a `forall(..)(construct[i] = K -> ..)` block.
fn transition_kind(e: &Expr) -> Option<String> {
    let Expr::Quant { name, body, .. } = e else { return None };
    if name != "forall" {
        return None;
    }
    let Expr::Binary("->", guard, _) = body.as_ref() else { return None };
    let Expr::Binary("=", lhs, rhs) = guard.as_ref() else { return None };
    match (lhs.as_ref(), rhs.as_ref()) {
        (Expr::Index(arr, _), Expr::Ident(k)) if **arr == Expr::Ident("construct".into()) => Some(k.clone()),
        _ => None,
    }
}

fn item_refs(item: &Item, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match item {
        Item::Decl { ty, value, .. } => {
            type_refs(ty, out);
            if let Some(v) = value {
                expr_refs(v, bound, out);
            }
        }
        Item::Assign { name, value } => {
            out.insert(name.clone());
            if !matches!(value, Expr::Set(_)) {
                expr_refs(value, bound, out);
            }
        }
        Item::Constraint(e) | Item::Output(e) | Item::Solve(Some((_, e))) => expr_refs(e, bound, out),
        Item::Enum { .. } | Item::Include(_) | Item::Solve(None) => {}
    }
}

fn type_refs(ty: &TypeInst, out: &mut BTreeSet<String>) {
    match ty {
        TypeInst::Named(n) => {
            out.insert(n.clone());
        }
        TypeInst::Range(lo, hi) => {
            expr_refs(lo, &mut Vec::new(), out);
            expr_refs(hi, &mut Vec::new(), out);
        }
        TypeInst::Set(t) | TypeInst::Var(t) => type_refs(t, out),
        TypeInst::Array(dims, t) => {
            dims.iter().for_each(|d| type_refs(d, out));
            type_refs(t, out);
        }
        TypeInst::Tuple(parts) => parts.iter().for_each(|p| type_refs(p, out)),
        TypeInst::Int | TypeInst::Bool => {}
    }
}

fn expr_refs(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match e {
        Expr::Int(_) => {}
        Expr::Ident(n) => {
            if !bound.contains(n) {
                out.insert(n.clone());
            }
        }
        Expr::Set(xs) | Expr::Array(xs) | Expr::Tuple(xs) => xs.iter().for_each(|x| expr_refs(x, bound, out)),
        Expr::Index(a, idx) => {
            expr_refs(a, bound, out);
            idx.iter().for_each(|x| expr_refs(x, bound, out));
        }
        Expr::Field(x, _) | Expr::Not(x) | Expr::Neg(x) => expr_refs(x, bound, out),
        Expr::Binary(_, l, r) => {
            expr_refs(l, bound, out);
            expr_refs(r, bound, out);
        }
        Expr::Quant { gens, filter, body, .. } => {
            let depth = bound.len();
            for (v, src) in gens {
                expr_refs(src, bound, out);
                bound.push(v.clone());
            }
            if let Some(f) = filter {
                expr_refs(f, bound, out);
            }
            expr_refs(body, bound, out);
            bound.truncate(depth);
        }
    }
}
