//! MiniZinc model and data files for a construction problem, mirroring the
//! native step semantics, plus an internal linter and evaluator used to check
//! the output without an external toolchain.

mod eval;
mod lint;
mod syntax;

pub use eval::{ArrayValue, IndexSet, LoadedModel, ModelError, Value, Violation};
pub use lint::{lint, LintReport};
pub use syntax::SyntaxError;

use crate::catalog::{Catalog, ObjectId, ObjectKind};
use crate::kb::KnowledgeBase;
use crate::planner::{ConfigError, Plan, PlannerConfig, Problem, State, Step, StepKind};
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;
use std::rc::Rc;
use thiserror::Error;

pub const GOAL_LINE: &str = "{ A, B, C } subset known_points[n];";

const KINDS: [ObjectKind; 4] = [ObjectKind::Point, ObjectKind::Line, ObjectKind::Circle, ObjectKind::Angle];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EmitMode {
    /// `n` is the parameter `config.max_steps`.
    Fixed,
    /// `n` is a decision variable in `1..maxSteps`, minimized.
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmittedModel {
    pub model_text: String,
    pub data_text: String,
    /// Fixed length, or the upper bound `maxSteps` in minimize mode.
    pub n: usize,
    pub mode: EmitMode,
}

impl EmittedModel {
    /// File stem for the problem, e.g. `A_G_O`.
    pub fn file_stem(problem: &Problem, catalog: &Catalog) -> String {
        problem.label(catalog).replace(',', "_")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmitError {
    #[error("point id {0} is not in the knowledge base")]
    UnknownPoint(usize),
    #[error("catalog and knowledge base sizes differ")]
    CatalogMismatch,
    #[error("the model needs at least one {0}")]
    EmptyKind(&'static str),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

fn kind_word(kind: ObjectKind) -> &'static str {
    match kind {
        ObjectKind::Point => "Point",
        ObjectKind::Line => "Line",
        ObjectKind::Circle => "Circle",
        ObjectKind::Angle => "Angle",
    }
}

fn plural(kind: ObjectKind) -> &'static str {
    match kind {
        ObjectKind::Point => "points",
        ObjectKind::Line => "lines",
        ObjectKind::Circle => "circles",
        ObjectKind::Angle => "angles",
    }
}

/// Slots per step in the `points`, `lines`, `circles`, `angles` arrays.
fn slot_count(kind: ObjectKind) -> usize {
    match kind {
        ObjectKind::Point => 4,
        ObjectKind::Line | ObjectKind::Circle => 2,
        ObjectKind::Angle => 1,
    }
}

/// Slot positions (1-based) of the produced object and of each argument: the
/// produced object takes slot 1 of its kind, arguments follow in signature
/// order.
fn slot_layout(kind: StepKind) -> (usize, Vec<usize>) {
    let mut next = [1usize; 4];
    next[kind.produces() as usize] = 2;
    let args = kind
        .signature()
        .iter()
        .map(|k| {
            let s = next[*k as usize];
            next[*k as usize] += 1;
            s
        })
        .collect();
    (1, args)
}

fn slot_expr(kind: ObjectKind, slot: usize) -> String {
    format!("{}[i,{slot}]", plural(kind))
}

/// Precondition and effect conjuncts of the transition block for `kind`.
fn transition_conjuncts(kind: StepKind) -> Vec<String> {
    let sig = kind.signature();
    let (out_slot, arg_slots) = slot_layout(kind);
    let out_kind = kind.produces();
    let x = slot_expr(out_kind, out_slot);
    let a: Vec<String> = sig.iter().zip(&arg_slots).map(|(k, s)| slot_expr(*k, *s)).collect();
    let known = |k: ObjectKind| format!("known_{}", plural(k));
    let mut c: Vec<String> = sig.iter().zip(&a).map(|(k, e)| format!("{e} in {}[i-1]", known(*k))).collect();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if sig[i] == sig[j] {
                c.push(format!("{} != {}", a[i], a[j]));
            }
        }
    }
    let tuple = |family: &str, alts: &[String]| {
        let body = alts.iter().map(|t| format!("t = ({t})")).collect::<Vec<_>>().join(" \\/ ");
        format!("exists(t in {family})({body})")
    };
    let on_line = |p: &str, l: &str| format!("{l} in inc_lines[{p}]");
    let on_circle = |p: &str, k: &str| format!("{k} in inc_circles[{p}]");
    match kind {
        StepKind::LineThroughPoints => {
            c.push(format!("{} < {}", a[0], a[1]));
            c.push(on_line(&a[0], &x));
            c.push(on_line(&a[1], &x));
        }
        StepKind::LineIntersect => {
            c.push(format!("{} < {}", a[0], a[1]));
            c.push(format!("not ({} in parallel_lines[{}])", a[0], a[1]));
            c.push(on_line(&x, &a[0]));
            c.push(on_line(&x, &a[1]));
        }
        StepKind::CircleCenterPoint => {
            c.push(format!("circle_center[{x}] = {{ {} }}", a[0]));
            c.push(on_circle(&a[1], &x));
        }
        StepKind::CircleFromDiameter => {
            c.push(format!("{} < {}", a[0], a[1]));
            c.push(format!("circle_diameter[{x}] = {{ {}, {} }}", a[0], a[1]));
        }
        StepKind::LineCircleIntersect => {
            c.push(on_line(&x, &a[0]));
            c.push(on_circle(&x, &a[1]));
        }
        StepKind::CircleCircleIntersect => {
            c.push(format!("{} < {}", a[0], a[1]));
            c.push(on_circle(&x, &a[0]));
            c.push(on_circle(&x, &a[1]));
        }
        StepKind::PerpendicularThrough => {
            c.push(format!("{x} in perp_lines[{}]", a[1]));
            c.push(on_line(&a[0], &x));
        }
        StepKind::ParallelThrough => {
            c.push(format!("{x} in parallel_lines[{}]", a[1]));
            c.push(on_line(&a[0], &x));
        }
        StepKind::PerpBisector => {
            c.push(format!("{} < {}", a[0], a[1]));
            c.push(tuple("perp_bisectors", &[format!("{}, {}, {x}", a[0], a[1])]));
        }
        StepKind::RatioPoint3 => {
            let (p, q) = (&a[0], &a[1]);
            c.push(tuple("known_ratio_triplets", &[format!("{x}, {p}, {q}"), format!("{p}, {x}, {q}"), format!("{p}, {q}, {x}")]));
        }
        StepKind::RatioPoint4 => {
            // stored quadruplets are canonical within the symmetry orbit of (X, u; v, w)
            c.push(format!("{} < {}", a[1], a[2]));
            let (u, v, w) = (&a[0], &a[1], &a[2]);
            let orbit = [
                [&x, u, v, w],
                [u, &x, v, w],
                [&x, u, w, v],
                [u, &x, w, v],
                [v, w, &x, u],
                [w, v, &x, u],
                [v, w, u, &x],
                [w, v, u, &x],
            ];
            let alts: Vec<String> = orbit.iter().map(|o| o.map(|s| s.as_str()).join(", ")).collect();
            c.push(tuple("known_ratio_quadruplets", &alts));
        }
        StepKind::AngleFromLines => c.push(tuple("angle_defs", &[format!("{}, {}, {x}", a[0], a[1])])),
        StepKind::LineFromAngle => {
            c.push(tuple("angle_defs", &[format!("{}, {x}, {}", a[0], a[1])]));
            c.push(on_line(&a[2], &a[0]));
            c.push(on_line(&a[2], &x));
        }
        StepKind::HarmonicPoint => {
            c.push(format!("{} < {}", a[0], a[1]));
            let (p, q, r) = (&a[0], &a[1], &a[2]);
            let orbit = [
                [p, q, r, &x],
                [q, p, r, &x],
                [p, q, &x, r],
                [q, p, &x, r],
                [r, &x, p, q],
                [&x, r, p, q],
                [r, &x, q, p],
                [&x, r, q, p],
            ];
            let alts: Vec<String> = orbit.iter().map(|o| o.map(|s| s.as_str()).join(", ")).collect();
            c.push(tuple("harmonic_quadruplets", &alts));
        }
        StepKind::LocusCircle => c.push(tuple("locus_defs", &[format!("{}, {}, {}, {x}", a[0], a[1], a[2])])),
        StepKind::HomotheticLine => c.push(tuple("homothety_triplets", &[format!("{}, {}, {x}", a[0], a[1])])),
        StepKind::TangentFromPoint => {
            c.push(format!("{x} in tangent_lines[{}]", a[1]));
            c.push(on_line(&a[0], &x));
        }
        StepKind::CenterOfCircle => c.push(format!("circle_center[{}] = {{ {x} }}", a[0])),
    }
    c.push(format!("not ({x} in {}[i-1])", known(out_kind)));
    for k in KINDS {
        if k == out_kind {
            c.push(format!("{0}[i] = {0}[i-1] union {{ {x} }}", known(k)));
        } else {
            c.push(format!("{0}[i] = {0}[i-1]", known(k)));
        }
    }
    c
}

const RELATION_DECLS: &str = "\
array[Point] of set of Line: inc_lines;
array[Point] of set of Circle: inc_circles;
array[Line] of set of Line: perp_lines;
array[Line] of set of Line: parallel_lines;
array[Circle] of set of Point: circle_center;
array[Circle] of set of Point: circle_diameter;
array[Circle] of set of Line: tangent_lines;
array[int] of tuple(Point, Point, Point): known_ratio_triplets;
array[int] of tuple(Point, Point, Point, Point): known_ratio_quadruplets;
array[int] of tuple(Line, Line, Angle): angle_defs;
array[int] of tuple(Point, Point, Line): perp_bisectors;
array[int] of tuple(Point, Point, Point, Point): harmonic_quadruplets;
array[int] of tuple(Point, Point, Angle, Circle): locus_defs;
array[int] of tuple(Point, Line, Line): homothety_triplets;
";

/// The model text for `problem`; relations and enumerators go to the data file.
pub fn emit_model(
    problem: &Problem,
    kb: &KnowledgeBase,
    catalog: &Catalog,
    config: &PlannerConfig,
    mode: EmitMode,
) -> Result<EmittedModel, EmitError> {
    config.validate()?;
    check_sizes(kb, catalog)?;
    if let Some(p) = problem.given.iter().find(|p| p.index() >= kb.count(ObjectKind::Point)) {
        return Err(EmitError::UnknownPoint(p.index()));
    }
    let n = config.max_steps;
    let mut m = String::new();
    let _ = writeln!(m, "% Construction of triangle ABC from {}", problem.label(catalog).replace(',', ", "));
    m.push('\n');
    for k in KINDS {
        let _ = writeln!(m, "enum {};", kind_word(k));
    }
    let kinds: Vec<&str> = StepKind::ALL.iter().map(|k| k.name()).collect();
    let _ = writeln!(m, "enum ConsType = {{ {} }};", kinds.join(", "));
    m.push('\n');
    m.push_str(RELATION_DECLS);
    m.push('\n');
    let (bound, forall) = match mode {
        EmitMode::Fixed => {
            let _ = writeln!(m, "int: n = {n};");
            ("n", "forall(i in 1..n)".to_string())
        }
        EmitMode::Minimize => {
            let _ = writeln!(m, "int: maxSteps = {n};");
            m.push_str("var 1..maxSteps: n;\n");
            ("maxSteps", "forall(i in 1..maxSteps where i <= n)".to_string())
        }
    };
    m.push('\n');
    for k in KINDS {
        let _ = writeln!(m, "array[0..{bound}] of var set of {}: known_{};", kind_word(k), plural(k));
    }
    let _ = writeln!(m, "array[1..{bound}] of var ConsType: construct;");
    for k in KINDS {
        let _ = writeln!(m, "array[1..{bound}, 1..{}] of var {}: {};", slot_count(k), kind_word(k), plural(k));
    }
    m.push('\n');
    let given: Vec<&str> = problem.given.iter().map(|p| catalog.name((*p).into())).collect();
    let _ = writeln!(m, "constraint known_points[0] = {{ {} }};", given.join(", "));
    for k in &KINDS[1..] {
        let _ = writeln!(m, "constraint known_{}[0] = {{}};", plural(*k));
    }
    for kind in StepKind::ALL {
        m.push('\n');
        let _ = writeln!(m, "constraint {forall}\n(\n  construct[i] = {} ->\n  (", kind.name());
        let conj = transition_conjuncts(kind);
        for (j, c) in conj.iter().enumerate() {
            let sep = if j + 1 < conj.len() { " /\\" } else { "" };
            let _ = writeln!(m, "    {c}{sep}");
        }
        m.push_str("  )\n);\n");
    }
    m.push('\n');
    let _ = writeln!(m, "constraint\n{GOAL_LINE}");
    m.push('\n');
    m.push_str(match mode {
        EmitMode::Fixed => "solve satisfy;\n",
        EmitMode::Minimize => "solve minimize n;\n",
    });
    Ok(EmittedModel { model_text: m, data_text: emit_data(kb, catalog)?, n, mode })
}

fn check_sizes(kb: &KnowledgeBase, catalog: &Catalog) -> Result<(), EmitError> {
    for k in KINDS {
        if kb.count(k) != catalog.count(k) {
            return Err(EmitError::CatalogMismatch);
        }
        if catalog.count(k) == 0 {
            return Err(EmitError::EmptyKind(kind_word(k)));
        }
    }
    Ok(())
}

/// Enumerator definitions and every relation family, canonically ordered.
pub fn emit_data(kb: &KnowledgeBase, catalog: &Catalog) -> Result<String, EmitError> {
    check_sizes(kb, catalog)?;
    let name = |id: ObjectId| catalog.name(id).to_string();
    let mut d = String::new();
    for k in KINDS {
        let names: Vec<String> = (0..catalog.count(k)).map(|i| name(ObjectId::new(k, i))).collect();
        let _ = writeln!(d, "{} = {{ {} }};", kind_word(k), names.join(", "));
    }
    let set = |kind: ObjectKind, ids: &mut dyn Iterator<Item = usize>| {
        let names: Vec<String> = ids.map(|i| name(ObjectId::new(kind, i))).collect();
        if names.is_empty() {
            "{}".to_string()
        } else {
            format!("{{ {} }}", names.join(", "))
        }
    };
    let mut array = |family: &str, rows: Vec<String>| {
        d.push('\n');
        if rows.is_empty() {
            let _ = writeln!(d, "{family} = [];");
            return;
        }
        let _ = writeln!(d, "{family} = [");
        for (i, r) in rows.iter().enumerate() {
            let sep = if i + 1 < rows.len() { "," } else { "" };
            let _ = writeln!(d, "  {r}{sep}");
        }
        d.push_str("];\n");
    };
    let (pl, ll, kl, al) = (ObjectKind::Point, ObjectKind::Line, ObjectKind::Circle, ObjectKind::Angle);
    array("inc_lines", kb.inc_lines.iter().map(|s| set(ll, &mut s.iter())).collect());
    array("inc_circles", kb.inc_circles.iter().map(|s| set(kl, &mut s.iter())).collect());
    array("perp_lines", kb.perp_lines.iter().map(|s| set(ll, &mut s.iter())).collect());
    array("parallel_lines", kb.parallel_lines.iter().map(|s| set(ll, &mut s.iter())).collect());
    array("circle_center", kb.circle_center.iter().map(|c| set(pl, &mut c.iter().map(|p| p.index()))).collect());
    array(
        "circle_diameter",
        kb.circle_diameter.iter().map(|c| set(pl, &mut c.iter().flat_map(|(p, q)| [p.index(), q.index()]))).collect(),
    );
    array("tangent_lines", kb.tangent_lines.iter().map(|s| set(ll, &mut s.iter())).collect());
    let tuple = |ids: &[ObjectId]| format!("({})", ids.iter().map(|i| name(*i)).collect::<Vec<_>>().join(", "));
    array("known_ratio_triplets", kb.known_ratio_triplets.iter().map(|t| tuple(&t.map(Into::into))).collect());
    array("known_ratio_quadruplets", kb.known_ratio_quadruplets.iter().map(|t| tuple(&t.map(Into::into))).collect());
    let angle_defs: BTreeSet<_> = kb.angle_defs.iter().map(|a| (a.from, a.to, a.angle)).collect();
    array("angle_defs", angle_defs.iter().map(|(p, q, a)| tuple(&[(*p).into(), (*q).into(), (*a).into()])).collect());
    array("perp_bisectors", kb.perp_bisectors.iter().map(|(x, y, l)| tuple(&[(*x).into(), (*y).into(), (*l).into()])).collect());
    array("harmonic_quadruplets", kb.harmonic_quadruplets.iter().map(|t| tuple(&t.map(Into::into))).collect());
    array(
        "locus_defs",
        kb.locus_defs.iter().map(|(x, y, a, k)| tuple(&[(*x).into(), (*y).into(), (*a).into(), (*k).into()])).collect(),
    );
    array(
        "homothety_triplets",
        kb.homothety_triplets.iter().map(|(x, p, q)| tuple(&[(*x).into(), (*p).into(), (*q).into()])).collect(),
    );
    let _ = al;
    Ok(d)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("plan has {plan} steps but the model fixes n = {n}")]
    Length { plan: usize, n: usize },
    #[error("`{0}` is not an enumerator of the model")]
    UnknownName(String),
}

/// Evaluates plans against one loaded model.
#[derive(Debug)]
pub struct Replayer<'a> {
    model: &'a EmittedModel,
    loaded: LoadedModel,
}

impl<'a> Replayer<'a> {
    pub fn new(model: &'a EmittedModel) -> Result<Replayer<'a>, ModelError> {
        Ok(Replayer { model, loaded: LoadedModel::load(&model.model_text, &model.data_text)? })
    }

    /// Constraints violated by the assignment that follows `plan` from the
    /// problem's initial state.
    pub fn violations(&self, plan: &Plan, problem: &Problem, catalog: &Catalog) -> Result<Vec<Violation>, ReplayError> {
        let len = plan.len();
        let n = self.model.n;
        match self.model.mode {
            EmitMode::Fixed if len != n => return Err(ReplayError::Length { plan: len, n }),
            EmitMode::Minimize if len == 0 || len > n => return Err(ReplayError::Length { plan: len, n }),
            _ => {}
        }
        self.check(&problem.initial_state(), &plan.steps, catalog)
    }

    /// Like [`Replayer::violations`] but starting from an arbitrary state, so
    /// initial-state constraints may fail; transition failures carry the step
    /// index in their bindings.
    pub fn check(&self, start: &State, steps: &[Step], catalog: &Catalog) -> Result<Vec<Violation>, ReplayError> {
        let loaded = &self.loaded;
        let n = self.model.n;
        let len = steps.len().min(n);
        let member = |name: &str| loaded.member(name).cloned().ok_or_else(|| ReplayError::UnknownName(name.to_string()));
        let mut vars: HashMap<String, Value> = HashMap::new();
        if self.model.mode == EmitMode::Minimize {
            vars.insert("n".into(), Value::Int(len.max(1) as i64));
        }
        // states 0..=n; after the steps end the final state repeats
        let mut states = vec![*start];
        for step in &steps[..len] {
            let next = states.last().unwrap().with(step.produced);
            states.push(next);
        }
        for k in KINDS {
            let mut data = Vec::new();
            for i in 0..=n {
                let s = &states[i.min(len)];
                let names: BTreeSet<Value> =
                    s.objects().filter(|o| o.kind() == k).map(|o| member(catalog.name(o))).collect::<Result<_, _>>()?;
                data.push(Value::Set(names));
            }
            let name = format!("known_{}", plural(k));
            let index = loaded.index_sets(&name, &vars)?;
            vars.insert(name, Value::Array(Rc::new(ArrayValue::new(index, data))));
        }
        let mut construct = vec![member(StepKind::ALL[0].name())?; n];
        let mut slots: Vec<Vec<Value>> = Vec::new();
        for k in KINDS {
            let filler = member(catalog.name(ObjectId::new(k, 0)))?;
            slots.push(vec![filler; n * slot_count(k)]);
        }
        for (i, step) in steps[..len].iter().enumerate() {
            construct[i] = member(step.kind.name())?;
            let (out_slot, arg_slots) = slot_layout(step.kind);
            let args = step.args().unwrap_or_default();
            let placed = std::iter::once((step.produced, out_slot)).chain(args.into_iter().zip(arg_slots));
            for (obj, slot) in placed {
                let k = obj.kind();
                slots[k as usize][i * slot_count(k) + slot - 1] = member(catalog.name(obj))?;
            }
        }
        let index = loaded.index_sets("construct", &vars)?;
        vars.insert("construct".into(), Value::Array(Rc::new(ArrayValue::new(index, construct))));
        for (k, data) in KINDS.iter().zip(slots) {
            let index = loaded.index_sets(plural(*k), &vars)?;
            vars.insert(plural(*k).to_string(), Value::Array(Rc::new(ArrayValue::new(index, data))));
        }
        Ok(loaded.violations(&vars)?)
    }
}

/// Loads `model` and replays `plan` against it; see [`Replayer::violations`].
pub fn replay_plan(
    model: &EmittedModel,
    plan: &Plan,
    problem: &Problem,
    catalog: &Catalog,
) -> Result<Vec<Violation>, ReplayError> {
    Replayer::new(model)?.violations(plan, problem, catalog)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{derive_relations, DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE};
    use std::sync::OnceLock;

    fn fixture() -> &'static (Catalog, KnowledgeBase) {
        static F: OnceLock<(Catalog, KnowledgeBase)> = OnceLock::new();
        F.get_or_init(|| {
            let cat = Catalog::builtin();
            let kb = derive_relations(&cat, DEFAULT_PROBES, DEFAULT_TOLERANCE, DEFAULT_SEED).unwrap();
            (cat, kb)
        })
    }

    fn emit(names: [&str; 3], n: usize, mode: EmitMode) -> EmittedModel {
        let (cat, kb) = fixture();
        let problem = Problem::from_names(cat, names).unwrap();
        let config = PlannerConfig { max_steps: n, window: 1, ..PlannerConfig::default() };
        emit_model(&problem, kb, cat, &config, mode).unwrap()
    }

    #[test]
    fn required_lines_are_present() {
        let m = emit(["A", "G", "O"], 4, EmitMode::Fixed);
        assert!(m.model_text.lines().any(|l| l == GOAL_LINE));
        assert!(m.model_text.contains("known_points[0] = { A, G, O }"));
        assert!(m.model_text.contains("forall(i in 1..n)\n(\n  construct[i] = LineIntersect ->"));
        for kind in StepKind::ALL {
            assert_eq!(m.model_text.matches(&format!("construct[i] = {} ->", kind.name())).count(), 1);
        }
    }

    #[test]
    fn line_intersect_block_matches_the_template() {
        let m = emit(["A", "B", "C"], 1, EmitMode::Fixed);
        let block = "\
    lines[i,1] in known_lines[i-1] /\\
    lines[i,2] in known_lines[i-1] /\\
    lines[i,1] != lines[i,2] /\\
    lines[i,1] < lines[i,2] /\\
    not (lines[i,1] in parallel_lines[lines[i,2]]) /\\
    lines[i,1] in inc_lines[points[i,1]] /\\
    lines[i,2] in inc_lines[points[i,1]] /\\
    not (points[i,1] in known_points[i-1]) /\\
    known_points[i] = known_points[i-1] union { points[i,1] } /\\
    known_lines[i] = known_lines[i-1] /\\
    known_circles[i] = known_circles[i-1] /\\
    known_angles[i] = known_angles[i-1]
";
        assert!(m.model_text.contains(block), "{}", m.model_text);
    }

    #[test]
    fn both_modes_lint_clean() {
        for mode in [EmitMode::Fixed, EmitMode::Minimize] {
            let m = emit(["A", "B", "Ma"], 3, mode);
            let report = lint(&m.model_text, &m.data_text);
            assert!(report.is_clean(), "{mode:?}: {:?}", report.issues);
        }
    }

    #[test]
    fn lint_reports_defects() {
        let m = emit(["A", "B", "Ma"], 3, EmitMode::Fixed);
        let broken = m.model_text.replacen("construct[i] = LineIntersect ->", "construct[i] = LineIntersect -> (", 1);
        assert!(!lint(&broken, &m.data_text).is_clean());
        let undeclared = m.model_text.replace("parallel_lines[lines[i,2]]", "parallel[lines[i,2]]");
        assert!(lint(&undeclared, &m.data_text).issues.iter().any(|i| i.contains("`parallel` is not declared")));
        let missing = m.model_text.replacen("construct[i] = HarmonicPoint ->", "construct[i] = LocusCircle ->", 1);
        let issues = lint(&missing, &m.data_text).issues;
        assert!(issues.contains(&"0 transition blocks for HarmonicPoint".to_string()), "{issues:?}");
        assert!(issues.contains(&"2 transition blocks for LocusCircle".to_string()));
        let no_goal = m.model_text.replace(GOAL_LINE, "{ A, B } subset known_points[n];");
        assert!(lint(&no_goal, &m.data_text).issues.contains(&"goal constraint missing".to_string()));
    }

    #[test]
    fn data_is_canonical_and_complete() {
        let (cat, kb) = fixture();
        let a = emit_data(kb, cat).unwrap();
        assert_eq!(a, emit_data(&kb.clone(), cat).unwrap());
        assert!(a.contains("  (A, G, Ma)"), "ratio triplet missing");
        let empty = emit_data(&KnowledgeBase::empty(cat), cat).unwrap();
        assert!(empty.contains("known_ratio_triplets = [];"));
        assert!(empty.contains("inc_lines = [\n  {},"));
    }

    #[test]
    fn replayed_plans_satisfy_the_model() {
        let (cat, _) = fixture();
        let problem = Problem::from_names(cat, ["Ma", "Mb", "Mc"]).unwrap();
        let plan = Plan::parse("RatioPoint4(Ma, Mb, Mc) -> B\nRatioPoint3(B, Ma) -> C\nRatioPoint3(Mb, C) -> A\n", cat).unwrap();
        let fixed = emit(["Ma", "Mb", "Mc"], 3, EmitMode::Fixed);
        assert_eq!(replay_plan(&fixed, &plan, &problem, cat).unwrap(), vec![]);
        let minimize = emit(["Ma", "Mb", "Mc"], 5, EmitMode::Minimize);
        assert_eq!(replay_plan(&minimize, &plan, &problem, cat).unwrap(), vec![]);
        let wrong = Plan::parse("RatioPoint4(Ma, Mb, Mc) -> H\nRatioPoint3(B, Ma) -> C\nRatioPoint3(Mb, C) -> A\n", cat).unwrap();
        let v = replay_plan(&fixed, &wrong, &problem, cat).unwrap();
        assert!(v.iter().any(|v| v.bindings == vec![("i".to_string(), "1".to_string())]));
    }

    #[test]
    fn replay_rejects_length_mismatch() {
        let (cat, _) = fixture();
        let problem = Problem::from_names(cat, ["A", "B", "Ma"]).unwrap();
        let plan = Plan::parse("RatioPoint3(B, Ma) -> C\n", cat).unwrap();
        let m = emit(["A", "B", "Ma"], 2, EmitMode::Fixed);
        assert_eq!(replay_plan(&m, &plan, &problem, cat), Err(ReplayError::Length { plan: 1, n: 2 }));
    }

    #[test]
    fn transition_blocks_agree_with_native_steps() {
        use crate::planner::{check_step, enumerate_applicable};
        use crate::verifier::single_field_mutations;
        use rand::{Rng, SeedableRng};
        let (cat, kb) = fixture();
        let m = emit(["A", "B", "C"], 1, EmitMode::Fixed);
        let replayer = Replayer::new(&m).unwrap();
        let full = State::full(kb.counts);
        let mut candidates: BTreeSet<Step> = BTreeSet::new();
        for o in full.objects() {
            candidates.extend(enumerate_applicable(&full.without(o), kb));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let sample: Vec<Step> = candidates.iter().filter(|_| rng.random_bool(0.05)).cloned().collect();
        for step in sample {
            let single = Plan { steps: vec![step.clone()] };
            candidates.extend(single_field_mutations(&single, cat).into_iter().map(|p| p.steps[0].clone()));
        }
        let (mut accepted, mut rejected) = (0, 0);
        for trial in 0..4 {
            let mut state = full;
            for o in full.objects() {
                if rng.random_bool(if trial == 0 { 0.05 } else { 0.4 }) {
                    state = state.without(o);
                }
            }
            for step in &candidates {
                let native = check_step(&state, step, kb).is_ok();
                let v = replayer.check(&state, std::slice::from_ref(step), cat).unwrap();
                let model_ok = !v.iter().any(|v| !v.bindings.is_empty());
                assert_eq!(native, model_ok, "{} from {:?}", step.display(cat), state);
                if native {
                    accepted += 1;
                } else {
                    rejected += 1;
                }
            }
        }
        assert!(accepted > 50 && rejected > 50, "{accepted} {rejected}");
    }

    #[test]
    fn byte_stable() {
        assert_eq!(emit(["A", "G", "O"], 4, EmitMode::Minimize), emit(["A", "G", "O"], 4, EmitMode::Minimize));
    }
}
