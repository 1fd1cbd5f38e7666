//! Preconditions and effects of each step kind.

use super::{State, Step, StepKind};
use crate::catalog::{AngleId, CircleId, LineId, ObjectId, ObjectKind, PointId};
use crate::kb::{canonical_harmonic, canonical_quad, AngleDef, AngleForm, KnowledgeBase};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// The precondition a step failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    Arity,
    ProducedKind,
    InCatalog,
    ArgumentsKnown,
    ProducedNew,
    Distinct,
    CanonicalOrder,
    NotParallel,
    /// Membership in the named relation family.
    Relation(&'static str),
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Arity => "argument arity",
            Condition::ProducedKind => "produced kind",
            Condition::InCatalog => "objects in catalog",
            Condition::ArgumentsKnown => "arguments known",
            Condition::ProducedNew => "produced object is new",
            Condition::Distinct => "distinct arguments",
            Condition::CanonicalOrder => "canonical argument order",
            Condition::NotParallel => "lines not parallel",
            Condition::Relation(family) => family,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{kind} is not applicable: condition `{condition}` fails")]
pub struct StepError {
    pub kind: StepKind,
    pub condition: Condition,
}

fn need(ok: bool, c: Condition) -> Result<(), Condition> {
    if ok {
        Ok(())
    } else {
        Err(c)
    }
}

fn has_angle_def(kb: &KnowledgeBase, from: LineId, to: LineId, angle: AngleId) -> bool {
    AngleForm::ALL.into_iter().any(|form| kb.angle_defs.contains(&AngleDef { from, to, angle, form }))
}

fn on_line(kb: &KnowledgeBase, p: PointId, l: LineId) -> bool {
    kb.inc_lines[p.index()].contains(l.index())
}

fn on_circle(kb: &KnowledgeBase, p: PointId, k: CircleId) -> bool {
    kb.inc_circles[p.index()].contains(k.index())
}

fn in_catalog(kb: &KnowledgeBase, id: ObjectId) -> bool {
    id.index() < kb.count(id.kind())
}

/// Static part of the precondition: the knowledge-base relation licensing the step.
fn relation_check(step: &Step, kb: &KnowledgeBase) -> Result<(), Condition> {
    use Condition::{CanonicalOrder, NotParallel, Relation};
    let (p, l, k, a) = (&step.point_args, &step.line_args, &step.circle_args, &step.angle_args);
    let out = step.produced;
    let (pt, ln, ci, an) = (out.as_point(), out.as_line(), out.as_circle(), out.as_angle());
    match step.kind {
        StepKind::LineThroughPoints => {
            need(p[0] < p[1], CanonicalOrder)?;
            let m = ln.unwrap();
            need(on_line(kb, p[0], m) && on_line(kb, p[1], m), Relation("inc_lines"))
        }
        StepKind::LineIntersect => {
            need(l[0] < l[1], CanonicalOrder)?;
            need(!kb.parallel_lines[l[0].index()].contains(l[1].index()), NotParallel)?;
            let x = pt.unwrap();
            need(on_line(kb, x, l[0]) && on_line(kb, x, l[1]), Relation("inc_lines"))
        }
        StepKind::CircleCenterPoint => {
            let c = ci.unwrap();
            need(kb.circle_center[c.index()] == Some(p[0]), Relation("circle_center"))?;
            need(on_circle(kb, p[1], c), Relation("inc_circles"))
        }
        StepKind::CircleFromDiameter => {
            need(kb.circle_diameter[ci.unwrap().index()] == Some((p[0], p[1])), Relation("circle_diameter"))
        }
        StepKind::LineCircleIntersect => {
            let x = pt.unwrap();
            need(on_line(kb, x, l[0]), Relation("inc_lines"))?;
            need(on_circle(kb, x, k[0]), Relation("inc_circles"))
        }
        StepKind::CircleCircleIntersect => {
            need(k[0] < k[1], CanonicalOrder)?;
            let x = pt.unwrap();
            need(on_circle(kb, x, k[0]) && on_circle(kb, x, k[1]), Relation("inc_circles"))
        }
        StepKind::PerpendicularThrough => {
            let m = ln.unwrap();
            need(kb.perp_lines[l[0].index()].contains(m.index()), Relation("perp_lines"))?;
            need(on_line(kb, p[0], m), Relation("inc_lines"))
        }
        StepKind::ParallelThrough => {
            let m = ln.unwrap();
            need(kb.parallel_lines[l[0].index()].contains(m.index()), Relation("parallel_lines"))?;
            need(on_line(kb, p[0], m), Relation("inc_lines"))
        }
        StepKind::PerpBisector => {
            need(kb.perp_bisectors.contains(&(p[0], p[1], ln.unwrap())), Relation("perp_bisectors"))
        }
        StepKind::RatioPoint3 => {
            let x = pt.unwrap();
            let t = &kb.known_ratio_triplets;
            need(
                t.contains(&[x, p[0], p[1]]) || t.contains(&[p[0], x, p[1]]) || t.contains(&[p[0], p[1], x]),
                Relation("known_ratio_triplets"),
            )
        }
        StepKind::RatioPoint4 => {
            need(p[1] < p[2], CanonicalOrder)?;
            let q = canonical_quad([pt.unwrap(), p[0], p[1], p[2]]);
            need(kb.known_ratio_quadruplets.contains(&q), Relation("known_ratio_quadruplets"))
        }
        StepKind::AngleFromLines => need(has_angle_def(kb, l[0], l[1], an.unwrap()), Relation("angle_defs")),
        StepKind::LineFromAngle => {
            let m = ln.unwrap();
            need(has_angle_def(kb, l[0], m, a[0]), Relation("angle_defs"))?;
            need(on_line(kb, p[0], l[0]) && on_line(kb, p[0], m), Relation("inc_lines"))
        }
        StepKind::HarmonicPoint => {
            need(p[0] < p[1], CanonicalOrder)?;
            let h = canonical_harmonic([p[0], p[1], p[2], pt.unwrap()]);
            need(kb.harmonic_quadruplets.contains(&h), Relation("harmonic_quadruplets"))
        }
        StepKind::LocusCircle => {
            need(kb.locus_defs.contains(&(p[0], p[1], a[0], ci.unwrap())), Relation("locus_defs"))
        }
        StepKind::HomotheticLine => {
            need(kb.homothety_triplets.contains(&(p[0], l[0], ln.unwrap())), Relation("homothety_triplets"))
        }
        StepKind::TangentFromPoint => {
            let m = ln.unwrap();
            need(kb.tangent_lines[k[0].index()].contains(m.index()), Relation("tangent_lines"))?;
            need(on_line(kb, p[0], m), Relation("inc_lines"))
        }
        StepKind::CenterOfCircle => need(kb.circle_center[k[0].index()] == pt, Relation("circle_center")),
    }
}

/// Objects that must be known for `step` to apply: its arguments.
pub fn requirements(step: &Step) -> State {
    let mut s = State::default();
    for a in step.args().unwrap_or_default() {
        s.insert(a);
    }
    s
}

/// Checks every precondition of `step` in `state`.
pub fn check_step(state: &State, step: &Step, kb: &KnowledgeBase) -> Result<(), Condition> {
    let args = step.args().ok_or(Condition::Arity)?;
    need(step.produced.kind() == step.kind.produces(), Condition::ProducedKind)?;
    need(args.iter().chain([&step.produced]).all(|a| in_catalog(kb, *a)), Condition::InCatalog)?;
    need(args.iter().all(|a| state.contains(*a)), Condition::ArgumentsKnown)?;
    need(!state.contains(step.produced), Condition::ProducedNew)?;
    let distinct = args.iter().enumerate().all(|(i, a)| !args[i + 1..].contains(a));
    need(distinct, Condition::Distinct)?;
    relation_check(step, kb)
}

pub fn apply_step(state: &State, step: &Step, kb: &KnowledgeBase) -> Result<State, StepError> {
    check_step(state, step, kb).map_err(|condition| StepError { kind: step.kind, condition })?;
    Ok(state.with(step.produced))
}

/// Every step applicable in `state`, sorted by kind, then arguments.
pub fn enumerate_applicable(state: &State, kb: &KnowledgeBase) -> Vec<Step> {
    let mut cands: BTreeSet<Step> = BTreeSet::new();
    let pts: Vec<PointId> = state.points.iter().map(|i| PointId(i as u16)).collect();
    let lns: Vec<LineId> = state.lines.iter().map(|i| LineId(i as u16)).collect();
    let cis: Vec<CircleId> = state.circles.iter().map(|i| CircleId(i as u16)).collect();
    let all_points = || (0..kb.count(ObjectKind::Point)).map(|i| PointId(i as u16));
    let lines_of = |s: crate::bitset::IdSet| s.iter().map(|i| LineId(i as u16)).collect::<Vec<_>>();
    let mut add = |kind: StepKind, args: &[ObjectId], out: ObjectId| {
        cands.insert(Step::new(kind, args, out));
    };

    for &x in &pts {
        for &y in &pts {
            for m in lines_of(kb.inc_lines[x.index()]) {
                add(StepKind::LineThroughPoints, &[x.into(), y.into()], m.into());
            }
        }
        for (c, center) in kb.circle_center.iter().enumerate() {
            if *center == Some(x) {
                let c = CircleId(c as u16);
                for &y in &pts {
                    add(StepKind::CircleCenterPoint, &[x.into(), y.into()], c.into());
                }
            }
        }
        for &l in &lns {
            for m in lines_of(kb.perp_lines[l.index()]) {
                add(StepKind::PerpendicularThrough, &[x.into(), l.into()], m.into());
            }
            for m in lines_of(kb.parallel_lines[l.index()]) {
                add(StepKind::ParallelThrough, &[x.into(), l.into()], m.into());
            }
        }
        for &c in &cis {
            for m in lines_of(kb.tangent_lines[c.index()]) {
                add(StepKind::TangentFromPoint, &[x.into(), c.into()], m.into());
            }
        }
    }
    for &l in &lns {
        for q in all_points() {
            if on_line(kb, q, l) {
                for &m in &lns {
                    add(StepKind::LineIntersect, &[l.into(), m.into()], q.into());
                }
                for &c in &cis {
                    add(StepKind::LineCircleIntersect, &[l.into(), c.into()], q.into());
                }
            }
        }
    }
    for &c in &cis {
        for q in all_points() {
            for &d in &cis {
                if on_circle(kb, q, c) {
                    add(StepKind::CircleCircleIntersect, &[c.into(), d.into()], q.into());
                }
            }
        }
        if let Some(o) = kb.circle_center[c.index()] {
            add(StepKind::CenterOfCircle, &[c.into()], o.into());
        }
    }
    for (c, d) in kb.circle_diameter.iter().enumerate() {
        if let Some((x, y)) = d {
            add(StepKind::CircleFromDiameter, &[(*x).into(), (*y).into()], CircleId(c as u16).into());
        }
    }
    for &(x, y, m) in &kb.perp_bisectors {
        add(StepKind::PerpBisector, &[x.into(), y.into()], m.into());
    }
    for t in &kb.known_ratio_triplets {
        for i in 0..3 {
            let rest: Vec<ObjectId> = (0..3).filter(|j| *j != i).map(|j| t[j].into()).collect();
            add(StepKind::RatioPoint3, &rest, t[i].into());
        }
    }
    for &[x, y, z, w] in &kb.known_ratio_quadruplets {
        let (zw, xy) = ([z.min(w), z.max(w)], [x.min(y), x.max(y)]);
        for (out, u, pair) in [(x, y, zw), (y, x, zw), (z, w, xy), (w, z, xy)] {
            add(StepKind::RatioPoint4, &[u.into(), pair[0].into(), pair[1].into()], out.into());
        }
    }
    for d in &kb.angle_defs {
        add(StepKind::AngleFromLines, &[d.from.into(), d.to.into()], d.angle.into());
        for q in all_points() {
            if on_line(kb, q, d.from) && on_line(kb, q, d.to) {
                add(StepKind::LineFromAngle, &[d.from.into(), d.angle.into(), q.into()], d.to.into());
            }
        }
    }
    for &[x, y, z, w] in &kb.harmonic_quadruplets {
        for (pair, given, out) in [([x, y], z, w), ([x, y], w, z), ([z, w], x, y), ([z, w], y, x)] {
            add(StepKind::HarmonicPoint, &[pair[0].into(), pair[1].into(), given.into()], out.into());
        }
    }
    for &(x, y, a, c) in &kb.locus_defs {
        add(StepKind::LocusCircle, &[x.into(), y.into(), a.into()], c.into());
    }
    for &(x, l, m) in &kb.homothety_triplets {
        add(StepKind::HomotheticLine, &[x.into(), l.into()], m.into());
    }
    cands.into_iter().filter(|s| check_step(state, s, kb).is_ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
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

    fn pts(cat: &Catalog, names: &[&str]) -> State {
        State::from_points(&names.iter().map(|n| cat.point(n).unwrap()).collect::<Vec<_>>())
    }

    #[test]
    fn line_through_two_vertices() {
        let (cat, kb) = fixture();
        let steps = enumerate_applicable(&pts(cat, &["A", "B"]), kb);
        let want = Step::new(
            StepKind::LineThroughPoints,
            &[cat.point("A").unwrap().into(), cat.point("B").unwrap().into()],
            cat.line("c").unwrap().into(),
        );
        assert!(steps.contains(&want));
        assert!(steps.iter().all(|s| s.kind != StepKind::LineIntersect));
    }

    #[test]
    fn ratio_point_from_b_and_ma() {
        let (cat, kb) = fixture();
        let steps = enumerate_applicable(&pts(cat, &["B", "Ma"]), kb);
        let c = cat.point("C").unwrap();
        assert!(steps
            .iter()
            .any(|s| s.kind == StepKind::RatioPoint3 && s.produced == c.into()));
    }

    #[test]
    fn apply_adds_exactly_one_object() {
        let (cat, kb) = fixture();
        let s0 = pts(cat, &["A", "B", "H"]);
        for step in enumerate_applicable(&s0, kb) {
            let s1 = apply_step(&s0, &step, kb).unwrap();
            assert_eq!(s1.len(), s0.len() + 1);
            assert!(s0.is_subset(&s1) && s1.contains(step.produced));
            let again = apply_step(&s1, &step, kb).unwrap_err();
            assert_eq!(again.condition, Condition::ProducedNew);
        }
    }

    #[test]
    fn unknown_arguments_are_named() {
        let (cat, kb) = fixture();
        let step = Step::new(
            StepKind::LineIntersect,
            &[cat.line("a").unwrap().into(), cat.line("b").unwrap().into()],
            cat.point("C").unwrap().into(),
        );
        let err = apply_step(&pts(cat, &["A", "B", "G"]), &step, kb).unwrap_err();
        assert_eq!(err.condition, Condition::ArgumentsKnown);
        assert_eq!(err.condition.name(), "arguments known");
    }

    #[test]
    fn two_valued_intersection_yields_either_point() {
        let (cat, kb) = fixture();
        let mut s = pts(cat, &["A", "O"]);
        s.insert(cat.line("a").unwrap().into());
        s.insert(cat.circle("circumcircle").unwrap().into());
        let produced: Vec<_> = enumerate_applicable(&s, kb)
            .into_iter()
            .filter(|st| st.kind == StepKind::LineCircleIntersect)
            .map(|st| cat.name(st.produced).to_string())
            .collect();
        assert_eq!(produced, ["B", "C"]);
    }

    #[test]
    fn enumerated_steps_have_known_requirements() {
        let (cat, kb) = fixture();
        let mut s = pts(cat, &["Ma", "Mb", "Mc", "O", "H"]);
        s.insert(cat.line("euler").unwrap().into());
        s.insert(cat.circle("nine_point").unwrap().into());
        for step in enumerate_applicable(&s, kb) {
            assert!(requirements(&step).is_subset(&s), "{}", step.display(cat));
        }
    }
}
