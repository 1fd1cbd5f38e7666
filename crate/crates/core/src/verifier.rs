//! Independent plan checks: symbolic replay against the knowledge base, and
//! numeric replay on random triangles.

use crate::catalog::{instantiate_catalog, Catalog, Instantiation, InstantiationError, ObjectId};
use crate::geometry::sample::probe_seeds;
use crate::geometry::{angle_residual_mod_pi, line_angle, sample_triangle, Circle, Line, Point, SamplingError, SamplingPolicy};
use crate::kb::{AngleForm, KnowledgeBase};
use crate::planner::{check_step, Plan, Problem, Step, StepKind};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

pub const DEFAULT_SAMPLES: usize = 5;
pub const DEFAULT_TOLERANCE: f64 = 1e-7;
pub const DEFAULT_SEED: u64 = 7;

/// Seed offset of the triangle on which ratio witnesses are measured.
const REFERENCE_SALT: u64 = 0x5eed_0f7a_7105;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    /// 1-based step index; `None` for the final goal check.
    pub step: Option<usize>,
    pub condition: String,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub failures: Vec<Failure>,
    pub triangles_checked: usize,
}

impl VerificationReport {
    fn from_failures(failures: Vec<Failure>, triangles_checked: usize) -> VerificationReport {
        let verdict = if failures.is_empty() { Verdict::Accepted } else { Verdict::Rejected };
        VerificationReport { verdict, failures, triangles_checked }
    }

    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accepted
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Instantiation(#[from] InstantiationError),
}

/// Replays `plan` from the given points; rejects at the first inapplicable
/// step or if the vertices are not all known at the end.
pub fn check_plan_symbolic(plan: &Plan, problem: &Problem, kb: &KnowledgeBase) -> VerificationReport {
    let mut state = problem.initial_state();
    for (i, step) in plan.steps.iter().enumerate() {
        if let Err(c) = check_step(&state, step, kb) {
            let failure = Failure { step: Some(i + 1), condition: c.name().to_string(), residual: None };
            return VerificationReport::from_failures(vec![failure], 0);
        }
        state.insert(step.produced);
    }
    let mut failures = Vec::new();
    if !problem.is_goal(&state) {
        failures.push(Failure { step: None, condition: "goal reached".into(), residual: None });
    }
    VerificationReport::from_failures(failures, 0)
}

/// Executes each step numerically on `samples` random triangles and compares
/// the result with the catalog realization of the produced object.
pub fn check_plan_numeric(
    plan: &Plan,
    _problem: &Problem,
    catalog: &Catalog,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let policy = SamplingPolicy::default();
    let reference = instantiate_catalog(&sample_triangle(seed ^ REFERENCE_SALT, &policy)?, catalog)?;
    let mut worst: Vec<Option<f64>> = vec![None; plan.len()];
    for s in probe_seeds(seed, samples) {
        let inst = instantiate_catalog(&sample_triangle(s, &policy)?, catalog)?;
        for (i, step) in plan.steps.iter().enumerate() {
            let r = step_residual(step, &inst, &reference);
            if r.is_nan() || r > tolerance {
                let w = worst[i].get_or_insert(r);
                if r > *w || r.is_nan() {
                    *w = r;
                }
            }
        }
    }
    let failures = worst
        .into_iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| Failure { step: Some(i + 1), condition: "numeric coincidence".into(), residual: Some(r) }))
        .collect();
    Ok(VerificationReport::from_failures(failures, samples))
}

/// Both checks with default settings; the numeric check only runs if the
/// symbolic one accepts.
pub fn check_plan(plan: &Plan, problem: &Problem, kb: &KnowledgeBase, catalog: &Catalog) -> Result<VerificationReport, VerifyError> {
    let sym = check_plan_symbolic(plan, problem, kb);
    if !sym.accepted() {
        return Ok(sym);
    }
    check_plan_numeric(plan, problem, catalog, DEFAULT_SAMPLES, DEFAULT_TOLERANCE, DEFAULT_SEED)
}

/// Every plan obtained by replacing exactly one field of one step (the
/// produced object or a single argument) with another catalog object of the
/// same kind.
pub fn single_field_mutations(plan: &Plan, catalog: &Catalog) -> Vec<Plan> {
    let mut out = Vec::new();
    for (i, step) in plan.steps.iter().enumerate() {
        let Some(args) = step.args() else { continue };
        for field in 0..=args.len() {
            let current = if field == args.len() { step.produced } else { args[field] };
            for other in catalog.ids().filter(|o| o.kind() == current.kind() && *o != current) {
                let mutated = if field == args.len() {
                    Step::new(step.kind, &args, other)
                } else {
                    let mut a = args.clone();
                    a[field] = other;
                    Step::new(step.kind, &a, step.produced)
                };
                let mut p = plan.clone();
                p.steps[i] = mutated;
                out.push(p);
            }
        }
    }
    out
}

/// Candidate realizations of the produced object computed from the arguments.
enum Candidates {
    Points(Vec<Point>),
    Lines(Vec<Line>),
    Circles(Vec<Circle>),
    Angles(Vec<f64>),
}

fn point_of(inst: &Instantiation, id: ObjectId) -> Point {
    inst.point(id.as_point().expect("point argument"))
}

fn line_of(inst: &Instantiation, id: ObjectId) -> Line {
    inst.line(id.as_line().expect("line argument"))
}

fn circle_of(inst: &Instantiation, id: ObjectId) -> Circle {
    inst.circle(id.as_circle().expect("circle argument"))
}

/// Signed distance from `x` to `q` over that to `p`, with `q` oriented like `p`.
fn homothety_ratio(x: &Point, p: &Line, q: &Line) -> f64 {
    let sign = if p.normal.dot(&q.normal) >= 0.0 { 1.0 } else { -1.0 };
    sign * q.signed_distance(x) / p.signed_distance(x)
}

fn candidates(step: &Step, inst: &Instantiation, reference: &Instantiation) -> Option<Candidates> {
    let args = step.args()?;
    let out = step.produced;
    let pt = |i: usize| point_of(inst, args[i]);
    let ln = |i: usize| line_of(inst, args[i]);
    let ci = |i: usize| circle_of(inst, args[i]);
    let rpt = |id: ObjectId| point_of(reference, id);
    Some(match step.kind {
        StepKind::LineThroughPoints => Candidates::Lines(Line::through(&pt(0), &pt(1)).into_iter().collect()),
        StepKind::LineIntersect => Candidates::Points(ln(0).intersect(&ln(1)).into_iter().collect()),
        StepKind::CircleCenterPoint => Candidates::Circles(vec![Circle::new(pt(0), (pt(1) - pt(0)).norm())]),
        StepKind::CircleFromDiameter => {
            Candidates::Circles(vec![Circle::new((pt(0) + pt(1)) / 2.0, (pt(1) - pt(0)).norm() / 2.0)])
        }
        StepKind::LineCircleIntersect => Candidates::Points(ci(1).intersect_line(&ln(0))),
        StepKind::CircleCircleIntersect => Candidates::Points(ci(0).intersect_circle(&ci(1))),
        StepKind::PerpendicularThrough => Candidates::Lines(ln(1).perpendicular_through(&pt(0)).into_iter().collect()),
        StepKind::ParallelThrough => Candidates::Lines(ln(1).parallel_through(&pt(0)).into_iter().collect()),
        StepKind::PerpBisector => {
            let (x, y) = (pt(0), pt(1));
            Candidates::Lines(Line::point_direction(&((x + y) / 2.0), &Point::new(y.y - x.y, x.x - y.x)).into_iter().collect())
        }
        StepKind::RatioPoint3 => {
            // position of the produced point along P1 → P2, measured on the reference triangle
            let (r1, r2, rp) = (rpt(args[0]), rpt(args[1]), rpt(out));
            let d = r2 - r1;
            let s = (rp - r1).dot(&d) / d.norm_squared();
            Candidates::Points(vec![pt(0) + (pt(1) - pt(0)) * s])
        }
        StepKind::RatioPoint4 => {
            let (ru, rv, rw, rp) = (rpt(args[0]), rpt(args[1]), rpt(args[2]), rpt(out));
            let d = rv - rw;
            let k = (rp - ru).dot(&d) / d.norm_squared();
            Candidates::Points(vec![pt(0) + (pt(1) - pt(2)) * k])
        }
        StepKind::AngleFromLines => {
            let theta = line_angle(&ln(0), &ln(1));
            Candidates::Angles(AngleForm::ALL.iter().flat_map(|f| f.invert(theta)).collect())
        }
        StepKind::LineFromAngle => {
            let (base, phi, x) = (ln(0), inst.angle(args[1].as_angle()?), pt(2));
            let lines = AngleForm::ALL
                .iter()
                .filter_map(|f| {
                    let t = base.direction_angle() + f.eval(phi);
                    Line::point_direction(&x, &Point::new(t.cos(), t.sin()))
                })
                .collect();
            Candidates::Lines(lines)
        }
        StepKind::HarmonicPoint => {
            let (p1, p2, p3) = (pt(0), pt(1), pt(2));
            let d = p2 - p1;
            let t3 = (p3 - p1).dot(&d) / d.norm_squared();
            let denom = 2.0 * t3 - 1.0;
            Candidates::Points(if denom.abs() < 1e-12 { Vec::new() } else { vec![p1 + d * (t3 / denom)] })
        }
        StepKind::LocusCircle => {
            let (x, y, phi) = (pt(0), pt(1), inst.angle(args[2].as_angle()?));
            let mid = (x + y) / 2.0;
            let half = (y - x).norm() / 2.0;
            let normal = Point::new(x.y - y.y, y.x - x.x) / (2.0 * half);
            let mut circles = Vec::new();
            for f in AngleForm::ALL {
                let theta = f.eval(phi);
                if theta.sin().abs() < 1e-9 {
                    continue;
                }
                let offset = half / theta.tan();
                let radius = half / theta.sin().abs();
                circles.push(Circle::new(mid + normal * offset, radius));
                circles.push(Circle::new(mid - normal * offset, radius));
            }
            Candidates::Circles(circles)
        }
        StepKind::HomotheticLine => {
            let (rx, rp, rq) = (rpt(args[0]), line_of(reference, args[1]), line_of(reference, out));
            let h = homothety_ratio(&rx, &rp, &rq);
            let (x, p) = (pt(0), ln(1));
            let anchor = x - p.normal * (h * p.signed_distance(&x));
            Candidates::Lines(Line::point_direction(&anchor, &p.direction()).into_iter().collect())
        }
        StepKind::TangentFromPoint => Candidates::Lines(ci(1).tangents_from(&pt(0))),
        StepKind::CenterOfCircle => Candidates::Points(vec![ci(0).center]),
    })
}

/// Smallest discrepancy between a candidate and the realized produced
/// object, relative to the circumradius (radians for angles).
fn step_residual(step: &Step, inst: &Instantiation, reference: &Instantiation) -> f64 {
    let Some(cands) = candidates(step, inst, reference) else { return f64::INFINITY };
    let scale = inst.scale;
    let out = step.produced;
    let best = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::INFINITY, f64::min);
    match (cands, out) {
        (Candidates::Points(v), ObjectId::Point(p)) => {
            let real = inst.point(p);
            best(&mut v.iter().map(|c| (c - real).norm() / scale))
        }
        (Candidates::Lines(v), ObjectId::Line(l)) => {
            let real = inst.line(l);
            best(&mut v.iter().map(|c| c.residual(&real, scale)))
        }
        (Candidates::Circles(v), ObjectId::Circle(k)) => {
            let real = inst.circle(k);
            best(&mut v.iter().map(|c| c.residual(&real, scale)))
        }
        (Candidates::Angles(v), ObjectId::Angle(a)) => {
            let real = inst.angle(a);
            best(&mut v.iter().map(|c| angle_residual_mod_pi(*c, real).min((c - real).abs() % PI)))
        }
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{derive_relations, DEFAULT_PROBES, DEFAULT_SEED as KB_SEED, DEFAULT_TOLERANCE as KB_TOL};
    use crate::planner::Planner;
    use crate::PlannerConfig;
    use std::sync::OnceLock;

    fn fixture() -> &'static (Catalog, KnowledgeBase) {
        static F: OnceLock<(Catalog, KnowledgeBase)> = OnceLock::new();
        F.get_or_init(|| {
            let cat = Catalog::builtin();
            let kb = derive_relations(&cat, DEFAULT_PROBES, KB_TOL, KB_SEED).unwrap();
            (cat, kb)
        })
    }

    fn plan(cat: &Catalog, text: &str) -> Plan {
        Plan::parse(text, cat).unwrap()
    }

    #[test]
    fn empty_plan_for_vertices() {
        let (cat, kb) = fixture();
        let problem = Problem::from_names(cat, ["A", "B", "C"]).unwrap();
        assert!(check_plan_symbolic(&Plan::default(), &problem, kb).accepted());
        let r = check_plan_numeric(&Plan::default(), &problem, cat, 5, 1e-7, 1).unwrap();
        assert!(r.accepted());
        assert_eq!(r.triangles_checked, 5);
    }

    #[test]
    fn intersecting_unknown_lines_is_rejected_at_step_one() {
        let (cat, kb) = fixture();
        let problem = Problem::from_names(cat, ["A", "B", "G"]).unwrap();
        let r = check_plan_symbolic(&plan(cat, "LineIntersect(a, b) -> C"), &problem, kb);
        assert_eq!(r.verdict, Verdict::Rejected);
        assert_eq!(r.failures[0].step, Some(1));
        assert_eq!(r.failures[0].condition, "arguments known");
    }

    #[test]
    fn midpoint_plan_and_its_mutation() {
        let (cat, _) = fixture();
        let problem = Problem::from_names(cat, ["A", "B", "Ma"]).unwrap();
        let good = plan(cat, "RatioPoint3(B, Ma) -> C");
        assert!(check_plan_numeric(&good, &problem, cat, 5, 1e-7, 3).unwrap().accepted());
        let bad = plan(cat, "RatioPoint3(B, Ma) -> Mb");
        let r = check_plan_numeric(&bad, &problem, cat, 5, 1e-7, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Rejected);
        assert_eq!(r.failures[0].step, Some(1));
        assert!(r.failures[0].residual.unwrap() > 1e-3);
    }

    #[test]
    fn incomplete_plan_misses_goal() {
        let (cat, kb) = fixture();
        let problem = Problem::from_names(cat, ["A", "B", "H"]).unwrap();
        let r = check_plan_symbolic(&plan(cat, "LineThroughPoints(A, B) -> c"), &problem, kb);
        assert_eq!(r.failures[0].step, None);
        assert_eq!(r.failures[0].condition, "goal reached");
    }

    #[test]
    fn every_step_kind_replays_numerically() {
        // one applicable step of each kind from a rich state, checked in isolation
        let (cat, kb) = fixture();
        let planner_state = crate::planner::State::full(kb.counts);
        let problem = Problem::from_names(cat, ["A", "B", "C"]).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for o in planner_state.objects() {
            for step in crate::planner::enumerate_applicable(&planner_state.without(o), kb) {
                let single = Plan { steps: vec![step.clone()] };
                let r = check_plan_numeric(&single, &problem, cat, 3, 1e-7, 11).unwrap();
                assert!(r.accepted(), "{} {:?}", step.display(cat), r.failures);
                seen.insert(step.kind);
            }
        }
        assert!(seen.len() >= 16, "{seen:?}");
    }

    #[test]
    fn solver_plans_pass_both_checks() {
        let (cat, kb) = fixture();
        let planner = Planner::new(kb);
        for names in [["A", "B", "H"], ["Ma", "Mb", "Mc"], ["A", "O", "I"], ["A", "Hb", "Hc"]] {
            let problem = Problem::from_names(cat, names).unwrap();
            let p = planner.solve(&problem, &PlannerConfig::default()).plan.unwrap();
            let r = check_plan(&p, &problem, kb, cat).unwrap();
            assert!(r.accepted(), "{names:?}: {:?}", r.failures);
        }
    }

    #[test]
    fn report_serializes() {
        let r = VerificationReport::from_failures(
            vec![Failure { step: Some(2), condition: "inc_lines".into(), residual: None }],
            0,
        );
        let json = r.to_json();
        assert!(json.contains("\"verdict\": \"rejected\""));
        assert!(json.contains("\"condition\": \"inc_lines\""));
    }
}
