//! Shortest construction plans.
//!
//! A state is the set of objects constructed so far. Each [`Step`] adds one
//! object whose construction is licensed by a relation of the knowledge base;
//! a plan reaches a state containing `A`, `B` and `C`.

mod oracle;
mod search;
mod step;
mod text;

pub use oracle::{brute_force_min_plan, OracleError, ORACLE_STATE_LIMIT};
pub use search::{solve, Outcome, Planner, SearchStats, SolveResult};
pub use step::{apply_step, check_step, enumerate_applicable, requirements, Condition, StepError};
pub use text::PlanParseError;

use crate::bitset::IdSet;
use crate::catalog::{AngleId, Catalog, CircleId, LineId, ObjectId, ObjectKind, PointId};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Duration;
use thiserror::Error;

/// Known objects, one set per kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub points: IdSet,
    pub lines: IdSet,
    pub circles: IdSet,
    pub angles: IdSet,
}

impl State {
    pub fn from_points(points: &[PointId]) -> State {
        State { points: points.iter().map(|p| p.index()).collect(), ..State::default() }
    }

    /// Every object of a catalog with the given per-kind sizes.
    pub fn full(counts: [usize; 4]) -> State {
        let all = |n: usize| IdSet(if n >= 64 { u64::MAX } else { (1u64 << n) - 1 });
        State { points: all(counts[0]), lines: all(counts[1]), circles: all(counts[2]), angles: all(counts[3]) }
    }

    fn set(&self, kind: ObjectKind) -> IdSet {
        match kind {
            ObjectKind::Point => self.points,
            ObjectKind::Line => self.lines,
            ObjectKind::Circle => self.circles,
            ObjectKind::Angle => self.angles,
        }
    }

    fn set_mut(&mut self, kind: ObjectKind) -> &mut IdSet {
        match kind {
            ObjectKind::Point => &mut self.points,
            ObjectKind::Line => &mut self.lines,
            ObjectKind::Circle => &mut self.circles,
            ObjectKind::Angle => &mut self.angles,
        }
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        self.set(id.kind()).contains(id.index())
    }

    /// Adds `id`; returns whether it was new.
    pub fn insert(&mut self, id: ObjectId) -> bool {
        self.set_mut(id.kind()).insert(id.index())
    }

    pub fn with(mut self, id: ObjectId) -> State {
        self.insert(id);
        self
    }

    pub fn without(mut self, id: ObjectId) -> State {
        self.set_mut(id.kind()).0 &= !(1u64 << id.index());
        self
    }

    pub fn len(&self) -> usize {
        self.points.len() + self.lines.len() + self.circles.len() + self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &State) -> bool {
        self.points.is_subset(other.points)
            && self.lines.is_subset(other.lines)
            && self.circles.is_subset(other.circles)
            && self.angles.is_subset(other.angles)
    }

    pub fn union(&self, other: &State) -> State {
        State {
            points: self.points.union(other.points),
            lines: self.lines.union(other.lines),
            circles: self.circles.union(other.circles),
            angles: self.angles.union(other.angles),
        }
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> + '_ {
        [ObjectKind::Point, ObjectKind::Line, ObjectKind::Circle, ObjectKind::Angle]
            .into_iter()
            .flat_map(move |k| self.set(k).iter().map(move |i| ObjectId::new(k, i)))
    }
}

/// Construction-step types, in the fixed order used for tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StepKind {
    LineThroughPoints,
    LineIntersect,
    CircleCenterPoint,
    CircleFromDiameter,
    LineCircleIntersect,
    CircleCircleIntersect,
    PerpendicularThrough,
    ParallelThrough,
    PerpBisector,
    RatioPoint3,
    RatioPoint4,
    AngleFromLines,
    LineFromAngle,
    HarmonicPoint,
    LocusCircle,
    HomotheticLine,
    TangentFromPoint,
    CenterOfCircle,
}

use ObjectKind::{Angle as KA, Circle as KK, Line as KL, Point as KP};

impl StepKind {
    pub const ALL: [StepKind; 18] = [
        StepKind::LineThroughPoints,
        StepKind::LineIntersect,
        StepKind::CircleCenterPoint,
        StepKind::CircleFromDiameter,
        StepKind::LineCircleIntersect,
        StepKind::CircleCircleIntersect,
        StepKind::PerpendicularThrough,
        StepKind::ParallelThrough,
        StepKind::PerpBisector,
        StepKind::RatioPoint3,
        StepKind::RatioPoint4,
        StepKind::AngleFromLines,
        StepKind::LineFromAngle,
        StepKind::HarmonicPoint,
        StepKind::LocusCircle,
        StepKind::HomotheticLine,
        StepKind::TangentFromPoint,
        StepKind::CenterOfCircle,
    ];

    /// Argument kinds, in order.
    pub fn signature(self) -> &'static [ObjectKind] {
        match self {
            StepKind::LineThroughPoints => &[KP, KP],
            StepKind::LineIntersect => &[KL, KL],
            StepKind::CircleCenterPoint => &[KP, KP],
            StepKind::CircleFromDiameter => &[KP, KP],
            StepKind::LineCircleIntersect => &[KL, KK],
            StepKind::CircleCircleIntersect => &[KK, KK],
            StepKind::PerpendicularThrough => &[KP, KL],
            StepKind::ParallelThrough => &[KP, KL],
            StepKind::PerpBisector => &[KP, KP],
            StepKind::RatioPoint3 => &[KP, KP],
            StepKind::RatioPoint4 => &[KP, KP, KP],
            StepKind::AngleFromLines => &[KL, KL],
            StepKind::LineFromAngle => &[KL, KA, KP],
            StepKind::HarmonicPoint => &[KP, KP, KP],
            StepKind::LocusCircle => &[KP, KP, KA],
            StepKind::HomotheticLine => &[KP, KL],
            StepKind::TangentFromPoint => &[KP, KK],
            StepKind::CenterOfCircle => &[KK],
        }
    }

    pub fn produces(self) -> ObjectKind {
        match self {
            StepKind::LineThroughPoints
            | StepKind::PerpendicularThrough
            | StepKind::ParallelThrough
            | StepKind::PerpBisector
            | StepKind::LineFromAngle
            | StepKind::HomotheticLine
            | StepKind::TangentFromPoint => KL,
            StepKind::CircleCenterPoint | StepKind::CircleFromDiameter | StepKind::LocusCircle => KK,
            StepKind::AngleFromLines => KA,
            _ => KP,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StepKind::LineThroughPoints => "LineThroughPoints",
            StepKind::LineIntersect => "LineIntersect",
            StepKind::CircleCenterPoint => "CircleCenterPoint",
            StepKind::CircleFromDiameter => "CircleFromDiameter",
            StepKind::LineCircleIntersect => "LineCircleIntersect",
            StepKind::CircleCircleIntersect => "CircleCircleIntersect",
            StepKind::PerpendicularThrough => "PerpendicularThrough",
            StepKind::ParallelThrough => "ParallelThrough",
            StepKind::PerpBisector => "PerpBisector",
            StepKind::RatioPoint3 => "RatioPoint3",
            StepKind::RatioPoint4 => "RatioPoint4",
            StepKind::AngleFromLines => "AngleFromLines",
            StepKind::LineFromAngle => "LineFromAngle",
            StepKind::HarmonicPoint => "HarmonicPoint",
            StepKind::LocusCircle => "LocusCircle",
            StepKind::HomotheticLine => "HomotheticLine",
            StepKind::TangentFromPoint => "TangentFromPoint",
            StepKind::CenterOfCircle => "CenterOfCircle",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StepKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StepKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown step kind `{s}`"))
    }
}

/// One construction step. Arguments are kept per kind; their interleaving
/// follows [`StepKind::signature`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub kind: StepKind,
    pub point_args: Vec<PointId>,
    pub line_args: Vec<LineId>,
    pub circle_args: Vec<CircleId>,
    pub angle_args: Vec<AngleId>,
    pub produced: ObjectId,
}

impl Step {
    /// Builds a step from arguments in signature order (kinds are not checked).
    pub fn new(kind: StepKind, args: &[ObjectId], produced: ObjectId) -> Step {
        let mut step = Step {
            kind,
            point_args: Vec::new(),
            line_args: Vec::new(),
            circle_args: Vec::new(),
            angle_args: Vec::new(),
            produced,
        };
        for a in args {
            match *a {
                ObjectId::Point(p) => step.point_args.push(p),
                ObjectId::Line(l) => step.line_args.push(l),
                ObjectId::Circle(c) => step.circle_args.push(c),
                ObjectId::Angle(x) => step.angle_args.push(x),
            }
        }
        step
    }

    /// Arguments in signature order, or `None` if the per-kind lists do not
    /// match the signature.
    pub fn args(&self) -> Option<Vec<ObjectId>> {
        let sig = self.kind.signature();
        let count = |k| sig.iter().filter(|s| **s == k).count();
        if self.point_args.len() != count(KP)
            || self.line_args.len() != count(KL)
            || self.circle_args.len() != count(KK)
            || self.angle_args.len() != count(KA)
        {
            return None;
        }
        let mut cursor = [0usize; 4];
        Some(
            sig.iter()
                .map(|k| {
                    let i = cursor[*k as usize];
                    cursor[*k as usize] += 1;
                    match k {
                        KP => self.point_args[i].into(),
                        KL => self.line_args[i].into(),
                        KK => self.circle_args[i].into(),
                        KA => self.angle_args[i].into(),
                    }
                })
                .collect(),
        )
    }

    fn all_args(&self) -> Vec<ObjectId> {
        let mut v: Vec<ObjectId> = self.point_args.iter().map(|p| (*p).into()).collect();
        v.extend(self.line_args.iter().map(|l| ObjectId::from(*l)));
        v.extend(self.circle_args.iter().map(|c| ObjectId::from(*c)));
        v.extend(self.angle_args.iter().map(|a| ObjectId::from(*a)));
        v
    }

    pub fn display<'a>(&'a self, catalog: &'a Catalog) -> impl fmt::Display + 'a {
        StepDisplay { step: self, catalog }
    }
}

impl Ord for Step {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |s: &Step| (s.kind, s.args().unwrap_or_else(|| s.all_args()), s.produced);
        key(self).cmp(&key(other))
    }
}

impl PartialOrd for Step {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

struct StepDisplay<'a> {
    step: &'a Step,
    catalog: &'a Catalog,
}

impl fmt::Display for StepDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args = self.step.args().unwrap_or_else(|| self.step.all_args());
        let names: Vec<&str> = args.iter().map(|a| self.catalog.name(*a)).collect();
        write!(f, "{}({}) -> {}", self.step.kind, names.join(", "), self.catalog.name(self.step.produced))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<Step>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The states `S_0, …, S_n` visited by the plan, without checking preconditions.
    pub fn states(&self, problem: &Problem) -> Vec<State> {
        let mut s = problem.initial_state();
        let mut out = vec![s];
        for step in &self.steps {
            s.insert(step.produced);
            out.push(s);
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("given points must be distinct")]
    NotDistinct,
}

/// Three given points; the goal is always the triangle's vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Problem {
    pub given: [PointId; 3],
    pub goal: [PointId; 3],
}

impl Problem {
    pub fn new(catalog: &Catalog, given: [PointId; 3]) -> Result<Problem, ProblemError> {
        if given[0] == given[1] || given[0] == given[2] || given[1] == given[2] {
            return Err(ProblemError::NotDistinct);
        }
        Ok(Problem { given, goal: catalog.vertices() })
    }

    pub fn from_names(catalog: &Catalog, names: [&str; 3]) -> Result<Problem, ProblemError> {
        let mut given = [PointId(0); 3];
        for (g, n) in given.iter_mut().zip(names) {
            *g = catalog.point(n).ok_or_else(|| ProblemError::UnknownPoint(n.to_string()))?;
        }
        Problem::new(catalog, given)
    }

    pub fn initial_state(&self) -> State {
        State::from_points(&self.given)
    }

    pub fn is_goal(&self, state: &State) -> bool {
        self.goal.iter().all(|g| state.points.contains(g.index()))
    }

    pub fn missing_goals(&self, state: &State) -> usize {
        self.goal.iter().filter(|g| !state.points.contains(g.index())).count()
    }

    pub fn label(&self, catalog: &Catalog) -> String {
        self.given.map(|p| catalog.name(p.into()).to_string()).join(",")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Linear,
    Minimization,
    Incremental,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Linear, Strategy::Minimization, Strategy::Incremental];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Linear => "linear",
            Strategy::Minimization => "minimization",
            Strategy::Incremental => "incremental",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected linear, minimization or incremental)"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("max_steps must be at least 1")]
    ZeroSteps,
    #[error("window {window} must lie in 1..={max_steps}")]
    Window { window: usize, max_steps: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlannerConfig {
    pub max_steps: usize,
    pub window: usize,
    pub strategy: Strategy,
    /// Wall-clock budget per solve; `None` searches to completion.
    pub timeout: Option<Duration>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig { max_steps: 11, window: 3, strategy: Strategy::Minimization, timeout: None }
    }
}

impl PlannerConfig {
    pub fn with_strategy(strategy: Strategy) -> PlannerConfig {
        PlannerConfig { strategy, ..PlannerConfig::default() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_steps == 0 {
            return Err(ConfigError::ZeroSteps);
        }
        if self.window == 0 || self.window > self.max_steps {
            return Err(ConfigError::Window { window: self.window, max_steps: self.max_steps });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_ops() {
        let s = State::from_points(&[PointId(0), PointId(3)]);
        assert_eq!(s.len(), 2);
        let t = s.with(LineId(2).into());
        assert!(t.contains(LineId(2).into()));
        assert!(s.is_subset(&t));
        assert_eq!(t.without(LineId(2).into()), s);
        assert_eq!(t.objects().count(), 3);
        assert_eq!(State::full([26, 16, 6, 3]).len(), 51);
    }

    #[test]
    fn step_args_follow_signature() {
        let s = Step::new(
            StepKind::LineFromAngle,
            &[LineId(1).into(), AngleId(0).into(), PointId(4).into()],
            LineId(2).into(),
        );
        assert_eq!(s.line_args, vec![LineId(1)]);
        assert_eq!(s.args().unwrap(), vec![ObjectId::Line(LineId(1)), AngleId(0).into(), PointId(4).into()]);
        let bad = Step::new(StepKind::LineFromAngle, &[LineId(1).into()], LineId(2).into());
        assert!(bad.args().is_none());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in StepKind::ALL {
            assert_eq!(k.name().parse::<StepKind>().unwrap(), k);
        }
        assert!("Teleport".parse::<StepKind>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(PlannerConfig::default().validate().is_ok());
        let bad = PlannerConfig { window: 12, ..PlannerConfig::default() };
        assert_eq!(bad.validate(), Err(ConfigError::Window { window: 12, max_steps: 11 }));
    }

    #[test]
    fn problem_rejects_repeats() {
        let cat = Catalog::builtin();
        assert_eq!(Problem::from_names(&cat, ["A", "A", "G"]), Err(ProblemError::NotDistinct));
        assert!(matches!(Problem::from_names(&cat, ["A", "Q", "G"]), Err(ProblemError::UnknownPoint(_))));
    }
}
