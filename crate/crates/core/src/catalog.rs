//! The object catalog: every point, line, circle and angle a construction
//! may ever produce, each with an analytic constructor.
//!
//! The catalog is data. It is read from JSON of the form
//!
//! ```json
//! { "points": [ { "name": "Ma", "ctor": "midpoint", "args": ["B", "C"] } ],
//!   "lines": [...], "circles": [...], "angles": [...] }
//! ```
//!
//! Constructor arguments name other catalog entries of any kind; entries may
//! appear in any order as long as the dependency graph is acyclic. The
//! constructor vocabulary is listed in [`CTOR_TAGS`].

use crate::geometry::{circumcenter, line_angle, vertex_angle, Circle, Line, Point, TriangleInstance};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Names that every catalog must define.
pub const WERNICK_POINTS: [&str; 16] = [
    "A", "B", "C", "O", "I", "H", "G", "Ha", "Hb", "Hc", "Ta", "Tb", "Tc", "Ma", "Mb", "Mc",
];

/// Upper bound on entries per kind (states are 64-bit sets per kind).
pub const MAX_PER_KIND: usize = 64;

/// Constructor tags with their argument kinds (`P` point, `L` line, `K` circle).
pub const CTOR_TAGS: &[(&str, &str, &str)] = &[
    ("point", "vertex_a", ""),
    ("point", "vertex_b", ""),
    ("point", "vertex_c", ""),
    ("point", "midpoint", "PP"),
    ("point", "centroid", "PPP"),
    ("point", "circumcenter", "PPP"),
    ("point", "incenter", "PPP"),
    ("point", "orthocenter", "PPP"),
    ("point", "foot", "PL"),
    ("point", "intersection", "LL"),
    ("point", "reflection", "PP"),
    ("point", "second_intersection", "LKP"),
    ("line", "through", "PP"),
    ("line", "perpendicular", "PL"),
    ("line", "parallel", "PL"),
    ("line", "perp_bisector", "PP"),
    ("line", "angle_bisector", "PPP"),
    ("circle", "center_point", "PP"),
    ("circle", "circumcircle", "PPP"),
    ("circle", "incircle", "PPP"),
    ("circle", "diameter", "PP"),
    ("angle", "vertex_angle", "PPP"),
    ("angle", "line_angle", "LL"),
];

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u16);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(PointId);
id_type!(LineId);
id_type!(CircleId);
id_type!(AngleId);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Point,
    Line,
    Circle,
    Angle,
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectKind::Point => "point",
            ObjectKind::Line => "line",
            ObjectKind::Circle => "circle",
            ObjectKind::Angle => "angle",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectId {
    Point(PointId),
    Line(LineId),
    Circle(CircleId),
    Angle(AngleId),
}

impl ObjectId {
    pub fn kind(self) -> ObjectKind {
        match self {
            ObjectId::Point(_) => ObjectKind::Point,
            ObjectId::Line(_) => ObjectKind::Line,
            ObjectId::Circle(_) => ObjectKind::Circle,
            ObjectId::Angle(_) => ObjectKind::Angle,
        }
    }

    pub fn index(self) -> usize {
        match self {
            ObjectId::Point(p) => p.index(),
            ObjectId::Line(l) => l.index(),
            ObjectId::Circle(c) => c.index(),
            ObjectId::Angle(a) => a.index(),
        }
    }

    pub fn new(kind: ObjectKind, index: usize) -> ObjectId {
        let i = index as u16;
        match kind {
            ObjectKind::Point => ObjectId::Point(PointId(i)),
            ObjectKind::Line => ObjectId::Line(LineId(i)),
            ObjectKind::Circle => ObjectId::Circle(CircleId(i)),
            ObjectKind::Angle => ObjectId::Angle(AngleId(i)),
        }
    }

    pub fn as_point(self) -> Option<PointId> {
        match self {
            ObjectId::Point(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_line(self) -> Option<LineId> {
        match self {
            ObjectId::Line(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_circle(self) -> Option<CircleId> {
        match self {
            ObjectId::Circle(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_angle(self) -> Option<AngleId> {
        match self {
            ObjectId::Angle(a) => Some(a),
            _ => None,
        }
    }
}

impl From<PointId> for ObjectId {
    fn from(p: PointId) -> Self {
        ObjectId::Point(p)
    }
}
impl From<LineId> for ObjectId {
    fn from(l: LineId) -> Self {
        ObjectId::Line(l)
    }
}
impl From<CircleId> for ObjectId {
    fn from(c: CircleId) -> Self {
        ObjectId::Circle(c)
    }
}
impl From<AngleId> for ObjectId {
    fn from(a: AngleId) -> Self {
        ObjectId::Angle(a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointCtor {
    Vertex(usize),
    Midpoint(PointId, PointId),
    Centroid(PointId, PointId, PointId),
    Circumcenter(PointId, PointId, PointId),
    Incenter(PointId, PointId, PointId),
    Orthocenter(PointId, PointId, PointId),
    Foot(PointId, LineId),
    Intersection(LineId, LineId),
    /// Point reflection of the first argument through the second.
    Reflection(PointId, PointId),
    /// The intersection of the line and circle other than the given point.
    SecondIntersection(LineId, CircleId, PointId),
}

#[derive(Clone, Debug, PartialEq)]
pub enum LineCtor {
    Through(PointId, PointId),
    Perpendicular(PointId, LineId),
    Parallel(PointId, LineId),
    PerpBisector(PointId, PointId),
    /// Internal bisector at the middle argument.
    AngleBisector(PointId, PointId, PointId),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CircleCtor {
    CenterPoint(PointId, PointId),
    Circumcircle(PointId, PointId, PointId),
    Incircle(PointId, PointId, PointId),
    Diameter(PointId, PointId),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AngleCtor {
    /// Interior angle at the middle argument.
    VertexAngle(PointId, PointId, PointId),
    LineAngle(LineId, LineId),
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("duplicate object name `{0}`")]
    DuplicateName(String),
    #[error("`{name}`: unknown {kind} constructor `{ctor}`")]
    UnknownCtor { name: String, kind: ObjectKind, ctor: String },
    #[error("`{name}`: constructor `{ctor}` expects {expected} arguments, got {got}")]
    Arity { name: String, ctor: String, expected: usize, got: usize },
    #[error("`{name}`: unknown reference `{reference}`")]
    UnknownReference { name: String, reference: String },
    #[error("`{name}`: argument `{reference}` must be a {expected}")]
    WrongKind { name: String, reference: String, expected: ObjectKind },
    #[error("cyclic constructor dependencies among {0:?}")]
    Cycle(Vec<String>),
    #[error("too many {0} entries (limit {MAX_PER_KIND})")]
    TooMany(ObjectKind),
    #[error("catalog lacks required point `{0}`")]
    MissingPoint(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("constructor for `{object}` produced an undefined value")]
pub struct InstantiationError {
    pub object: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawEntry {
    name: String,
    ctor: String,
    #[serde(default)]
    args: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawCatalog {
    points: Vec<RawEntry>,
    lines: Vec<RawEntry>,
    circles: Vec<RawEntry>,
    #[serde(default)]
    angles: Vec<RawEntry>,
}

#[derive(Clone, Debug)]
pub struct Entry<C> {
    pub name: String,
    pub ctor: C,
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub points: Vec<Entry<PointCtor>>,
    pub lines: Vec<Entry<LineCtor>>,
    pub circles: Vec<Entry<CircleCtor>>,
    pub angles: Vec<Entry<AngleCtor>>,
    names: HashMap<String, ObjectId>,
    /// Evaluation order respecting constructor dependencies.
    order: Vec<ObjectId>,
    raw: RawCatalog,
}

const DEFAULT_CATALOG: &str = include_str!("../data/catalog.json");

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn builtin() -> Catalog {
        Catalog::from_json(DEFAULT_CATALOG).expect("builtin catalog is valid")
    }

    pub fn from_json(text: &str) -> Result<Catalog, CatalogError> {
        let raw: RawCatalog = serde_json::from_str(text).map_err(|e| CatalogError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Catalog::from_raw(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.raw).expect("catalog serializes")
    }

    fn from_raw(raw: RawCatalog) -> Result<Catalog, CatalogError> {
        let mut names = HashMap::new();
        let groups = [
            (ObjectKind::Point, &raw.points),
            (ObjectKind::Line, &raw.lines),
            (ObjectKind::Circle, &raw.circles),
            (ObjectKind::Angle, &raw.angles),
        ];
        for (kind, entries) in groups {
            if entries.len() > MAX_PER_KIND {
                return Err(CatalogError::TooMany(kind));
            }
            for (i, e) in entries.iter().enumerate() {
                if names.insert(e.name.clone(), ObjectId::new(kind, i)).is_some() {
                    return Err(CatalogError::DuplicateName(e.name.clone()));
                }
            }
        }
        for w in WERNICK_POINTS {
            if !matches!(names.get(w), Some(ObjectId::Point(_))) {
                return Err(CatalogError::MissingPoint(w));
            }
        }

        let resolver = Resolver { names: &names };
        let points = raw
            .points
            .iter()
            .map(|e| Ok(Entry { name: e.name.clone(), ctor: resolver.point(e)? }))
            .collect::<Result<Vec<_>, CatalogError>>()?;
        let lines = raw
            .lines
            .iter()
            .map(|e| Ok(Entry { name: e.name.clone(), ctor: resolver.line(e)? }))
            .collect::<Result<Vec<_>, CatalogError>>()?;
        let circles = raw
            .circles
            .iter()
            .map(|e| Ok(Entry { name: e.name.clone(), ctor: resolver.circle(e)? }))
            .collect::<Result<Vec<_>, CatalogError>>()?;
        let angles = raw
            .angles
            .iter()
            .map(|e| Ok(Entry { name: e.name.clone(), ctor: resolver.angle(e)? }))
            .collect::<Result<Vec<_>, CatalogError>>()?;

        let mut catalog = Catalog { points, lines, circles, angles, names, order: Vec::new(), raw };
        catalog.order = catalog.dependency_order()?;
        Ok(catalog)
    }

    fn dependencies(&self, id: ObjectId) -> Vec<ObjectId> {
        use ObjectId as O;
        match id {
            O::Point(p) => match &self.points[p.index()].ctor {
                PointCtor::Vertex(_) => vec![],
                PointCtor::Midpoint(a, b) | PointCtor::Reflection(a, b) => vec![O::Point(*a), O::Point(*b)],
                PointCtor::Centroid(a, b, c)
                | PointCtor::Circumcenter(a, b, c)
                | PointCtor::Incenter(a, b, c)
                | PointCtor::Orthocenter(a, b, c) => vec![O::Point(*a), O::Point(*b), O::Point(*c)],
                PointCtor::Foot(a, l) => vec![O::Point(*a), O::Line(*l)],
                PointCtor::Intersection(l, m) => vec![O::Line(*l), O::Line(*m)],
                PointCtor::SecondIntersection(l, k, a) => vec![O::Line(*l), O::Circle(*k), O::Point(*a)],
            },
            O::Line(l) => match &self.lines[l.index()].ctor {
                LineCtor::Through(a, b) | LineCtor::PerpBisector(a, b) => vec![O::Point(*a), O::Point(*b)],
                LineCtor::Perpendicular(a, m) | LineCtor::Parallel(a, m) => vec![O::Point(*a), O::Line(*m)],
                LineCtor::AngleBisector(a, b, c) => vec![O::Point(*a), O::Point(*b), O::Point(*c)],
            },
            O::Circle(k) => match &self.circles[k.index()].ctor {
                CircleCtor::CenterPoint(a, b) | CircleCtor::Diameter(a, b) => vec![O::Point(*a), O::Point(*b)],
                CircleCtor::Circumcircle(a, b, c) | CircleCtor::Incircle(a, b, c) => {
                    vec![O::Point(*a), O::Point(*b), O::Point(*c)]
                }
            },
            O::Angle(t) => match &self.angles[t.index()].ctor {
                AngleCtor::VertexAngle(a, b, c) => vec![O::Point(*a), O::Point(*b), O::Point(*c)],
                AngleCtor::LineAngle(l, m) => vec![O::Line(*l), O::Line(*m)],
            },
        }
    }

    fn dependency_order(&self) -> Result<Vec<ObjectId>, CatalogError> {
        let all: Vec<ObjectId> = self.ids().collect();
        let mut done: HashMap<ObjectId, ()> = HashMap::new();
        let mut order = Vec::with_capacity(all.len());
        loop {
            let before = order.len();
            for &id in &all {
                if !done.contains_key(&id) && self.dependencies(id).iter().all(|d| done.contains_key(d)) {
                    done.insert(id, ());
                    order.push(id);
                }
            }
            if order.len() == all.len() {
                return Ok(order);
            }
            if order.len() == before {
                let stuck = all.iter().filter(|id| !done.contains_key(id)).map(|&id| self.name(id).to_string());
                return Err(CatalogError::Cycle(stuck.collect()));
            }
        }
    }

    /// All ids, points first, each kind in catalog order.
    pub fn ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        let p = (0..self.points.len()).map(|i| ObjectId::new(ObjectKind::Point, i));
        let l = (0..self.lines.len()).map(|i| ObjectId::new(ObjectKind::Line, i));
        let c = (0..self.circles.len()).map(|i| ObjectId::new(ObjectKind::Circle, i));
        let a = (0..self.angles.len()).map(|i| ObjectId::new(ObjectKind::Angle, i));
        p.chain(l).chain(c).chain(a)
    }

    pub fn count(&self, kind: ObjectKind) -> usize {
        match kind {
            ObjectKind::Point => self.points.len(),
            ObjectKind::Line => self.lines.len(),
            ObjectKind::Circle => self.circles.len(),
            ObjectKind::Angle => self.angles.len(),
        }
    }

    pub fn name(&self, id: ObjectId) -> &str {
        match id {
            ObjectId::Point(p) => &self.points[p.index()].name,
            ObjectId::Line(l) => &self.lines[l.index()].name,
            ObjectId::Circle(c) => &self.circles[c.index()].name,
            ObjectId::Angle(a) => &self.angles[a.index()].name,
        }
    }

    pub fn lookup(&self, name: &str) -> Option<ObjectId> {
        self.names.get(name).copied()
    }

    pub fn point(&self, name: &str) -> Option<PointId> {
        self.lookup(name).and_then(ObjectId::as_point)
    }

    pub fn line(&self, name: &str) -> Option<LineId> {
        self.lookup(name).and_then(ObjectId::as_line)
    }

    pub fn circle(&self, name: &str) -> Option<CircleId> {
        self.lookup(name).and_then(ObjectId::as_circle)
    }

    pub fn angle(&self, name: &str) -> Option<AngleId> {
        self.lookup(name).and_then(ObjectId::as_angle)
    }

    /// Ids of `A`, `B` and `C`.
    pub fn vertices(&self) -> [PointId; 3] {
        ["A", "B", "C"].map(|n| self.point(n).expect("catalog has vertices"))
    }

    pub fn point_ids(&self) -> impl Iterator<Item = PointId> {
        (0..self.points.len() as u16).map(PointId)
    }

    pub fn line_ids(&self) -> impl Iterator<Item = LineId> {
        (0..self.lines.len() as u16).map(LineId)
    }

    pub fn circle_ids(&self) -> impl Iterator<Item = CircleId> {
        (0..self.circles.len() as u16).map(CircleId)
    }

    pub fn angle_ids(&self) -> impl Iterator<Item = AngleId> {
        (0..self.angles.len() as u16).map(AngleId)
    }
}

struct Resolver<'a> {
    names: &'a HashMap<String, ObjectId>,
}

impl Resolver<'_> {
    fn get(&self, e: &RawEntry, i: usize, kind: ObjectKind) -> Result<ObjectId, CatalogError> {
        let reference = &e.args[i];
        let id = self.names.get(reference).copied().ok_or_else(|| CatalogError::UnknownReference {
            name: e.name.clone(),
            reference: reference.clone(),
        })?;
        if id.kind() != kind {
            return Err(CatalogError::WrongKind { name: e.name.clone(), reference: reference.clone(), expected: kind });
        }
        Ok(id)
    }

    fn p(&self, e: &RawEntry, i: usize) -> Result<PointId, CatalogError> {
        Ok(self.get(e, i, ObjectKind::Point)?.as_point().unwrap())
    }

    fn l(&self, e: &RawEntry, i: usize) -> Result<LineId, CatalogError> {
        Ok(self.get(e, i, ObjectKind::Line)?.as_line().unwrap())
    }

    fn k(&self, e: &RawEntry, i: usize) -> Result<CircleId, CatalogError> {
        Ok(self.get(e, i, ObjectKind::Circle)?.as_circle().unwrap())
    }

    fn arity(&self, e: &RawEntry, kind: ObjectKind) -> Result<(), CatalogError> {
        let sig = CTOR_TAGS
            .iter()
            .find(|(k, tag, _)| *k == kind.to_string() && *tag == e.ctor)
            .map(|(_, _, sig)| sig.len())
            .ok_or_else(|| CatalogError::UnknownCtor { name: e.name.clone(), kind, ctor: e.ctor.clone() })?;
        if sig != e.args.len() {
            return Err(CatalogError::Arity { name: e.name.clone(), ctor: e.ctor.clone(), expected: sig, got: e.args.len() });
        }
        Ok(())
    }

    fn point(&self, e: &RawEntry) -> Result<PointCtor, CatalogError> {
        self.arity(e, ObjectKind::Point)?;
        Ok(match e.ctor.as_str() {
            "vertex_a" => PointCtor::Vertex(0),
            "vertex_b" => PointCtor::Vertex(1),
            "vertex_c" => PointCtor::Vertex(2),
            "midpoint" => PointCtor::Midpoint(self.p(e, 0)?, self.p(e, 1)?),
            "centroid" => PointCtor::Centroid(self.p(e, 0)?, self.p(e, 1)?, self.p(e, 2)?),
            "circumcenter" => PointCtor::Circumcenter(self.p(e, 0)?, self.p(e, 1)?, self.p(e, 2)?),
            "incenter" => PointCtor::Incenter(self.p(e, 0)?, self.p(e, 1)?, self.p(e, 2)?),
            "orthocenter" => PointCtor::Orthocenter(self.p(e, 0)?, self.p(e, 1)?, self.p(e, 2)?),
            "foot" => PointCtor::Foot(self.p(e, 0)?, self.l(e, 1)?),
            "intersection" => PointCtor::Intersection(self.l(e, 0)?, self.l(e, 1)?),
            "reflection" => PointCtor::Reflection(self.p(e, 0)?, self.p(e, 1)?),
            "second_intersection" => PointCtor::SecondIntersection(self.l(e, 0)?, self.k(e, 1)?, self.p(e, 2)?),
            _ => unreachable!("arity check rejects unknown tags"),
        })
    }

    fn line(&self, e: &RawEntry) -> Result<LineCtor, CatalogError> {
        self.arity(e, ObjectKind::Line)?;
        Ok(match e.ctor.as_str() {
            "through" => LineCtor::Through(self.p(e, 0)?, self.p(e, 1)?),
            "perpendicular" => LineCtor::Perpendicular(self.p(e, 0)?, self.l(e, 1)?),
            "parallel" => LineCtor::Parallel(self.p(e, 0)?, self.l(e, 1)?),
            "perp_bisector" => LineCtor::PerpBisector(self.p(e, 0)?, self.p(e, 1)?),
            "angle_bisector" => LineCtor::AngleBisector(self.p(e, 0)?, self.p(e, 1)?, self.p(e, 2)?),
            _ => unreachable!("arity check rejects unknown tags"),
        })
    }

    fn circle(&self, e: &RawEntry) -> Result<CircleCtor, CatalogError> {
        self.arity(e, ObjectKind::Circle)?;
        Ok(match e.ctor.as_str() {
            "center_point" => CircleCtor::CenterPoint(self.p(e, 0)?, self.p(e, 1)?),
            "circumcircle" => CircleCtor::Circumcircle(self.p(e, 0)?, self.p(e, 1)?, self.p(e, 2)?),
            "incircle" => CircleCtor::Incircle(self.p(e, 0)?, self.p(e, 1)?, self.p(e, 2)?),
            "diameter" => CircleCtor::Diameter(self.p(e, 0)?, self.p(e, 1)?),
            _ => unreachable!("arity check rejects unknown tags"),
        })
    }

    fn angle(&self, e: &RawEntry) -> Result<AngleCtor, CatalogError> {
        self.arity(e, ObjectKind::Angle)?;
        Ok(match e.ctor.as_str() {
            "vertex_angle" => AngleCtor::VertexAngle(self.p(e, 0)?, self.p(e, 1)?, self.p(e, 2)?),
            "line_angle" => AngleCtor::LineAngle(self.l(e, 0)?, self.l(e, 1)?),
            _ => unreachable!("arity check rejects unknown tags"),
        })
    }
}

/// Numeric realization of every catalog object on one triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct Instantiation {
    pub points: Vec<Point>,
    pub lines: Vec<Line>,
    pub circles: Vec<Circle>,
    /// Radians in `[0, π)`.
    pub angles: Vec<f64>,
    /// Circumradius of the triangle; the unit for relative tolerances.
    pub scale: f64,
}

impl Instantiation {
    pub fn point(&self, p: PointId) -> Point {
        self.points[p.index()]
    }

    pub fn line(&self, l: LineId) -> Line {
        self.lines[l.index()]
    }

    pub fn circle(&self, c: CircleId) -> Circle {
        self.circles[c.index()]
    }

    pub fn angle(&self, a: AngleId) -> f64 {
        self.angles[a.index()]
    }
}

pub fn instantiate_catalog(triangle: &TriangleInstance, catalog: &Catalog) -> Result<Instantiation, InstantiationError> {
    let nan = Point::new(f64::NAN, f64::NAN);
    let mut inst = Instantiation {
        points: vec![nan; catalog.points.len()],
        lines: vec![Line { normal: nan, offset: f64::NAN }; catalog.lines.len()],
        circles: vec![Circle::new(nan, f64::NAN); catalog.circles.len()],
        angles: vec![f64::NAN; catalog.angles.len()],
        scale: triangle.circumradius(),
    };
    let vertices = [triangle.a, triangle.b, triangle.c];
    for &id in &catalog.order {
        let fail = || InstantiationError { object: catalog.name(id).to_string() };
        match id {
            ObjectId::Point(p) => {
                let v = realize_point(&catalog.points[p.index()].ctor, &vertices, &inst).ok_or_else(fail)?;
                if !(v.x.is_finite() && v.y.is_finite()) {
                    return Err(fail());
                }
                inst.points[p.index()] = v;
            }
            ObjectId::Line(l) => {
                let v = realize_line(&catalog.lines[l.index()].ctor, &inst).ok_or_else(fail)?;
                if !v.is_finite() {
                    return Err(fail());
                }
                inst.lines[l.index()] = v;
            }
            ObjectId::Circle(c) => {
                let v = realize_circle(&catalog.circles[c.index()].ctor, &inst).ok_or_else(fail)?;
                if !v.is_finite() {
                    return Err(fail());
                }
                inst.circles[c.index()] = v;
            }
            ObjectId::Angle(a) => {
                let v = realize_angle(&catalog.angles[a.index()].ctor, &inst);
                if !v.is_finite() {
                    return Err(fail());
                }
                inst.angles[a.index()] = v;
            }
        }
    }
    Ok(inst)
}

fn incenter(a: &Point, b: &Point, c: &Point) -> Point {
    let (la, lb, lc) = ((b - c).norm(), (c - a).norm(), (a - b).norm());
    (a * la + b * lb + c * lc) / (la + lb + lc)
}

fn realize_point(ctor: &PointCtor, vertices: &[Point; 3], inst: &Instantiation) -> Option<Point> {
    let p = |id: &PointId| inst.point(*id);
    Some(match ctor {
        PointCtor::Vertex(i) => vertices[*i],
        PointCtor::Midpoint(a, b) => (p(a) + p(b)) / 2.0,
        PointCtor::Centroid(a, b, c) => (p(a) + p(b) + p(c)) / 3.0,
        PointCtor::Circumcenter(a, b, c) => circumcenter(&p(a), &p(b), &p(c))?,
        PointCtor::Incenter(a, b, c) => incenter(&p(a), &p(b), &p(c)),
        PointCtor::Orthocenter(a, b, c) => {
            // H = A + B + C - 2 O
            let o = circumcenter(&p(a), &p(b), &p(c))?;
            p(a) + p(b) + p(c) - o * 2.0
        }
        PointCtor::Foot(a, l) => inst.line(*l).project(&p(a)),
        PointCtor::Intersection(l, m) => inst.line(*l).intersect(&inst.line(*m))?,
        PointCtor::Reflection(a, b) => p(b) * 2.0 - p(a),
        PointCtor::SecondIntersection(l, k, a) => {
            let known = p(a);
            let circle = inst.circle(*k);
            circle
                .intersect_line(&inst.line(*l))
                .into_iter()
                .max_by(|x, y| (x - known).norm().total_cmp(&(y - known).norm()))?
        }
    })
}

fn realize_line(ctor: &LineCtor, inst: &Instantiation) -> Option<Line> {
    let p = |id: &PointId| inst.point(*id);
    match ctor {
        LineCtor::Through(a, b) => Line::through(&p(a), &p(b)),
        LineCtor::Perpendicular(a, l) => inst.line(*l).perpendicular_through(&p(a)),
        LineCtor::Parallel(a, l) => inst.line(*l).parallel_through(&p(a)),
        LineCtor::PerpBisector(a, b) => Line::point_direction(&((p(a) + p(b)) / 2.0), &{
            let d = p(b) - p(a);
            Point::new(-d.y, d.x)
        }),
        LineCtor::AngleBisector(a, b, c) => {
            let u = (p(a) - p(b)).normalize();
            let v = (p(c) - p(b)).normalize();
            Line::point_direction(&p(b), &(u + v))
        }
    }
}

fn realize_circle(ctor: &CircleCtor, inst: &Instantiation) -> Option<Circle> {
    let p = |id: &PointId| inst.point(*id);
    match ctor {
        CircleCtor::CenterPoint(o, a) => Some(Circle::new(p(o), (p(a) - p(o)).norm())),
        CircleCtor::Circumcircle(a, b, c) => Circle::through3(&p(a), &p(b), &p(c)),
        CircleCtor::Incircle(a, b, c) => {
            let center = incenter(&p(a), &p(b), &p(c));
            let side = Line::through(&p(b), &p(c))?;
            Some(Circle::new(center, side.signed_distance(&center).abs()))
        }
        CircleCtor::Diameter(a, b) => Some(Circle::new((p(a) + p(b)) / 2.0, (p(a) - p(b)).norm() / 2.0)),
    }
}

fn realize_angle(ctor: &AngleCtor, inst: &Instantiation) -> f64 {
    match ctor {
        AngleCtor::VertexAngle(a, b, c) => vertex_angle(&inst.point(*a), &inst.point(*b), &inst.point(*c)),
        AngleCtor::LineAngle(l, m) => line_angle(&inst.line(*l), &inst.line(*m)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_triangle, SamplingPolicy};

    fn tri(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> TriangleInstance {
        TriangleInstance { a: Point::new(a.0, a.1), b: Point::new(b.0, b.1), c: Point::new(c.0, c.1), seed: 0 }
    }

    fn at(cat: &Catalog, inst: &Instantiation, name: &str) -> Point {
        inst.point(cat.point(name).unwrap())
    }

    #[test]
    fn builtin_catalog_loads_with_wernick_points() {
        let cat = Catalog::builtin();
        for w in WERNICK_POINTS {
            assert!(cat.point(w).is_some(), "{w}");
        }
        // names are unique across kinds and round-trip through lookup
        for id in cat.ids() {
            assert_eq!(cat.lookup(cat.name(id)), Some(id));
        }
    }

    #[test]
    fn centroid_of_right_isosceles() {
        let cat = Catalog::builtin();
        let inst = instantiate_catalog(&tri((0.0, 0.0), (3.0, 0.0), (0.0, 3.0)), &cat).unwrap();
        assert!((at(&cat, &inst, "G") - Point::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn circumcenter_of_right_triangle_is_hypotenuse_midpoint() {
        let cat = Catalog::builtin();
        let inst = instantiate_catalog(&tri((0.0, 0.0), (2.0, 0.0), (0.0, 2.0)), &cat).unwrap();
        assert!((at(&cat, &inst, "O") - Point::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn incenter_of_3_4_5() {
        let cat = Catalog::builtin();
        let inst = instantiate_catalog(&tri((0.0, 0.0), (4.0, 0.0), (0.0, 3.0)), &cat).unwrap();
        assert!((at(&cat, &inst, "I") - Point::new(1.0, 1.0)).norm() < 1e-12);
        let incircle = inst.circle(cat.circle("incircle").unwrap());
        assert!((incircle.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn definitional_closure_on_samples() {
        let cat = Catalog::builtin();
        let policy = SamplingPolicy::default();
        for seed in 0..200 {
            let t = sample_triangle(seed, &policy).unwrap();
            let inst = instantiate_catalog(&t, &cat).unwrap();
            let s = inst.scale;
            let (a, b, c) = (t.a, t.b, t.c);
            assert!((at(&cat, &inst, "Ma") - (b + c) / 2.0).norm() <= 1e-9 * s);
            let o = at(&cat, &inst, "O");
            let r = (o - a).norm();
            assert!(((o - b).norm() - r).abs() <= 1e-9 * s);
            assert!(((o - c).norm() - r).abs() <= 1e-9 * s);
            let h = at(&cat, &inst, "H");
            for alt in ["alt_a", "alt_b", "alt_c"] {
                let l = inst.line(cat.line(alt).unwrap());
                assert!(l.signed_distance(&h).abs() <= 1e-9 * s);
            }
            for l in &inst.lines {
                assert!((l.normal.norm() - 1.0).abs() < 1e-12);
                assert!(l.normal.x > 0.0 || (l.normal.x == 0.0 && l.normal.y > 0.0));
            }
            for &v in &inst.angles {
                assert!((0.0..std::f64::consts::PI).contains(&v));
            }
        }
    }

    #[test]
    fn relabeling_vertices_permutes_objects() {
        let cat = Catalog::builtin();
        let t = sample_triangle(7, &SamplingPolicy::default()).unwrap();
        let swapped = TriangleInstance { a: t.a, b: t.c, c: t.b, seed: t.seed };
        let i1 = instantiate_catalog(&t, &cat).unwrap();
        let i2 = instantiate_catalog(&swapped, &cat).unwrap();
        let same = |x: &str, y: &str| (at(&cat, &i1, x) - at(&cat, &i2, y)).norm() < 1e-9;
        assert!(same("G", "G"));
        assert!(same("O", "O"));
        assert!(same("I", "I"));
        assert!(same("Ma", "Ma"));
        assert!(same("Mb", "Mc"));
        assert!(same("Hb", "Hc"));
        assert!(same("Tb", "Tc"));
        assert!(same("Wb", "Wc"));
    }

    #[test]
    fn bad_catalogs_are_rejected() {
        let cyclic = r#"{"points":[{"name":"A","ctor":"midpoint","args":["B","B"]},{"name":"B","ctor":"midpoint","args":["A","A"]}],"lines":[],"circles":[]}"#;
        assert!(Catalog::from_json(cyclic).is_err());
        assert!(matches!(Catalog::from_json("{ \"points\": ["), Err(CatalogError::Syntax { .. })));
        let mut raw: serde_json::Value = serde_json::from_str(DEFAULT_CATALOG).unwrap();
        raw["points"][3]["ctor"] = "nonsense".into();
        assert!(matches!(Catalog::from_json(&raw.to_string()), Err(CatalogError::UnknownCtor { .. })));
    }
}
