//! The static geometric knowledge the planner reasons with.
//!
//! Fourteen relation families over catalog objects, each learned by probing
//! random triangles ([`derive_relations`]) and re-checkable on fresh ones
//! ([`validate_relations`]). Ratio values and homothety coefficients are not
//! stored: only the fact that they are triangle-independent matters to the
//! search.

mod conditions;
mod derive;
mod io;
mod validate;

pub use derive::{derive_relations, DeriveError};
pub(crate) use derive::{canonical_harmonic, canonical_quad};
pub use io::{load_kb, save_kb, KbLoadError};
pub use validate::{validate_relations, ValidationReport};

use crate::bitset::IdSet;
use crate::catalog::{AngleId, Catalog, CircleId, LineId, ObjectKind, PointId};
use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

pub const DEFAULT_PROBES: usize = 5;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_VALIDATION_PROBES: usize = 100;
pub const DEFAULT_SEED: u64 = 2024;

/// How the angle between two lines depends on a catalog angle `φ` (mod π).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AngleForm {
    Phi,
    PiMinusPhi,
    HalfPhi,
    HalfPiMinusHalfPhi,
    HalfPiMinusPhi,
    HalfPiPlusHalfPhi,
}

impl AngleForm {
    pub const ALL: [AngleForm; 6] = [
        AngleForm::Phi,
        AngleForm::PiMinusPhi,
        AngleForm::HalfPhi,
        AngleForm::HalfPiMinusHalfPhi,
        AngleForm::HalfPiMinusPhi,
        AngleForm::HalfPiPlusHalfPhi,
    ];

    pub fn eval(self, phi: f64) -> f64 {
        let v = match self {
            AngleForm::Phi => phi,
            AngleForm::PiMinusPhi => PI - phi,
            AngleForm::HalfPhi => phi / 2.0,
            AngleForm::HalfPiMinusHalfPhi => FRAC_PI_2 - phi / 2.0,
            AngleForm::HalfPiMinusPhi => FRAC_PI_2 - phi,
            AngleForm::HalfPiPlusHalfPhi => FRAC_PI_2 + phi / 2.0,
        };
        v.rem_euclid(PI)
    }

    /// Values of `φ` in `(0, π)` whose form is congruent to `theta` mod π.
    pub fn invert(self, theta: f64) -> Vec<f64> {
        let (slope, offset) = match self {
            AngleForm::Phi => (1.0, 0.0),
            AngleForm::PiMinusPhi => (-1.0, PI),
            AngleForm::HalfPhi => (0.5, 0.0),
            AngleForm::HalfPiMinusHalfPhi => (-0.5, FRAC_PI_2),
            AngleForm::HalfPiMinusPhi => (-1.0, FRAC_PI_2),
            AngleForm::HalfPiPlusHalfPhi => (0.5, FRAC_PI_2),
        };
        // slope * phi + offset = theta + k π
        (-3..=3)
            .map(|k| (theta + k as f64 * PI - offset) / slope)
            .filter(|phi| *phi > 0.0 && *phi < PI)
            .collect()
    }

    pub fn tag(self) -> &'static str {
        match self {
            AngleForm::Phi => "phi",
            AngleForm::PiMinusPhi => "pi_minus_phi",
            AngleForm::HalfPhi => "half_phi",
            AngleForm::HalfPiMinusHalfPhi => "half_pi_minus_half_phi",
            AngleForm::HalfPiMinusPhi => "half_pi_minus_phi",
            AngleForm::HalfPiPlusHalfPhi => "half_pi_plus_half_phi",
        }
    }

    pub fn from_tag(tag: &str) -> Option<AngleForm> {
        AngleForm::ALL.into_iter().find(|f| f.tag() == tag)
    }
}

/// `(p, q, φ, form)`: the angle from `p` to `q` equals `form(φ)` mod π.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngleDef {
    pub from: LineId,
    pub to: LineId,
    pub angle: AngleId,
    pub form: AngleForm,
}

/// One tuple of one relation family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    IncLine(PointId, LineId),
    IncCircle(PointId, CircleId),
    Perpendicular(LineId, LineId),
    Parallel(LineId, LineId),
    CircleCenter(CircleId, PointId),
    CircleDiameter(CircleId, PointId, PointId),
    Tangent(CircleId, LineId),
    RatioTriplet([PointId; 3]),
    RatioQuadruplet([PointId; 4]),
    AngleDef(AngleDef),
    PerpBisector(PointId, PointId, LineId),
    Harmonic([PointId; 4]),
    Locus(PointId, PointId, AngleId, CircleId),
    Homothety(PointId, LineId, LineId),
}

impl Relation {
    pub fn family(&self) -> &'static str {
        match self {
            Relation::IncLine(..) => "inc_lines",
            Relation::IncCircle(..) => "inc_circles",
            Relation::Perpendicular(..) => "perp_lines",
            Relation::Parallel(..) => "parallel_lines",
            Relation::CircleCenter(..) => "circle_center",
            Relation::CircleDiameter(..) => "circle_diameter",
            Relation::Tangent(..) => "tangent_lines",
            Relation::RatioTriplet(..) => "known_ratio_triplets",
            Relation::RatioQuadruplet(..) => "known_ratio_quadruplets",
            Relation::AngleDef(..) => "angle_defs",
            Relation::PerpBisector(..) => "perp_bisectors",
            Relation::Harmonic(..) => "harmonic_quadruplets",
            Relation::Locus(..) => "locus_defs",
            Relation::Homothety(..) => "homothety_triplets",
        }
    }

    /// Names of the tuple members, in order.
    pub fn describe(&self, catalog: &Catalog) -> String {
        let p = |x: &PointId| catalog.name((*x).into()).to_string();
        let l = |x: &LineId| catalog.name((*x).into()).to_string();
        let k = |x: &CircleId| catalog.name((*x).into()).to_string();
        let a = |x: &AngleId| catalog.name((*x).into()).to_string();
        let parts: Vec<String> = match self {
            Relation::IncLine(x, y) => vec![p(x), l(y)],
            Relation::IncCircle(x, y) => vec![p(x), k(y)],
            Relation::Perpendicular(x, y) | Relation::Parallel(x, y) => vec![l(x), l(y)],
            Relation::CircleCenter(x, y) => vec![k(x), p(y)],
            Relation::CircleDiameter(x, y, z) => vec![k(x), p(y), p(z)],
            Relation::Tangent(x, y) => vec![k(x), l(y)],
            Relation::RatioTriplet(t) => t.iter().map(p).collect(),
            Relation::RatioQuadruplet(t) | Relation::Harmonic(t) => t.iter().map(p).collect(),
            Relation::AngleDef(d) => vec![l(&d.from), l(&d.to), a(&d.angle), d.form.tag().to_string()],
            Relation::PerpBisector(x, y, z) => vec![p(x), p(y), l(z)],
            Relation::Locus(x, y, z, w) => vec![p(x), p(y), a(z), k(w)],
            Relation::Homothety(x, y, z) => vec![p(x), l(y), l(z)],
        };
        format!("{}({})", self.family(), parts.join(", "))
    }
}

pub const FAMILIES: [&str; 14] = [
    "inc_lines",
    "inc_circles",
    "perp_lines",
    "parallel_lines",
    "circle_center",
    "circle_diameter",
    "tangent_lines",
    "known_ratio_triplets",
    "known_ratio_quadruplets",
    "angle_defs",
    "perp_bisectors",
    "harmonic_quadruplets",
    "locus_defs",
    "homothety_triplets",
];

/// All relation families, indexed by catalog ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeBase {
    /// Catalog size per kind, in [`ObjectKind`] order.
    pub counts: [usize; 4],
    /// Per point: lines through it.
    pub inc_lines: Vec<IdSet>,
    /// Per point: circles through it.
    pub inc_circles: Vec<IdSet>,
    /// Per line.
    pub perp_lines: Vec<IdSet>,
    /// Per line; irreflexive.
    pub parallel_lines: Vec<IdSet>,
    pub circle_center: Vec<Option<PointId>>,
    pub circle_diameter: Vec<Option<(PointId, PointId)>>,
    /// Per circle: lines tangent to it.
    pub tangent_lines: Vec<IdSet>,
    /// `(X, Y, Z)` collinear with `XY / YZ` constant; `Y` lies between the others.
    pub known_ratio_triplets: BTreeSet<[PointId; 3]>,
    /// `(X, Y, Z, W)` with `XY / ZW` a constant ratio of parallel vectors,
    /// lexicographically least among its reorderings.
    pub known_ratio_quadruplets: BTreeSet<[PointId; 4]>,
    pub angle_defs: BTreeSet<AngleDef>,
    /// `(X, Y, l)` with `l` the perpendicular bisector of `XY`, `X < Y`.
    pub perp_bisectors: BTreeSet<(PointId, PointId, LineId)>,
    /// `(X, Y; Z, W)` with cross-ratio −1.
    pub harmonic_quadruplets: BTreeSet<[PointId; 4]>,
    /// `(X, Y, φ, c)`: `XY` is seen at an angle determined by `φ` from the arcs of `c`.
    pub locus_defs: BTreeSet<(PointId, PointId, AngleId, CircleId)>,
    /// `(X, p, q)`: `q` is the image of `p` under a homothety centered at `X`.
    pub homothety_triplets: BTreeSet<(PointId, LineId, LineId)>,
}

impl KnowledgeBase {
    pub fn empty(catalog: &Catalog) -> KnowledgeBase {
        let np = catalog.count(ObjectKind::Point);
        let nl = catalog.count(ObjectKind::Line);
        let nk = catalog.count(ObjectKind::Circle);
        KnowledgeBase {
            counts: [np, nl, nk, catalog.count(ObjectKind::Angle)],
            inc_lines: vec![IdSet::EMPTY; np],
            inc_circles: vec![IdSet::EMPTY; np],
            perp_lines: vec![IdSet::EMPTY; nl],
            parallel_lines: vec![IdSet::EMPTY; nl],
            circle_center: vec![None; nk],
            circle_diameter: vec![None; nk],
            tangent_lines: vec![IdSet::EMPTY; nk],
            known_ratio_triplets: BTreeSet::new(),
            known_ratio_quadruplets: BTreeSet::new(),
            angle_defs: BTreeSet::new(),
            perp_bisectors: BTreeSet::new(),
            harmonic_quadruplets: BTreeSet::new(),
            locus_defs: BTreeSet::new(),
            homothety_triplets: BTreeSet::new(),
        }
    }

    pub fn count(&self, kind: ObjectKind) -> usize {
        self.counts[kind as usize]
    }

    /// Adds `rel`, normalizing unordered members to their stored order.
    pub fn insert(&mut self, rel: Relation) {
        match rel {
            Relation::IncLine(p, l) => {
                self.inc_lines[p.index()].insert(l.index());
            }
            Relation::IncCircle(p, k) => {
                self.inc_circles[p.index()].insert(k.index());
            }
            Relation::Perpendicular(l, m) => {
                self.perp_lines[l.index()].insert(m.index());
            }
            Relation::Parallel(l, m) => {
                self.parallel_lines[l.index()].insert(m.index());
            }
            Relation::CircleCenter(k, p) => self.circle_center[k.index()] = Some(p),
            Relation::CircleDiameter(k, p, q) => self.circle_diameter[k.index()] = Some((p.min(q), p.max(q))),
            Relation::Tangent(k, l) => {
                self.tangent_lines[k.index()].insert(l.index());
            }
            Relation::RatioTriplet(t) => {
                self.known_ratio_triplets.insert(t);
            }
            Relation::RatioQuadruplet(t) => {
                self.known_ratio_quadruplets.insert(canonical_quad(t));
            }
            Relation::AngleDef(d) => {
                self.angle_defs.insert(d);
            }
            Relation::PerpBisector(x, y, l) => {
                self.perp_bisectors.insert((x.min(y), x.max(y), l));
            }
            Relation::Harmonic(t) => {
                self.harmonic_quadruplets.insert(canonical_harmonic(t));
            }
            Relation::Locus(x, y, a, k) => {
                self.locus_defs.insert((x, y, a, k));
            }
            Relation::Homothety(x, p, q) => {
                self.homothety_triplets.insert((x, p, q));
            }
        }
    }

    /// Every tuple, family by family in [`FAMILIES`] order, each family sorted.
    pub fn tuples(&self) -> Vec<Relation> {
        let mut out = Vec::new();
        let ids = |v: &Vec<IdSet>| -> Vec<(usize, usize)> {
            v.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |j| (i, j))).collect()
        };
        let (p, l, k) = (|i: usize| PointId(i as u16), |i: usize| LineId(i as u16), |i: usize| CircleId(i as u16));
        out.extend(ids(&self.inc_lines).into_iter().map(|(i, j)| Relation::IncLine(p(i), l(j))));
        out.extend(ids(&self.inc_circles).into_iter().map(|(i, j)| Relation::IncCircle(p(i), k(j))));
        out.extend(ids(&self.perp_lines).into_iter().map(|(i, j)| Relation::Perpendicular(l(i), l(j))));
        out.extend(ids(&self.parallel_lines).into_iter().map(|(i, j)| Relation::Parallel(l(i), l(j))));
        for (i, c) in self.circle_center.iter().enumerate() {
            if let Some(c) = c {
                out.push(Relation::CircleCenter(k(i), *c));
            }
        }
        for (i, d) in self.circle_diameter.iter().enumerate() {
            if let Some((x, y)) = d {
                out.push(Relation::CircleDiameter(k(i), *x, *y));
            }
        }
        out.extend(ids(&self.tangent_lines).into_iter().map(|(i, j)| Relation::Tangent(k(i), l(j))));
        out.extend(self.known_ratio_triplets.iter().map(|t| Relation::RatioTriplet(*t)));
        out.extend(self.known_ratio_quadruplets.iter().map(|t| Relation::RatioQuadruplet(*t)));
        out.extend(self.angle_defs.iter().map(|d| Relation::AngleDef(*d)));
        out.extend(self.perp_bisectors.iter().map(|&(x, y, z)| Relation::PerpBisector(x, y, z)));
        out.extend(self.harmonic_quadruplets.iter().map(|t| Relation::Harmonic(*t)));
        out.extend(self.locus_defs.iter().map(|&(x, y, z, w)| Relation::Locus(x, y, z, w)));
        out.extend(self.homothety_triplets.iter().map(|&(x, y, z)| Relation::Homothety(x, y, z)));
        out
    }

    pub fn len(&self) -> usize {
        self.tuples().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks the structural invariants; returns a description of the first violation.
    pub fn check_invariants(&self, catalog: &Catalog) -> Result<(), String> {
        if self.counts != [ObjectKind::Point, ObjectKind::Line, ObjectKind::Circle, ObjectKind::Angle].map(|k| catalog.count(k))
            || self.inc_lines.len() != catalog.count(ObjectKind::Point)
            || self.perp_lines.len() != catalog.count(ObjectKind::Line)
            || self.circle_center.len() != catalog.count(ObjectKind::Circle)
        {
            return Err("relation tables do not match the catalog size".into());
        }
        for l in 0..self.perp_lines.len() {
            if self.parallel_lines[l].contains(l) {
                return Err(format!("parallel_lines is reflexive at {}", catalog.name(LineId(l as u16).into())));
            }
            for m in self.perp_lines[l].iter() {
                if !self.perp_lines[m].contains(l) {
                    return Err("perp_lines is not symmetric".into());
                }
            }
            for m in self.parallel_lines[l].iter() {
                if !self.parallel_lines[m].contains(l) {
                    return Err("parallel_lines is not symmetric".into());
                }
            }
        }
        for &(x, y, l) in &self.perp_bisectors {
            let joining = self.inc_lines[x.index()].0 & self.inc_lines[y.index()].0;
            for m in IdSet(joining).iter() {
                if !self.perp_lines[l.index()].contains(m) {
                    return Err(format!(
                        "{} bisects {}{} but is not perpendicular to {}",
                        catalog.name(l.into()),
                        catalog.name(x.into()),
                        catalog.name(y.into()),
                        catalog.name(LineId(m as u16).into())
                    ));
                }
            }
        }
        for (k, d) in self.circle_diameter.iter().enumerate() {
            if let Some((x, y)) = d {
                if self.circle_center[k].is_none()
                    || !self.inc_circles[x.index()].contains(k)
                    || !self.inc_circles[y.index()].contains(k)
                {
                    return Err(format!("diameter of {} lacks center or incidence", catalog.name(CircleId(k as u16).into())));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms_invert() {
        for form in AngleForm::ALL {
            for phi in [0.4, 1.0, 1.7, 2.5] {
                let theta = form.eval(phi);
                let back = form.invert(theta);
                assert!(back.iter().any(|b| (b - phi).abs() < 1e-12), "{form:?} {phi} -> {back:?}");
            }
        }
    }

    #[test]
    fn tags_round_trip() {
        for form in AngleForm::ALL {
            assert_eq!(AngleForm::from_tag(form.tag()), Some(form));
        }
    }
}
