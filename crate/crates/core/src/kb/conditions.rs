//! Defining numeric conditions of each relation, evaluated over a set of
//! probe triangles. Shared by derivation and validation.

use super::{AngleForm, Relation};
use crate::catalog::{AngleId, Instantiation, LineId, PointId};
use crate::geometry::{angle_residual_mod_pi, cross, line_angle, measure::cross_ratio, vertex_angle, Point};

fn same_value(values: &[f64], tol: f64) -> bool {
    let Some(&first) = values.first() else { return true };
    values.iter().all(|v| v.is_finite() && (v - first).abs() <= tol * first.abs().max(1.0))
}

fn distinct(inst: &Instantiation, x: PointId, y: PointId, tol: f64) -> bool {
    (inst.point(x) - inst.point(y)).norm() > tol * inst.scale
}

fn collinear(inst: &Instantiation, pts: &[PointId], tol: f64) -> bool {
    let base = inst.point(pts[0]);
    let far = pts[1..]
        .iter()
        .map(|p| inst.point(*p) - base)
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let len = far.norm();
    if len <= tol * inst.scale {
        return false;
    }
    pts[1..].iter().all(|p| cross(&far, &(inst.point(*p) - base)).abs() / len <= tol * inst.scale)
}

/// Signed `XY / YZ` of collinear points.
pub(super) fn triplet_ratio(inst: &Instantiation, [x, y, z]: [PointId; 3]) -> f64 {
    let (u, v) = (inst.point(y) - inst.point(x), inst.point(z) - inst.point(y));
    u.dot(&v) / v.norm_squared()
}

fn quad_ratio(inst: &Instantiation, [x, y, z, w]: [PointId; 4], tol: f64) -> Option<f64> {
    let (u, v) = (inst.point(y) - inst.point(x), inst.point(w) - inst.point(z));
    let (nu, nv) = (u.norm(), v.norm());
    if nu <= tol * inst.scale || nv <= tol * inst.scale {
        return None;
    }
    if cross(&u, &v).abs() / (nu * nv) > tol {
        return None;
    }
    Some(u.dot(&v) / (nv * nv))
}

fn harmonic(inst: &Instantiation, [x, y, z, w]: [PointId; 4], tol: f64) -> bool {
    if !collinear(inst, &[x, y, z, w], tol) {
        return false;
    }
    let origin = inst.point(x);
    let dir: Point = [y, z, w]
        .iter()
        .map(|p| inst.point(*p) - origin)
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let t = |p: PointId| (inst.point(p) - origin).dot(&dir) / dir.norm_squared();
    match cross_ratio(0.0, t(y), t(z), t(w)) {
        Some(cr) => (cr + 1.0).abs() <= tol,
        None => false,
    }
}

fn chord_angles(inst: &Instantiation, x: PointId, y: PointId, center: Point) -> (f64, f64) {
    let central = vertex_angle(&inst.point(x), &center, &inst.point(y));
    (central / 2.0, std::f64::consts::PI - central / 2.0)
}

/// Forms `f` with `f(φ)` equal to an inscribed angle over `XY` on every probe.
pub(super) fn locus_forms(
    probes: &[Instantiation],
    x: PointId,
    y: PointId,
    angle: AngleId,
    center: impl Fn(&Instantiation) -> Point,
    tol: f64,
) -> Vec<AngleForm> {
    AngleForm::ALL
        .into_iter()
        .filter(|form| {
            probes.iter().all(|inst| {
                let (t1, t2) = chord_angles(inst, x, y, center(inst));
                let want = form.eval(inst.angle(angle));
                angle_residual_mod_pi(t1, want) <= tol || angle_residual_mod_pi(t2, want) <= tol
            })
        })
        .collect()
}

pub(super) fn angle_matches(probes: &[Instantiation], p: LineId, q: LineId, angle: AngleId, form: AngleForm, tol: f64) -> bool {
    probes.iter().all(|inst| {
        let theta = line_angle(&inst.line(p), &inst.line(q));
        angle_residual_mod_pi(theta, form.eval(inst.angle(angle))) <= tol
    })
}

/// `dist(X, q) / dist(X, p)` measured with `p`'s normal orientation.
fn homothety_ratio(inst: &Instantiation, x: PointId, p: LineId, q: LineId) -> f64 {
    let (lp, lq) = (inst.line(p), inst.line(q));
    let sign = if lp.normal.dot(&lq.normal) >= 0.0 { 1.0 } else { -1.0 };
    let dq = sign * lq.signed_distance(&inst.point(x));
    dq / lp.signed_distance(&inst.point(x))
}

/// Whether `rel` holds on every probe (and, for quantities that must be
/// triangle-independent, whether they agree across probes).
pub(super) fn holds(rel: &Relation, probes: &[Instantiation], tol: f64) -> bool {
    match *rel {
        Relation::IncLine(p, l) => probes
            .iter()
            .all(|i| i.line(l).signed_distance(&i.point(p)).abs() <= tol * i.scale),
        Relation::IncCircle(p, k) => probes.iter().all(|i| {
            let c = i.circle(k);
            ((i.point(p) - c.center).norm() - c.radius).abs() <= tol * i.scale
        }),
        Relation::Perpendicular(l, m) => l != m && probes.iter().all(|i| i.line(l).normal.dot(&i.line(m).normal).abs() <= tol),
        Relation::Parallel(l, m) => {
            l != m
                && probes.iter().all(|i| cross(&i.line(l).normal, &i.line(m).normal).abs() <= tol)
                && probes.iter().any(|i| i.line(l).residual(&i.line(m), i.scale) > tol)
        }
        Relation::CircleCenter(k, p) => probes.iter().all(|i| (i.point(p) - i.circle(k).center).norm() <= tol * i.scale),
        Relation::CircleDiameter(k, x, y) => {
            x != y
                && probes.iter().all(|i| {
                    let c = i.circle(k);
                    let on = |p: PointId| ((i.point(p) - c.center).norm() - c.radius).abs() <= tol * i.scale;
                    on(x) && on(y) && ((i.point(x) + i.point(y)) / 2.0 - c.center).norm() <= tol * i.scale
                })
        }
        Relation::Tangent(k, l) => probes.iter().all(|i| {
            let c = i.circle(k);
            (i.line(l).signed_distance(&c.center).abs() - c.radius).abs() <= tol * i.scale
        }),
        Relation::RatioTriplet(t) => {
            let ok = probes
                .iter()
                .all(|i| distinct(i, t[0], t[1], tol) && distinct(i, t[1], t[2], tol) && distinct(i, t[0], t[2], tol) && collinear(i, &t, tol));
            ok && same_value(&probes.iter().map(|i| triplet_ratio(i, t)).collect::<Vec<_>>(), tol)
        }
        Relation::RatioQuadruplet(t) => {
            let ratios: Option<Vec<f64>> = probes.iter().map(|i| quad_ratio(i, t, tol)).collect();
            ratios.is_some_and(|r| same_value(&r, tol))
        }
        Relation::AngleDef(d) => d.from != d.to && angle_matches(probes, d.from, d.to, d.angle, d.form, tol),
        Relation::PerpBisector(x, y, l) => probes.iter().all(|i| {
            let (px, py) = (i.point(x), i.point(y));
            let seg = py - px;
            let line = i.line(l);
            seg.norm() > tol * i.scale
                && line.signed_distance(&((px + py) / 2.0)).abs() <= tol * i.scale
                && cross(&line.normal, &seg).abs() / seg.norm() <= tol
        }),
        Relation::Harmonic(t) => {
            let all_distinct = (0..4).all(|a| (a + 1..4).all(|b| probes.iter().all(|i| distinct(i, t[a], t[b], tol))));
            all_distinct && probes.iter().all(|i| harmonic(i, t, tol))
        }
        Relation::Locus(x, y, a, k) => {
            let on = probes.iter().all(|i| {
                let c = i.circle(k);
                let on = |p: PointId| ((i.point(p) - c.center).norm() - c.radius).abs() <= tol * i.scale;
                on(x) && on(y) && distinct(i, x, y, tol)
            });
            on && !locus_forms(probes, x, y, a, |i| i.circle(k).center, tol).is_empty()
        }
        Relation::Homothety(x, p, q) => {
            let ok = p != q
                && probes.iter().all(|i| {
                    let (lp, lq) = (i.line(p), i.line(q));
                    cross(&lp.normal, &lq.normal).abs() <= tol
                        && lp.signed_distance(&i.point(x)).abs() > tol * i.scale
                        && lq.signed_distance(&i.point(x)).abs() > tol * i.scale
                });
            ok && same_value(&probes.iter().map(|i| homothety_ratio(i, x, p, q)).collect::<Vec<_>>(), tol)
        }
    }
}
