//! Plane primitives and the robust measurements built on them.
//!
//! Everything here works in `f64` with tolerances expressed relative to a
//! per-triangle scale (the circumradius). Lines are kept in implicit form
//! `normal · x = offset` with a unit normal whose sign is canonical, so two
//! realizations of the same line compare component-wise.

pub(crate) mod measure;
pub(crate) mod sample;

pub use measure::{measure, Measurement, MeasureError, Query};
pub use sample::{sample_triangle, SamplingError, SamplingPolicy, TriangleInstance};

use nalgebra::Vector2;
use std::f64::consts::PI;

pub type Point = Vector2<f64>;

/// Cross product of two plane vectors (z component).
pub fn cross(u: &Point, v: &Point) -> f64 {
    u.x * v.y - u.y * v.x
}

/// A line `normal · x = offset` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub normal: Point,
    pub offset: f64,
}

impl Line {
    /// Builds a line from any (nonzero) normal, normalizing and fixing the sign.
    pub fn from_normal(normal: Point, offset: f64) -> Option<Line> {
        let len = normal.norm();
        if !(len.is_finite() && len > f64::MIN_POSITIVE) || !offset.is_finite() {
            return None;
        }
        let (mut n, mut c) = (normal / len, offset / len);
        // first nonzero component positive
        if n.x < 0.0 || (n.x == 0.0 && n.y < 0.0) {
            n = -n;
            c = -c;
        }
        Some(Line { normal: n, offset: c })
    }

    pub fn through(p: &Point, q: &Point) -> Option<Line> {
        let d = q - p;
        let n = Point::new(-d.y, d.x);
        Line::from_normal(n, n.dot(p))
    }

    /// Line through `p` with direction `dir`.
    pub fn point_direction(p: &Point, dir: &Point) -> Option<Line> {
        let n = Point::new(-dir.y, dir.x);
        Line::from_normal(n, n.dot(p))
    }

    pub fn direction(&self) -> Point {
        Point::new(self.normal.y, -self.normal.x)
    }

    /// Direction angle reduced to `[0, π)`.
    pub fn direction_angle(&self) -> f64 {
        let d = self.direction();
        d.y.atan2(d.x).rem_euclid(PI)
    }

    pub fn signed_distance(&self, p: &Point) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn project(&self, p: &Point) -> Point {
        p - self.normal * self.signed_distance(p)
    }

    pub fn reflect(&self, p: &Point) -> Point {
        p - self.normal * (2.0 * self.signed_distance(p))
    }

    /// Some point on the line.
    pub fn anchor(&self) -> Point {
        self.normal * self.offset
    }

    pub fn perpendicular_through(&self, p: &Point) -> Option<Line> {
        Line::point_direction(p, &self.normal)
    }

    pub fn parallel_through(&self, p: &Point) -> Option<Line> {
        Line::from_normal(self.normal, self.normal.dot(p))
    }

    pub fn intersect(&self, other: &Line) -> Option<Point> {
        let det = cross(&self.normal, &other.normal);
        if det.abs() < 1e-14 {
            return None;
        }
        let x = (self.offset * other.normal.y - other.offset * self.normal.y) / det;
        let y = (self.normal.x * other.offset - other.normal.x * self.offset) / det;
        Some(Point::new(x, y))
    }

    pub fn is_finite(&self) -> bool {
        self.normal.x.is_finite() && self.normal.y.is_finite() && self.offset.is_finite()
    }

    /// Largest of the normal misalignment (sine of the angle between the
    /// lines) and the offset difference divided by `scale`.
    pub fn residual(&self, other: &Line, scale: f64) -> f64 {
        let sin = cross(&self.normal, &other.normal).abs();
        // align the other normal with ours before comparing offsets
        let sign = if self.normal.dot(&other.normal) >= 0.0 { 1.0 } else { -1.0 };
        let off = (self.offset - sign * other.offset).abs() / scale;
        sin.max(off)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point, radius: f64) -> Circle {
        Circle { center, radius }
    }

    pub fn through3(a: &Point, b: &Point, c: &Point) -> Option<Circle> {
        let center = circumcenter(a, b, c)?;
        Some(Circle::new(center, (a - center).norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.center.x.is_finite() && self.center.y.is_finite() && self.radius.is_finite()
    }

    pub fn residual(&self, other: &Circle, scale: f64) -> f64 {
        ((self.center - other.center).norm() / scale).max((self.radius - other.radius).abs() / scale)
    }

    /// Intersections with a line; one point when tangent.
    pub fn intersect_line(&self, line: &Line) -> Vec<Point> {
        let d = line.signed_distance(&self.center);
        let foot = self.center - line.normal * d;
        let h2 = self.radius * self.radius - d * d;
        let tol = 1e-12 * self.radius * self.radius;
        if h2 < -tol {
            return Vec::new();
        }
        if h2.abs() <= tol {
            return vec![foot];
        }
        let h = h2.sqrt();
        let dir = line.direction();
        vec![foot + dir * h, foot - dir * h]
    }

    pub fn intersect_circle(&self, other: &Circle) -> Vec<Point> {
        let delta = other.center - self.center;
        let d = delta.norm();
        if d < 1e-14 {
            return Vec::new();
        }
        // radical line: |x - c1|² - r1² = |x - c2|² - r2²
        let offset = (other.radius.powi(2) - self.radius.powi(2)
            + self.center.norm_squared()
            - other.center.norm_squared())
            / -2.0;
        match Line::from_normal(delta, offset) {
            Some(radical) => self.intersect_line(&radical),
            None => Vec::new(),
        }
    }

    /// Tangent lines through an external point (or the single tangent at a
    /// point of the circle).
    pub fn tangents_from(&self, p: &Point) -> Vec<Line> {
        let v = p - self.center;
        let d2 = v.norm_squared();
        let r2 = self.radius * self.radius;
        if (d2 - r2).abs() <= 1e-12 * r2 {
            return Line::point_direction(p, &Point::new(-v.y, v.x)).into_iter().collect();
        }
        if d2 < r2 {
            return Vec::new();
        }
        // touch points lie on the circle with diameter from center to p
        let half = Circle::new(self.center + v / 2.0, d2.sqrt() / 2.0);
        half.intersect_circle(self)
            .iter()
            .filter_map(|t| Line::through(p, t))
            .collect()
    }
}

pub fn circumcenter(a: &Point, b: &Point, c: &Point) -> Option<Point> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < 1e-300 {
        return None;
    }
    let (a2, b2, c2) = (a.norm_squared(), b.norm_squared(), c.norm_squared());
    let x = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let y = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    Some(Point::new(x, y))
}

/// Interior angle at `q` of the triangle `p q r`, in `[0, π]`.
pub fn vertex_angle(p: &Point, q: &Point, r: &Point) -> f64 {
    let u = p - q;
    let v = r - q;
    cross(&u, &v).abs().atan2(u.dot(&v))
}

/// Counter-clockwise angle from line `p` to line `q`, reduced to `[0, π)`.
pub fn line_angle(p: &Line, q: &Line) -> f64 {
    let theta = (q.direction_angle() - p.direction_angle()).rem_euclid(PI);
    // rem_euclid can round up to exactly π
    if theta >= PI {
        0.0
    } else {
        theta
    }
}

/// Distance between two angles taken modulo π.
pub fn angle_residual_mod_pi(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(PI);
    d.min(PI - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn canonical_normal_sign() {
        let l = Line::through(&Point::new(0.0, 1.0), &Point::new(1.0, 1.0)).unwrap();
        assert!(l.normal.x == 0.0 || l.normal.x.abs() < 1e-15);
        assert!(l.normal.y > 0.0);
        let m = Line::through(&Point::new(1.0, 1.0), &Point::new(0.0, 1.0)).unwrap();
        assert!(l.residual(&m, 1.0) < 1e-15);
    }

    #[test]
    fn axes_meet_at_right_angle() {
        let x = Line::through(&Point::new(0.0, 0.0), &Point::new(1.0, 0.0)).unwrap();
        let y = Line::through(&Point::new(0.0, 0.0), &Point::new(0.0, 1.0)).unwrap();
        assert!((line_angle(&x, &y) - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(x.intersect(&y).unwrap(), Point::new(0.0, 0.0));
    }

    #[test]
    fn circle_line_tangent_and_secant() {
        let k = Circle::new(Point::new(0.0, 0.0), 1.0);
        let secant = Line::through(&Point::new(-2.0, 0.0), &Point::new(2.0, 0.0)).unwrap();
        assert_eq!(k.intersect_line(&secant).len(), 2);
        let tangent = Line::through(&Point::new(-2.0, 1.0), &Point::new(2.0, 1.0)).unwrap();
        let pts = k.intersect_line(&tangent);
        assert_eq!(pts.len(), 1);
        assert!((pts[0] - Point::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn tangents_from_external_point() {
        let k = Circle::new(Point::new(0.0, 0.0), 1.0);
        let p = Point::new(2.0, 0.0);
        let ts = k.tangents_from(&p);
        assert_eq!(ts.len(), 2);
        for t in ts {
            assert!((t.signed_distance(&k.center).abs() - 1.0).abs() < 1e-12);
            assert!(t.signed_distance(&p).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_circle() {
        let k1 = Circle::new(Point::new(0.0, 0.0), 1.0);
        let k2 = Circle::new(Point::new(1.0, 0.0), 1.0);
        let pts = k1.intersect_circle(&k2);
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert!((p.norm() - 1.0).abs() < 1e-12);
            assert!(((p - k2.center).norm() - 1.0).abs() < 1e-12);
        }
    }
}
