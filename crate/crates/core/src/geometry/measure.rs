use super::{cross, line_angle, Point};
use crate::catalog::{CircleId, Instantiation, LineId, PointId};
use thiserror::Error;

/// A numeric question about realized objects.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Query {
    /// Signed distance of the point from the line.
    PointLineIncidence(PointId, LineId),
    /// Unsigned distance of the point from the line.
    PointLineDistance(PointId, LineId),
    /// `|P - center| - radius`.
    PointCircleIncidence(PointId, CircleId),
    /// Sine of the angle between the lines.
    ParallelResidual(LineId, LineId),
    /// Cosine of the angle between the lines.
    PerpendicularResidual(LineId, LineId),
    /// Signed ratio `XY / YZ` of collinear points.
    CollinearRatio(PointId, PointId, PointId),
    /// Signed ratio `XY / ZW` of parallel vectors, with the sine between them.
    VectorRatio(PointId, PointId, PointId, PointId),
    /// `(X, Y; Z, W)` for four collinear points.
    CrossRatio(PointId, PointId, PointId, PointId),
    /// Counter-clockwise angle from the first line to the second, in `[0, π)`.
    LineAngle(LineId, LineId),
    Collinear { points: [PointId; 3], tolerance: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Measurement {
    Real(f64),
    Bool(bool),
    Ratio { value: f64, parallel_residual: f64 },
}

impl Measurement {
    pub fn real(self) -> Option<f64> {
        match self {
            Measurement::Real(v) => Some(v),
            Measurement::Ratio { value, .. } => Some(value),
            Measurement::Bool(_) => None,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("undefined measurement: coincident points in a ratio denominator")]
    Undefined,
}

/// Signed ratio `u / v` of (nearly) parallel vectors, or `None` when `v`
/// vanishes relative to `scale`.
pub(crate) fn vector_ratio(u: &Point, v: &Point, scale: f64) -> Option<f64> {
    let n2 = v.norm_squared();
    if n2.sqrt() <= 1e-12 * scale {
        return None;
    }
    Some(u.dot(v) / n2)
}

/// Cross-ratio of four collinear points given as positions on the line.
pub(crate) fn cross_ratio(x: f64, y: f64, z: f64, w: f64) -> Option<f64> {
    let (zy, wy) = (z - y, w - y);
    let wx = w - x;
    if zy == 0.0 || wy == 0.0 || wx == 0.0 {
        return None;
    }
    Some(((z - x) / zy) / (wx / wy))
}

pub fn measure(inst: &Instantiation, query: Query) -> Result<Measurement, MeasureError> {
    let p = |id: PointId| inst.point(id);
    Ok(match query {
        Query::PointLineIncidence(pt, l) => Measurement::Real(inst.line(l).signed_distance(&p(pt))),
        Query::PointLineDistance(pt, l) => Measurement::Real(inst.line(l).signed_distance(&p(pt)).abs()),
        Query::PointCircleIncidence(pt, k) => {
            let c = inst.circle(k);
            Measurement::Real((p(pt) - c.center).norm() - c.radius)
        }
        Query::ParallelResidual(l, m) => Measurement::Real(cross(&inst.line(l).normal, &inst.line(m).normal).abs()),
        Query::PerpendicularResidual(l, m) => Measurement::Real(inst.line(l).normal.dot(&inst.line(m).normal).abs()),
        Query::CollinearRatio(x, y, z) => {
            let v = vector_ratio(&(p(y) - p(x)), &(p(z) - p(y)), inst.scale).ok_or(MeasureError::Undefined)?;
            Measurement::Real(v)
        }
        Query::VectorRatio(x, y, z, w) => {
            let (u, v) = (p(y) - p(x), p(w) - p(z));
            let value = vector_ratio(&u, &v, inst.scale).ok_or(MeasureError::Undefined)?;
            let denom = u.norm() * v.norm();
            let parallel_residual = if denom == 0.0 { 0.0 } else { cross(&u, &v).abs() / denom };
            Measurement::Ratio { value, parallel_residual }
        }
        Query::CrossRatio(x, y, z, w) => {
            let origin = p(x);
            let dir = [p(y), p(z), p(w)]
                .into_iter()
                .map(|q| q - origin)
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap();
            if dir.norm() <= 1e-12 * inst.scale {
                return Err(MeasureError::Undefined);
            }
            let t = |q: Point| (q - origin).dot(&dir) / dir.norm_squared();
            let v = cross_ratio(0.0, t(p(y)), t(p(z)), t(p(w))).ok_or(MeasureError::Undefined)?;
            Measurement::Real(v)
        }
        Query::LineAngle(l, m) => Measurement::Real(line_angle(&inst.line(l), &inst.line(m))),
        Query::Collinear { points: [x, y, z], tolerance } => {
            let (u, v) = (p(y) - p(x), p(z) - p(x));
            let area = cross(&u, &v).abs();
            let len = u.norm().max(v.norm()).max(inst.scale * 1e-300);
            Measurement::Bool(area / len <= tolerance * inst.scale)
        }
    })
}
