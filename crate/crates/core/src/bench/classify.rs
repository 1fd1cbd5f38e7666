//! Whether three given points determine the triangle, found from the rank of
//! the Jacobian of `(A, B, C) ↦ (P, Q, R)` at random triangles.

use crate::catalog::{instantiate_catalog, Catalog, PointId};
use crate::geometry::{sample_triangle, SamplingPolicy, TriangleInstance};
use nalgebra::SMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Determination {
    /// One given point is a function of the other two (rank 4 or less).
    Redundant,
    /// The given points satisfy one constraint; solutions form a family (rank 5).
    LocusDependent,
    /// Finitely many triangles fit the data (rank 6).
    Determined,
}

const STEP: f64 = 1e-6;

/// Numerical rank of the Jacobian at one triangle.
pub fn jacobian_rank(catalog: &Catalog, given: [PointId; 3], triangle: &TriangleInstance) -> usize {
    let eval = |x: &[f64; 6]| -> Option<[f64; 6]> {
        let t = TriangleInstance {
            a: [x[0], x[1]].into(),
            b: [x[2], x[3]].into(),
            c: [x[4], x[5]].into(),
            seed: triangle.seed,
        };
        let inst = instantiate_catalog(&t, catalog).ok()?;
        let mut out = [0.0; 6];
        for (i, p) in given.iter().enumerate() {
            let v = inst.point(*p);
            out[2 * i] = v.x;
            out[2 * i + 1] = v.y;
        }
        Some(out)
    };
    let x0 = [triangle.a.x, triangle.a.y, triangle.b.x, triangle.b.y, triangle.c.x, triangle.c.y];
    let mut jac = SMatrix::<f64, 6, 6>::zeros();
    for j in 0..6 {
        let (mut lo, mut hi) = (x0, x0);
        lo[j] -= STEP;
        hi[j] += STEP;
        let (Some(fl), Some(fh)) = (eval(&lo), eval(&hi)) else { return 0 };
        for i in 0..6 {
            jac[(i, j)] = (fh[i] - fl[i]) / (2.0 * STEP);
        }
    }
    let sv = jac.singular_values();
    let max = sv.max();
    sv.iter().filter(|s| **s > 1e-5 * max).count()
}

/// Classifies by the largest rank seen over a few random triangles.
pub fn classify(catalog: &Catalog, given: [PointId; 3], seed: u64) -> Determination {
    let policy = SamplingPolicy::default();
    let rank = (0..3)
        .filter_map(|i| sample_triangle(seed.wrapping_add(i), &policy).ok())
        .map(|t| jacobian_rank(catalog, given, &t))
        .max()
        .unwrap_or(0);
    match rank {
        6 => Determination::Determined,
        5 => Determination::LocusDependent,
        _ => Determination::Redundant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cls(names: [&str; 3]) -> Determination {
        let cat = Catalog::builtin();
        classify(&cat, names.map(|n| cat.point(n).unwrap()), 3)
    }

    #[test]
    fn known_cases() {
        assert_eq!(cls(["A", "B", "C"]), Determination::Determined);
        assert_eq!(cls(["A", "B", "Mc"]), Determination::Redundant);
        assert_eq!(cls(["A", "G", "Ma"]), Determination::Redundant);
        assert_eq!(cls(["A", "B", "O"]), Determination::LocusDependent);
        assert_eq!(cls(["Ma", "Mb", "Mc"]), Determination::Determined);
    }
}
