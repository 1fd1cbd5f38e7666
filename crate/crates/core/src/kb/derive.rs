use super::conditions::{angle_matches, holds, locus_forms, triplet_ratio};
use super::{AngleDef, AngleForm, KnowledgeBase, Relation};
use crate::catalog::{instantiate_catalog, AngleId, Catalog, CircleId, Instantiation, InstantiationError, LineId, PointId};
use crate::geometry::sample::probe_seeds;
use crate::geometry::{sample_triangle, SamplingError, SamplingPolicy};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeriveError {
    #[error("at least two probe triangles are required, got {0}")]
    TooFewProbes(usize),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Instantiation(#[from] InstantiationError),
}

pub(crate) fn probe_instances(catalog: &Catalog, count: usize, seed: u64) -> Result<Vec<Instantiation>, DeriveError> {
    let policy = SamplingPolicy::default();
    probe_seeds(seed, count)
        .into_iter()
        .map(|s| {
            let t = sample_triangle(s, &policy)?;
            Ok(instantiate_catalog(&t, catalog)?)
        })
        .collect()
}

/// Orderings of `(X, Y, Z, W)` stating the same fact up to the ratio's sign or inverse.
pub(crate) fn quad_orbit([x, y, z, w]: [PointId; 4]) -> [[PointId; 4]; 8] {
    [
        [x, y, z, w],
        [y, x, z, w],
        [x, y, w, z],
        [y, x, w, z],
        [z, w, x, y],
        [w, z, x, y],
        [z, w, y, x],
        [w, z, y, x],
    ]
}

/// Representative of `t`'s reorderings, as stored in the knowledge base.
pub(crate) fn canonical_quad(t: [PointId; 4]) -> [PointId; 4] {
    *quad_orbit(t).iter().min().unwrap()
}

/// `(X, Y; Z, W)` with each pair sorted and the pairs sorted.
pub(crate) fn canonical_harmonic([x, y, z, w]: [PointId; 4]) -> [PointId; 4] {
    let p = [x.min(y), x.max(y)];
    let q = [z.min(w), z.max(w)];
    if p <= q {
        [p[0], p[1], q[0], q[1]]
    } else {
        [q[0], q[1], p[0], p[1]]
    }
}

/// Learns every relation that holds on all `probes` sampled triangles.
pub fn derive_relations(catalog: &Catalog, probes: usize, tolerance: f64, seed: u64) -> Result<KnowledgeBase, DeriveError> {
    if probes < 2 {
        return Err(DeriveError::TooFewProbes(probes));
    }
    let insts = probe_instances(catalog, probes, seed)?;
    let tol = tolerance;
    let mut kb = KnowledgeBase::empty(catalog);
    let points: Vec<PointId> = catalog.point_ids().collect();
    let lines: Vec<LineId> = catalog.line_ids().collect();
    let circles: Vec<CircleId> = catalog.circle_ids().collect();
    let angles: Vec<AngleId> = catalog.angle_ids().collect();

    let admit = |kb: &mut KnowledgeBase, rel: Relation| {
        if holds(&rel, &insts, tol) {
            kb.insert(rel);
            true
        } else {
            false
        }
    };

    for &p in &points {
        for &l in &lines {
            admit(&mut kb, Relation::IncLine(p, l));
        }
        for &k in &circles {
            admit(&mut kb, Relation::IncCircle(p, k));
        }
    }
    for &l in &lines {
        for &m in &lines {
            admit(&mut kb, Relation::Perpendicular(l, m));
            admit(&mut kb, Relation::Parallel(l, m));
        }
    }
    for &k in &circles {
        for &p in &points {
            if admit(&mut kb, Relation::CircleCenter(k, p)) {
                break;
            }
        }
        if kb.circle_center[k.index()].is_some() {
            'diam: for (i, &x) in points.iter().enumerate() {
                for &y in &points[i + 1..] {
                    if admit(&mut kb, Relation::CircleDiameter(k, x, y)) {
                        break 'diam;
                    }
                }
            }
        }
        for &l in &lines {
            admit(&mut kb, Relation::Tangent(k, l));
        }
    }

    // collinear triples, canonically ordered along the line
    let first = &insts[..1];
    for (i, &x) in points.iter().enumerate() {
        for (j, &y) in points.iter().enumerate().skip(i + 1) {
            for &z in &points[j + 1..] {
                let t = [x, y, z];
                if !holds(&Relation::RatioTriplet(t), first, tol) {
                    continue;
                }
                // put the middle point in the middle, lower endpoint first
                let r = triplet_ratio(&first[0], t);
                let ordered = if r > 0.0 {
                    [x, y, z]
                } else if r < -1.0 {
                    // z between x and y
                    [x, z, y]
                } else {
                    // x between y and z
                    [y, x, z]
                };
                admit(&mut kb, Relation::RatioTriplet(ordered));
            }
        }
    }

    let quads: Vec<[PointId; 4]> = points
        .par_iter()
        .flat_map_iter(|&x| {
            let insts = &insts;
            let points = &points;
            points.iter().flat_map(move |&y| {
                points.iter().flat_map(move |&z| {
                    points.iter().filter_map(move |&w| {
                        let t = [x, y, z, w];
                        let distinct = x != y && x != z && x != w && y != z && y != w && z != w;
                        if !distinct || quad_orbit(t).iter().any(|o| *o < t) {
                            return None;
                        }
                        let rel = Relation::RatioQuadruplet(t);
                        (holds(&rel, &insts[..1], tol) && holds(&rel, insts, tol)).then_some(t)
                    })
                })
            })
        })
        .collect();
    for t in quads {
        kb.insert(Relation::RatioQuadruplet(t));
    }

    for &p in &lines {
        for &q in &lines {
            if p == q || kb.parallel_lines[p.index()].contains(q.index()) {
                continue;
            }
            for &a in &angles {
                if let Some(form) = AngleForm::ALL.into_iter().find(|f| angle_matches(&insts, p, q, a, *f, tol)) {
                    kb.insert(Relation::AngleDef(AngleDef { from: p, to: q, angle: a, form }));
                }
            }
        }
    }

    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            for &l in &lines {
                admit(&mut kb, Relation::PerpBisector(x, y, l));
            }
        }
    }

    // harmonic quadruplets up to swapping within and between the two pairs
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            for (k, &z) in points.iter().enumerate() {
                for &w in &points[k + 1..] {
                    let t = [x, y, z, w];
                    if [z, w] <= [x, y] || z == x || z == y || w == x || w == y {
                        continue;
                    }
                    if holds(&Relation::Harmonic(t), first, tol) {
                        admit(&mut kb, Relation::Harmonic(t));
                    }
                }
            }
        }
    }

    for &k in &circles {
        let on: Vec<PointId> = points.iter().copied().filter(|p| kb.inc_circles[p.index()].contains(k.index())).collect();
        for (i, &x) in on.iter().enumerate() {
            for &y in &on[i + 1..] {
                for &a in &angles {
                    if !locus_forms(&insts, x, y, a, |inst| inst.circle(k).center, tol).is_empty() {
                        kb.insert(Relation::Locus(x, y, a, k));
                    }
                }
            }
        }
    }

    for &x in &points {
        for &p in &lines {
            for q in kb.parallel_lines[p.index()].iter() {
                admit(&mut kb, Relation::Homothety(x, p, LineId(q as u16)));
            }
        }
    }

    Ok(kb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE};
    use std::sync::OnceLock;

    fn kb() -> &'static (Catalog, KnowledgeBase) {
        static KB: OnceLock<(Catalog, KnowledgeBase)> = OnceLock::new();
        KB.get_or_init(|| {
            let cat = Catalog::builtin();
            let kb = derive_relations(&cat, DEFAULT_PROBES, DEFAULT_TOLERANCE, DEFAULT_SEED).unwrap();
            (cat, kb)
        })
    }

    fn p(cat: &Catalog, n: &str) -> PointId {
        cat.point(n).unwrap()
    }

    #[test]
    fn centroid_divides_median() {
        let (cat, kb) = kb();
        let t = [p(cat, "A"), p(cat, "G"), p(cat, "Ma")];
        assert!(kb.known_ratio_triplets.contains(&t));
        // constant 2 on fresh probes, measured directly
        for inst in probe_instances(cat, 5, 99).unwrap() {
            assert!((triplet_ratio(&inst, t) - 2.0).abs() < 1e-9);
        }
        assert!(kb.known_ratio_triplets.contains(&[p(cat, "B"), p(cat, "Ma"), p(cat, "C")]));
    }

    #[test]
    fn non_collinear_triple_absent() {
        let (cat, kb) = kb();
        // collinearity residual of A, B, O on the probes is nowhere near zero
        for inst in probe_instances(cat, 5, DEFAULT_SEED).unwrap() {
            let (a, b, o) = (inst.point(p(cat, "A")), inst.point(p(cat, "B")), inst.point(p(cat, "O")));
            let area = crate::geometry::cross(&(b - a), &(o - a)).abs() / (b - a).norm();
            assert!(area > 1e-3 * inst.scale);
        }
        let (a, b, o) = (p(cat, "A"), p(cat, "B"), p(cat, "O"));
        assert!(!kb.known_ratio_triplets.iter().any(|t| {
            let mut s = *t;
            s.sort();
            let mut q = [a, b, o];
            q.sort();
            s == q
        }));
    }

    #[test]
    fn midsegment_quadruplet() {
        let (cat, kb) = kb();
        let q = [p(cat, "A"), p(cat, "Mc"), p(cat, "Mb"), p(cat, "Ma")];
        assert!(kb.known_ratio_quadruplets.contains(&canonical_quad(q)));
        assert_eq!(canonical_quad(q), [p(cat, "A"), p(cat, "Mc"), p(cat, "Ma"), p(cat, "Mb")]);
    }

    #[test]
    fn definitional_content() {
        let (cat, kb) = kb();
        let g = p(cat, "G");
        for m in ["med_a", "med_b", "med_c"] {
            assert!(kb.inc_lines[g.index()].contains(cat.line(m).unwrap().index()));
        }
        let o = p(cat, "O");
        for m in ["pbis_a", "pbis_b", "pbis_c"] {
            assert!(kb.inc_lines[o.index()].contains(cat.line(m).unwrap().index()));
        }
        let (b, c) = (p(cat, "B"), p(cat, "C"));
        assert!(kb.perp_bisectors.contains(&(b, c, cat.line("pbis_a").unwrap())));
        let (lb, lc, alpha) = (cat.line("b").unwrap(), cat.line("c").unwrap(), cat.angle("alpha").unwrap());
        assert!(kb.angle_defs.iter().any(|d| d.from == lb && d.to == lc && d.angle == alpha));
        assert!(kb.angle_defs.contains(&AngleDef { from: lc, to: lb, angle: alpha, form: AngleForm::Phi }));
        let circum = cat.circle("circumcircle").unwrap();
        assert_eq!(kb.circle_center[circum.index()], Some(o));
        assert!(kb.locus_defs.contains(&(b, c, alpha, circum)));
        assert!(kb.locus_defs.contains(&(b, c, alpha, cat.circle("circ_BIC").unwrap())));
        assert!(kb.homothety_triplets.contains(&(g, cat.line("pbis_a").unwrap(), cat.line("alt_a").unwrap())));
        let incircle = cat.circle("incircle").unwrap();
        assert!(kb.tangent_lines[incircle.index()].contains(cat.line("a").unwrap().index()));
    }

    #[test]
    fn invariants_hold() {
        let (cat, kb) = kb();
        kb.check_invariants(cat).unwrap();
    }

    #[test]
    fn deterministic() {
        let cat = Catalog::builtin();
        let k1 = derive_relations(&cat, 3, 1e-9, 11).unwrap();
        let k2 = derive_relations(&cat, 3, 1e-9, 11).unwrap();
        assert_eq!(k1, k2);
    }

    #[test]
    fn needs_two_probes() {
        assert_eq!(derive_relations(&Catalog::builtin(), 1, 1e-9, 0), Err(DeriveError::TooFewProbes(1)));
    }
}
