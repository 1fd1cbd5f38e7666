//! Canonical JSON form of a knowledge base: one key per relation family,
//! each tuple a list of object names, families and tuples in a fixed order.

use super::{AngleDef, AngleForm, KnowledgeBase, Relation, FAMILIES};
use crate::catalog::{Catalog, ObjectKind};
use std::collections::BTreeMap;
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KbLoadError {
    #[error("knowledge base syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown relation family `{0}`")]
    UnknownFamily(String),
    #[error("{family}: unknown object `{name}`")]
    UnknownReference { family: String, name: String },
    #[error("{family}: malformed tuple {tuple:?}")]
    Malformed { family: String, tuple: Vec<String> },
}

/// Serializes `kb` canonically; equal knowledge bases give identical text.
pub fn save_kb(kb: &KnowledgeBase, catalog: &Catalog) -> String {
    let mut by_family: BTreeMap<&str, Vec<Vec<String>>> = BTreeMap::new();
    for rel in kb.tuples() {
        by_family.entry(rel.family()).or_default().push(names(&rel, catalog));
    }
    let mut out = String::from("{\n");
    for (fi, family) in FAMILIES.iter().enumerate() {
        let tuples = by_family.remove(family).unwrap_or_default();
        let _ = write!(out, "  {}: [", serde_json::to_string(family).unwrap());
        if !tuples.is_empty() {
            out.push('\n');
            for (i, t) in tuples.iter().enumerate() {
                let items: Vec<String> = t.iter().map(|s| serde_json::to_string(s).unwrap()).collect();
                let sep = if i + 1 < tuples.len() { "," } else { "" };
                let _ = writeln!(out, "    [{}]{}", items.join(", "), sep);
            }
            out.push_str("  ");
        }
        out.push(']');
        out.push_str(if fi + 1 < FAMILIES.len() { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
    out
}

fn names(rel: &Relation, catalog: &Catalog) -> Vec<String> {
    let n = |id: crate::catalog::ObjectId| catalog.name(id).to_string();
    match *rel {
        Relation::IncLine(p, l) => vec![n(p.into()), n(l.into())],
        Relation::IncCircle(p, k) => vec![n(p.into()), n(k.into())],
        Relation::Perpendicular(l, m) | Relation::Parallel(l, m) => vec![n(l.into()), n(m.into())],
        Relation::CircleCenter(k, p) => vec![n(k.into()), n(p.into())],
        Relation::CircleDiameter(k, p, q) => vec![n(k.into()), n(p.into()), n(q.into())],
        Relation::Tangent(k, l) => vec![n(k.into()), n(l.into())],
        Relation::RatioTriplet(t) => t.iter().map(|p| n((*p).into())).collect(),
        Relation::RatioQuadruplet(t) | Relation::Harmonic(t) => t.iter().map(|p| n((*p).into())).collect(),
        Relation::AngleDef(d) => vec![n(d.from.into()), n(d.to.into()), n(d.angle.into()), d.form.tag().to_string()],
        Relation::PerpBisector(x, y, l) => vec![n(x.into()), n(y.into()), n(l.into())],
        Relation::Locus(x, y, a, k) => vec![n(x.into()), n(y.into()), n(a.into()), n(k.into())],
        Relation::Homothety(x, p, q) => vec![n(x.into()), n(p.into()), n(q.into())],
    }
}

pub fn load_kb(text: &str, catalog: &Catalog) -> Result<KnowledgeBase, KbLoadError> {
    let raw: BTreeMap<String, Vec<Vec<String>>> = serde_json::from_str(text).map_err(|e| KbLoadError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut kb = KnowledgeBase::empty(catalog);
    for (family, tuples) in &raw {
        if !FAMILIES.contains(&family.as_str()) {
            return Err(KbLoadError::UnknownFamily(family.clone()));
        }
        for tuple in tuples {
            kb.insert(parse_tuple(family, tuple, catalog)?);
        }
    }
    Ok(kb)
}

fn parse_tuple(family: &str, tuple: &[String], catalog: &Catalog) -> Result<Relation, KbLoadError> {
    let malformed = || KbLoadError::Malformed { family: family.to_string(), tuple: tuple.to_vec() };
    let obj = |i: usize, kind: ObjectKind| {
        let name = tuple.get(i).ok_or_else(malformed)?;
        let id = catalog
            .lookup(name)
            .ok_or_else(|| KbLoadError::UnknownReference { family: family.to_string(), name: name.clone() })?;
        if id.kind() == kind {
            Ok(id)
        } else {
            Err(malformed())
        }
    };
    let p = |i| obj(i, ObjectKind::Point).map(|o| o.as_point().unwrap());
    let l = |i| obj(i, ObjectKind::Line).map(|o| o.as_line().unwrap());
    let k = |i| obj(i, ObjectKind::Circle).map(|o| o.as_circle().unwrap());
    let a = |i| obj(i, ObjectKind::Angle).map(|o| o.as_angle().unwrap());
    let arity = match family {
        "inc_lines" | "inc_circles" | "perp_lines" | "parallel_lines" | "circle_center" | "tangent_lines" => 2,
        "circle_diameter" | "known_ratio_triplets" | "perp_bisectors" | "homothety_triplets" => 3,
        _ => 4,
    };
    if tuple.len() != arity {
        return Err(malformed());
    }
    Ok(match family {
        "inc_lines" => Relation::IncLine(p(0)?, l(1)?),
        "inc_circles" => Relation::IncCircle(p(0)?, k(1)?),
        "perp_lines" => Relation::Perpendicular(l(0)?, l(1)?),
        "parallel_lines" => Relation::Parallel(l(0)?, l(1)?),
        "circle_center" => Relation::CircleCenter(k(0)?, p(1)?),
        "circle_diameter" => Relation::CircleDiameter(k(0)?, p(1)?, p(2)?),
        "tangent_lines" => Relation::Tangent(k(0)?, l(1)?),
        "known_ratio_triplets" => Relation::RatioTriplet([p(0)?, p(1)?, p(2)?]),
        "known_ratio_quadruplets" => Relation::RatioQuadruplet([p(0)?, p(1)?, p(2)?, p(3)?]),
        "angle_defs" => {
            let form = AngleForm::from_tag(&tuple[3]).ok_or_else(malformed)?;
            Relation::AngleDef(AngleDef { from: l(0)?, to: l(1)?, angle: a(2)?, form })
        }
        "perp_bisectors" => Relation::PerpBisector(p(0)?, p(1)?, l(2)?),
        "harmonic_quadruplets" => Relation::Harmonic([p(0)?, p(1)?, p(2)?, p(3)?]),
        "locus_defs" => Relation::Locus(p(0)?, p(1)?, a(2)?, k(3)?),
        "homothety_triplets" => Relation::Homothety(p(0)?, l(1)?, l(2)?),
        _ => unreachable!("family checked by caller"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::derive_relations;

    #[test]
    fn round_trip_and_canonical_bytes() {
        let cat = Catalog::builtin();
        let kb = derive_relations(&cat, 3, 1e-9, 4).unwrap();
        let text = save_kb(&kb, &cat);
        let back = load_kb(&text, &cat).unwrap();
        assert_eq!(back, kb);
        assert_eq!(save_kb(&back, &cat), text);
        let again = derive_relations(&cat, 3, 1e-9, 4).unwrap();
        assert_eq!(save_kb(&again, &cat), text);
    }

    #[test]
    fn empty_families_are_written() {
        let cat = Catalog::builtin();
        let text = save_kb(&KnowledgeBase::empty(&cat), &cat);
        for f in FAMILIES {
            assert!(text.contains(&format!("\"{f}\": []")), "{f}");
        }
        assert_eq!(load_kb(&text, &cat).unwrap(), KnowledgeBase::empty(&cat));
    }

    #[test]
    fn unknown_point_is_a_reference_error() {
        let cat = Catalog::builtin();
        let text = r#"{ "known_ratio_triplets": [["A", "Q9", "B"]] }"#;
        assert_eq!(
            load_kb(text, &cat),
            Err(KbLoadError::UnknownReference { family: "known_ratio_triplets".into(), name: "Q9".into() })
        );
    }

    #[test]
    fn syntax_error_has_position() {
        let cat = Catalog::builtin();
        match load_kb("{\n  \"inc_lines\": [[\"A\", ]\n}", &cat) {
            Err(KbLoadError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
