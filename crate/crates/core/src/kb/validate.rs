use super::conditions::holds;
use super::derive::{probe_instances, DeriveError};
use super::{KnowledgeBase, Relation};
use crate::catalog::Catalog;

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// Tuples whose defining condition failed on some fresh probe.
    pub failures: Vec<Relation>,
    pub probes_checked: usize,
    pub tuples_checked: usize,
}

impl ValidationReport {
    pub fn is_sound(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-checks every tuple of `kb` on `fresh_probes` triangles drawn from `seed`,
/// which should differ from the derivation seed.
pub fn validate_relations(
    kb: &KnowledgeBase,
    catalog: &Catalog,
    fresh_probes: usize,
    tolerance: f64,
    seed: u64,
) -> Result<ValidationReport, DeriveError> {
    let insts = probe_instances(catalog, fresh_probes, seed)?;
    let tuples = kb.tuples();
    let failures = tuples.iter().filter(|rel| !holds(rel, &insts, tolerance)).copied().collect();
    Ok(ValidationReport { failures, probes_checked: insts.len(), tuples_checked: tuples.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::derive_relations;

    #[test]
    fn empty_kb_is_vacuously_sound() {
        let cat = Catalog::builtin();
        let r = validate_relations(&KnowledgeBase::empty(&cat), &cat, 10, 1e-9, 5).unwrap();
        assert!(r.is_sound());
        assert_eq!(r.tuples_checked, 0);
    }

    #[test]
    fn injected_bogus_triplet_is_caught() {
        let cat = Catalog::builtin();
        let mut kb = derive_relations(&cat, 3, 1e-9, 1).unwrap();
        let bogus = [cat.point("A").unwrap(), cat.point("B").unwrap(), cat.point("O").unwrap()];
        kb.known_ratio_triplets.insert(bogus);
        let r = validate_relations(&kb, &cat, 20, 1e-9, 77).unwrap();
        assert_eq!(r.failures, vec![Relation::RatioTriplet(bogus)]);
    }
}
