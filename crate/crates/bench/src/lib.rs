//! Shared fixtures for the criterion benches.

use tricon_core::kb::{derive_relations, DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE};
use tricon_core::{Catalog, KnowledgeBase, Problem};

/// Built-in catalog with its knowledge base derived under the default seed.
pub fn fixture() -> (Catalog, KnowledgeBase) {
    let catalog = Catalog::builtin();
    let kb = derive_relations(&catalog, DEFAULT_PROBES, DEFAULT_TOLERANCE, DEFAULT_SEED).expect("derive knowledge base");
    (catalog, kb)
}

/// Problems from a one-step plan up to one with no plan at all.
pub fn ladder(catalog: &Catalog) -> Vec<(&'static str, Problem)> {
    [
        ("A,B,Ma", ["A", "B", "Ma"]),
        ("Ma,Mb,Mc", ["Ma", "Mb", "Mc"]),
        ("A,G,O", ["A", "G", "O"]),
        ("A,G,Ma", ["A", "G", "Ma"]),
    ]
    .into_iter()
    .map(|(label, names)| (label, Problem::from_names(catalog, names).expect("builtin point")))
    .collect()
}
