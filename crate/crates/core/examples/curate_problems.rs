//! Regenerates `data/wernick.csv`: `cargo run -p tricon-core --example curate_problems > crates/core/data/wernick.csv`

use tricon_core::bench::{curate, extended_catalog, problem_file, CURATION_HEADER, CURATION_SEED};
use tricon_core::kb::{derive_relations, DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE};
use tricon_core::PlannerConfig;

fn main() -> anyhow::Result<()> {
    let catalog = extended_catalog();
    let kb = derive_relations(&catalog, DEFAULT_PROBES, DEFAULT_TOLERANCE, DEFAULT_SEED)?;
    let records = curate(&catalog, &kb, &PlannerConfig::default(), CURATION_SEED);
    print!("{}", problem_file(&records, CURATION_HEADER));
    Ok(())
}
