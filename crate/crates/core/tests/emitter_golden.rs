use std::path::PathBuf;
use tricon_core::emitter::{emit_model, lint, EmitMode, EmittedModel};
use tricon_core::kb::{derive_relations, DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE};
use tricon_core::{Catalog, PlannerConfig, Problem};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against the checked-in file; `UPDATE_GOLDEN=1` rewrites it.
fn check(name: &str, text: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, text).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == text, "{name} differs from the golden file; rerun with UPDATE_GOLDEN=1 after review");
}

#[test]
fn emitted_files_match_golden() {
    let cat = Catalog::builtin();
    let kb = derive_relations(&cat, DEFAULT_PROBES, DEFAULT_TOLERANCE, DEFAULT_SEED).unwrap();
    let problem = Problem::from_names(&cat, ["A", "G", "O"]).unwrap();
    let stem = EmittedModel::file_stem(&problem, &cat);
    assert_eq!(stem, "A_G_O");
    let fixed = emit_model(&problem, &kb, &cat, &PlannerConfig { max_steps: 6, ..PlannerConfig::default() }, EmitMode::Fixed).unwrap();
    let minimize = emit_model(&problem, &kb, &cat, &PlannerConfig::default(), EmitMode::Minimize).unwrap();
    for m in [&fixed, &minimize] {
        let report = lint(&m.model_text, &m.data_text);
        assert!(report.is_clean(), "{:?}", report.issues);
        assert!(!m.model_text.contains('\r') && m.model_text.ends_with('\n'));
    }
    assert_eq!(fixed.data_text, minimize.data_text);
    check(&format!("{stem}.mzn"), &fixed.model_text);
    check(&format!("{stem}_minimize.mzn"), &minimize.model_text);
    check(&format!("{stem}.dzn"), &fixed.data_text);
}
