//! Shared helpers for the integration tests.
#![allow(dead_code)]

pub mod coverage;
pub mod gen;
pub mod golden;
pub mod oracle;

use std::path::PathBuf;

use regowl::checker::Abox;
use regowl::codegen::{compile_tsv, CompileConfig, Defaults, Quantifier};
use regowl::manchester::{parse_manchester, ParseOptions};
use regowl::owl::Ontology;
use regowl::vocab::TermVocabulary;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(name: &str) -> String {
    let path = fixtures_dir().join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn terms() -> TermVocabulary {
    TermVocabulary::parse(&fixture("terms.tsv")).unwrap()
}

pub fn config(subject: Quantifier) -> CompileConfig {
    let mut c = CompileConfig { defaults: Defaults { subject, requirement: Quantifier::Only }, ..Default::default() };
    c.vocab.terms = terms();
    c
}

pub fn compile_fixture(name: &str, subject: Quantifier) -> Ontology {
    compile_tsv(&fixture(name), &config(subject)).unwrap_or_else(|e| panic!("{name}: {e}")).ontology
}

/// The compiled ontology with the listing individuals merged in, and the
/// ABox read from those individuals.
pub fn with_listings(tbox: &Ontology, abox_text: &str) -> (Ontology, Abox) {
    let data = parse_manchester(abox_text, ParseOptions { context: Some(tbox), default_namespace: None }).unwrap();
    let mut merged = tbox.clone();
    merged.merge(&data).unwrap();
    (merged, Abox::from_ontology(&data))
}

/// Every pass fixture of the arrow-rule suite.
pub fn passing_rule_fixtures() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(fixtures_dir().join("arrow_rules"))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with("_pass.tsv"))
        .map(|n| format!("arrow_rules/{n}"))
        .collect();
    names.sort();
    names
}

/// Example 1, Example 2 and every passing rule fixture, compiled under both
/// subject defaults.
pub fn golden_ontologies() -> Vec<(String, Ontology)> {
    let mut files = vec!["example1.tsv".to_string(), "example2.tsv".to_string()];
    files.extend(passing_rule_fixtures());
    let mut out = Vec::new();
    for f in files {
        for q in [Quantifier::Some, Quantifier::Only] {
            out.push((format!("{f} ({q})"), compile_fixture(&f, q)));
        }
    }
    out
}
