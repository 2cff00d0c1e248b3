//! Which fixture exercises each semantic type and each arrow rule.

use regowl::codegen::{check_document, compile_tsv, CompileConfig};
use regowl::owl::{CardinalityMode, ClassExpression as CE, DataRange, Facet, Ontology};
use regowl::schema_check::{Code, Diagnostic};
use regowl::tsv_ingest::{parse_tsv, Layer, SemanticType};

use super::fixture;
use super::golden::REG;

/// One row per arrow rule: the fixture that satisfies it, the one that
/// breaks it, and the code the broken one reports.
pub const RULES: [(&str, &str, Code); 11] = [
    ("domain_pass", "domain_start_fail", Code::BadDomainStart),
    ("domain_pass", "domain_end_fail", Code::BadDomainEnd),
    ("range_relation_pass", "range_relation_fail", Code::BadRangeEnd),
    ("range_property_pass", "range_property_fail", Code::BadRangeEnd),
    ("of_not_pass", "of_not_fail", Code::BadOfEnd),
    ("of_or_pass", "of_or_fail", Code::BadOfEnd),
    ("of_comparison_pass", "of_comparison_fail", Code::BadOfEnd),
    ("of_quantifier_pass", "of_quantifier_fail", Code::BadOfEnd),
    ("of_number_pass", "of_number_fail", Code::BadOfEnd),
    ("to_pass", "to_fail", Code::BadTo),
    ("domain_pass", "missing_domain", Code::MissingDomain),
];

/// Fixtures for rules about a missing arrow or role.
pub const MISSING: [(&str, Code); 2] = [("missing_of", Code::MissingOf), ("missing_requirement", Code::MissingRequirement)];

pub fn diagnostics(name: &str) -> Vec<Diagnostic> {
    let doc = parse_tsv(&fixture(&format!("arrow_rules/{name}.tsv"))).unwrap();
    check_document(&doc, &CompileConfig::default()).unwrap_or_else(|e| panic!("{name}: {e}")).1
}

pub fn errors(name: &str) -> Vec<Code> {
    diagnostics(name).into_iter().filter(|d| d.is_error()).map(|d| d.code).collect()
}

/// Checks every rule row; returns the first mismatch.
pub fn check_rules() -> Result<usize, String> {
    let mut files = 0;
    for (pass, fail, code) in RULES {
        if !errors(pass).is_empty() {
            return Err(format!("{pass}: {:?}", errors(pass)));
        }
        if errors(fail) != [code] {
            return Err(format!("{fail}: {:?}, expected {code:?}", errors(fail)));
        }
    }
    for (fail, code) in MISSING {
        if errors(fail) != [code] {
            return Err(format!("{fail}: {:?}, expected {code:?}", errors(fail)));
        }
    }
    for e in std::fs::read_dir(super::fixtures_dir().join("arrow_rules")).unwrap() {
        let name = e.unwrap().file_name().to_string_lossy().trim_end_matches(".tsv").to_string();
        let listed = RULES.iter().any(|(p, f, _)| *p == name || *f == name) || MISSING.iter().any(|m| m.0 == name);
        if !listed {
            return Err(format!("{name} is not tied to a rule"));
        }
        files += 1;
    }
    Ok(files)
}

pub fn has(o: &Ontology, pred: impl Fn(&CE) -> bool) -> bool {
    o.axioms.iter().flat_map(|a| a.class_expressions()).flat_map(|e| e.subexpressions()).any(pred)
}

pub type TypeCase = (SemanticType, String, fn(&CE) -> bool);

/// One annotated text per semantic type with the constructor it must yield.
pub fn type_cases() -> Vec<TypeCase> {
    let base = fixture("arrow_rules/domain_pass.tsv");
    let some = base.replace("Only[4]", "Some[4]");
    let fixture = |name: &str| fixture(&format!("arrow_rules/{name}.tsv"));
    vec![
        (SemanticType::Class, base.clone(), |e| matches!(e, CE::Named(i) if i.starts_with(REG))),
        (SemanticType::Relation, base.clone(), |e| matches!(e, CE::ObjectSome(..) | CE::ObjectOnly(..))),
        (SemanticType::Property, base.clone(), |e| matches!(e, CE::DataSome(..) | CE::DataOnly(..))),
        (SemanticType::Some, some, |e| matches!(e, CE::DataSome(p, _) if p.ends_with("#limit"))),
        (SemanticType::Only, base.clone(), |e| matches!(e, CE::DataOnly(p, _) if p.ends_with("#limit"))),
        (SemanticType::Literal, base, |e| matches!(e, CE::DataOnly(_, DataRange::Enumeration(l)) if l[0].lexical == "R15")),
        (SemanticType::Number, fixture("of_number_pass"), |e| {
            matches!(e, CE::ObjectCardinality { mode: CardinalityMode::Exact, n: 2, .. })
        }),
        (SemanticType::Comparison, fixture("of_comparison_pass"), |e| {
            matches!(e, CE::DataOnly(_, DataRange::FacetRestriction { facets, .. }) if facets[0].0 == Facet::MinInclusive)
        }),
        (SemanticType::Not, fixture("of_not_pass"), |e| matches!(e, CE::ComplementOf(_))),
        (SemanticType::Or, fixture("of_or_pass"), |e| matches!(e, CE::UnionOf(ops) if ops.len() == 2)),
    ]
}

/// Checks that the cases cover every semantic type and each yields its
/// constructor.
pub fn check_types() -> Result<usize, String> {
    let cases = type_cases();
    let mut seen: Vec<SemanticType> = cases.iter().map(|c| c.0).collect();
    seen.sort();
    let mut all = SemanticType::ALL.to_vec();
    all.sort();
    if seen != all {
        return Err(format!("cases cover {seen:?}"));
    }
    for (tag, text, pred) in &cases {
        let doc = parse_tsv(text).map_err(|e| e.to_string())?;
        if !doc.spans_in(Layer::SemType).any(|s| s.tag == tag.to_string()) {
            return Err(format!("{tag} is not annotated in its case"));
        }
        let o = compile_tsv(text, &CompileConfig::default()).map_err(|e| format!("{tag}: {e}"))?.ontology;
        if !has(&o, pred) {
            return Err(format!("{tag} does not reach its constructor"));
        }
    }
    Ok(cases.len())
}
