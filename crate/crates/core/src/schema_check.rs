//! Arrow-endpoint and role rules over the extracted layer tables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::owl::Facet;
use crate::preprocess::{LayerTables, TypeRow, UnitId};
use crate::tsv_ingest::{Role, SemanticType};
use crate::vocab::ConstrMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    BadDomainStart,
    BadDomainEnd,
    BadRangeStart,
    BadRangeEnd,
    BadOfStart,
    BadOfEnd,
    BadTo,
    MissingSubject,
    MissingRequirement,
    MissingOf,
    MissingDomain,
    MissingRange,
    OrArity,
    DuplicateQuantifier,
    ConflictingComparisons,
    TooManyComparisons,
    UnresolvedTerm,
    KindMismatch,
    DefaultQuantifier,
    /// Linguistic or semantic arrows that preprocessing cannot apply.
    ArrowStructure,
}

impl Code {
    pub const ALL: [Code; 20] = [
        Code::BadDomainStart,
        Code::BadDomainEnd,
        Code::BadRangeStart,
        Code::BadRangeEnd,
        Code::BadOfStart,
        Code::BadOfEnd,
        Code::BadTo,
        Code::MissingSubject,
        Code::MissingRequirement,
        Code::MissingOf,
        Code::MissingDomain,
        Code::MissingRange,
        Code::OrArity,
        Code::DuplicateQuantifier,
        Code::ConflictingComparisons,
        Code::TooManyComparisons,
        Code::UnresolvedTerm,
        Code::KindMismatch,
        Code::DefaultQuantifier,
        Code::ArrowStructure,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::BadDomainStart => "BAD_DOMAIN_START",
            Code::BadDomainEnd => "BAD_DOMAIN_END",
            Code::BadRangeStart => "BAD_RANGE_START",
            Code::BadRangeEnd => "BAD_RANGE_END",
            Code::BadOfStart => "BAD_OF_START",
            Code::BadOfEnd => "BAD_OF_END",
            Code::BadTo => "BAD_TO",
            Code::MissingSubject => "MISSING_SUBJECT",
            Code::MissingRequirement => "MISSING_REQUIREMENT",
            Code::MissingOf => "MISSING_OF",
            Code::MissingDomain => "MISSING_DOMAIN",
            Code::MissingRange => "MISSING_RANGE",
            Code::OrArity => "OR_ARITY",
            Code::DuplicateQuantifier => "DUPLICATE_QUANTIFIER",
            Code::ConflictingComparisons => "CONFLICTING_COMPARISONS",
            Code::TooManyComparisons => "TOO_MANY_COMPARISONS",
            Code::UnresolvedTerm => "UNRESOLVED_TERM",
            Code::KindMismatch => "KIND_MISMATCH",
            Code::DefaultQuantifier => "DEFAULT_QUANTIFIER",
            Code::ArrowStructure => "ARROW_STRUCTURE",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub unit_id: Option<UnitId>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, unit_id: Option<UnitId>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, unit_id, message: message.into() }
    }

    pub fn warning(code: Code, unit_id: Option<UnitId>, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, unit_id, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    /// `SEVERITY CODE unit=<id> <message>`; `unit=-` when no unit applies.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit_id {
            Some(u) => write!(f, "{} {} unit={} {}", self.severity, self.code, u, self.message),
            None => write!(f, "{} {} unit=- {}", self.severity, self.code, self.message),
        }
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

pub fn to_lines(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

pub fn to_json(diags: &[Diagnostic]) -> String {
    serde_json::to_string_pretty(diags).expect("diagnostics serialize")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Also warn about defaulted quantifiers inside role spans.
    pub pedantic: bool,
}

/// Checks the tables against the arrow-endpoint rules. Returns every
/// problem found, errors and warnings interleaved in unit order.
pub fn validate(tables: &LayerTables, constr: &ConstrMap, options: ValidateOptions) -> Vec<Diagnostic> {
    use SemanticType as T;
    let mut out = Vec::new();
    let rows: BTreeMap<UnitId, &TypeRow> = tables.types.iter().map(|r| (r.unit_id, r)).collect();
    let tag_of = |id: UnitId| rows.get(&id).map(|r| r.type_tag);
    let name = |id: UnitId| match rows.get(&id) {
        Some(r) => format!("`{}` ({})", r.surface, r.type_tag),
        None => format!("unit {id}"),
    };

    for row in &tables.types {
        let u = Some(row.unit_id);
        let tag = row.type_tag;
        let me = format!("`{}` ({tag})", row.surface);

        if let Some(d) = row.domain_ref {
            if !tag.is_predicate() {
                out.push(Diagnostic::error(Code::BadDomainStart, u, format!("Domain arrow starts at {me}; only Relation or Property may have a domain")));
            } else if !matches!(tag_of(d), Some(T::Class | T::Relation)) {
                out.push(Diagnostic::error(Code::BadDomainEnd, u, format!("Domain of {me} is {}; expected Class or Relation", name(d))));
            }
        } else if tag.is_predicate() {
            out.push(Diagnostic::error(Code::MissingDomain, u, format!("{me} has no Domain arrow")));
        }

        if let Some(r) = row.range_ref {
            match tag {
                T::Relation if !matches!(tag_of(r), Some(T::Class | T::Relation | T::Property)) => {
                    out.push(Diagnostic::error(Code::BadRangeEnd, u, format!("Range of {me} is {}; expected Class, Relation or Property", name(r))));
                }
                T::Property if tag_of(r) != Some(T::Literal) => {
                    out.push(Diagnostic::error(Code::BadRangeEnd, u, format!("Range of {me} is {}; expected Literal", name(r))));
                }
                T::Relation | T::Property => {}
                _ => out.push(Diagnostic::error(Code::BadRangeStart, u, format!("Range arrow starts at {me}; only Relation or Property may have a range"))),
            }
        } else if tag.is_predicate() {
            out.push(Diagnostic::error(Code::MissingRange, u, format!("{me} has no Range arrow")));
        }

        let needs_of = matches!(tag, T::Not | T::Or | T::Comparison | T::Some | T::Only | T::Number);
        if row.of_refs.is_empty() {
            if needs_of {
                out.push(Diagnostic::error(Code::MissingOf, u, format!("{me} has no Of arrow")));
            }
        } else if !needs_of {
            out.push(Diagnostic::error(Code::BadOfStart, u, format!("Of arrow starts at {me}")));
        } else {
            for &o in &row.of_refs {
                let ok = match tag {
                    T::Not | T::Or => matches!(tag_of(o), Some(T::Class | T::Relation | T::Property)),
                    T::Comparison => tag_of(o) == Some(T::Literal),
                    _ => matches!(tag_of(o), Some(T::Relation | T::Property)),
                };
                if !ok {
                    let expected = match tag {
                        T::Not | T::Or => "Class, Relation or Property",
                        T::Comparison => "Literal",
                        _ => "Relation or Property",
                    };
                    out.push(Diagnostic::error(Code::BadOfEnd, u, format!("Of arrow from {me} ends at {}; expected {expected}", name(o))));
                }
            }
            if tag == T::Or && row.of_refs.len() < 2 {
                out.push(Diagnostic::error(Code::OrArity, u, format!("{me} needs at least two Of arrows")));
            }
        }

        if tag.is_predicate() {
            let quantifiers: Vec<&TypeRow> = tables
                .types
                .iter()
                .filter(|q| q.type_tag.is_quantifier() && q.of_refs.contains(&row.unit_id))
                .collect();
            if quantifiers.len() > 1 {
                out.push(Diagnostic::error(Code::DuplicateQuantifier, u, format!("{me} is quantified {} times", quantifiers.len())));
            } else if quantifiers.is_empty() {
                let inside_role = tables
                    .roles
                    .iter()
                    .any(|r| row.tokens.iter().all(|t| r.tokens.contains(t)));
                if options.pedantic || !inside_role {
                    let default = if inside_role { "the role default" } else { "the subject default" };
                    out.push(Diagnostic::warning(Code::DefaultQuantifier, u, format!("{me} has no Some/Only/Number; using {default}")));
                }
            }
        }

        if tag == T::Literal {
            let comparisons: Vec<&TypeRow> = tables
                .types
                .iter()
                .filter(|c| c.type_tag == T::Comparison && c.of_refs.contains(&row.unit_id))
                .collect();
            if comparisons.len() > 2 {
                out.push(Diagnostic::error(Code::TooManyComparisons, u, format!("{me} has {} comparisons; at most two (one bound each side) are allowed", comparisons.len())));
            } else if comparisons.len() == 2 {
                let facets: Option<Vec<Facet>> = comparisons.iter().map(|c| constr.lookup(&c.surface).ok()).collect();
                if let Some(f) = facets {
                    let lower = f.iter().filter(|x| x.is_lower()).count();
                    let upper = f.iter().filter(|x| x.is_upper()).count();
                    if lower != 1 || upper != 1 {
                        out.push(Diagnostic::error(Code::ConflictingComparisons, u, format!(
                            "comparisons `{}` and `{}` on {me} do not form one lower and one upper bound",
                            comparisons[0].surface, comparisons[1].surface
                        )));
                    }
                }
            }
        }
    }

    for role in &tables.roles {
        if let Some(t) = role.to_ref {
            let target = tables.role_row(t).map(|r| r.role_tag);
            if role.role_tag != Role::Subject || target != Some(Role::Requirement) {
                out.push(Diagnostic::error(Code::BadTo, Some(role.unit_id), format!(
                    "To arrow from `{}` ({}) must go from a Subject to a Requirement",
                    role.surface, role.role_tag
                )));
            }
        }
    }
    if !tables.roles.iter().any(|r| r.role_tag == Role::Subject) {
        out.push(Diagnostic::error(Code::MissingSubject, None, "no Subject span"));
    }
    if !tables.roles.iter().any(|r| r.role_tag == Role::Requirement) {
        out.push(Diagnostic::error(Code::MissingRequirement, None, "no Requirement span"));
    }
    out
}
