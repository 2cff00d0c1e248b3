//! Layer tables to OWL: entity generation, term alignment, restriction
//! construction and role axioms.
//!
//! Restrictions are built from the ends of predicate chains inwards. A
//! predicate is built once everything its filler depends on has been built:
//! the predicates attached to its range class and the predicates whose
//! domain is the predicate itself. Classes that are nobody's range are the
//! roots of the pool; each root contributes its own name plus one entry per
//! predicate hanging off it, so that role spans can pick the pieces whose
//! tokens they cover.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::owl::{
    Axiom, CardinalityMode, ClassExpression as CE, DataRange, Entity, EntityKind, Facet, Literal, Ontology,
    OwlError, PropertyKind,
};
use crate::preprocess::{apply_linguistic_arrows, extract_layers, LayerTables, PreprocessError, TypeRow, UnitId};
use crate::schema_check::{has_errors, validate, Code, Diagnostic, ValidateOptions};
use crate::tsv_ingest::{parse_tsv, AnnotatedDocument, Role, SemanticType as T, TokenRef, TsvError};
use crate::vocab::{TermVocabulary, VocabError, Vocabularies};

pub const DEFAULT_BASE_IRI: &str = "https://example.org/regulation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Some,
    Only,
}

impl FromStr for Quantifier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "some" => Ok(Quantifier::Some),
            "only" => Ok(Quantifier::Only),
            _ => Err(format!("expected `some` or `only`, got `{s}`")),
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Some => "some",
            Quantifier::Only => "only",
        })
    }
}

/// Quantifiers used for predicates without a Some/Only/Number annotation.
/// Predicates outside every role span use the subject default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Defaults {
    pub subject: Quantifier,
    pub requirement: Quantifier,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults { subject: Quantifier::Some, requirement: Quantifier::Only }
    }
}

#[derive(Debug, Clone)]
pub struct CompileConfig {
    pub base_iri: String,
    pub defaults: Defaults,
    pub vocab: Vocabularies,
    pub validate: ValidateOptions,
}

impl Default for CompileConfig {
    fn default() -> Self {
        CompileConfig {
            base_iri: DEFAULT_BASE_IRI.to_string(),
            defaults: Defaults::default(),
            vocab: Vocabularies::default(),
            validate: ValidateOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Tsv(#[from] TsvError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error("annotation has {} schema error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Schema(Vec<Diagnostic>),
    #[error("predicate chain through units {0:?} is cyclic")]
    ChainCycle(Vec<UnitId>),
    #[error("unit {0}: range predicate has a domain that is neither a class nor this predicate")]
    UnsupportedChain(UnitId),
    #[error("unit {unit}: Or operands cannot be placed in one expression: {reason}")]
    IncoherentOr { unit: UnitId, reason: String },
    #[error("role unit {0} covers no restriction")]
    EmptyRoleSelection(UnitId),
    #[error("unit {unit}: {reason}")]
    BadNumber { unit: UnitId, reason: String },
    #[error("unit {unit}: {reason}")]
    BadComparison { unit: UnitId, reason: String },
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error(transparent)]
    Owl(#[from] OwlError),
}

/// `label` lowercased with runs of non-alphanumerics collapsed to `_`.
pub fn slug(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            out.push(c);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let trimmed = out.trim_matches('_');
    if trimmed.is_empty() {
        "entity".to_string()
    } else {
        trimmed.to_string()
    }
}

fn namespace(base_iri: &str) -> String {
    if base_iri.ends_with('#') || base_iri.ends_with('/') {
        base_iri.to_string()
    } else {
        format!("{base_iri}#")
    }
}

/// Ontology IRI for a base, without a trailing `#`.
pub fn ontology_iri(base_iri: &str) -> String {
    base_iri.trim_end_matches('#').to_string()
}

/// IRIs of generated entities, keyed by unit.
pub type UnitIris = BTreeMap<UnitId, String>;

/// One entity per Class, Relation and Property row and one class per role
/// row. IRIs are minted from slugged surfaces in unit order, with `_2`,
/// `_3`, ... on collisions.
pub fn generate_entities(tables: &LayerTables, base_iri: &str) -> (Ontology, UnitIris) {
    let ns = namespace(base_iri);
    let mut onto = Ontology::new(ontology_iri(base_iri));
    let mut units: Vec<(UnitId, &str, EntityKind)> = Vec::new();
    for row in &tables.types {
        let kind = match row.type_tag {
            T::Class => EntityKind::Class,
            T::Relation => EntityKind::ObjectProperty,
            T::Property => EntityKind::DataProperty,
            _ => continue,
        };
        units.push((row.unit_id, &row.surface, kind));
    }
    for row in &tables.roles {
        units.push((row.unit_id, &row.surface, EntityKind::Class));
    }
    units.sort_by_key(|u| u.0);
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut iris = UnitIris::new();
    for (unit, surface, kind) in units {
        let base = slug(surface);
        let mut candidate = base.clone();
        let mut n = 1;
        while used.contains(&candidate) {
            n += 1;
            candidate = format!("{base}_{n}");
        }
        used.insert(candidate.clone());
        let iri = format!("{ns}{candidate}");
        onto.declare(Entity::new(kind, iri.clone(), Some(surface.to_string())))
            .expect("fresh IRIs never conflict");
        iris.insert(unit, iri);
    }
    (onto, iris)
}

fn contains_all(outer: &[TokenRef], inner: &[TokenRef]) -> bool {
    !inner.is_empty() && inner.iter().all(|t| outer.contains(t))
}

/// Declares every resolved term and links it to the first Class, Property
/// or Relation row whose tokens include the term's tokens.
pub fn align_terms(
    tables: &LayerTables,
    terms: &TermVocabulary,
    iris: &UnitIris,
    onto: &mut Ontology,
) -> Result<Vec<Diagnostic>, CompileError> {
    let mut warnings = Vec::new();
    for term in &tables.terms {
        if term.term_iri.is_empty() {
            continue;
        }
        let target = tables.types.iter().find(|r| {
            matches!(r.type_tag, T::Class | T::Property | T::Relation) && contains_all(&r.tokens, &term.tokens)
        });
        let row_kind = target.map(|r| match r.type_tag {
            T::Class => EntityKind::Class,
            T::Relation => EntityKind::ObjectProperty,
            _ => EntityKind::DataProperty,
        });
        let declared = terms.get(&term.term_label).and_then(|t| t.kind);
        let kind = declared.or(row_kind).unwrap_or(EntityKind::Class);
        onto.declare(Entity::new(kind, term.term_iri.clone(), Some(term.term_label.clone())))?;
        let (Some(row), Some(row_kind)) = (target, row_kind) else { continue };
        if kind != row_kind {
            warnings.push(Diagnostic::warning(
                Code::KindMismatch,
                Some(term.unit_id),
                format!("term `{}` is a {kind:?} but `{}` is a {}", term.term_label, row.surface, row.type_tag),
            ));
            continue;
        }
        let generated = iris[&row.unit_id].clone();
        onto.add_axiom(match kind {
            EntityKind::Class => Axiom::EquivalentClasses(vec![CE::named(term.term_iri.clone()), CE::named(generated)]),
            EntityKind::ObjectProperty => Axiom::EquivalentProperties {
                first: term.term_iri.clone(),
                second: generated,
                kind: PropertyKind::Object,
            },
            _ => Axiom::EquivalentProperties {
                first: term.term_iri.clone(),
                second: generated,
                kind: PropertyKind::Data,
            },
        });
    }
    Ok(warnings)
}

/// Building blocks for role definitions, keyed by the unit they stem from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RestrictionPool {
    pub entries: BTreeMap<UnitId, CE>,
    /// Tokens used to decide which role span an entry belongs to.
    pub anchors: BTreeMap<UnitId, Vec<TokenRef>>,
    pub consumed: BTreeSet<UnitId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Restrictor {
    Some,
    Only,
    Card(CardinalityMode, u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Conjunct {
    Pred(UnitId),
    /// Union of restrictions on predicates sharing one domain.
    Union(UnitId, Vec<UnitId>),
}

struct Builder<'a> {
    tables: &'a LayerTables,
    rows: BTreeMap<UnitId, &'a TypeRow>,
    iris: &'a UnitIris,
    vocab: &'a Vocabularies,
    defaults: Defaults,
    attached: BTreeMap<UnitId, Vec<Conjunct>>,
    negated: BTreeSet<UnitId>,
    /// Class that stands for a union of classes, with the Or unit and operands.
    class_unions: BTreeMap<UnitId, (UnitId, Vec<UnitId>)>,
    /// Class unions that are nobody's range.
    free_unions: Vec<(UnitId, Vec<UnitId>)>,
    in_union: BTreeSet<UnitId>,
    built: BTreeMap<UnitId, CE>,
}

impl<'a> Builder<'a> {
    fn row(&self, id: UnitId) -> &'a TypeRow {
        self.rows[&id]
    }

    fn tag(&self, id: UnitId) -> Option<T> {
        self.rows.get(&id).map(|r| r.type_tag)
    }

    /// The class a predicate's filler is rooted at, if any.
    fn range_class(&self, p: UnitId) -> Result<Option<UnitId>, CompileError> {
        let Some(r) = self.row(p).range_ref else { return Ok(None) };
        match self.tag(r) {
            Some(T::Class) => Ok(Some(r)),
            Some(T::Relation | T::Property) => match self.row(r).domain_ref {
                Some(d) if d == p => Ok(None),
                Some(d) if self.tag(d) == Some(T::Class) => Ok(Some(d)),
                _ => Err(CompileError::UnsupportedChain(p)),
            },
            _ => Ok(None),
        }
    }

    fn conjunct_preds(c: &Conjunct) -> Vec<UnitId> {
        match c {
            Conjunct::Pred(p) => vec![*p],
            Conjunct::Union(_, ps) => ps.clone(),
        }
    }

    fn preds_attached(&self, unit: UnitId) -> Vec<UnitId> {
        self.attached.get(&unit).into_iter().flatten().flat_map(Self::conjunct_preds).collect()
    }

    fn dependencies(&self, p: UnitId) -> Result<BTreeSet<UnitId>, CompileError> {
        let mut deps: BTreeSet<UnitId> = self.preds_attached(p).into_iter().collect();
        if let Some(c) = self.range_class(p)? {
            let classes = match self.class_unions.get(&c) {
                Some((_, ops)) => ops.clone(),
                None => vec![c],
            };
            for class in classes {
                deps.extend(self.preds_attached(class));
            }
        }
        Ok(deps)
    }

    fn named(&self, c: UnitId) -> CE {
        let n = CE::named(self.iris[&c].clone());
        if self.negated.contains(&c) {
            CE::not(n)
        } else {
            n
        }
    }

    fn conjunct_expr(&self, c: &Conjunct) -> CE {
        let restr = |p: &UnitId| {
            let e = self.built[p].clone();
            if self.negated.contains(p) {
                CE::not(e)
            } else {
                e
            }
        };
        match c {
            Conjunct::Pred(p) => restr(p),
            Conjunct::Union(_, ps) => CE::or(ps.iter().map(restr).collect()),
        }
    }

    fn attached_exprs(&self, unit: UnitId) -> Vec<CE> {
        self.attached.get(&unit).into_iter().flatten().map(|c| self.conjunct_expr(c)).collect()
    }

    fn plain_node(&self, c: UnitId) -> CE {
        let mut ops = vec![self.named(c)];
        ops.extend(self.attached_exprs(c));
        CE::and(ops)
    }

    /// A class together with everything attached to it.
    fn node(&self, c: UnitId) -> CE {
        match self.class_unions.get(&c) {
            Some((_, ops)) => CE::or(ops.iter().map(|o| self.plain_node(*o)).collect()),
            None => self.plain_node(c),
        }
    }

    fn restrictor(&self, p: UnitId) -> Result<Restrictor, CompileError> {
        let quant = self
            .tables
            .types
            .iter()
            .find(|q| q.type_tag.is_quantifier() && q.of_refs.contains(&p));
        Ok(match quant.map(|q| (q.type_tag, q)) {
            Some((T::Some, _)) => Restrictor::Some,
            Some((T::Only, _)) => Restrictor::Only,
            Some((_, q)) => self.cardinality(q)?,
            None => {
                let tokens = &self.row(p).tokens;
                let role = self.tables.roles.iter().find(|r| contains_all(&r.tokens, tokens));
                let q = match role.map(|r| r.role_tag) {
                    Some(Role::Requirement) => self.defaults.requirement,
                    _ => self.defaults.subject,
                };
                match q {
                    Quantifier::Some => Restrictor::Some,
                    Quantifier::Only => Restrictor::Only,
                }
            }
        })
    }

    /// `at least two` -> Min 2; a bare number phrase is exact.
    fn cardinality(&self, q: &TypeRow) -> Result<Restrictor, CompileError> {
        let (facet, rest) = self
            .vocab
            .constr
            .split_prefix(&q.surface)
            .filter(|(_, rest)| !rest.is_empty())
            .unwrap_or((Facet::Exact, q.surface.clone()));
        let n = self.vocab.card.lookup(&rest)?;
        let bad = |reason: String| CompileError::BadNumber { unit: q.unit_id, reason };
        let n = u32::try_from(n).map_err(|_| bad(format!("{n} is too large")))?;
        Ok(match facet {
            Facet::MinInclusive => Restrictor::Card(CardinalityMode::Min, n),
            Facet::MinExclusive => Restrictor::Card(
                CardinalityMode::Min,
                n.checked_add(1).ok_or_else(|| bad(format!("more than {n} overflows")))?,
            ),
            Facet::MaxInclusive => Restrictor::Card(CardinalityMode::Max, n),
            Facet::MaxExclusive => Restrictor::Card(
                CardinalityMode::Max,
                n.checked_sub(1).ok_or_else(|| bad("fewer than zero".to_string()))?,
            ),
            Facet::Exact => Restrictor::Card(CardinalityMode::Exact, n),
        })
    }

    fn literal_range(&self, lit_unit: UnitId) -> Result<DataRange, CompileError> {
        let row = self.row(lit_unit);
        let lit = Literal::infer(&row.surface);
        let comparisons: Vec<&TypeRow> = self
            .tables
            .types
            .iter()
            .filter(|c| c.type_tag == T::Comparison && c.of_refs.contains(&lit_unit))
            .collect();
        if comparisons.is_empty() {
            return Ok(DataRange::one_of(vec![lit]));
        }
        let facets = comparisons
            .iter()
            .map(|c| self.vocab.constr.lookup(&c.surface))
            .collect::<Result<Vec<Facet>, _>>()?;
        let bad = |reason: String| CompileError::BadComparison { unit: lit_unit, reason };
        if facets.contains(&Facet::Exact) {
            if facets.len() > 1 {
                return Err(bad("an exact comparison cannot be combined with a bound".into()));
            }
            return Ok(DataRange::one_of(vec![lit]));
        }
        if !lit.datatype.is_numeric() {
            return Err(bad(format!("`{}` is not a number", row.surface)));
        }
        DataRange::restricted(lit.datatype, facets.into_iter().map(|f| (f, lit.clone())).collect())
            .map_err(|e| bad(e.to_string()))
    }

    fn build(&self, p: UnitId) -> Result<CE, CompileError> {
        let row = self.row(p);
        let iri = self.iris[&p].clone();
        let restrictor = self.restrictor(p)?;
        let range = row.range_ref.expect("validated predicates have a range");
        if row.type_tag == T::Property {
            let data = self.literal_range(range)?;
            return Ok(match restrictor {
                Restrictor::Some => CE::DataSome(iri, data),
                Restrictor::Only => CE::DataOnly(iri, data),
                Restrictor::Card(mode, n) => CE::DataCardinality { property: iri, mode, n, range: Some(data) },
            });
        }
        let mut ops = Vec::new();
        if let Some(c) = self.range_class(p)? {
            ops.push(self.node(c));
        }
        ops.extend(self.attached_exprs(p));
        let filler = CE::and(ops);
        Ok(match restrictor {
            Restrictor::Some => CE::some(iri, filler),
            Restrictor::Only => CE::only(iri, filler),
            Restrictor::Card(mode, n) => CE::ObjectCardinality {
                property: iri,
                mode,
                n,
                filler: (filler != CE::thing()).then(|| Box::new(filler)),
            },
        })
    }
}

/// Builds the restriction pool from validated tables.
pub fn build_restrictions(
    tables: &LayerTables,
    vocab: &Vocabularies,
    defaults: Defaults,
    iris: &UnitIris,
) -> Result<RestrictionPool, CompileError> {
    let rows: BTreeMap<UnitId, &TypeRow> = tables.types.iter().map(|r| (r.unit_id, r)).collect();
    let mut b = Builder {
        tables,
        rows,
        iris,
        vocab,
        defaults,
        attached: BTreeMap::new(),
        negated: BTreeSet::new(),
        class_unions: BTreeMap::new(),
        free_unions: Vec::new(),
        in_union: BTreeSet::new(),
        built: BTreeMap::new(),
    };
    let preds: Vec<UnitId> = tables.types.iter().filter(|r| r.type_tag.is_predicate()).map(|r| r.unit_id).collect();
    for &p in &preds {
        if let Some(d) = b.row(p).domain_ref {
            b.attached.entry(d).or_default().push(Conjunct::Pred(p));
        }
    }
    for row in tables.types.iter().filter(|r| r.type_tag == T::Not) {
        b.negated.extend(row.of_refs.iter().copied());
    }

    let mut ranges: BTreeSet<UnitId> = BTreeSet::new();
    for &p in &preds {
        if let Some(c) = b.range_class(p)? {
            ranges.insert(c);
        }
    }

    for or in tables.types.iter().filter(|r| r.type_tag == T::Or) {
        let unit = or.unit_id;
        let incoherent = |reason: &str| CompileError::IncoherentOr { unit, reason: reason.to_string() };
        let ops = &or.of_refs;
        if ops.iter().any(|o| b.in_union.contains(o)) {
            return Err(incoherent("an operand already belongs to another Or"));
        }
        if ops.iter().all(|o| b.tag(*o).is_some_and(T::is_predicate)) {
            let domains: BTreeSet<Option<UnitId>> = ops.iter().map(|o| b.row(*o).domain_ref).collect();
            let [Some(domain)] = domains.into_iter().collect::<Vec<_>>()[..] else {
                return Err(incoherent("predicate operands must share one domain"));
            };
            let list = b.attached.get_mut(&domain).expect("domain has the operands attached");
            list.retain(|c| !matches!(c, Conjunct::Pred(p) if ops.contains(p)));
            list.push(Conjunct::Union(unit, ops.clone()));
        } else if ops.iter().all(|o| b.tag(*o) == Some(T::Class)) {
            let anchored: Vec<UnitId> = ops.iter().copied().filter(|o| ranges.contains(o)).collect();
            match anchored[..] {
                [] => b.free_unions.push((unit, ops.clone())),
                [a] => {
                    b.class_unions.insert(a, (unit, ops.clone()));
                }
                _ => return Err(incoherent("more than one operand is already a predicate range")),
            }
        } else {
            return Err(incoherent("operands mix classes and predicates"));
        }
        b.in_union.extend(ops.iter().copied());
    }

    // Build predicates from the ends of the chains inwards.
    let mut pending: BTreeSet<UnitId> = preds.iter().copied().collect();
    let mut deps: BTreeMap<UnitId, BTreeSet<UnitId>> = BTreeMap::new();
    for &p in &preds {
        deps.insert(p, b.dependencies(p)?);
    }
    while !pending.is_empty() {
        let ready: Vec<UnitId> = pending
            .iter()
            .copied()
            .filter(|p| deps[p].iter().all(|d| !pending.contains(d)))
            .collect();
        if ready.is_empty() {
            return Err(CompileError::ChainCycle(pending.into_iter().collect()));
        }
        let before = pending.len();
        for p in ready {
            let e = b.build(p)?;
            b.built.insert(p, e);
            pending.remove(&p);
        }
        debug_assert!(pending.len() < before);
    }

    let mut pool = RestrictionPool::default();
    let tokens = |u: UnitId| tables.type_row(u).map(|r| r.tokens.clone()).unwrap_or_default();
    for row in tables.types.iter().filter(|r| r.type_tag == T::Class) {
        let c = row.unit_id;
        if ranges.contains(&c) || b.in_union.contains(&c) {
            continue;
        }
        pool.entries.insert(c, b.named(c));
        pool.anchors.insert(c, row.tokens.clone());
        for conj in b.attached.get(&c).into_iter().flatten() {
            let (key, anchor) = match conj {
                Conjunct::Pred(p) => (*p, tokens(*p)),
                Conjunct::Union(o, ps) => (*o, std::iter::once(*o).chain(ps.iter().copied()).flat_map(tokens).collect()),
            };
            pool.entries.insert(key, b.conjunct_expr(conj));
            pool.anchors.insert(key, anchor);
        }
    }
    for (or, ops) in &b.free_unions {
        pool.entries.insert(*or, CE::or(ops.iter().map(|o| b.plain_node(*o)).collect()));
        pool.anchors.insert(*or, std::iter::once(*or).chain(ops.iter().copied()).flat_map(tokens).collect());
    }
    pool.consumed = tables
        .types
        .iter()
        .map(|r| r.unit_id)
        .filter(|u| !pool.entries.contains_key(u))
        .collect();
    Ok(pool)
}

/// Role equivalences from the pool, then one subclass axiom per To arrow.
pub fn build_axioms(
    tables: &LayerTables,
    pool: &RestrictionPool,
    iris: &UnitIris,
    onto: &mut Ontology,
) -> Result<(), CompileError> {
    for role in &tables.roles {
        let selected: Vec<CE> = pool
            .entries
            .iter()
            .filter(|(u, _)| contains_all(&role.tokens, &pool.anchors[*u]))
            .map(|(_, e)| e.clone())
            .collect();
        if selected.is_empty() {
            return Err(CompileError::EmptyRoleSelection(role.unit_id));
        }
        onto.add_axiom(Axiom::EquivalentClasses(vec![CE::named(iris[&role.unit_id].clone()), CE::and(selected)]));
    }
    for role in &tables.roles {
        if let Some(req) = role.to_ref {
            onto.add_axiom(Axiom::SubClassOf {
                sub: CE::named(iris[&role.unit_id].clone()),
                sup: CE::named(iris[&req].clone()),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compilation {
    pub ontology: Ontology,
    /// Warnings only; errors abort compilation.
    pub diagnostics: Vec<Diagnostic>,
    pub tables: LayerTables,
}

/// Preprocessed tables plus every diagnostic, without compiling.
pub fn check_document(
    doc: &AnnotatedDocument,
    config: &CompileConfig,
) -> Result<(LayerTables, Vec<Diagnostic>), CompileError> {
    let doc = apply_linguistic_arrows(doc)?;
    let (tables, mut diags) = extract_layers(&doc, &config.vocab.terms)?;
    diags.extend(validate(&tables, &config.vocab.constr, config.validate));
    Ok((tables, diags))
}

pub fn compile(doc: &AnnotatedDocument, config: &CompileConfig) -> Result<Compilation, CompileError> {
    let (tables, mut diagnostics) = check_document(doc, config)?;
    if has_errors(&diagnostics) {
        return Err(CompileError::Schema(diagnostics));
    }
    let (mut ontology, iris) = generate_entities(&tables, &config.base_iri);
    diagnostics.extend(align_terms(&tables, &config.vocab.terms, &iris, &mut ontology)?);
    let pool = build_restrictions(&tables, &config.vocab, config.defaults, &iris)?;
    build_axioms(&tables, &pool, &iris, &mut ontology)?;
    ontology.check_closed()?;
    Ok(Compilation { ontology, diagnostics, tables })
}

pub fn compile_tsv(input: &str, config: &CompileConfig) -> Result<Compilation, CompileError> {
    compile(&parse_tsv(input)?, config)
}
