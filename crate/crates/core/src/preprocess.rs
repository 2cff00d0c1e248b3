//! Linguistic-arrow resolution and extraction of the term, semantic-type and
//! semantic-role tables.
//!
//! Concatenation paths are merged first (token lists joined in arrow order),
//! then Distribution and SelfDistribution arrows are expanded. Semantic
//! arrows touching a replaced span are cloned onto every span that replaces
//! it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schema_check::{Code, Diagnostic};
use crate::tsv_ingest::{
    AnnotatedDocument, Arrow, Layer, RelationAnnotation, Role, SemanticType, SpanAnnotation, SpanRef,
    TokenRef,
};
use crate::vocab::TermVocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitId(pub u32);

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreprocessError {
    #[error("{0:?} span {1} has more than one Concatenation arrow in the same direction")]
    BranchingConcatenation(Layer, u32),
    #[error("linguistic arrows through {0:?} span {1} form a cycle or chain")]
    CyclicArrows(Layer, u32),
    #[error("{arrow} arrow joins spans with different layers or tags ({source_tag} -> {target_tag})")]
    CrossTagArrow {
        arrow: Arrow,
        source_tag: String,
        target_tag: String,
    },
    #[error("arrow refers to missing {0:?} span {1}")]
    UnknownSpan(Layer, u32),
    #[error("unit {unit} has more than one {arrow} arrow")]
    DuplicateArrow { unit: UnitId, arrow: Arrow },
    #[error("{arrow} arrow is not allowed between {layer:?} spans")]
    ArrowLayer { arrow: Arrow, layer: Layer },
    #[error("`{tag}` is not a valid {layer:?} tag")]
    BadTag { layer: Layer, tag: String },
    #[error("linguistic arrows must be applied before extracting tables")]
    LinguisticArrowsRemain,
}

/// Resolves every linguistic arrow. A document without linguistic arrows is
/// returned unchanged.
pub fn apply_linguistic_arrows(doc: &AnnotatedDocument) -> Result<AnnotatedDocument, PreprocessError> {
    if !doc.relations.iter().any(|r| r.arrow.is_linguistic()) {
        return Ok(doc.clone());
    }
    let mut spans: BTreeMap<SpanRef, SpanAnnotation> =
        doc.spans.iter().map(|s| (s.span_ref(), s.clone())).collect();
    let mut next_id: HashMap<Layer, u32> = HashMap::new();
    for s in &doc.spans {
        let e = next_id.entry(s.layer).or_insert(0);
        *e = (*e).max(s.span_id);
    }
    let mut fresh = |layer: Layer| {
        let e = next_id.entry(layer).or_insert(0);
        *e += 1;
        SpanRef { layer, span_id: *e }
    };

    for rel in doc.relations.iter().filter(|r| r.arrow.is_linguistic()) {
        let src = spans.get(&rel.source).ok_or(PreprocessError::UnknownSpan(rel.source.layer, rel.source.span_id))?;
        let tgt = spans.get(&rel.target).ok_or(PreprocessError::UnknownSpan(rel.target.layer, rel.target.span_id))?;
        if src.layer != tgt.layer || src.tag != tgt.tag {
            return Err(PreprocessError::CrossTagArrow {
                arrow: rel.arrow,
                source_tag: format!("{}:{}", src.layer, src.tag),
                target_tag: format!("{}:{}", tgt.layer, tgt.tag),
            });
        }
    }

    // Concatenation: the graph must be a disjoint union of simple paths.
    let mut next: BTreeMap<SpanRef, SpanRef> = BTreeMap::new();
    let mut prev: BTreeMap<SpanRef, SpanRef> = BTreeMap::new();
    for rel in doc.relations.iter().filter(|r| r.arrow == Arrow::Concatenation) {
        if rel.source == rel.target {
            return Err(PreprocessError::CyclicArrows(rel.source.layer, rel.source.span_id));
        }
        if next.insert(rel.source, rel.target).is_some_and(|t| t != rel.target) {
            return Err(PreprocessError::BranchingConcatenation(rel.source.layer, rel.source.span_id));
        }
        if prev.insert(rel.target, rel.source).is_some_and(|s| s != rel.source) {
            return Err(PreprocessError::BranchingConcatenation(rel.target.layer, rel.target.span_id));
        }
    }
    // Each original span maps to the spans that replace it.
    let mut replaced: BTreeMap<SpanRef, Vec<SpanRef>> = BTreeMap::new();
    let mut created: Vec<SpanRef> = Vec::new();
    let mut visited: BTreeSet<SpanRef> = BTreeSet::new();
    for &head in next.keys().filter(|s| !prev.contains_key(s)) {
        let mut path = vec![head];
        let mut cur = head;
        while let Some(&n) = next.get(&cur) {
            path.push(n);
            cur = n;
        }
        let first = &spans[&head];
        let merged_ref = fresh(first.layer);
        let merged = SpanAnnotation {
            layer: first.layer,
            tag: first.tag.clone(),
            span_id: merged_ref.span_id,
            tokens: path.iter().flat_map(|r| spans[r].tokens.iter().copied()).collect(),
        };
        for r in &path {
            visited.insert(*r);
            replaced.insert(*r, vec![merged_ref]);
        }
        spans.insert(merged_ref, merged);
        created.push(merged_ref);
    }
    if let Some(r) = next.keys().chain(prev.keys()).find(|r| !visited.contains(r)) {
        return Err(PreprocessError::CyclicArrows(r.layer, r.span_id));
    }
    let after_concat = |r: SpanRef| replaced.get(&r).map_or(r, |v| v[0]);

    // Distribution and SelfDistribution, grouped by source in arrow order.
    let mut groups: Vec<(SpanRef, Vec<SpanRef>, bool)> = Vec::new();
    for rel in doc
        .relations
        .iter()
        .filter(|r| matches!(r.arrow, Arrow::Distribution | Arrow::SelfDistribution))
    {
        let (src, tgt) = (after_concat(rel.source), after_concat(rel.target));
        if src == tgt {
            return Err(PreprocessError::CyclicArrows(src.layer, src.span_id));
        }
        let keep = rel.arrow == Arrow::SelfDistribution;
        match groups.iter_mut().find(|(s, _, _)| *s == src) {
            Some((_, targets, k)) => {
                targets.push(tgt);
                *k |= keep;
            }
            None => groups.push((src, vec![tgt], keep)),
        }
    }
    let sources: BTreeSet<SpanRef> = groups.iter().map(|g| g.0).collect();
    for (_, targets, _) in &groups {
        if let Some(t) = targets.iter().find(|t| sources.contains(t)) {
            return Err(PreprocessError::CyclicArrows(t.layer, t.span_id));
        }
    }
    let mut distributed: BTreeMap<SpanRef, Vec<SpanRef>> = BTreeMap::new();
    for (src, targets, keep) in &groups {
        if *keep {
            distributed.entry(*src).or_default().push(*src);
        }
        for tgt in targets {
            let a = &spans[src];
            let copy_ref = fresh(a.layer);
            let copy = SpanAnnotation {
                layer: a.layer,
                tag: a.tag.clone(),
                span_id: copy_ref.span_id,
                tokens: a.tokens.iter().chain(spans[tgt].tokens.iter()).copied().collect(),
            };
            spans.insert(copy_ref, copy);
            created.push(copy_ref);
            distributed.entry(*src).or_default().push(copy_ref);
            distributed.entry(*tgt).or_default().push(copy_ref);
        }
    }
    let resolve = |r: SpanRef| -> Vec<SpanRef> {
        let r = after_concat(r);
        distributed.get(&r).cloned().unwrap_or_else(|| vec![r])
    };

    let mut relations: Vec<RelationAnnotation> = Vec::new();
    for rel in doc.relations.iter().filter(|r| !r.arrow.is_linguistic()) {
        for s in resolve(rel.source) {
            for t in resolve(rel.target) {
                let new = RelationAnnotation { arrow: rel.arrow, source: s, target: t };
                if !relations.contains(&new) {
                    relations.push(new);
                }
            }
        }
    }

    let gone = |r: &SpanRef| {
        replaced.contains_key(r) || distributed.get(r).is_some_and(|v| !v.contains(r))
    };
    let mut out_spans: Vec<SpanAnnotation> = doc
        .spans
        .iter()
        .filter(|s| !gone(&s.span_ref()))
        .cloned()
        .collect();
    out_spans.extend(created.iter().filter(|r| !gone(r)).map(|r| spans[r].clone()));

    Ok(AnnotatedDocument {
        source_text: doc.source_text.clone(),
        tokens: doc.tokens.clone(),
        spans: out_spans,
        relations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRow {
    pub unit_id: UnitId,
    pub surface: String,
    pub term_label: String,
    /// Empty when the label is missing from the term vocabulary.
    pub term_iri: String,
    pub tokens: Vec<TokenRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeRow {
    pub unit_id: UnitId,
    pub surface: String,
    pub type_tag: SemanticType,
    pub domain_ref: Option<UnitId>,
    pub range_ref: Option<UnitId>,
    /// At most one entry except for `Or` units, which list every operand.
    pub of_refs: Vec<UnitId>,
    pub tokens: Vec<TokenRef>,
}

impl TypeRow {
    pub fn new(unit_id: u32, surface: &str, type_tag: SemanticType, tokens: Vec<TokenRef>) -> Self {
        TypeRow {
            unit_id: UnitId(unit_id),
            surface: surface.to_string(),
            type_tag,
            domain_ref: None,
            range_ref: None,
            of_refs: Vec::new(),
            tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleRow {
    pub unit_id: UnitId,
    pub surface: String,
    pub role_tag: Role,
    pub to_ref: Option<UnitId>,
    pub tokens: Vec<TokenRef>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerTables {
    pub terms: Vec<TermRow>,
    pub types: Vec<TypeRow>,
    pub roles: Vec<RoleRow>,
}

impl LayerTables {
    pub fn type_row(&self, id: UnitId) -> Option<&TypeRow> {
        self.types.iter().find(|r| r.unit_id == id)
    }

    pub fn role_row(&self, id: UnitId) -> Option<&RoleRow> {
        self.roles.iter().find(|r| r.unit_id == id)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.types.is_empty() && self.roles.is_empty()
    }
}

/// Groups the spans of a preprocessed document into the three tables.
/// Unit ids are assigned in order of each span's first token.
pub fn extract_layers(
    doc: &AnnotatedDocument,
    terms: &TermVocabulary,
) -> Result<(LayerTables, Vec<Diagnostic>), PreprocessError> {
    if doc.relations.iter().any(|r| r.arrow.is_linguistic()) {
        return Err(PreprocessError::LinguisticArrowsRemain);
    }
    let mut order: Vec<&SpanAnnotation> = doc.spans.iter().collect();
    order.sort_by_key(|s| (s.tokens.first().copied(), s.layer, s.span_id));
    let ids: HashMap<SpanRef, UnitId> = order
        .iter()
        .enumerate()
        .map(|(i, s)| (s.span_ref(), UnitId(i as u32 + 1)))
        .collect();
    let unit = |r: SpanRef| ids.get(&r).copied().ok_or(PreprocessError::UnknownSpan(r.layer, r.span_id));

    let mut tables = LayerTables::default();
    let mut warnings = Vec::new();
    for span in &order {
        let unit_id = ids[&span.span_ref()];
        let surface = doc.surface(&span.tokens);
        match span.layer {
            Layer::Term => {
                let term_iri = match terms.get(&span.tag) {
                    Some(t) => t.iri.clone(),
                    None => {
                        warnings.push(Diagnostic::warning(
                            Code::UnresolvedTerm,
                            Some(unit_id),
                            format!("term `{}` on `{surface}` is not in the term vocabulary", span.tag),
                        ));
                        String::new()
                    }
                };
                tables.terms.push(TermRow {
                    unit_id,
                    surface,
                    term_label: span.tag.clone(),
                    term_iri,
                    tokens: span.tokens.clone(),
                });
            }
            Layer::SemType => {
                let type_tag = span.tag.parse().map_err(|_| PreprocessError::BadTag {
                    layer: Layer::SemType,
                    tag: span.tag.clone(),
                })?;
                let mut row = TypeRow::new(unit_id.0, &surface, type_tag, span.tokens.clone());
                for rel in doc.relations.iter().filter(|r| r.source == span.span_ref()) {
                    if rel.target.layer != Layer::SemType || !rel.arrow.allowed_on(Layer::SemType) {
                        return Err(PreprocessError::ArrowLayer { arrow: rel.arrow, layer: Layer::SemType });
                    }
                    let target = unit(rel.target)?;
                    let dup = PreprocessError::DuplicateArrow { unit: unit_id, arrow: rel.arrow };
                    match rel.arrow {
                        Arrow::Domain if row.domain_ref.replace(target).is_some() => return Err(dup),
                        Arrow::Range if row.range_ref.replace(target).is_some() => return Err(dup),
                        Arrow::Of => {
                            if !row.of_refs.is_empty() && type_tag != SemanticType::Or {
                                return Err(dup);
                            }
                            if !row.of_refs.contains(&target) {
                                row.of_refs.push(target);
                            }
                        }
                        _ => {}
                    }
                }
                tables.types.push(row);
            }
            Layer::SemRole => {
                let role_tag = span.tag.parse().map_err(|_| PreprocessError::BadTag {
                    layer: Layer::SemRole,
                    tag: span.tag.clone(),
                })?;
                let mut to_ref = None;
                for rel in doc.relations.iter().filter(|r| r.source == span.span_ref()) {
                    if rel.arrow != Arrow::To || rel.target.layer != Layer::SemRole {
                        return Err(PreprocessError::ArrowLayer { arrow: rel.arrow, layer: Layer::SemRole });
                    }
                    if to_ref.replace(unit(rel.target)?).is_some() {
                        return Err(PreprocessError::DuplicateArrow { unit: unit_id, arrow: Arrow::To });
                    }
                }
                tables.roles.push(RoleRow {
                    unit_id,
                    surface,
                    role_tag,
                    to_ref,
                    tokens: span.tokens.clone(),
                });
            }
        }
    }
    // Relations whose source is a term span are not part of the schema.
    if let Some(rel) = doc
        .relations
        .iter()
        .find(|r| r.source.layer == Layer::Term || r.target.layer != r.source.layer)
    {
        return Err(PreprocessError::ArrowLayer { arrow: rel.arrow, layer: rel.source.layer });
    }
    Ok((tables, warnings))
}
