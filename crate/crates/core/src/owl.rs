//! OWL DL abstract syntax for the generated fragment: entities, class
//! expressions, data ranges and axioms.
//!
//! Class expressions built through the constructors on [`ClassExpression`]
//! are canonical: nested intersections and unions are flattened and their
//! operands sorted by [`ClassExpression::sort_key`]. Structural equality of
//! canonical expressions is plain `==`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const OWL_NS: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL_THING: &str = "http://www.w3.org/2002/07/owl#Thing";
pub const OWL_NOTHING: &str = "http://www.w3.org/2002/07/owl#Nothing";

pub fn is_builtin_class(iri: &str) -> bool {
    iri == OWL_THING || iri == OWL_NOTHING
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OwlError {
    #[error("`{lexical}` is not a valid {datatype} literal")]
    BadLiteral { lexical: String, datatype: Datatype },
    #[error("IRI <{iri}> declared as both {first:?} and {second:?}")]
    KindConflict {
        iri: String,
        first: EntityKind,
        second: EntityKind,
    },
    #[error("IRI <{iri}> is referenced as {expected:?} but not declared as one")]
    Undeclared { iri: String, expected: EntityKind },
    #[error("invalid data range: {0}")]
    BadDataRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Class,
    ObjectProperty,
    DataProperty,
    NamedIndividual,
    Datatype,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub kind: EntityKind,
    pub iri: String,
    /// Verbatim source text the entity was generated from, if any.
    pub label: Option<String>,
}

impl Entity {
    pub fn new(kind: EntityKind, iri: impl Into<String>, label: Option<String>) -> Self {
        Entity { kind, iri: iri.into(), label }
    }

    /// The part of the IRI after the last `#` or `/`.
    pub fn local_name(&self) -> &str {
        local_name(&self.iri)
    }
}

pub fn local_name(iri: &str) -> &str {
    iri.rsplit(['#', '/']).next().unwrap_or(iri)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Datatype {
    String,
    Integer,
    Float,
}

impl Datatype {
    pub fn iri(self) -> String {
        format!("{XSD_NS}{}", self.local())
    }

    pub fn local(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Integer => "integer",
            Datatype::Float => "float",
        }
    }

    pub fn is_numeric(self) -> bool {
        !matches!(self, Datatype::String)
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "xsd:{}", self.local())
    }
}

pub(crate) fn is_integer_lexical(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

pub(crate) fn is_float_lexical(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = |x: &str| x.bytes().all(|b| b.is_ascii_digit());
    let mantissa_ok = (!int.is_empty() || !frac.is_empty()) && digits(int) && digits(frac);
    let exponent_ok = exponent.is_none_or(|e| {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        !e.is_empty() && digits(e)
    });
    mantissa_ok && exponent_ok
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Datatype,
}

impl Literal {
    pub fn new(lexical: impl Into<String>, datatype: Datatype) -> Result<Self, OwlError> {
        let lexical = lexical.into();
        let ok = match datatype {
            Datatype::String => true,
            Datatype::Integer => is_integer_lexical(&lexical),
            Datatype::Float => is_float_lexical(&lexical),
        };
        if ok {
            Ok(Literal { lexical, datatype })
        } else {
            Err(OwlError::BadLiteral { lexical, datatype })
        }
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: Datatype::String }
    }

    /// Integer if the text is a whole number, float if it is a decimal or
    /// scientific number, string otherwise.
    pub fn infer(text: &str) -> Self {
        let datatype = if is_integer_lexical(text) {
            Datatype::Integer
        } else if is_float_lexical(text) {
            Datatype::Float
        } else {
            Datatype::String
        };
        Literal { lexical: text.to_string(), datatype }
    }

    pub fn numeric_value(&self) -> Option<f64> {
        self.datatype
            .is_numeric()
            .then(|| self.lexical.parse::<f64>().ok())
            .flatten()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"^^{}", escape_string(&self.lexical), self.datatype)
    }
}

pub(crate) fn escape_string(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Facet {
    MinInclusive,
    MinExclusive,
    MaxInclusive,
    MaxExclusive,
    Exact,
}

impl Facet {
    pub const ALL: [Facet; 5] = [
        Facet::MinInclusive,
        Facet::MinExclusive,
        Facet::MaxInclusive,
        Facet::MaxExclusive,
        Facet::Exact,
    ];

    pub fn is_lower(self) -> bool {
        matches!(self, Facet::MinInclusive | Facet::MinExclusive)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Facet::MaxInclusive | Facet::MaxExclusive)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Facet::MinInclusive => ">=",
            Facet::MinExclusive => ">",
            Facet::MaxInclusive => "<=",
            Facet::MaxExclusive => "<",
            Facet::Exact => "=",
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Facet::MinInclusive => "MinInclusive",
            Facet::MinExclusive => "MinExclusive",
            Facet::MaxInclusive => "MaxInclusive",
            Facet::MaxExclusive => "MaxExclusive",
            Facet::Exact => "Exact",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Facet> {
        Facet::ALL.into_iter().find(|f| f.keyword().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DataRange {
    Enumeration(Vec<Literal>),
    FacetRestriction {
        base: Datatype,
        facets: Vec<(Facet, Literal)>,
    },
}

impl DataRange {
    pub fn one_of(mut literals: Vec<Literal>) -> Self {
        literals.sort();
        literals.dedup();
        DataRange::Enumeration(literals)
    }

    /// Builds a bounded range. Facets must be bounds (not `Exact`), at most
    /// one lower and one upper, with values compatible with `base`.
    pub fn restricted(base: Datatype, mut facets: Vec<(Facet, Literal)>) -> Result<Self, OwlError> {
        if facets.is_empty() {
            return Err(OwlError::BadDataRange("facet list is empty".into()));
        }
        if !base.is_numeric() {
            return Err(OwlError::BadDataRange(format!("bounds on non-numeric {base}")));
        }
        let lowers = facets.iter().filter(|(f, _)| f.is_lower()).count();
        let uppers = facets.iter().filter(|(f, _)| f.is_upper()).count();
        if lowers > 1 || uppers > 1 || lowers + uppers != facets.len() {
            return Err(OwlError::BadDataRange("need at most one lower and one upper bound".into()));
        }
        for (_, lit) in &facets {
            let compatible = match base {
                Datatype::Integer => lit.datatype == Datatype::Integer,
                _ => lit.datatype.is_numeric(),
            };
            if !compatible {
                return Err(OwlError::BadDataRange(format!("bound {lit} does not fit {base}")));
            }
        }
        facets.sort_by_key(|(f, _)| *f);
        Ok(DataRange::FacetRestriction { base, facets })
    }
}

impl fmt::Display for DataRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataRange::Enumeration(lits) => {
                f.write_str("DataOneOf(")?;
                for (i, l) in lits.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{l}")?;
                }
                f.write_str(")")
            }
            DataRange::FacetRestriction { base, facets } => {
                write!(f, "DatatypeRestriction({base}")?;
                for (facet, l) in facets {
                    write!(f, " xsd:{} {l}", facet.keyword())?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CardinalityMode {
    Min,
    Max,
    Exact,
}

impl CardinalityMode {
    pub fn keyword(self) -> &'static str {
        match self {
            CardinalityMode::Min => "min",
            CardinalityMode::Max => "max",
            CardinalityMode::Exact => "exactly",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassExpression {
    Named(String),
    ComplementOf(Box<ClassExpression>),
    UnionOf(Vec<ClassExpression>),
    IntersectionOf(Vec<ClassExpression>),
    /// Enumeration of named individuals, used by local closure types such as
    /// `in only {building}`.
    OneOf(Vec<String>),
    ObjectSome(String, Box<ClassExpression>),
    ObjectOnly(String, Box<ClassExpression>),
    ObjectCardinality {
        property: String,
        mode: CardinalityMode,
        n: u32,
        filler: Option<Box<ClassExpression>>,
    },
    DataSome(String, DataRange),
    DataOnly(String, DataRange),
    DataCardinality {
        property: String,
        mode: CardinalityMode,
        n: u32,
        range: Option<DataRange>,
    },
}

use ClassExpression as CE;

impl ClassExpression {
    pub fn named(iri: impl Into<String>) -> Self {
        CE::Named(iri.into())
    }

    pub fn thing() -> Self {
        CE::Named(OWL_THING.into())
    }

    pub fn nothing() -> Self {
        CE::Named(OWL_NOTHING.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: ClassExpression) -> Self {
        CE::ComplementOf(Box::new(e))
    }

    /// Canonical n-ary intersection. One operand yields the operand itself,
    /// none yields `owl:Thing`.
    pub fn and(operands: Vec<ClassExpression>) -> Self {
        let ops = flatten(operands, true);
        match ops.len() {
            0 => CE::thing(),
            1 => ops.into_iter().next().expect("one operand"),
            _ => CE::IntersectionOf(ops),
        }
    }

    /// Canonical n-ary union. One operand yields the operand itself, none
    /// yields `owl:Nothing`.
    pub fn or(operands: Vec<ClassExpression>) -> Self {
        let ops = flatten(operands, false);
        match ops.len() {
            0 => CE::nothing(),
            1 => ops.into_iter().next().expect("one operand"),
            _ => CE::UnionOf(ops),
        }
    }

    pub fn one_of(mut individuals: Vec<String>) -> Self {
        individuals.sort();
        individuals.dedup();
        CE::OneOf(individuals)
    }

    pub fn some(property: impl Into<String>, filler: ClassExpression) -> Self {
        CE::ObjectSome(property.into(), Box::new(filler))
    }

    pub fn only(property: impl Into<String>, filler: ClassExpression) -> Self {
        CE::ObjectOnly(property.into(), Box::new(filler))
    }

    /// Key used to order operands of intersections and unions.
    pub fn sort_key(&self) -> String {
        self.to_string()
    }

    /// Returns the canonical form: children canonicalized, intersections and
    /// unions flattened and sorted, enumerations sorted.
    pub fn canonical(&self) -> ClassExpression {
        match self {
            CE::Named(_) => self.clone(),
            CE::ComplementOf(e) => CE::not(e.canonical()),
            CE::UnionOf(ops) => CE::or(ops.iter().map(CE::canonical).collect()),
            CE::IntersectionOf(ops) => CE::and(ops.iter().map(CE::canonical).collect()),
            CE::OneOf(inds) => CE::one_of(inds.clone()),
            CE::ObjectSome(p, e) => CE::some(p.clone(), e.canonical()),
            CE::ObjectOnly(p, e) => CE::only(p.clone(), e.canonical()),
            CE::ObjectCardinality { property, mode, n, filler } => CE::ObjectCardinality {
                property: property.clone(),
                mode: *mode,
                n: *n,
                filler: filler.as_ref().map(|f| Box::new(f.canonical())),
            },
            CE::DataSome(p, r) => CE::DataSome(p.clone(), canonical_range(r)),
            CE::DataOnly(p, r) => CE::DataOnly(p.clone(), canonical_range(r)),
            CE::DataCardinality { property, mode, n, range } => CE::DataCardinality {
                property: property.clone(),
                mode: *mode,
                n: *n,
                range: range.as_ref().map(canonical_range),
            },
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }

    /// This expression and all nested class expressions, outermost first.
    pub fn subexpressions(&self) -> Vec<&ClassExpression> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            out.push(e);
            match e {
                CE::ComplementOf(x) | CE::ObjectSome(_, x) | CE::ObjectOnly(_, x) => stack.push(x),
                CE::UnionOf(ops) | CE::IntersectionOf(ops) => stack.extend(ops.iter().rev()),
                CE::ObjectCardinality { filler: Some(x), .. } => stack.push(x),
                _ => {}
            }
        }
        out
    }

    /// Entities referenced by this expression with the kind each use implies.
    pub fn signature(&self, out: &mut Vec<(EntityKind, String)>) {
        for e in self.subexpressions() {
            match e {
                CE::Named(iri) if !is_builtin_class(iri) => out.push((EntityKind::Class, iri.clone())),
                CE::OneOf(inds) => out.extend(inds.iter().map(|i| (EntityKind::NamedIndividual, i.clone()))),
                CE::ObjectSome(p, _) | CE::ObjectOnly(p, _) | CE::ObjectCardinality { property: p, .. } => {
                    out.push((EntityKind::ObjectProperty, p.clone()))
                }
                CE::DataSome(p, _) | CE::DataOnly(p, _) | CE::DataCardinality { property: p, .. } => {
                    out.push((EntityKind::DataProperty, p.clone()))
                }
                _ => {}
            }
        }
    }
}

fn canonical_range(r: &DataRange) -> DataRange {
    match r {
        DataRange::Enumeration(lits) => DataRange::one_of(lits.clone()),
        DataRange::FacetRestriction { base, facets } => {
            let mut facets = facets.clone();
            facets.sort_by_key(|(f, _)| *f);
            DataRange::FacetRestriction { base: *base, facets }
        }
    }
}

fn flatten(operands: Vec<ClassExpression>, intersection: bool) -> Vec<ClassExpression> {
    let mut out = Vec::with_capacity(operands.len());
    for op in operands {
        match op {
            CE::IntersectionOf(inner) if intersection => out.extend(inner),
            CE::UnionOf(inner) if !intersection => out.extend(inner),
            other => out.push(other),
        }
    }
    out.sort_by_cached_key(CE::sort_key);
    out
}

/// True iff `a` and `b` are identical up to canonical operand ordering.
pub fn structurally_equal(a: &ClassExpression, b: &ClassExpression) -> bool {
    a.canonical() == b.canonical()
}

impl fmt::Display for ClassExpression {
    /// OWL functional-style rendering with full IRIs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, name: &str, ops: &[ClassExpression]) -> fmt::Result {
            write!(f, "{name}(")?;
            for (i, op) in ops.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{op}")?;
            }
            f.write_str(")")
        }
        match self {
            CE::Named(iri) => write!(f, "<{iri}>"),
            CE::ComplementOf(e) => write!(f, "ObjectComplementOf({e})"),
            CE::UnionOf(ops) => list(f, "ObjectUnionOf", ops),
            CE::IntersectionOf(ops) => list(f, "ObjectIntersectionOf", ops),
            CE::OneOf(inds) => {
                f.write_str("ObjectOneOf(")?;
                for (i, ind) in inds.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "<{ind}>")?;
                }
                f.write_str(")")
            }
            CE::ObjectSome(p, e) => write!(f, "ObjectSomeValuesFrom(<{p}> {e})"),
            CE::ObjectOnly(p, e) => write!(f, "ObjectAllValuesFrom(<{p}> {e})"),
            CE::ObjectCardinality { property, mode, n, filler } => {
                let name = match mode {
                    CardinalityMode::Min => "ObjectMinCardinality",
                    CardinalityMode::Max => "ObjectMaxCardinality",
                    CardinalityMode::Exact => "ObjectExactCardinality",
                };
                write!(f, "{name}({n} <{property}>")?;
                if let Some(x) = filler {
                    write!(f, " {x}")?;
                }
                f.write_str(")")
            }
            CE::DataSome(p, r) => write!(f, "DataSomeValuesFrom(<{p}> {r})"),
            CE::DataOnly(p, r) => write!(f, "DataAllValuesFrom(<{p}> {r})"),
            CE::DataCardinality { property, mode, n, range } => {
                let name = match mode {
                    CardinalityMode::Min => "DataMinCardinality",
                    CardinalityMode::Max => "DataMaxCardinality",
                    CardinalityMode::Exact => "DataExactCardinality",
                };
                write!(f, "{name}({n} <{property}>")?;
                if let Some(r) = range {
                    write!(f, " {r}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyKind {
    Object,
    Data,
}

impl PropertyKind {
    pub fn entity_kind(self) -> EntityKind {
        match self {
            PropertyKind::Object => EntityKind::ObjectProperty,
            PropertyKind::Data => EntityKind::DataProperty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axiom {
    SubClassOf {
        sub: ClassExpression,
        sup: ClassExpression,
    },
    EquivalentClasses(Vec<ClassExpression>),
    EquivalentProperties {
        first: String,
        second: String,
        kind: PropertyKind,
    },
    ClassAssertion {
        class: ClassExpression,
        individual: String,
    },
    ObjectFact {
        subject: String,
        property: String,
        object: String,
    },
    DataFact {
        subject: String,
        property: String,
        value: Literal,
    },
}

impl Axiom {
    pub fn canonical(&self) -> Axiom {
        match self {
            Axiom::SubClassOf { sub, sup } => Axiom::SubClassOf {
                sub: sub.canonical(),
                sup: sup.canonical(),
            },
            Axiom::EquivalentClasses(ops) => {
                let mut ops: Vec<ClassExpression> = ops.iter().map(CE::canonical).collect();
                ops.sort_by_cached_key(CE::sort_key);
                Axiom::EquivalentClasses(ops)
            }
            Axiom::EquivalentProperties { first, second, kind } if first > second => {
                Axiom::EquivalentProperties { first: second.clone(), second: first.clone(), kind: *kind }
            }
            Axiom::ClassAssertion { class, individual } => Axiom::ClassAssertion {
                class: class.canonical(),
                individual: individual.clone(),
            },
            other => other.clone(),
        }
    }

    pub fn class_expressions(&self) -> Vec<&ClassExpression> {
        match self {
            Axiom::SubClassOf { sub, sup } => vec![sub, sup],
            Axiom::EquivalentClasses(ops) => ops.iter().collect(),
            Axiom::ClassAssertion { class, .. } => vec![class],
            _ => Vec::new(),
        }
    }

    pub fn signature(&self, out: &mut Vec<(EntityKind, String)>) {
        for e in self.class_expressions() {
            e.signature(out);
        }
        match self {
            Axiom::EquivalentProperties { first, second, kind } => {
                out.push((kind.entity_kind(), first.clone()));
                out.push((kind.entity_kind(), second.clone()));
            }
            Axiom::ClassAssertion { individual, .. } => {
                out.push((EntityKind::NamedIndividual, individual.clone()))
            }
            Axiom::ObjectFact { subject, property, object } => {
                out.push((EntityKind::NamedIndividual, subject.clone()));
                out.push((EntityKind::ObjectProperty, property.clone()));
                out.push((EntityKind::NamedIndividual, object.clone()));
            }
            Axiom::DataFact { subject, property, .. } => {
                out.push((EntityKind::NamedIndividual, subject.clone()));
                out.push((EntityKind::DataProperty, property.clone()));
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ontology {
    pub iri: String,
    /// Keyed by IRI.
    pub entities: BTreeMap<String, Entity>,
    /// In insertion order.
    pub axioms: Vec<Axiom>,
}

impl Ontology {
    pub fn new(iri: impl Into<String>) -> Self {
        Ontology { iri: iri.into(), ..Default::default() }
    }

    /// Adds an entity. Re-declaring an IRI with the same kind keeps the first
    /// label; a different kind is an error.
    pub fn declare(&mut self, entity: Entity) -> Result<(), OwlError> {
        match self.entities.get_mut(&entity.iri) {
            Some(existing) if existing.kind != entity.kind => Err(OwlError::KindConflict {
                iri: entity.iri,
                first: existing.kind,
                second: entity.kind,
            }),
            Some(existing) => {
                if existing.label.is_none() {
                    existing.label = entity.label;
                }
                Ok(())
            }
            None => {
                self.entities.insert(entity.iri.clone(), entity);
                Ok(())
            }
        }
    }

    pub fn entity(&self, iri: &str) -> Option<&Entity> {
        self.entities.get(iri)
    }

    pub fn kind_of(&self, iri: &str) -> Option<EntityKind> {
        self.entities.get(iri).map(|e| e.kind)
    }

    pub fn add_axiom(&mut self, axiom: Axiom) {
        self.axioms.push(axiom);
    }

    pub fn entities_of(&self, kind: EntityKind) -> impl Iterator<Item = &Entity> {
        self.entities.values().filter(move |e| e.kind == kind)
    }

    /// Checks that every IRI used by an axiom is declared with a matching kind.
    pub fn check_closed(&self) -> Result<(), OwlError> {
        let mut sig = Vec::new();
        for ax in &self.axioms {
            ax.signature(&mut sig);
        }
        for (kind, iri) in sig {
            if self.kind_of(&iri) != Some(kind) {
                return Err(OwlError::Undeclared { iri, expected: kind });
            }
        }
        Ok(())
    }

    /// Same IRI, same entities, and the same multiset of axioms once
    /// canonicalized. Axiom order is not significant.
    pub fn structurally_equal(&self, other: &Ontology) -> bool {
        let key = |o: &Ontology| {
            let mut v: Vec<Axiom> = o.axioms.iter().map(Axiom::canonical).collect();
            v.sort();
            v
        };
        self.iri == other.iri && self.entities == other.entities && key(self) == key(other)
    }

    /// Declares every entity of `other` and appends its axioms.
    pub fn merge(&mut self, other: &Ontology) -> Result<(), OwlError> {
        for e in other.entities.values() {
            self.declare(e.clone())?;
        }
        self.axioms.extend(other.axioms.iter().cloned());
        Ok(())
    }
}
