//! Manchester syntax output and a parser for the subset it produces.
//!
//! Expressions refer to entities by label when the label is unique among
//! entities of the same sort (classes, properties, individuals), otherwise by
//! prefixed name or full IRI. Parsing is two-pass: the text is first read
//! into a raw tree with unresolved names, then names are resolved against
//! the frames of the document and an optional context ontology. A name is
//! tried as a label, then as a local name in the default namespace, then as
//! the local name of any known entity, and is minted in the default
//! namespace if all of these fail.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::owl::{
    escape_string, is_float_lexical, is_integer_lexical, local_name, Axiom, CardinalityMode, ClassExpression as CE,
    DataRange, Datatype, Entity, EntityKind, Facet, Literal, Ontology, OwlError, PropertyKind, OWL_NOTHING, OWL_NS,
    OWL_THING, RDFS_NS, XSD_NS,
};

/// Namespace for names minted while parsing text that declares no default
/// prefix and no ontology IRI.
pub const FALLBACK_NAMESPACE: &str = "urn:abox#";
const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManchesterError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unsupported construct `{construct}`")]
    Unsupported { line: usize, column: usize, construct: String },
    #[error("cannot write axiom in Manchester syntax: {0}")]
    Unrepresentable(String),
    #[error(transparent)]
    Owl(#[from] OwlError),
}

const KEYWORDS: [&str; 11] = ["some", "only", "min", "max", "exactly", "and", "or", "not", "value", "inverse", "that"];

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn is_simple_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(is_name_char)
        && !KEYWORDS.contains(&s)
        && s != "Self"
}

fn namespace_of(iri: &str) -> String {
    if iri.is_empty() {
        FALLBACK_NAMESPACE.to_string()
    } else if iri.ends_with('#') || iri.ends_with('/') {
        iri.to_string()
    } else {
        format!("{iri}#")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Sort {
    Class,
    Property,
    Individual,
    Datatype,
}

fn sort_of(kind: EntityKind) -> Sort {
    match kind {
        EntityKind::Class => Sort::Class,
        EntityKind::ObjectProperty | EntityKind::DataProperty => Sort::Property,
        EntityKind::NamedIndividual => Sort::Individual,
        EntityKind::Datatype => Sort::Datatype,
    }
}

/// Chooses how each IRI is written.
pub struct Names<'a> {
    onto: &'a Ontology,
    ns: String,
    label_counts: HashMap<(Sort, &'a str), usize>,
    local_counts: HashMap<(Sort, &'a str), usize>,
}

impl<'a> Names<'a> {
    pub fn new(onto: &'a Ontology) -> Self {
        let mut label_counts = HashMap::new();
        let mut local_counts = HashMap::new();
        for e in onto.entities.values() {
            if let Some(l) = e.label.as_deref() {
                *label_counts.entry((sort_of(e.kind), l)).or_insert(0) += 1;
            }
            *local_counts.entry((sort_of(e.kind), local_name(&e.iri))).or_insert(0) += 1;
        }
        Names { onto, ns: namespace_of(&onto.iri), label_counts, local_counts }
    }

    /// Prefixed or bracketed form of an IRI, never a label.
    pub fn iri_form(&self, iri: &str) -> String {
        for (prefix, ns) in [("owl", OWL_NS), ("xsd", XSD_NS), ("rdfs", RDFS_NS)] {
            if let Some(local) = iri.strip_prefix(ns) {
                if is_simple_name(local) {
                    return format!("{prefix}:{local}");
                }
            }
        }
        match iri.strip_prefix(self.ns.as_str()) {
            Some(local) if !local.is_empty() && local.chars().all(is_name_char) => format!(":{local}"),
            _ => format!("<{iri}>"),
        }
    }

    pub fn reference(&self, iri: &str) -> String {
        if iri == OWL_THING {
            return "owl:Thing".into();
        }
        if iri == OWL_NOTHING {
            return "owl:Nothing".into();
        }
        if let Some(e) = self.onto.entity(iri) {
            if let Some(label) = e.label.as_deref().filter(|l| !l.is_empty()) {
                if self.label_counts.get(&(sort_of(e.kind), label)) == Some(&1) {
                    return quote_name(label);
                }
            } else {
                // Unlabelled: the bare local name resolves back when no other
                // entity of the sort shares it as a label or local name.
                let key = (sort_of(e.kind), local_name(iri));
                if is_simple_name(key.1)
                    && self.local_counts.get(&key) == Some(&1)
                    && !self.label_counts.contains_key(&key)
                {
                    return key.1.to_string();
                }
            }
        }
        self.iri_form(iri)
    }
}

pub fn quote_name(label: &str) -> String {
    if is_simple_name(label) {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

pub fn literal(l: &Literal) -> String {
    match l.datatype {
        Datatype::String => l.to_string(),
        Datatype::Integer => l.lexical.clone(),
        Datatype::Float => format!("{}f", l.lexical),
    }
}

pub fn data_range(r: &DataRange) -> String {
    match r {
        DataRange::Enumeration(lits) => format!("{{{}}}", lits.iter().map(literal).collect::<Vec<_>>().join(", ")),
        DataRange::FacetRestriction { base, facets } => format!(
            "{base}[{}]",
            facets.iter().map(|(f, l)| format!("{} {}", f.symbol(), literal(l))).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn precedence(e: &CE) -> u8 {
    match e {
        CE::UnionOf(_) => 1,
        CE::IntersectionOf(_) => 2,
        CE::Named(_) | CE::OneOf(_) => 4,
        _ => 3,
    }
}

impl Names<'_> {
    pub fn expression(&self, e: &CE) -> String {
        let wrap = |x: &CE, min: u8| {
            let s = self.expression(x);
            if precedence(x) < min {
                format!("({s})")
            } else {
                s
            }
        };
        let card = |p: &str, mode: &CardinalityMode, n: &u32| format!("{} {} {n}", self.reference(p), mode.keyword());
        match e {
            CE::Named(iri) => self.reference(iri),
            CE::ComplementOf(x) => format!("not {}", wrap(x, 4)),
            CE::UnionOf(ops) => ops.iter().map(|o| wrap(o, 2)).collect::<Vec<_>>().join(" or "),
            CE::IntersectionOf(ops) => ops.iter().map(|o| wrap(o, 3)).collect::<Vec<_>>().join(" and "),
            CE::OneOf(inds) => format!("{{{}}}", inds.iter().map(|i| self.reference(i)).collect::<Vec<_>>().join(", ")),
            CE::ObjectSome(p, x) => format!("{} some {}", self.reference(p), wrap(x, 4)),
            CE::ObjectOnly(p, x) => format!("{} only {}", self.reference(p), wrap(x, 4)),
            CE::ObjectCardinality { property, mode, n, filler } => match filler {
                Some(x) => format!("{} {}", card(property, mode, n), wrap(x, 4)),
                None => card(property, mode, n),
            },
            CE::DataSome(p, r) => format!("{} some {}", self.reference(p), data_range(r)),
            CE::DataOnly(p, r) => format!("{} only {}", self.reference(p), data_range(r)),
            CE::DataCardinality { property, mode, n, range } => match range {
                Some(r) => format!("{} {}", card(property, mode, n), data_range(r)),
                None => card(property, mode, n),
            },
        }
    }

    /// One-line rendering used in explanations.
    pub fn axiom(&self, a: &Axiom) -> String {
        match a {
            Axiom::SubClassOf { sub, sup } => format!("{} SubClassOf {}", self.expression(sub), self.expression(sup)),
            Axiom::EquivalentClasses(ops) => {
                ops.iter().map(|o| self.expression(o)).collect::<Vec<_>>().join(" EquivalentTo ")
            }
            Axiom::EquivalentProperties { first, second, .. } => {
                format!("EquivalentProperties: {}, {}", self.reference(first), self.reference(second))
            }
            Axiom::ClassAssertion { class, individual } => {
                format!("{} Type {}", self.reference(individual), self.expression(class))
            }
            Axiom::ObjectFact { subject, property, object } => {
                format!("{} {} {}", self.reference(subject), self.reference(property), self.reference(object))
            }
            Axiom::DataFact { subject, property, value } => {
                format!("{} {} {}", self.reference(subject), self.reference(property), value)
            }
        }
    }
}

pub fn render_expression(onto: &Ontology, e: &CE) -> String {
    Names::new(onto).expression(e)
}

pub fn render_axiom(onto: &Ontology, a: &Axiom) -> String {
    Names::new(onto).axiom(a)
}

#[derive(Default)]
struct Frame {
    equivalent: Vec<String>,
    subclass: Vec<String>,
    types: Vec<String>,
    facts: Vec<String>,
}

fn frame_keyword(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Class => "Class",
        EntityKind::ObjectProperty => "ObjectProperty",
        EntityKind::DataProperty => "DataProperty",
        EntityKind::NamedIndividual => "Individual",
        EntityKind::Datatype => "Datatype",
    }
}

/// Writes the ontology as Manchester syntax: prefixes, ontology header, one
/// frame per entity in IRI order, then any n-ary class equivalences.
pub fn to_manchester(onto: &Ontology) -> Result<String, ManchesterError> {
    let names = Names::new(onto);
    let declared = |iri: &str, kind: EntityKind| onto.kind_of(iri) == Some(kind);
    let mut frames: BTreeMap<&str, Frame> = BTreeMap::new();
    let mut misc: Vec<String> = Vec::new();
    for ax in &onto.axioms {
        match ax {
            Axiom::EquivalentClasses(ops) => {
                let anchor = (ops.len() == 2)
                    .then(|| ops.iter().position(|o| matches!(o, CE::Named(i) if declared(i, EntityKind::Class))))
                    .flatten();
                match anchor {
                    Some(i) => {
                        let CE::Named(iri) = &ops[i] else { unreachable!() };
                        let other = names.expression(&ops[1 - i]);
                        frames.entry(iri).or_default().equivalent.push(other);
                    }
                    None => misc.push(format!(
                        "EquivalentClasses: {}",
                        ops.iter().map(|o| names.expression(o)).collect::<Vec<_>>().join(", ")
                    )),
                }
            }
            Axiom::SubClassOf { sub: CE::Named(iri), sup } if declared(iri, EntityKind::Class) => {
                frames.entry(iri).or_default().subclass.push(names.expression(sup));
            }
            Axiom::SubClassOf { sub, .. } => {
                return Err(ManchesterError::Unrepresentable(format!(
                    "subclass side `{}` is not a declared class",
                    names.expression(sub)
                )))
            }
            Axiom::EquivalentProperties { first, second, kind } => {
                if !declared(first, kind.entity_kind()) {
                    return Err(ManchesterError::Unrepresentable(format!("<{first}> is not a declared property")));
                }
                frames.entry(first).or_default().equivalent.push(names.reference(second));
            }
            Axiom::ClassAssertion { class, individual } => {
                frames.entry(individual).or_default().types.push(names.expression(class));
            }
            Axiom::ObjectFact { subject, property, object } => {
                let fact = format!("{} {}", names.reference(property), names.reference(object));
                frames.entry(subject).or_default().facts.push(fact);
            }
            Axiom::DataFact { subject, property, value } => {
                let fact = format!("{} {}", names.reference(property), literal(value));
                frames.entry(subject).or_default().facts.push(fact);
            }
        }
    }
    for iri in frames.keys() {
        if !onto.entities.contains_key(*iri) {
            return Err(ManchesterError::Unrepresentable(format!("<{iri}> is used but not declared")));
        }
    }

    let mut out = String::new();
    if !onto.iri.is_empty() {
        let _ = writeln!(out, "Prefix: : <{}>", namespace_of(&onto.iri));
    }
    let _ = writeln!(out, "Prefix: owl: <{OWL_NS}>");
    let _ = writeln!(out, "Prefix: rdfs: <{RDFS_NS}>");
    let _ = writeln!(out, "Prefix: xsd: <{XSD_NS}>");
    out.push('\n');
    if onto.iri.is_empty() {
        out.push_str("Ontology:\n");
    } else {
        let _ = writeln!(out, "Ontology: <{}>", onto.iri);
    }
    for e in onto.entities.values() {
        out.push('\n');
        let _ = writeln!(out, "{}: {}", frame_keyword(e.kind), names.iri_form(&e.iri));
        if let Some(label) = &e.label {
            let _ = writeln!(out, "    Annotations: rdfs:label \"{}\"", escape_string(label));
        }
        if let Some(f) = frames.get(e.iri.as_str()) {
            for x in &f.equivalent {
                let _ = writeln!(out, "    EquivalentTo: {x}");
            }
            for x in &f.subclass {
                let _ = writeln!(out, "    SubClassOf: {x}");
            }
            if !f.types.is_empty() {
                let _ = writeln!(out, "    Types: {}", f.types.join(", "));
            }
            if !f.facts.is_empty() {
                let _ = writeln!(out, "    Facts: {}", f.facts.join(", "));
            }
        }
    }
    for m in misc {
        let _ = write!(out, "\n{m}\n");
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    /// A word directly followed by `:` and whitespace, e.g. `Class:`.
    Keyword(String),
    Ident(String),
    PName(String, String),
    Iri(String),
    Quoted(String),
    Str { text: String, datatype: Option<Box<Tok>>, lang: bool },
    Number { lexical: String, float: bool },
    Open(char),
    Close(char),
    Comma,
    Cmp(&'static str),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, line: 1, column: 1 }
    }

    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> ManchesterError {
        ManchesterError::Syntax { line, column, message: message.into() }
    }

    fn delimited(&mut self, close: char, what: &str) -> Result<String, ManchesterError> {
        let (line, column) = (self.line, self.column);
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(line, column, format!("unterminated {what}"))),
                Some('\\') => match self.bump() {
                    Some('n') if close == '"' => s.push('\n'),
                    Some(c) => s.push(c),
                    None => return Err(self.error(line, column, format!("unterminated {what}"))),
                },
                Some(c) if c == close => return Ok(s),
                Some(c) => s.push(c),
            }
        }
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0).filter(|c| is_name_char(*c)) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ManchesterError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek(0) {
            let (line, column) = (self.line, self.column);
            let tok = match c {
                c if c.is_whitespace() => {
                    self.bump();
                    continue;
                }
                '#' => {
                    while self.peek(0).is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                    continue;
                }
                '{' | '(' | '[' => {
                    self.bump();
                    Tok::Open(c)
                }
                '}' | ')' | ']' => {
                    self.bump();
                    Tok::Close(c)
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '<' | '>' if self.peek(1) == Some('=') => {
                    self.bump();
                    self.bump();
                    Tok::Cmp(if c == '<' { "<=" } else { ">=" })
                }
                '<' if self.peek(1).is_some_and(|n| !n.is_whitespace()) => {
                    self.bump();
                    let mut iri = String::new();
                    loop {
                        match self.bump() {
                            Some('>') => break,
                            Some(c) if !c.is_whitespace() => iri.push(c),
                            _ => return Err(self.error(line, column, "unterminated IRI")),
                        }
                    }
                    Tok::Iri(iri)
                }
                '<' | '>' | '=' => {
                    self.bump();
                    Tok::Cmp(match c {
                        '<' => "<",
                        '>' => ">",
                        _ => "=",
                    })
                }
                '\'' => Tok::Quoted(self.delimited('\'', "quoted name")?),
                '"' => {
                    let text = self.delimited('"', "string")?;
                    let mut datatype = None;
                    let mut lang = false;
                    if self.peek(0) == Some('^') && self.peek(1) == Some('^') {
                        self.bump();
                        self.bump();
                        let (l, c) = (self.line, self.column);
                        let dt = if self.peek(0) == Some('<') {
                            self.bump();
                            let mut iri = String::new();
                            while let Some(ch) = self.bump().filter(|ch| *ch != '>') {
                                iri.push(ch);
                            }
                            Tok::Iri(iri)
                        } else {
                            let prefix = self.word();
                            if self.peek(0) != Some(':') {
                                return Err(self.error(l, c, "expected datatype after `^^`"));
                            }
                            self.bump();
                            Tok::PName(prefix, self.word())
                        };
                        datatype = Some(Box::new(dt));
                    } else if self.peek(0) == Some('@') {
                        self.bump();
                        self.word();
                        lang = true;
                    }
                    Tok::Str { text, datatype, lang }
                }
                c if c.is_ascii_digit()
                    || ((c == '+' || c == '-' || c == '.')
                        && self.peek(1).is_some_and(|n| n.is_ascii_digit() || n == '.')) =>
                {
                    let mut lexical = String::new();
                    lexical.push(c);
                    self.bump();
                    while let Some(d) = self.peek(0).filter(|d| d.is_ascii_digit() || *d == '.') {
                        lexical.push(d);
                        self.bump();
                    }
                    if matches!(self.peek(0), Some('e' | 'E'))
                        && (self.peek(1).is_some_and(|d| d.is_ascii_digit())
                            || (matches!(self.peek(1), Some('+' | '-')) && self.peek(2).is_some_and(|d| d.is_ascii_digit())))
                    {
                        lexical.push(self.bump().unwrap_or('e'));
                        if matches!(self.peek(0), Some('+' | '-')) {
                            lexical.push(self.bump().unwrap_or('+'));
                        }
                        while let Some(d) = self.peek(0).filter(|d| d.is_ascii_digit()) {
                            lexical.push(d);
                            self.bump();
                        }
                    }
                    let suffix = matches!(self.peek(0), Some('f' | 'F'));
                    if suffix {
                        self.bump();
                    }
                    let float = suffix || !is_integer_lexical(&lexical);
                    if !(is_integer_lexical(&lexical) || is_float_lexical(&lexical)) {
                        return Err(self.error(line, column, format!("malformed number `{lexical}`")));
                    }
                    Tok::Number { lexical, float }
                }
                ':' => {
                    self.bump();
                    if self.peek(0).is_some_and(is_name_char) {
                        Tok::PName(String::new(), self.word())
                    } else {
                        Tok::Keyword(String::new())
                    }
                }
                c if is_name_char(c) => {
                    let w = self.word();
                    if self.peek(0) == Some(':') {
                        self.bump();
                        if self.peek(0).is_some_and(is_name_char) {
                            Tok::PName(w, self.word())
                        } else {
                            Tok::Keyword(w)
                        }
                    } else {
                        Tok::Ident(w)
                    }
                }
                other => return Err(self.error(line, column, format!("unexpected character `{other}`"))),
            };
            out.push(Spanned { tok, line, column });
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Raw tree

#[derive(Debug, Clone)]
enum RawName {
    Iri(String),
    PName(String, String),
    Quoted(String),
    Bare(String),
}

#[derive(Debug, Clone)]
struct Named {
    name: RawName,
    line: usize,
    column: usize,
}

#[derive(Debug, Clone)]
enum RawRestriction {
    Some,
    Only,
    Card(CardinalityMode, u32),
}

#[derive(Debug, Clone)]
enum Raw {
    Name(Named),
    Not(Box<Raw>),
    And(Vec<Raw>),
    Or(Vec<Raw>),
    Nominals(Vec<Named>),
    Literals(Vec<Literal>, usize, usize),
    Facets(Datatype, Vec<(Facet, Literal)>, usize, usize),
    Restriction(Named, RawRestriction, Option<Box<Raw>>),
}

#[derive(Debug, Clone)]
enum RawValue {
    Name(Named),
    Literal(Literal),
}

#[derive(Debug)]
enum Clause {
    Label(String),
    EquivalentTo(Vec<Raw>),
    EquivalentProps(Vec<Named>),
    SubClassOf(Vec<Raw>),
    Types(Vec<Raw>),
    Facts(Vec<(Named, RawValue)>),
}

#[derive(Debug)]
struct RawFrame {
    kind: EntityKind,
    name: Named,
    clauses: Vec<Clause>,
}

#[derive(Debug, Default)]
struct RawDoc {
    prefixes: HashMap<String, String>,
    ontology_iri: Option<String>,
    frames: Vec<RawFrame>,
    equivalences: Vec<Vec<Raw>>,
}

const UNSUPPORTED_CLAUSES: [&str; 22] = [
    "DisjointWith",
    "DisjointUnionOf",
    "HasKey",
    "Domain",
    "Range",
    "Characteristics",
    "SubPropertyOf",
    "SubPropertyChain",
    "InverseOf",
    "SameAs",
    "DifferentFrom",
    "DisjointClasses",
    "DisjointProperties",
    "SameIndividual",
    "DifferentIndividuals",
    "AnnotationProperty",
    "Import",
    "Rule",
    "EquivalentProperties",
    "SubClassOf",
    "EquivalentTo",
    "Types",
];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.column))
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn syntax(&self, message: impl Into<String>) -> ManchesterError {
        let (line, column) = self.here();
        ManchesterError::Syntax { line, column, message: message.into() }
    }

    fn unsupported(&self, construct: impl Into<String>) -> ManchesterError {
        let (line, column) = self.here();
        ManchesterError::Unsupported { line, column, construct: construct.into() }
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(t) => format!("{t:?}"),
        }
    }

    fn document(&mut self) -> Result<RawDoc, ManchesterError> {
        let mut doc = RawDoc::default();
        while let Some(tok) = self.peek().cloned() {
            let Tok::Keyword(kw) = tok else {
                return Err(self.syntax(format!("expected a frame keyword, found {}", self.describe())));
            };
            match kw.as_str() {
                "Prefix" => {
                    self.next();
                    let name = match self.next().map(|s| s.tok) {
                        Some(Tok::Keyword(p)) => p,
                        _ => return Err(self.syntax("expected `prefix:` after Prefix:")),
                    };
                    let Some(Tok::Iri(iri)) = self.next().map(|s| s.tok) else {
                        return Err(self.syntax("expected <IRI> in prefix declaration"));
                    };
                    doc.prefixes.insert(name, iri);
                }
                "Ontology" => {
                    self.next();
                    if let Some(Tok::Iri(iri)) = self.peek().cloned() {
                        self.next();
                        doc.ontology_iri = Some(iri);
                        if let Some(Tok::Iri(_)) = self.peek() {
                            return Err(self.unsupported("version IRI"));
                        }
                    }
                }
                "Class" | "ObjectProperty" | "DataProperty" | "Individual" | "Datatype" => {
                    self.next();
                    let kind = match kw.as_str() {
                        "Class" => EntityKind::Class,
                        "ObjectProperty" => EntityKind::ObjectProperty,
                        "DataProperty" => EntityKind::DataProperty,
                        "Individual" => EntityKind::NamedIndividual,
                        _ => EntityKind::Datatype,
                    };
                    let name = self.name()?;
                    let clauses = self.clauses(kind)?;
                    doc.frames.push(RawFrame { kind, name, clauses });
                }
                "EquivalentClasses" => {
                    self.next();
                    let list = self.list(Self::expression)?;
                    if list.len() < 2 {
                        return Err(self.syntax("EquivalentClasses needs at least two expressions"));
                    }
                    doc.equivalences.push(list);
                }
                other if UNSUPPORTED_CLAUSES.contains(&other) => {
                    return Err(self.unsupported(format!("{other}:")))
                }
                other => return Err(self.syntax(format!("unknown frame `{other}:`"))),
            }
        }
        Ok(doc)
    }

    fn clauses(&mut self, kind: EntityKind) -> Result<Vec<Clause>, ManchesterError> {
        let mut out = Vec::new();
        while let Some(Tok::Keyword(kw)) = self.peek().cloned() {
            let clause = match (kw.as_str(), kind) {
                ("Annotations", _) => {
                    self.next();
                    let mut labels = Vec::new();
                    loop {
                        match self.next().map(|s| s.tok) {
                            Some(Tok::PName(p, l)) if p == "rdfs" && l == "label" => {}
                            Some(Tok::PName(p, l)) => {
                                self.pos -= 1;
                                return Err(self.unsupported(format!("annotation {p}:{l}")));
                            }
                            _ => {
                                self.pos -= 1;
                                return Err(self.syntax("expected rdfs:label"));
                            }
                        }
                        match self.next().map(|s| s.tok) {
                            Some(Tok::Str { text, datatype: None, lang: false }) => labels.push(text),
                            _ => {
                                self.pos -= 1;
                                return Err(self.syntax("expected a plain string label"));
                            }
                        }
                        if self.peek() != Some(&Tok::Comma) {
                            break;
                        }
                        self.next();
                    }
                    if labels.len() > 1 {
                        return Err(self.unsupported("more than one label"));
                    }
                    Clause::Label(labels.pop().expect("one label"))
                }
                ("EquivalentTo", EntityKind::Class) => {
                    self.next();
                    Clause::EquivalentTo(self.list(Self::expression)?)
                }
                ("EquivalentTo", EntityKind::ObjectProperty | EntityKind::DataProperty) => {
                    self.next();
                    if matches!(self.peek(), Some(Tok::Ident(w)) if w == "inverse") {
                        return Err(self.unsupported("inverse"));
                    }
                    Clause::EquivalentProps(self.list(Self::name)?)
                }
                ("SubClassOf", EntityKind::Class) => {
                    self.next();
                    Clause::SubClassOf(self.list(Self::expression)?)
                }
                ("Types", EntityKind::NamedIndividual) => {
                    self.next();
                    Clause::Types(self.list(Self::expression)?)
                }
                ("Facts", EntityKind::NamedIndividual) => {
                    self.next();
                    Clause::Facts(self.list(Self::fact)?)
                }
                ("Class" | "ObjectProperty" | "DataProperty" | "Individual" | "Datatype" | "Prefix" | "Ontology" | "EquivalentClasses", _) => break,
                (other, _) if UNSUPPORTED_CLAUSES.contains(&other) => {
                    return Err(self.unsupported(format!("{other}:")))
                }
                (other, _) => return Err(self.syntax(format!("unknown clause `{other}:`"))),
            };
            out.push(clause);
        }
        Ok(out)
    }

    fn list<T>(&mut self, item: fn(&mut Self) -> Result<T, ManchesterError>) -> Result<Vec<T>, ManchesterError> {
        let mut out = vec![item(self)?];
        while self.peek() == Some(&Tok::Comma) {
            self.next();
            out.push(item(self)?);
        }
        Ok(out)
    }

    fn name(&mut self) -> Result<Named, ManchesterError> {
        let (line, column) = self.here();
        let name = match self.peek().cloned() {
            Some(Tok::Iri(i)) => RawName::Iri(i),
            Some(Tok::PName(p, l)) => RawName::PName(p, l),
            Some(Tok::Quoted(q)) => RawName::Quoted(q),
            Some(Tok::Ident(w)) if w == "Self" || w == "inverse" => return Err(self.unsupported(w)),
            Some(Tok::Ident(w)) if !KEYWORDS.contains(&w.as_str()) => RawName::Bare(w),
            _ => return Err(self.syntax(format!("expected a name, found {}", self.describe()))),
        };
        self.next();
        Ok(Named { name, line, column })
    }

    fn literal(&mut self) -> Result<Literal, ManchesterError> {
        let (line, column) = self.here();
        let bad = |message: String| ManchesterError::Syntax { line, column, message };
        match self.next().map(|s| s.tok) {
            Some(Tok::Number { lexical, float }) => {
                let dt = if float { Datatype::Float } else { Datatype::Integer };
                Literal::new(lexical, dt).map_err(|e| bad(e.to_string()))
            }
            Some(Tok::Str { lang: true, .. }) => {
                Err(ManchesterError::Unsupported { line, column, construct: "language tag".into() })
            }
            Some(Tok::Str { text, datatype: None, .. }) => Ok(Literal::string(text)),
            Some(Tok::Str { text, datatype: Some(dt), .. }) => {
                let iri = match *dt {
                    Tok::PName(p, l) if p == "xsd" => format!("{XSD_NS}{l}"),
                    Tok::Iri(i) => i,
                    other => return Err(bad(format!("unknown datatype {other:?}"))),
                };
                let datatype = datatype_from_iri(&iri).ok_or_else(|| ManchesterError::Unsupported {
                    line,
                    column,
                    construct: format!("datatype <{iri}>"),
                })?;
                Literal::new(text, datatype).map_err(|e| bad(e.to_string()))
            }
            _ => {
                self.pos -= 1;
                Err(self.syntax(format!("expected a literal, found {}", self.describe())))
            }
        }
    }

    fn fact(&mut self) -> Result<(Named, RawValue), ManchesterError> {
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == "not") {
            return Err(self.unsupported("negative fact"));
        }
        let prop = self.name()?;
        let value = match self.peek() {
            Some(Tok::Number { .. } | Tok::Str { .. }) => RawValue::Literal(self.literal()?),
            _ => RawValue::Name(self.name()?),
        };
        Ok((prop, value))
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == w)
    }

    fn expression(&mut self) -> Result<Raw, ManchesterError> {
        let mut ops = vec![self.conjunction()?];
        while self.is_word("or") {
            self.next();
            ops.push(self.conjunction()?);
        }
        Ok(if ops.len() == 1 { ops.pop().expect("one") } else { Raw::Or(ops) })
    }

    fn conjunction(&mut self) -> Result<Raw, ManchesterError> {
        let mut ops = vec![self.unary()?];
        loop {
            if self.is_word("that") {
                return Err(self.unsupported("that"));
            }
            if !self.is_word("and") {
                break;
            }
            self.next();
            ops.push(self.unary()?);
        }
        Ok(if ops.len() == 1 { ops.pop().expect("one") } else { Raw::And(ops) })
    }

    fn unary(&mut self) -> Result<Raw, ManchesterError> {
        if self.is_word("not") {
            self.next();
            return Ok(Raw::Not(Box::new(self.unary()?)));
        }
        if self.is_word("inverse") {
            return Err(self.unsupported("inverse"));
        }
        let is_name = matches!(self.peek(), Some(Tok::Iri(_) | Tok::PName(..) | Tok::Quoted(_) | Tok::Ident(_)));
        let follows_restriction = matches!(
            self.toks.get(self.pos + 1).map(|s| &s.tok),
            Some(Tok::Ident(w)) if matches!(w.as_str(), "some" | "only" | "min" | "max" | "exactly" | "value")
        );
        if is_name && follows_restriction {
            let prop = self.name()?;
            let Some(Tok::Ident(kw)) = self.next().map(|s| s.tok) else { unreachable!() };
            let kind = match kw.as_str() {
                "some" => RawRestriction::Some,
                "only" => RawRestriction::Only,
                "value" => {
                    self.pos -= 1;
                    return Err(self.unsupported("value"));
                }
                _ => {
                    let n = match self.next().map(|s| s.tok) {
                        Some(Tok::Number { lexical, float: false }) => lexical
                            .parse::<u32>()
                            .map_err(|_| self.syntax(format!("bad cardinality `{lexical}`")))?,
                        _ => {
                            self.pos -= 1;
                            return Err(self.syntax("expected a non-negative integer cardinality"));
                        }
                    };
                    let mode = match kw.as_str() {
                        "min" => CardinalityMode::Min,
                        "max" => CardinalityMode::Max,
                        _ => CardinalityMode::Exact,
                    };
                    RawRestriction::Card(mode, n)
                }
            };
            let starts_primary = matches!(
                self.peek(),
                Some(Tok::Iri(_) | Tok::PName(..) | Tok::Quoted(_) | Tok::Open('{' | '('))
            ) || matches!(self.peek(), Some(Tok::Ident(w)) if !KEYWORDS.contains(&w.as_str()));
            let filler = match kind {
                RawRestriction::Card(..) if !starts_primary => None,
                _ => Some(Box::new(self.primary()?)),
            };
            return Ok(Raw::Restriction(prop, kind, filler));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Raw, ManchesterError> {
        match self.peek().cloned() {
            Some(Tok::Open('(')) => {
                self.next();
                let e = self.expression()?;
                if self.next().map(|s| s.tok) != Some(Tok::Close(')')) {
                    self.pos -= 1;
                    return Err(self.syntax("expected `)`"));
                }
                Ok(e)
            }
            Some(Tok::Open('{')) => {
                self.next();
                if self.peek() == Some(&Tok::Close('}')) {
                    self.next();
                    return Ok(Raw::Nominals(Vec::new()));
                }
                let (line, column) = self.here();
                let raw = if matches!(self.peek(), Some(Tok::Number { .. } | Tok::Str { .. })) {
                    Raw::Literals(self.list(Self::literal)?, line, column)
                } else {
                    Raw::Nominals(self.list(Self::name)?)
                };
                if self.next().map(|s| s.tok) != Some(Tok::Close('}')) {
                    self.pos -= 1;
                    return Err(self.syntax("expected `}`"));
                }
                Ok(raw)
            }
            Some(Tok::Open('[')) => Err(self.syntax("unexpected `[`")),
            Some(Tok::PName(p, l)) if p == "xsd" || p == "rdf" => {
                let (line, column) = self.here();
                self.next();
                let datatype = datatype_from_iri(&format!("{XSD_NS}{l}"))
                    .filter(|_| p == "xsd")
                    .ok_or_else(|| ManchesterError::Unsupported { line, column, construct: format!("datatype {p}:{l}") })?;
                if self.peek() != Some(&Tok::Open('[')) {
                    return Err(ManchesterError::Unsupported { line, column, construct: format!("bare datatype {p}:{l}") });
                }
                self.next();
                let mut facets = Vec::new();
                loop {
                    let facet = match self.next().map(|s| s.tok) {
                        Some(Tok::Cmp(">=")) => Facet::MinInclusive,
                        Some(Tok::Cmp(">")) => Facet::MinExclusive,
                        Some(Tok::Cmp("<=")) => Facet::MaxInclusive,
                        Some(Tok::Cmp("<")) => Facet::MaxExclusive,
                        Some(Tok::Ident(w)) => {
                            self.pos -= 1;
                            return Err(self.unsupported(format!("facet {w}")));
                        }
                        _ => {
                            self.pos -= 1;
                            return Err(self.syntax("expected a facet (`>=`, `>`, `<=`, `<`)"));
                        }
                    };
                    facets.push((facet, self.literal()?));
                    match self.next().map(|s| s.tok) {
                        Some(Tok::Comma) => continue,
                        Some(Tok::Close(']')) => break,
                        _ => {
                            self.pos -= 1;
                            return Err(self.syntax("expected `,` or `]`"));
                        }
                    }
                }
                Ok(Raw::Facets(datatype, facets, line, column))
            }
            Some(Tok::Ident(w)) if w == "Self" => Err(self.unsupported("Self")),
            Some(Tok::Ident(w)) if KEYWORDS.contains(&w.as_str()) => {
                Err(self.syntax(format!("unexpected keyword `{w}`")))
            }
            Some(Tok::Number { .. } | Tok::Str { .. }) => Err(self.unsupported("literal outside an enumeration")),
            _ => Ok(Raw::Name(self.name()?)),
        }
    }
}

fn datatype_from_iri(iri: &str) -> Option<Datatype> {
    match iri.strip_prefix(XSD_NS)? {
        "string" => Some(Datatype::String),
        "integer" => Some(Datatype::Integer),
        "float" => Some(Datatype::Float),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Name resolution

/// Where names that are not found are looked up and minted.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions<'a> {
    /// Entities of this ontology can be referenced by label or name.
    pub context: Option<&'a Ontology>,
    /// Namespace for minted names when the text declares no default prefix.
    pub default_namespace: Option<&'a str>,
}

struct Resolver<'a> {
    prefixes: HashMap<String, String>,
    ns: String,
    context: Option<&'a Ontology>,
    out: Ontology,
}

impl Resolver<'_> {
    fn err(n: &Named, message: impl Into<String>) -> ManchesterError {
        ManchesterError::Syntax { line: n.line, column: n.column, message: message.into() }
    }

    fn known(&self) -> impl Iterator<Item = &Entity> {
        self.out.entities.values().chain(self.context.into_iter().flat_map(|c| c.entities.values()))
    }

    fn lookup(&self, sort: Sort, pred: impl Fn(&Entity) -> bool) -> Vec<Entity> {
        let mut found: Vec<Entity> = Vec::new();
        for e in self.known() {
            if sort_of(e.kind) == sort && pred(e) && !found.iter().any(|f| f.iri == e.iri) {
                found.push(e.clone());
            }
        }
        found
    }

    /// Resolves `n` to an existing entity of `sort`, or to a fresh IRI.
    fn resolve(&self, n: &Named, sort: Sort) -> Result<(String, Option<Entity>), ManchesterError> {
        let iri = match &n.name {
            RawName::Iri(i) => i.clone(),
            RawName::PName(p, l) => {
                let ns = self.prefixes.get(p).ok_or_else(|| Self::err(n, format!("undeclared prefix `{p}:`")))?;
                format!("{ns}{l}")
            }
            RawName::Quoted(text) | RawName::Bare(text) => {
                let tries: [&dyn Fn(&Entity) -> bool; 3] = [
                    &|e: &Entity| e.label.as_deref() == Some(text.as_str()),
                    &|e: &Entity| e.iri == format!("{}{text}", self.ns),
                    &|e: &Entity| local_name(&e.iri) == text,
                ];
                for t in tries {
                    let found = self.lookup(sort, t);
                    match found.len() {
                        0 => continue,
                        1 => return Ok((found[0].iri.clone(), found.into_iter().next())),
                        _ => return Err(Self::err(n, format!("`{text}` is ambiguous"))),
                    }
                }
                return Ok((format!("{}{}", self.ns, minted_local(text)), None));
            }
        };
        let existing = self.known().find(|e| e.iri == iri).cloned();
        Ok((iri, existing))
    }

    fn use_entity(&mut self, n: &Named, kind: EntityKind) -> Result<String, ManchesterError> {
        let (iri, existing) = self.resolve(n, sort_of(kind))?;
        if iri == OWL_THING || iri == OWL_NOTHING {
            if kind != EntityKind::Class {
                return Err(Self::err(n, "owl:Thing and owl:Nothing are classes"));
            }
            return Ok(iri);
        }
        let entity = match existing {
            Some(e) if e.kind == kind || sort_of(e.kind) != Sort::Property => e,
            Some(e) => Entity::new(kind, e.iri, e.label),
            None => Entity::new(kind, iri.clone(), None),
        };
        self.out.declare(entity)?;
        Ok(iri)
    }

    fn property(&mut self, n: &Named, data_hint: bool) -> Result<(String, PropertyKind), ManchesterError> {
        let (iri, existing) = self.resolve(n, Sort::Property)?;
        let kind = match existing.map(|e| e.kind) {
            Some(EntityKind::DataProperty) => PropertyKind::Data,
            Some(EntityKind::ObjectProperty) => PropertyKind::Object,
            Some(other) => return Err(Self::err(n, format!("<{iri}> is a {other:?}, not a property"))),
            None if data_hint => PropertyKind::Data,
            None => PropertyKind::Object,
        };
        self.use_entity(n, kind.entity_kind())?;
        Ok((iri, kind))
    }

    fn class(&mut self, raw: &Raw) -> Result<CE, ManchesterError> {
        Ok(match raw {
            Raw::Name(n) => CE::named(self.use_entity(n, EntityKind::Class)?),
            Raw::Not(x) => CE::not(self.class(x)?),
            Raw::And(ops) => CE::and(ops.iter().map(|o| self.class(o)).collect::<Result<_, _>>()?),
            Raw::Or(ops) => CE::or(ops.iter().map(|o| self.class(o)).collect::<Result<_, _>>()?),
            Raw::Nominals(ns) => CE::one_of(
                ns.iter().map(|n| self.use_entity(n, EntityKind::NamedIndividual)).collect::<Result<_, _>>()?,
            ),
            Raw::Literals(_, line, column) | Raw::Facets(_, _, line, column) => {
                return Err(ManchesterError::Syntax {
                    line: *line,
                    column: *column,
                    message: "data range used as a class".into(),
                })
            }
            Raw::Restriction(p, kind, filler) => {
                let data_hint = matches!(filler.as_deref(), Some(Raw::Literals(..) | Raw::Facets(..)));
                let (iri, pk) = self.property(p, data_hint)?;
                match pk {
                    PropertyKind::Object => {
                        let f = filler.as_deref().map(|f| self.class(f)).transpose()?;
                        match (kind, f) {
                            (RawRestriction::Some, Some(f)) => CE::some(iri, f),
                            (RawRestriction::Only, Some(f)) => CE::only(iri, f),
                            (RawRestriction::Card(mode, n), f) => CE::ObjectCardinality {
                                property: iri,
                                mode: *mode,
                                n: *n,
                                filler: f.map(Box::new),
                            },
                            _ => return Err(Self::err(p, "restriction without filler")),
                        }
                    }
                    PropertyKind::Data => {
                        let r = filler.as_deref().map(|f| self.data_range(f, p)).transpose()?;
                        match (kind, r) {
                            (RawRestriction::Some, Some(r)) => CE::DataSome(iri, r),
                            (RawRestriction::Only, Some(r)) => CE::DataOnly(iri, r),
                            (RawRestriction::Card(mode, n), r) => {
                                CE::DataCardinality { property: iri, mode: *mode, n: *n, range: r }
                            }
                            _ => return Err(Self::err(p, "restriction without filler")),
                        }
                    }
                }
            }
        })
    }

    fn data_range(&mut self, raw: &Raw, at: &Named) -> Result<DataRange, ManchesterError> {
        match raw {
            Raw::Literals(lits, ..) => Ok(DataRange::one_of(lits.clone())),
            Raw::Facets(dt, facets, line, column) => DataRange::restricted(*dt, facets.clone())
                .map_err(|e| ManchesterError::Syntax { line: *line, column: *column, message: e.to_string() }),
            Raw::Nominals(v) if v.is_empty() => Ok(DataRange::Enumeration(Vec::new())),
            Raw::Not(_) | Raw::And(_) | Raw::Or(_) => Err(ManchesterError::Unsupported {
                line: at.line,
                column: at.column,
                construct: "data range combinators".into(),
            }),
            _ => Err(Self::err(at, "expected a data range after a data property")),
        }
    }
}

fn minted_local(text: &str) -> String {
    let s: String = text.chars().map(|c| if is_name_char(c) { c } else { '_' }).collect();
    if s.is_empty() {
        "entity".into()
    } else {
        s
    }
}

/// Parses the Manchester subset written by [`to_manchester`].
pub fn parse_manchester_subset(text: &str) -> Result<Ontology, ManchesterError> {
    parse_manchester(text, ParseOptions::default())
}

pub fn parse_manchester(text: &str, options: ParseOptions<'_>) -> Result<Ontology, ManchesterError> {
    let toks = Lexer::new(text).tokens()?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.column + 1));
    let doc = Parser { toks, pos: 0, end }.document()?;

    let mut prefixes: HashMap<String, String> = [("owl", OWL_NS), ("rdfs", RDFS_NS), ("xsd", XSD_NS), ("rdf", RDF_NS)]
        .into_iter()
        .map(|(p, n)| (p.to_string(), n.to_string()))
        .collect();
    prefixes.extend(doc.prefixes.clone());
    let iri = doc.ontology_iri.clone().unwrap_or_default();
    let ns = match (prefixes.get(""), options.default_namespace) {
        (Some(ns), _) => ns.clone(),
        (None, Some(ns)) => ns.to_string(),
        (None, None) => namespace_of(&iri),
    };
    prefixes.entry(String::new()).or_insert_with(|| ns.clone());
    let mut r = Resolver { prefixes, ns, context: options.context, out: Ontology::new(iri) };

    // Frames first, so that later references find their labels.
    let mut heads = Vec::new();
    for frame in &doc.frames {
        let iri = r.use_entity(&frame.name, frame.kind)?;
        for c in &frame.clauses {
            if let Clause::Label(l) = c {
                let e = r.out.entities.get_mut(&iri).expect("declared");
                match &e.label {
                    Some(old) if old != l => {
                        return Err(Resolver::err(&frame.name, format!("conflicting labels `{old}` and `{l}`")))
                    }
                    _ => e.label = Some(l.clone()),
                }
            }
        }
        heads.push(iri);
    }
    for (frame, head) in doc.frames.iter().zip(heads) {
        for clause in &frame.clauses {
            match clause {
                Clause::Label(_) => {}
                Clause::EquivalentTo(list) => {
                    for e in list {
                        let ce = r.class(e)?;
                        r.out.add_axiom(Axiom::EquivalentClasses(vec![CE::named(head.clone()), ce]));
                    }
                }
                Clause::SubClassOf(list) => {
                    for e in list {
                        let sup = r.class(e)?;
                        r.out.add_axiom(Axiom::SubClassOf { sub: CE::named(head.clone()), sup });
                    }
                }
                Clause::EquivalentProps(list) => {
                    let kind = match frame.kind {
                        EntityKind::DataProperty => PropertyKind::Data,
                        _ => PropertyKind::Object,
                    };
                    for n in list {
                        let second = r.use_entity(n, kind.entity_kind())?;
                        r.out.add_axiom(Axiom::EquivalentProperties { first: head.clone(), second, kind });
                    }
                }
                Clause::Types(list) => {
                    for e in list {
                        let class = r.class(e)?;
                        r.out.add_axiom(Axiom::ClassAssertion { class, individual: head.clone() });
                    }
                }
                Clause::Facts(list) => {
                    for (p, v) in list {
                        match v {
                            RawValue::Literal(value) => {
                                let (property, kind) = r.property(p, true)?;
                                if kind != PropertyKind::Data {
                                    return Err(Resolver::err(p, "literal value for an object property"));
                                }
                                r.out.add_axiom(Axiom::DataFact { subject: head.clone(), property, value: value.clone() });
                            }
                            RawValue::Name(o) => {
                                let (property, kind) = r.property(p, false)?;
                                if kind != PropertyKind::Object {
                                    return Err(Resolver::err(p, "individual value for a data property"));
                                }
                                let object = r.use_entity(o, EntityKind::NamedIndividual)?;
                                r.out.add_axiom(Axiom::ObjectFact { subject: head.clone(), property, object });
                            }
                        }
                    }
                }
            }
        }
    }
    for list in &doc.equivalences {
        let ops = list.iter().map(|e| r.class(e)).collect::<Result<Vec<_>, _>>()?;
        r.out.add_axiom(Axiom::EquivalentClasses(ops));
    }
    Ok(r.out)
}
