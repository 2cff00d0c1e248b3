//! Closed-world compliance checking over a finite set of individuals.
//!
//! The domain is the set of named individuals. Property extensions are the
//! asserted facts, with equivalent properties merged. Named classes get
//! their extension from asserted types plus the class equivalences, applied
//! until nothing changes. Universal and at-most restrictions over an object
//! property are only evaluated for individuals closed on that property,
//! i.e. carrying an `only` type (or `max 0`) on it.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::manchester::Names;
use crate::owl::{
    Axiom, CardinalityMode, ClassExpression as CE, DataRange, Datatype, EntityKind, Literal, Ontology, OwlError,
    OWL_NOTHING, OWL_THING,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("individual <{individual}> is not closed on property <{property}>")]
    OpenProperty { individual: String, property: String },
    #[error("unknown individual <{0}>")]
    UnknownIndividual(String),
    #[error(transparent)]
    Owl(#[from] OwlError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Individual {
    pub iri: String,
    pub asserted_classes: Vec<CE>,
    pub object_facts: Vec<(String, String)>,
    pub data_facts: Vec<(String, Literal)>,
}

impl Individual {
    pub fn new(iri: impl Into<String>) -> Self {
        Individual { iri: iri.into(), ..Default::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Abox {
    pub individuals: BTreeMap<String, Individual>,
}

impl Abox {
    /// Collects every declared individual and every individual mentioned by
    /// an assertion or a fact.
    pub fn from_ontology(onto: &Ontology) -> Abox {
        let mut abox = Abox::default();
        for e in onto.entities_of(EntityKind::NamedIndividual) {
            abox.entry(&e.iri);
        }
        for ax in &onto.axioms {
            match ax {
                Axiom::ClassAssertion { class, individual } => abox.entry(individual).asserted_classes.push(class.clone()),
                Axiom::ObjectFact { subject, property, object } => {
                    abox.entry(object);
                    abox.entry(subject).object_facts.push((property.clone(), object.clone()));
                }
                Axiom::DataFact { subject, property, value } => {
                    abox.entry(subject).data_facts.push((property.clone(), value.clone()));
                }
                _ => {}
            }
        }
        abox
    }

    pub fn entry(&mut self, iri: &str) -> &mut Individual {
        self.individuals.entry(iri.to_string()).or_insert_with(|| Individual::new(iri))
    }

    pub fn get(&self, iri: &str) -> Option<&Individual> {
        self.individuals.get(iri)
    }

    /// Assertions and facts as axioms, in individual order.
    pub fn axioms(&self) -> Vec<Axiom> {
        let mut out = Vec::new();
        for ind in self.individuals.values() {
            for c in &ind.asserted_classes {
                out.push(Axiom::ClassAssertion { class: c.clone(), individual: ind.iri.clone() });
            }
            for (p, o) in &ind.object_facts {
                out.push(Axiom::ObjectFact { subject: ind.iri.clone(), property: p.clone(), object: o.clone() });
            }
            for (p, v) in &ind.data_facts {
                out.push(Axiom::DataFact { subject: ind.iri.clone(), property: p.clone(), value: v.clone() });
            }
        }
        out
    }
}

/// Merges properties linked by equivalence axioms.
#[derive(Debug, Clone, Default)]
struct PropertyClasses {
    parent: HashMap<String, String>,
}

impl PropertyClasses {
    fn new(onto: &Ontology) -> Self {
        let mut pc = PropertyClasses::default();
        for ax in &onto.axioms {
            if let Axiom::EquivalentProperties { first, second, .. } = ax {
                let (a, b) = (pc.find(first), pc.find(second));
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    pc.parent.insert(hi, lo);
                }
            }
        }
        pc
    }

    fn find(&self, p: &str) -> String {
        let mut cur = p.to_string();
        while let Some(next) = self.parent.get(&cur) {
            cur = next.clone();
        }
        cur
    }

    fn same(&self, a: &str, b: &str) -> bool {
        a == b || self.find(a) == self.find(b)
    }
}

fn is_closure_for(pc: &PropertyClasses, c: &CE, p: &str) -> bool {
    match c {
        CE::ObjectOnly(q, _) => pc.same(q, p),
        CE::ObjectCardinality { property, mode: CardinalityMode::Max, n: 0, filler } => {
            pc.same(property, p) && filler.as_deref().is_none_or(|f| *f == CE::thing())
        }
        _ => false,
    }
}

fn is_data_closure_for(pc: &PropertyClasses, c: &CE, p: &str) -> bool {
    match c {
        CE::DataOnly(q, _) => pc.same(q, p),
        CE::DataCardinality { property, mode: CardinalityMode::Max, n: 0, range: None } => pc.same(property, p),
        _ => false,
    }
}

/// Adds closure types for every property of `onto` the individual is not
/// yet closed on: `p only {b1, ..}` for its fact targets, `p only owl:Nothing`
/// when it has none, and the analogous data forms.
pub fn close_individual(ind: &Individual, onto: &Ontology) -> Individual {
    let pc = PropertyClasses::new(onto);
    let mut out = ind.clone();
    for e in onto.entities_of(EntityKind::ObjectProperty) {
        if out.asserted_classes.iter().any(|c| is_closure_for(&pc, c, &e.iri)) {
            continue;
        }
        let targets: BTreeSet<String> =
            ind.object_facts.iter().filter(|(p, _)| pc.same(p, &e.iri)).map(|(_, o)| o.clone()).collect();
        let filler = if targets.is_empty() { CE::nothing() } else { CE::one_of(targets.into_iter().collect()) };
        out.asserted_classes.push(CE::only(e.iri.clone(), filler));
    }
    for e in onto.entities_of(EntityKind::DataProperty) {
        if out.asserted_classes.iter().any(|c| is_data_closure_for(&pc, c, &e.iri)) {
            continue;
        }
        let values: Vec<Literal> =
            ind.data_facts.iter().filter(|(p, _)| pc.same(p, &e.iri)).map(|(_, v)| v.clone()).collect();
        out.asserted_classes.push(if values.is_empty() {
            CE::DataCardinality { property: e.iri.clone(), mode: CardinalityMode::Max, n: 0, range: None }
        } else {
            CE::DataOnly(e.iri.clone(), DataRange::one_of(values))
        });
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Close every individual before evaluating.
    pub close: bool,
    /// Compare strings exactly instead of ignoring whitespace.
    pub strict_literals: bool,
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Datatype-aware literal equality. Numbers compare by value; strings ignore
/// whitespace unless `strict`.
pub fn literals_match(a: &Literal, b: &Literal, strict: bool) -> bool {
    match (a.datatype, b.datatype) {
        (Datatype::String, Datatype::String) => {
            if strict {
                a.lexical == b.lexical
            } else {
                squash(&a.lexical) == squash(&b.lexical)
            }
        }
        (x, y) if x.is_numeric() && y.is_numeric() => a.numeric_value() == b.numeric_value(),
        _ => false,
    }
}

pub fn in_range(value: &Literal, range: &DataRange, strict: bool) -> bool {
    match range {
        DataRange::Enumeration(lits) => lits.iter().any(|l| literals_match(value, l, strict)),
        DataRange::FacetRestriction { base, facets } => {
            if !value.datatype.is_numeric() || (*base == Datatype::Integer && value.datatype != Datatype::Integer) {
                return false;
            }
            let Some(v) = value.numeric_value() else { return false };
            facets.iter().all(|(facet, bound)| {
                let Some(b) = bound.numeric_value() else { return false };
                use crate::owl::Facet::*;
                match facet {
                    MinInclusive => v >= b,
                    MinExclusive => v > b,
                    MaxInclusive => v <= b,
                    MaxExclusive => v < b,
                    Exact => v == b,
                }
            })
        }
    }
}

type Eval = Result<bool, CheckError>;

/// Conjunction that is false as soon as any operand is false, even if
/// another operand could not be evaluated.
fn all_of(results: impl Iterator<Item = Eval>) -> Eval {
    let mut err = None;
    for r in results {
        match r {
            Ok(false) => return Ok(false),
            Ok(true) => {}
            Err(e) => {
                err.get_or_insert(e);
            }
        }
    }
    err.map_or(Ok(true), Err)
}

fn any_of(results: impl Iterator<Item = Eval>) -> Eval {
    let mut err = None;
    for r in results {
        match r {
            Ok(true) => return Ok(true),
            Ok(false) => {}
            Err(e) => {
                err.get_or_insert(e);
            }
        }
    }
    err.map_or(Ok(false), Err)
}

/// Evaluation state for one ontology and ABox.
pub struct Checker<'a> {
    onto: &'a Ontology,
    abox: Abox,
    options: CheckOptions,
    props: PropertyClasses,
    members: BTreeMap<String, BTreeSet<String>>,
    recorder: Option<RefCell<Vec<Axiom>>>,
}

impl<'a> Checker<'a> {
    /// Builds the checker and computes named-class extensions.
    pub fn new(onto: &'a Ontology, abox: Abox, options: CheckOptions) -> Result<Self, CheckError> {
        let mut c = Checker::without_propagation(onto, abox, options);
        c.propagate()?;
        Ok(c)
    }

    /// Named classes contain only their asserted members; class
    /// equivalences are not applied.
    pub fn without_propagation(onto: &'a Ontology, mut abox: Abox, options: CheckOptions) -> Self {
        for e in onto.entities_of(EntityKind::NamedIndividual) {
            abox.entry(&e.iri);
        }
        if options.close {
            for ind in abox.individuals.values_mut() {
                *ind = close_individual(ind, onto);
            }
        }
        let mut members: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for ind in abox.individuals.values() {
            for c in &ind.asserted_classes {
                if let CE::Named(iri) = c {
                    members.entry(iri.clone()).or_default().insert(ind.iri.clone());
                }
            }
        }
        Checker { onto, abox, options, props: PropertyClasses::new(onto), members, recorder: None }
    }

    fn propagate(&mut self) -> Result<(), CheckError> {
        let defs: Vec<&Vec<CE>> = self
            .onto
            .axioms
            .iter()
            .filter_map(|a| match a {
                Axiom::EquivalentClasses(ops) => Some(ops),
                _ => None,
            })
            .collect();
        let domain: Vec<String> = self.abox.individuals.keys().cloned().collect();
        loop {
            let mut changed = false;
            for ops in &defs {
                for x in &domain {
                    if ops.iter().all(|o| matches!(o, CE::Named(c) if self.is_member(c, x))) {
                        continue;
                    }
                    if any_of(ops.iter().map(|o| self.evaluate(x, o)))? {
                        for o in ops.iter() {
                            if let CE::Named(c) = o {
                                changed |= self.members.entry(c.clone()).or_default().insert(x.clone());
                            }
                        }
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn is_member(&self, class: &str, x: &str) -> bool {
        class == OWL_THING || (class != OWL_NOTHING && self.members.get(class).is_some_and(|m| m.contains(x)))
    }

    pub fn abox(&self) -> &Abox {
        &self.abox
    }

    pub fn members_of(&self, class: &str) -> BTreeSet<String> {
        if class == OWL_THING {
            return self.abox.individuals.keys().cloned().collect();
        }
        self.members.get(class).cloned().unwrap_or_default()
    }

    pub fn domain(&self) -> impl Iterator<Item = &str> {
        self.abox.individuals.keys().map(String::as_str)
    }

    fn record(&self, ax: Axiom) {
        if let Some(r) = &self.recorder {
            let mut r = r.borrow_mut();
            if !r.contains(&ax) {
                r.push(ax);
            }
        }
    }

    fn record_property(&self, p: &str) {
        if self.recorder.is_none() {
            return;
        }
        for ax in &self.onto.axioms {
            if let Axiom::EquivalentProperties { first, second, .. } = ax {
                if self.props.same(first, p) || self.props.same(second, p) {
                    self.record(ax.clone());
                }
            }
        }
    }

    fn individual(&self, x: &str) -> Result<&Individual, CheckError> {
        self.abox.get(x).ok_or_else(|| CheckError::UnknownIndividual(x.to_string()))
    }

    fn object_targets(&self, ind: &Individual, p: &str) -> BTreeSet<String> {
        self.record_property(p);
        let mut out = BTreeSet::new();
        for (q, o) in &ind.object_facts {
            if self.props.same(q, p) {
                self.record(Axiom::ObjectFact { subject: ind.iri.clone(), property: q.clone(), object: o.clone() });
                out.insert(o.clone());
            }
        }
        out
    }

    fn data_values(&self, ind: &Individual, p: &str) -> Vec<Literal> {
        self.record_property(p);
        let mut out: Vec<Literal> = Vec::new();
        for (q, v) in &ind.data_facts {
            if self.props.same(q, p) {
                self.record(Axiom::DataFact { subject: ind.iri.clone(), property: q.clone(), value: v.clone() });
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    fn require_closed(&self, ind: &Individual, p: &str) -> Result<(), CheckError> {
        match ind.asserted_classes.iter().find(|c| is_closure_for(&self.props, c, p)) {
            Some(c) => {
                self.record(Axiom::ClassAssertion { class: c.clone(), individual: ind.iri.clone() });
                Ok(())
            }
            None => Err(CheckError::OpenProperty { individual: ind.iri.clone(), property: p.to_string() }),
        }
    }

    fn cardinality(&self, mode: CardinalityMode, n: u32, yes: u32, unknown: u32, err: impl FnOnce() -> CheckError) -> Eval {
        match mode {
            CardinalityMode::Min if yes >= n => Ok(true),
            CardinalityMode::Max if yes > n => Ok(false),
            CardinalityMode::Exact if yes > n => Ok(false),
            _ if unknown > 0 => Err(err()),
            CardinalityMode::Min => Ok(false),
            CardinalityMode::Max => Ok(true),
            CardinalityMode::Exact => Ok(yes == n),
        }
    }

    /// Whether individual `x` belongs to `e`.
    pub fn evaluate(&self, x: &str, e: &CE) -> Eval {
        match e {
            CE::Named(c) => {
                let m = self.is_member(c, x);
                if m && c != OWL_THING {
                    self.record(Axiom::ClassAssertion { class: e.clone(), individual: x.to_string() });
                }
                Ok(m)
            }
            CE::ComplementOf(inner) => self.evaluate(x, inner).map(|b| !b),
            CE::IntersectionOf(ops) => all_of(ops.iter().map(|o| self.evaluate(x, o))),
            CE::UnionOf(ops) => any_of(ops.iter().map(|o| self.evaluate(x, o))),
            CE::OneOf(inds) => Ok(inds.iter().any(|i| i == x)),
            CE::ObjectSome(p, f) => {
                let ind = self.individual(x)?;
                any_of(self.object_targets(ind, p).iter().map(|t| self.evaluate(t, f)))
            }
            CE::ObjectOnly(p, f) => {
                let ind = self.individual(x)?;
                self.require_closed(ind, p)?;
                all_of(self.object_targets(ind, p).iter().map(|t| self.evaluate(t, f)))
            }
            CE::ObjectCardinality { property, mode, n, filler } => {
                let ind = self.individual(x)?;
                if *mode != CardinalityMode::Min {
                    self.require_closed(ind, property)?;
                }
                let targets = self.object_targets(ind, property);
                let mut first_err = None;
                let (mut yes, mut unknown) = (0u32, 0u32);
                for t in &targets {
                    let r = match filler {
                        Some(f) => self.evaluate(t, f),
                        None => Ok(true),
                    };
                    match r {
                        Ok(true) => yes += 1,
                        Ok(false) => {}
                        Err(e) => {
                            unknown += 1;
                            first_err.get_or_insert(e);
                        }
                    }
                }
                self.cardinality(*mode, *n, yes, unknown, || first_err.expect("an error was seen"))
            }
            CE::DataSome(p, r) => {
                let ind = self.individual(x)?;
                Ok(self.data_values(ind, p).iter().any(|v| in_range(v, r, self.options.strict_literals)))
            }
            CE::DataOnly(p, r) => {
                let ind = self.individual(x)?;
                Ok(self.data_values(ind, p).iter().all(|v| in_range(v, r, self.options.strict_literals)))
            }
            CE::DataCardinality { property, mode, n, range } => {
                let ind = self.individual(x)?;
                let yes = self
                    .data_values(ind, property)
                    .iter()
                    .filter(|v| range.as_ref().is_none_or(|r| in_range(v, r, self.options.strict_literals)))
                    .count() as u32;
                self.cardinality(*mode, *n, yes, 0, || unreachable!())
            }
        }
    }

    /// Evaluates while collecting every axiom the result depends on.
    fn evaluate_recorded(&mut self, x: &str, e: &CE) -> (Eval, Vec<Axiom>) {
        self.recorder = Some(RefCell::new(Vec::new()));
        let r = self.evaluate(x, e);
        let rec = self.recorder.take().map(RefCell::into_inner).unwrap_or_default();
        (r, rec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub individual: String,
    pub class: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub axiom: Axiom,
    pub sentence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub individual: String,
    pub gci: Axiom,
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplianceReport {
    pub consistent: bool,
    pub classifications: Vec<Classification>,
    pub violations: Vec<Violation>,
}

fn class_name(e: &CE) -> String {
    match e {
        CE::Named(iri) => iri.clone(),
        other => other.to_string(),
    }
}

/// Equivalence axioms that define the named class `e`, if any.
fn definitions<'o>(onto: &'o Ontology, e: &CE) -> Vec<&'o Axiom> {
    if !matches!(e, CE::Named(_)) {
        return Vec::new();
    }
    onto.axioms.iter().filter(|a| matches!(a, Axiom::EquivalentClasses(ops) if ops.contains(e))).collect()
}

/// Classifies the individuals against the left side of every subclass
/// axiom and reports those that fail the right side.
pub fn check_compliance(onto: &Ontology, abox: &Abox, options: CheckOptions) -> Result<ComplianceReport, CheckError> {
    let mut checker = Checker::new(onto, abox.clone(), options)?;
    let names = Names::new(onto);
    let domain: Vec<String> = checker.domain().map(str::to_string).collect();
    let mut classifications = Vec::new();
    let mut violations = Vec::new();
    for gci in &onto.axioms {
        let Axiom::SubClassOf { sub, sup } = gci else { continue };
        for x in &domain {
            if !checker.evaluate(x, sub)? {
                continue;
            }
            classifications.push(Classification { individual: x.clone(), class: class_name(sub) });
            if checker.evaluate(x, sup)? {
                continue;
            }
            let mut trace: Vec<Axiom> = vec![gci.clone()];
            let push = |trace: &mut Vec<Axiom>, a: Axiom| {
                if !trace.contains(&a) {
                    trace.push(a);
                }
            };
            for d in definitions(onto, sub).into_iter().chain(definitions(onto, sup)) {
                push(&mut trace, d.clone());
            }
            push(&mut trace, Axiom::ClassAssertion { class: sub.clone(), individual: x.clone() });
            let targets: Vec<CE> = match definitions(onto, sup).as_slice() {
                [] => vec![sup.clone()],
                defs => defs
                    .iter()
                    .flat_map(|d| match d {
                        Axiom::EquivalentClasses(ops) => ops.iter().filter(|o| *o != sup).cloned().collect(),
                        _ => Vec::new(),
                    })
                    .collect(),
            };
            for t in targets {
                let (_, consulted) = checker.evaluate_recorded(x, &t);
                for a in consulted {
                    push(&mut trace, a);
                }
            }
            let trace = trace.into_iter().map(|a| TraceStep { sentence: names.axiom(&a), axiom: a }).collect();
            violations.push(Violation { individual: x.clone(), gci: gci.clone(), trace });
        }
    }
    Ok(ComplianceReport { consistent: violations.is_empty(), classifications, violations })
}

/// Rebuilds the violation from its trace alone: a model made only of the
/// trace axioms, with no class propagation, must still place the individual
/// in the subclass side and outside every definition of the superclass side.
pub fn replay_violation(onto: &Ontology, violation: &Violation, options: CheckOptions) -> Result<bool, CheckError> {
    let Axiom::SubClassOf { sub, sup } = &violation.gci else { return Ok(false) };
    if violation.trace.first().map(|s| &s.axiom) != Some(&violation.gci) {
        return Ok(false);
    }
    let mut mini = Ontology::new(onto.iri.clone());
    mini.entities = onto.entities.clone();
    for step in &violation.trace {
        mini.add_axiom(step.axiom.clone());
    }
    let abox = Abox::from_ontology(&mini);
    let checker = Checker::without_propagation(&mini, abox, CheckOptions { close: false, ..options });
    let x = &violation.individual;
    if !checker.evaluate(x, sub)? {
        return Ok(false);
    }
    let defs = definitions(&mini, sup);
    if defs.is_empty() {
        return Ok(!checker.evaluate(x, sup)?);
    }
    for d in defs {
        let Axiom::EquivalentClasses(ops) = d else { continue };
        for o in ops.iter().filter(|o| *o != sup) {
            if checker.evaluate(x, o)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub const REPORT_HEADER: &str = "# regowl report v1";

impl ComplianceReport {
    /// Line-oriented text; `names` supplies the labels used in sentences.
    pub fn to_text(&self, names: &Names<'_>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{REPORT_HEADER}");
        let _ = writeln!(out, "consistent: {}", self.consistent);
        for c in &self.classifications {
            let _ = writeln!(out, "classified {} {}", names.reference(&c.individual), names.reference(&c.class));
        }
        for v in &self.violations {
            let _ = writeln!(out, "violation {} {}", names.reference(&v.individual), names.axiom(&v.gci));
            for (i, s) in v.trace.iter().enumerate() {
                let _ = writeln!(out, "  {}) {}", i + 1, s.sentence);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
