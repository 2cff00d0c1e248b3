//! Brute-force finite-model evaluator used as a reference for the checker.
//!
//! Extensions are computed as whole sets, bottom-up over the expression, on
//! the closed-world reading of the ABox: a property relates exactly the
//! asserted pairs. Named classes are either fixed from outside or computed
//! by simultaneous (Jacobi) iteration of the class equivalences.

use std::collections::{BTreeMap, BTreeSet};

use regowl::checker::Abox;
use regowl::owl::{
    Axiom, CardinalityMode, ClassExpression as CE, DataRange, Datatype, Facet, Literal, Ontology, OWL_NOTHING,
    OWL_THING,
};

pub type Set = BTreeSet<String>;

pub struct Model {
    pub domain: Set,
    pub classes: BTreeMap<String, Set>,
    objects: BTreeMap<String, BTreeSet<(String, String)>>,
    data: BTreeMap<String, BTreeSet<(String, Literal)>>,
    strict: bool,
}

/// Connected components of the property equivalence graph, keyed by member.
fn property_groups(onto: &Ontology) -> BTreeMap<String, BTreeSet<String>> {
    let mut groups: Vec<BTreeSet<String>> = Vec::new();
    for ax in &onto.axioms {
        if let Axiom::EquivalentProperties { first, second, .. } = ax {
            let mut merged: BTreeSet<String> = [first.clone(), second.clone()].into();
            groups.retain(|g| {
                if g.contains(first) || g.contains(second) {
                    merged.extend(g.iter().cloned());
                    false
                } else {
                    true
                }
            });
            groups.push(merged);
        }
    }
    let mut out = BTreeMap::new();
    for g in groups {
        for p in &g {
            out.insert(p.clone(), g.clone());
        }
    }
    out
}

fn strip_ws(s: &str) -> String {
    s.split_whitespace().collect()
}

fn number(l: &Literal) -> Option<f64> {
    match l.datatype {
        Datatype::String => None,
        _ => l.lexical.parse().ok(),
    }
}

impl Model {
    /// Named classes hold only their asserted members.
    pub fn new(onto: &Ontology, abox: &Abox, strict: bool) -> Model {
        let groups = property_groups(onto);
        let alias = |p: &str| -> Vec<String> {
            groups.get(p).map(|g| g.iter().cloned().collect()).unwrap_or_else(|| vec![p.to_string()])
        };
        let mut domain: Set = abox.individuals.keys().cloned().collect();
        domain.extend(onto.entities_of(regowl::owl::EntityKind::NamedIndividual).map(|e| e.iri.clone()));
        let mut classes: BTreeMap<String, Set> = BTreeMap::new();
        let mut objects: BTreeMap<String, BTreeSet<(String, String)>> = BTreeMap::new();
        let mut data: BTreeMap<String, BTreeSet<(String, Literal)>> = BTreeMap::new();
        for ind in abox.individuals.values() {
            for c in &ind.asserted_classes {
                if let CE::Named(n) = c {
                    classes.entry(n.clone()).or_default().insert(ind.iri.clone());
                }
            }
            for (p, o) in &ind.object_facts {
                for q in alias(p) {
                    objects.entry(q).or_default().insert((ind.iri.clone(), o.clone()));
                }
            }
            for (p, v) in &ind.data_facts {
                for q in alias(p) {
                    data.entry(q).or_default().insert((ind.iri.clone(), v.clone()));
                }
            }
        }
        Model { domain, classes, objects, data, strict }
    }

    /// Least model of the class equivalences above the asserted memberships,
    /// valid when every definition is monotone in the named classes.
    pub fn saturate(&mut self, onto: &Ontology) {
        loop {
            let mut next = self.classes.clone();
            for ax in &onto.axioms {
                let Axiom::EquivalentClasses(ops) = ax else { continue };
                let union: Set = ops.iter().flat_map(|o| self.ext(o)).collect();
                for o in ops {
                    if let CE::Named(n) = o {
                        next.entry(n.clone()).or_default().extend(union.iter().cloned());
                    }
                }
            }
            if next == self.classes {
                return;
            }
            self.classes = next;
        }
    }

    /// Whether every named side of each class equivalence contains every
    /// individual that meets any of its sides.
    pub fn closed_under_definitions(&self, onto: &Ontology) -> bool {
        onto.axioms.iter().all(|ax| match ax {
            Axiom::EquivalentClasses(ops) => {
                let union: Set = ops.iter().flat_map(|o| self.ext(o)).collect();
                ops.iter().all(|o| !matches!(o, CE::Named(_)) || self.ext(o).is_superset(&union))
            }
            _ => true,
        })
    }

    pub fn named(&self, iri: &str) -> Set {
        match iri {
            OWL_THING => self.domain.clone(),
            OWL_NOTHING => Set::new(),
            _ => self.classes.get(iri).cloned().unwrap_or_default(),
        }
    }

    fn successors(&self, x: &str, p: &str) -> Set {
        self.objects.get(p).map(|r| r.iter().filter(|(s, _)| s == x).map(|(_, o)| o.clone()).collect()).unwrap_or_default()
    }

    fn values(&self, x: &str, p: &str) -> BTreeSet<Literal> {
        self.data.get(p).map(|r| r.iter().filter(|(s, _)| s == x).map(|(_, v)| v.clone()).collect()).unwrap_or_default()
    }

    pub fn same_literal(&self, a: &Literal, b: &Literal) -> bool {
        match (a.datatype, b.datatype) {
            (Datatype::String, Datatype::String) if self.strict => a.lexical == b.lexical,
            (Datatype::String, Datatype::String) => strip_ws(&a.lexical) == strip_ws(&b.lexical),
            (Datatype::String, _) | (_, Datatype::String) => false,
            _ => number(a) == number(b),
        }
    }

    pub fn in_range(&self, v: &Literal, r: &DataRange) -> bool {
        match r {
            DataRange::Enumeration(lits) => lits.iter().any(|l| self.same_literal(v, l)),
            DataRange::FacetRestriction { base, facets } => {
                let fits = match base {
                    Datatype::Integer => v.datatype == Datatype::Integer,
                    _ => v.datatype != Datatype::String,
                };
                let Some(x) = number(v).filter(|_| fits) else { return false };
                facets.iter().all(|(f, b)| {
                    let b = number(b).expect("numeric bound");
                    match f {
                        Facet::MinInclusive => x >= b,
                        Facet::MinExclusive => x > b,
                        Facet::MaxInclusive => x <= b,
                        Facet::MaxExclusive => x < b,
                        Facet::Exact => x == b,
                    }
                })
            }
        }
    }

    fn count_ok(mode: CardinalityMode, n: u32, k: usize) -> bool {
        let n = n as usize;
        match mode {
            CardinalityMode::Min => k >= n,
            CardinalityMode::Max => k <= n,
            CardinalityMode::Exact => k == n,
        }
    }

    /// The set of individuals in `e`.
    pub fn ext(&self, e: &CE) -> Set {
        let filter = |pred: &dyn Fn(&str) -> bool| -> Set { self.domain.iter().filter(|x| pred(x)).cloned().collect() };
        match e {
            CE::Named(n) => self.named(n),
            CE::ComplementOf(x) => self.domain.difference(&self.ext(x)).cloned().collect(),
            CE::IntersectionOf(ops) => {
                let mut acc = self.domain.clone();
                for o in ops {
                    acc = acc.intersection(&self.ext(o)).cloned().collect();
                }
                acc
            }
            CE::UnionOf(ops) => ops.iter().flat_map(|o| self.ext(o)).collect(),
            CE::OneOf(inds) => inds.iter().filter(|i| self.domain.contains(*i)).cloned().collect(),
            CE::ObjectSome(p, f) => {
                let fe = self.ext(f);
                filter(&|x| self.successors(x, p).iter().any(|y| fe.contains(y)))
            }
            CE::ObjectOnly(p, f) => {
                let fe = self.ext(f);
                filter(&|x| self.successors(x, p).iter().all(|y| fe.contains(y)))
            }
            CE::ObjectCardinality { property, mode, n, filler } => {
                let fe = filler.as_ref().map(|f| self.ext(f)).unwrap_or_else(|| self.domain.clone());
                filter(&|x| Self::count_ok(*mode, *n, self.successors(x, property).intersection(&fe).count()))
            }
            CE::DataSome(p, r) => filter(&|x| self.values(x, p).iter().any(|v| self.in_range(v, r))),
            CE::DataOnly(p, r) => filter(&|x| self.values(x, p).iter().all(|v| self.in_range(v, r))),
            CE::DataCardinality { property, mode, n, range } => filter(&|x| {
                let k = self.values(x, property).iter().filter(|v| range.as_ref().is_none_or(|r| self.in_range(v, r))).count();
                Self::count_ok(*mode, *n, k)
            }),
        }
    }

    /// `(individual, subclass-axiom index)` pairs where the subclass side
    /// holds and the superclass side does not.
    pub fn violations(&self, onto: &Ontology) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        for (i, ax) in onto.axioms.iter().enumerate() {
            if let Axiom::SubClassOf { sub, sup } = ax {
                let sup = self.ext(sup);
                for x in self.ext(sub).difference(&sup) {
                    out.insert((x.clone(), i));
                }
            }
        }
        out
    }
}

/// Every class expression occurring in the ontology's axioms, nested ones
/// included, without duplicates.
pub fn all_subexpressions(onto: &Ontology) -> Vec<CE> {
    let mut out: Vec<CE> = Vec::new();
    for ax in &onto.axioms {
        for e in ax.class_expressions() {
            for s in e.subexpressions() {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        }
    }
    out
}

/// Compares the checker with the oracle on one ontology and ABox, closing
/// every individual. With `saturate` the oracle computes named classes
/// itself (definitions must be monotone); otherwise it takes them from the
/// checker. Returns one line per disagreement.
pub fn disagreements(onto: &Ontology, abox: &Abox, extra: &[CE], saturate: bool) -> Vec<String> {
    use regowl::checker::{check_compliance, CheckOptions, Checker};
    use regowl::owl::EntityKind;

    let options = CheckOptions { close: true, strict_literals: false };
    let mut out = Vec::new();
    let checker = match Checker::new(onto, abox.clone(), options) {
        Ok(c) => c,
        Err(e) => return vec![format!("checker failed: {e}")],
    };
    let mut model = Model::new(onto, abox, false);
    let class_iris: Vec<String> = onto.entities_of(EntityKind::Class).map(|e| e.iri.clone()).collect();
    if saturate {
        model.saturate(onto);
        for c in &class_iris {
            let (got, want) = (checker.members_of(c), model.named(c));
            if got != want {
                out.push(format!("class <{c}>: checker {got:?}, oracle {want:?}"));
            }
        }
    } else {
        model.classes = class_iris.iter().map(|c| (c.clone(), checker.members_of(c))).collect();
    }
    let mut exprs = all_subexpressions(onto);
    for e in extra {
        exprs.extend(e.subexpressions().into_iter().cloned());
    }
    for e in &exprs {
        let want = model.ext(e);
        for x in &model.domain {
            match checker.evaluate(x, e) {
                Ok(b) if b == want.contains(x) => {}
                got => out.push(format!("{x} in {e}: checker {got:?}, oracle {}", want.contains(x))),
            }
        }
    }
    if saturate {
        match check_compliance(onto, abox, options) {
            Ok(report) => {
                let got: BTreeSet<(String, usize)> = report
                    .violations
                    .iter()
                    .map(|v| (v.individual.clone(), onto.axioms.iter().position(|a| *a == v.gci).expect("gci")))
                    .collect();
                let want = model.violations(onto);
                if got != want {
                    out.push(format!("violations: checker {got:?}, oracle {want:?}"));
                }
                if report.consistent != want.is_empty() {
                    out.push("consistency flag disagrees".into());
                }
            }
            Err(e) => out.push(format!("compliance check failed: {e}")),
        }
    }
    out
}
