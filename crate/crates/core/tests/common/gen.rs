//! Proptest generators for ontologies, ABoxes and annotated documents, plus
//! the checks run on generated arrow documents.

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::sample::Index;

use regowl::checker::{Abox, Individual};
use regowl::owl::{
    Axiom, CardinalityMode, ClassExpression as CE, DataRange, Datatype, Entity, EntityKind, Facet, Literal, Ontology,
    PropertyKind,
};
use regowl::preprocess::apply_linguistic_arrows;
use regowl::tsv_ingest::{AnnotatedDocument, Arrow, Layer, RelationAnnotation, SpanAnnotation, SpanRef, Token, TokenRef};

pub const ONTO_IRI: &str = "urn:t";
pub const FOREIGN_CLASS: &str = "http://other.example/v#Ext";

pub fn iri(local: &str) -> String {
    format!("{ONTO_IRI}#{local}")
}

/// Literals used for facts and enumerations.
pub fn literal_pool() -> Vec<Literal> {
    let l = |s: &str, d| Literal::new(s, d).unwrap();
    vec![
        Literal::string("R15"),
        Literal::string("R 15"),
        Literal::string("R14"),
        Literal::string("III"),
        Literal::string("say \"hi\"\\"),
        l("3", Datatype::Integer),
        l("300", Datatype::Integer),
        l("-2", Datatype::Integer),
        l("3.0", Datatype::Float),
        l("2.5", Datatype::Float),
        l("1.5e2", Datatype::Float),
    ]
}

const LABELS: [&str; 7] = ["beam", "fire resistance limit", "in", "A1", "it's", "x y", "III"];

/// Entities of a generated ontology.
#[derive(Debug, Clone)]
pub struct Sig {
    pub classes: Vec<String>,
    pub defined: Vec<String>,
    pub objects: Vec<String>,
    pub data: Vec<String>,
    pub individuals: Vec<String>,
}

impl Sig {
    pub fn new(individuals: usize, data: usize) -> Sig {
        let names = |p: &str, n: usize| (0..n).map(|i| iri(&format!("{p}{i}"))).collect::<Vec<_>>();
        let mut classes = names("A", 3);
        classes.push(FOREIGN_CLASS.to_string());
        Sig {
            classes,
            defined: names("D", 2),
            objects: names("p", 3),
            data: names("d", data),
            individuals: names("i", individuals),
        }
    }

    fn entities(&self) -> Vec<(EntityKind, String)> {
        let mut out = Vec::new();
        for c in self.classes.iter().chain(&self.defined) {
            out.push((EntityKind::Class, c.clone()));
        }
        out.extend(self.objects.iter().map(|p| (EntityKind::ObjectProperty, p.clone())));
        out.extend(self.data.iter().map(|p| (EntityKind::DataProperty, p.clone())));
        out.extend(self.individuals.iter().map(|i| (EntityKind::NamedIndividual, i.clone())));
        out
    }

    /// An ontology declaring every entity, labelled from `labels`.
    pub fn ontology(&self, labels: &[Option<&str>]) -> Ontology {
        let mut o = Ontology::new(ONTO_IRI);
        for (i, (kind, iri)) in self.entities().into_iter().enumerate() {
            let label = labels.get(i).copied().flatten().map(str::to_string);
            o.declare(Entity::new(kind, iri, label)).unwrap();
        }
        o
    }

    fn entity_count(&self) -> usize {
        self.classes.len() + self.defined.len() + self.objects.len() + self.data.len() + self.individuals.len()
    }
}

fn bound(lower: bool, exclusive: bool, value: Literal) -> (Facet, Literal) {
    let f = match (lower, exclusive) {
        (true, false) => Facet::MinInclusive,
        (true, true) => Facet::MinExclusive,
        (false, false) => Facet::MaxInclusive,
        (false, true) => Facet::MaxExclusive,
    };
    (f, value)
}

pub fn data_range() -> impl Strategy<Value = DataRange> {
    let pool = literal_pool();
    let enumeration = prop::sample::subsequence(pool, 1..=2).prop_map(DataRange::one_of);
    let int = (-5i64..400).prop_map(|v| Literal::new(v.to_string(), Datatype::Integer).unwrap());
    let float = (0u32..60).prop_map(|v| Literal::new(format!("{}.{}", v / 10, v % 10), Datatype::Float).unwrap());
    let facets = |base: Datatype, value: BoxedStrategy<Literal>| {
        (
            prop::option::of((any::<bool>(), value.clone())),
            prop::option::of((any::<bool>(), value)),
            any::<bool>(),
        )
            .prop_map(move |(lo, hi, lower_only)| {
                let mut fs: Vec<(Facet, Literal)> = Vec::new();
                fs.extend(lo.map(|(x, v)| bound(true, x, v)));
                fs.extend(hi.map(|(x, v)| bound(false, x, v)));
                if fs.is_empty() {
                    let v = if base == Datatype::Integer { "10" } else { "1.5" };
                    fs.push(bound(lower_only, false, Literal::new(v, base).unwrap()));
                }
                DataRange::restricted(base, fs).unwrap()
            })
    };
    prop_oneof![
        2 => enumeration,
        1 => facets(Datatype::Integer, int.boxed()),
        1 => facets(Datatype::Float, float.boxed()),
    ]
}

fn mode() -> impl Strategy<Value = CardinalityMode> {
    prop_oneof![Just(CardinalityMode::Min), Just(CardinalityMode::Max), Just(CardinalityMode::Exact)]
}

/// Class expressions over `sig`, nesting up to three levels.
pub fn expression(sig: &Sig) -> impl Strategy<Value = CE> {
    let mut named: Vec<CE> = sig.classes.iter().chain(&sig.defined).cloned().map(CE::Named).collect();
    named.push(CE::thing());
    named.push(CE::nothing());
    let mut leaves: Vec<BoxedStrategy<CE>> = vec![prop::sample::select(named).boxed()];
    if !sig.individuals.is_empty() {
        leaves.push(prop::sample::subsequence(sig.individuals.clone(), 1..=sig.individuals.len().min(2)).prop_map(CE::one_of).boxed());
    }
    if !sig.data.is_empty() {
        let d = prop::sample::select(sig.data.clone());
        leaves.push((d.clone(), data_range(), any::<bool>()).prop_map(|(p, r, some)| if some { CE::DataSome(p, r) } else { CE::DataOnly(p, r) }).boxed());
        leaves.push(
            (d, mode(), 0u32..3, prop::option::of(data_range()))
                .prop_map(|(property, mode, n, range)| CE::DataCardinality { property, mode, n, range })
                .boxed(),
        );
    }
    let leaf = prop::strategy::Union::new(leaves);
    let objects = sig.objects.clone();
    leaf.prop_recursive(3, 24, 3, move |inner| {
        let p = prop::sample::select(objects.clone());
        prop_oneof![
            inner.clone().prop_map(CE::not),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(CE::and),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(CE::or),
            (p.clone(), inner.clone()).prop_map(|(p, f)| CE::some(p, f)),
            (p.clone(), inner.clone()).prop_map(|(p, f)| CE::only(p, f)),
            (p, mode(), 0u32..3, prop::option::of(inner)).prop_map(|(property, mode, n, f)| {
                CE::ObjectCardinality { property, mode, n, filler: f.map(Box::new) }
            }),
        ]
    })
}

/// Replaces defined classes in non-positive positions (under `not`, or in
/// the filler of an at-most or exact restriction) by `fallback`, making the
/// expression monotone in the defined classes.
pub fn demote(e: &CE, defined: &[String], fallback: &str) -> CE {
    // Some(true): positive, Some(false): negative, None: both.
    fn go(e: &CE, polarity: Option<bool>, defined: &[String], fallback: &str) -> CE {
        let rec = |x: &CE, p: Option<bool>| go(x, p, defined, fallback);
        match e {
            CE::Named(n) if polarity != Some(true) && defined.contains(n) => CE::named(fallback),
            CE::ComplementOf(x) => CE::not(rec(x, polarity.map(|p| !p))),
            CE::IntersectionOf(ops) => CE::and(ops.iter().map(|o| rec(o, polarity)).collect()),
            CE::UnionOf(ops) => CE::or(ops.iter().map(|o| rec(o, polarity)).collect()),
            CE::ObjectSome(p, x) => CE::some(p.clone(), rec(x, polarity)),
            CE::ObjectOnly(p, x) => CE::only(p.clone(), rec(x, polarity)),
            CE::ObjectCardinality { property, mode, n, filler } => {
                let inner = match mode {
                    CardinalityMode::Min => polarity,
                    CardinalityMode::Max => polarity.map(|p| !p),
                    CardinalityMode::Exact => None,
                };
                CE::ObjectCardinality {
                    property: property.clone(),
                    mode: *mode,
                    n: *n,
                    filler: filler.as_ref().map(|f| Box::new(rec(f, inner))),
                }
            }
            other => other.clone(),
        }
    }
    go(e, Some(true), defined, fallback)
}

fn labels(sig: &Sig) -> impl Strategy<Value = Vec<Option<&'static str>>> {
    prop::collection::vec(prop::option::weighted(0.6, prop::sample::select(LABELS.to_vec())), sig.entity_count())
}

/// Class definitions, subclass axioms and an optional property equivalence.
fn tbox(sig: &Sig, monotone: bool) -> impl Strategy<Value = Vec<Axiom>> {
    let all: Vec<String> = sig.classes.iter().chain(&sig.defined).cloned().collect();
    let defined = sig.defined.clone();
    let fallback = sig.classes[0].clone();
    let (p0, p1) = (sig.objects[0].clone(), sig.objects[1].clone());
    (
        prop::collection::vec(prop::option::weighted(0.8, expression(sig)), sig.defined.len()),
        prop::collection::vec((prop::sample::select(all), expression(sig)), 0..=3),
        any::<bool>(),
    )
        .prop_map(move |(defs, gcis, eq)| {
            let fix = |e: CE| if monotone { demote(&e, &defined, &fallback) } else { e };
            let mut axioms = Vec::new();
            if eq {
                axioms.push(Axiom::EquivalentProperties { first: p0.clone(), second: p1.clone(), kind: PropertyKind::Object });
            }
            for (d, e) in defined.iter().zip(defs) {
                if let Some(e) = e.map(&fix) {
                    if e != CE::named(d.clone()) {
                        axioms.push(Axiom::EquivalentClasses(vec![CE::named(d.clone()), e]));
                    }
                }
            }
            for (c, e) in gcis {
                axioms.push(Axiom::SubClassOf { sub: CE::Named(c), sup: fix(e) });
            }
            axioms
        })
}

/// Up to eight named individuals with asserted named classes and at most
/// three facts each.
pub fn abox(
    individuals: Vec<String>,
    classes: Vec<String>,
    objects: Vec<String>,
    data: Vec<String>,
    literals: Vec<Literal>,
) -> impl Strategy<Value = Abox> {
    let n = individuals.len();
    let one = (
        prop::collection::vec(any::<Index>(), 0..=2),
        prop::collection::vec((any::<Index>(), any::<Index>()), 0..=3),
    );
    prop::collection::vec(one, n).prop_map(move |per| {
        let mut abox = Abox::default();
        for (x, (cls, facts)) in individuals.iter().zip(per) {
            let mut ind = Individual::new(x.clone());
            if !classes.is_empty() {
                for c in cls {
                    let c = CE::Named(c.get(&classes).clone());
                    if !ind.asserted_classes.contains(&c) {
                        ind.asserted_classes.push(c);
                    }
                }
            }
            let props = objects.len() + data.len();
            if props > 0 {
                for (p, v) in facts {
                    let i = p.index(props);
                    if i < objects.len() {
                        ind.object_facts.push((objects[i].clone(), v.get(&individuals).clone()));
                    } else if !literals.is_empty() {
                        ind.data_facts.push((data[i - objects.len()].clone(), v.get(&literals).clone()));
                    }
                }
            }
            abox.individuals.insert(x.clone(), ind);
        }
        abox
    })
}

/// A random TBox with a closed ABox of one to eight individuals over four
/// properties (three object, one data).
pub fn scenario(monotone: bool) -> impl Strategy<Value = (Ontology, Abox)> {
    (1usize..=8).prop_flat_map(move |n| {
        let sig = Sig::new(n, 1);
        let onto_sig = sig.clone();
        let classes: Vec<String> = sig.classes.iter().chain(&sig.defined).cloned().collect();
        (
            labels(&sig),
            tbox(&sig, monotone),
            abox(sig.individuals.clone(), classes, sig.objects.clone(), sig.data.clone(), literal_pool()),
        )
            .prop_map(move |(labels, axioms, abox)| {
                let mut o = onto_sig.ontology(&labels);
                o.axioms = axioms;
                (o, abox)
            })
    })
}

/// Literals mentioned anywhere in the ontology's class expressions.
pub fn literals_of(onto: &Ontology) -> Vec<Literal> {
    let mut out = literal_pool();
    for ax in &onto.axioms {
        for e in ax.class_expressions() {
            for s in e.subexpressions() {
                let range = match s {
                    CE::DataSome(_, r) | CE::DataOnly(_, r) => Some(r),
                    CE::DataCardinality { range, .. } => range.as_ref(),
                    _ => None,
                };
                let lits: Vec<Literal> = match range {
                    Some(DataRange::Enumeration(l)) => l.clone(),
                    Some(DataRange::FacetRestriction { facets, .. }) => facets.iter().map(|(_, l)| l.clone()).collect(),
                    None => Vec::new(),
                };
                for l in lits {
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
            }
        }
    }
    out
}

/// Closed ABoxes over the signature of a compiled ontology.
pub fn abox_for(onto: &Ontology, max_individuals: usize) -> impl Strategy<Value = Abox> {
    let of = |k: EntityKind| onto.entities_of(k).map(|e| e.iri.clone()).collect::<Vec<_>>();
    let (classes, objects, data) = (of(EntityKind::Class), of(EntityKind::ObjectProperty), of(EntityKind::DataProperty));
    let literals = literals_of(onto);
    (1..=max_individuals).prop_flat_map(move |n| {
        let inds = (0..n).map(|i| format!("urn:abox#i{i}")).collect();
        abox(inds, classes.clone(), objects.clone(), data.clone(), literals.clone())
    })
}

/// Ontologies within the serialized fragment: labelled entities, class
/// definitions, n-ary equivalences, subclass axioms, property
/// equivalences, complex type assertions and facts.
pub fn roundtrip_ontology() -> impl Strategy<Value = Ontology> {
    (0usize..=4).prop_flat_map(|n| {
        let sig = Sig::new(n, 2);
        let s2 = sig.clone();
        let inds = sig.individuals.clone();
        let lits = literal_pool();
        (
            labels(&sig),
            tbox(&sig, false),
            prop::option::of(prop::collection::vec(expression(&sig), 3)),
            any::<bool>(),
            prop::collection::vec((any::<Index>(), expression(&sig)), if n == 0 { 0..=0 } else { 0..=3 }),
            prop::collection::vec((any::<Index>(), any::<Index>(), any::<Index>(), any::<bool>()), if n == 0 { 0..=0 } else { 0..=4 }),
        )
            .prop_map(move |(labels, mut axioms, nary, data_eq, types, facts)| {
                let mut o = s2.ontology(&labels);
                if let Some(ops) = nary {
                    axioms.push(Axiom::EquivalentClasses(ops));
                }
                if data_eq {
                    axioms.push(Axiom::EquivalentProperties {
                        first: s2.data[0].clone(),
                        second: s2.data[1].clone(),
                        kind: PropertyKind::Data,
                    });
                }
                for (i, class) in types {
                    axioms.push(Axiom::ClassAssertion { class, individual: i.get(&inds).clone() });
                }
                for (s, p, v, object) in facts {
                    let subject = s.get(&inds).clone();
                    axioms.push(if object {
                        Axiom::ObjectFact { subject, property: p.get(&s2.objects).clone(), object: v.get(&inds).clone() }
                    } else {
                        Axiom::DataFact { subject, property: p.get(&s2.data).clone(), value: v.get(&lits).clone() }
                    });
                }
                o.axioms = axioms;
                o
            })
    })
}

// ---- annotated documents with linguistic arrows ----

/// A one-sentence document of `words` tokens `w1 w2 ...` with the given
/// semantic-type spans and arrows.
pub fn document(words: u32, spans: &[(&str, u32, Vec<u32>)], arrows: &[(Arrow, u32, u32)]) -> AnnotatedDocument {
    let mut text = String::new();
    let mut tokens = Vec::new();
    for i in 1..=words {
        if i > 1 {
            text.push(' ');
        }
        let w = format!("w{i}");
        tokens.push(Token { sentence_index: 1, token_index: i, char_start: text.len(), char_end: text.len() + w.len(), text: w.clone() });
        text.push_str(&w);
    }
    let r = |id: u32| SpanRef { layer: Layer::SemType, span_id: id };
    AnnotatedDocument {
        source_text: text,
        tokens,
        spans: spans
            .iter()
            .map(|(tag, id, toks)| SpanAnnotation {
                layer: Layer::SemType,
                tag: tag.to_string(),
                span_id: *id,
                tokens: toks.iter().map(|t| TokenRef::new(1, *t)).collect(),
            })
            .collect(),
        relations: arrows.iter().map(|(a, s, t)| RelationAnnotation { arrow: *a, source: r(*s), target: r(*t) }).collect(),
    }
}

/// Consecutive token lists of the given lengths, starting at token 1.
fn lay_out(lengths: &[u32]) -> Vec<Vec<u32>> {
    let mut next = 1;
    lengths
        .iter()
        .map(|&n| {
            let v: Vec<u32> = (next..next + n).collect();
            next += n;
            v
        })
        .collect()
}

fn tokens_of(s: &SpanAnnotation) -> Vec<u32> {
    s.tokens.iter().map(|t| t.token).collect()
}

fn class_spans(doc: &AnnotatedDocument) -> Vec<Vec<u32>> {
    let mut v: Vec<Vec<u32>> = doc.spans.iter().filter(|s| s.tag == "Class").map(tokens_of).collect();
    v.sort();
    v
}

fn targets_of(doc: &AnnotatedDocument, arrow: Arrow, source_tag: &str) -> Vec<Vec<u32>> {
    let mut v: Vec<Vec<u32>> = doc
        .relations
        .iter()
        .filter(|r| r.arrow == arrow && doc.span(r.source).is_some_and(|s| s.tag == source_tag))
        .map(|r| tokens_of(doc.span(r.target).expect("relation target exists")))
        .collect();
    v.sort();
    v
}

fn token_counts(lists: &[Vec<u32>]) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for l in lists {
        for t in l {
            *m.entry(*t).or_insert(0) += 1;
        }
    }
    m
}

/// Class spans chained into concatenation paths, with a relation pointing
/// at one of them. Returns the document, the paths (span ids in order) and
/// the id the relation points at.
#[derive(Debug, Clone)]
pub struct ConcatCase {
    pub doc: AnnotatedDocument,
    pub paths: Vec<Vec<u32>>,
    pub spans: Vec<Vec<u32>>,
    pub pointed: u32,
}

pub fn concat_case() -> impl Strategy<Value = ConcatCase> {
    (2usize..=6)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(1u32..=2, n),
                Just((1..=n as u32).collect::<Vec<u32>>()).prop_shuffle(),
                prop::collection::vec(any::<bool>(), n - 1),
                1..=n as u32,
                any::<u64>(),
            )
        })
        .prop_map(|(lengths, order, cuts, pointed, seed)| {
            let spans = lay_out(&lengths);
            let mut paths: Vec<Vec<u32>> = vec![vec![order[0]]];
            for (id, cut) in order[1..].iter().zip(cuts) {
                if cut {
                    paths.push(vec![*id]);
                } else {
                    paths.last_mut().unwrap().push(*id);
                }
            }
            let mut arrows: Vec<(Arrow, u32, u32)> =
                paths.iter().flat_map(|p| p.windows(2).map(|w| (Arrow::Concatenation, w[0], w[1]))).collect();
            // Arrow order in the file must not matter.
            let len = arrows.len().max(1);
            arrows.rotate_left((seed as usize) % len);
            let rel = spans.len() as u32 + 1;
            arrows.push((Arrow::Domain, rel, pointed));
            let words = spans.iter().map(|s| s.len() as u32).sum::<u32>() + 1;
            let mut spec: Vec<(&str, u32, Vec<u32>)> =
                spans.iter().enumerate().map(|(i, t)| ("Class", i as u32 + 1, t.clone())).collect();
            spec.push(("Relation", rel, vec![words]));
            ConcatCase { doc: document(words, &spec, &arrows), paths, spans, pointed }
        })
}

/// Concatenated paths become single spans whose tokens follow the path, no
/// token is lost or duplicated, and the semantic arrow follows the merge.
pub fn check_concat(c: &ConcatCase) -> Result<(), String> {
    let out = apply_linguistic_arrows(&c.doc).map_err(|e| e.to_string())?;
    let tok = |id: u32| c.spans[id as usize - 1].clone();
    let mut want: Vec<Vec<u32>> = c.paths.iter().map(|p| p.iter().flat_map(|id| tok(*id)).collect()).collect();
    want.sort();
    let got = class_spans(&out);
    if got != want {
        return Err(format!("spans {got:?}, expected {want:?}"));
    }
    if token_counts(&got) != token_counts(&c.spans) {
        return Err("tokens not conserved".into());
    }
    let path = c.paths.iter().find(|p| p.contains(&c.pointed)).unwrap();
    let merged: Vec<u32> = path.iter().flat_map(|id| tok(*id)).collect();
    let domain = targets_of(&out, Arrow::Domain, "Relation");
    if domain != vec![merged] {
        return Err(format!("domain arrows {domain:?}"));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DistributionCase {
    pub doc: AnnotatedDocument,
    pub keep_source: bool,
    pub source: Vec<u32>,
    pub targets: Vec<Vec<u32>>,
    pub ranged: usize,
}

/// One source span distributed over `k` targets (1 to 4), with a relation
/// whose domain is the source and whose range is one target.
pub fn distribution_case(keep_source: bool) -> impl Strategy<Value = DistributionCase> {
    (1usize..=4)
        .prop_flat_map(|k| (prop::collection::vec(1u32..=2, k + 1), 0..k, any::<bool>()))
        .prop_map(move |(lengths, ranged, reverse)| {
            let spans = lay_out(&lengths);
            let k = spans.len() - 1;
            let arrow = if keep_source { Arrow::SelfDistribution } else { Arrow::Distribution };
            let rel = spans.len() as u32 + 1;
            let mut arrows: Vec<(Arrow, u32, u32)> = (2..=k as u32 + 1).map(|t| (arrow, 1, t)).collect();
            if reverse {
                arrows.reverse();
            }
            arrows.push((Arrow::Domain, rel, 1));
            arrows.push((Arrow::Range, rel, ranged as u32 + 2));
            let words = spans.iter().map(|s| s.len() as u32).sum::<u32>() + 1;
            let mut spec: Vec<(&str, u32, Vec<u32>)> =
                spans.iter().enumerate().map(|(i, t)| ("Class", i as u32 + 1, t.clone())).collect();
            spec.push(("Relation", rel, vec![words]));
            DistributionCase {
                doc: document(words, &spec, &arrows),
                keep_source,
                source: spans[0].clone(),
                targets: spans[1..].to_vec(),
                ranged,
            }
        })
}

/// Distribution yields one copy of the source per target (plus the source
/// itself when kept); arrows on the source reach every copy, arrows on a
/// target reach only its copy.
pub fn check_distribution(c: &DistributionCase) -> Result<(), String> {
    let out = apply_linguistic_arrows(&c.doc).map_err(|e| e.to_string())?;
    let join = |t: &Vec<u32>| c.source.iter().chain(t).copied().collect::<Vec<u32>>();
    let mut want: Vec<Vec<u32>> = c.targets.iter().map(join).collect();
    if c.keep_source {
        want.push(c.source.clone());
    }
    want.sort();
    let got = class_spans(&out);
    if got != want {
        return Err(format!("spans {got:?}, expected {want:?}"));
    }
    let k = c.targets.len() + usize::from(c.keep_source);
    let counts = token_counts(&got);
    if c.source.iter().any(|t| counts.get(t) != Some(&k)) {
        return Err(format!("source tokens should occur {k} times: {counts:?}"));
    }
    if c.targets.iter().flatten().any(|t| counts.get(t) != Some(&1)) {
        return Err("target tokens should occur once".into());
    }
    if targets_of(&out, Arrow::Domain, "Relation") != want {
        return Err("domain arrow not cloned onto every copy".into());
    }
    if targets_of(&out, Arrow::Range, "Relation") != vec![join(&c.targets[c.ranged])] {
        return Err("range arrow not moved onto the target's copy".into());
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MixedCase {
    pub doc: AnnotatedDocument,
    pub spans: Vec<Vec<u32>>,
    pub units: Vec<Vec<u32>>,
    pub source: usize,
    pub targets: Vec<usize>,
    pub keep_source: bool,
}

/// Concatenation paths followed by one (Self)Distribution between merged
/// units, with arrow endpoints on arbitrary members of each path.
pub fn mixed_case() -> impl Strategy<Value = MixedCase> {
    (3usize..=7)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(1u32..=2, n),
                Just((1..=n as u32).collect::<Vec<u32>>()).prop_shuffle(),
                prop::collection::vec(any::<bool>(), n - 1),
                any::<Index>(),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<Index>(), n),
                any::<bool>(),
            )
        })
        .prop_map(|(lengths, order, cuts, src, pick, members, keep_source)| {
            let spans = lay_out(&lengths);
            let mut units: Vec<Vec<u32>> = vec![vec![order[0]]];
            for (id, cut) in order[1..].iter().zip(cuts) {
                if cut {
                    units.push(vec![*id]);
                } else {
                    units.last_mut().unwrap().push(*id);
                }
            }
            let source = src.index(units.len());
            let targets: Vec<usize> = (0..units.len()).filter(|u| *u != source && pick[*u]).collect();
            let mut arrows: Vec<(Arrow, u32, u32)> =
                units.iter().flat_map(|p| p.windows(2).map(|w| (Arrow::Concatenation, w[0], w[1]))).collect();
            let member = |u: usize| *members[u].get(&units[u]);
            let arrow = if keep_source { Arrow::SelfDistribution } else { Arrow::Distribution };
            for &t in &targets {
                arrows.push((arrow, member(source), member(t)));
            }
            let words = spans.iter().map(|s| s.len() as u32).sum::<u32>();
            let spec: Vec<(&str, u32, Vec<u32>)> =
                spans.iter().enumerate().map(|(i, t)| ("Class", i as u32 + 1, t.clone())).collect();
            MixedCase { doc: document(words, &spec, &arrows), spans, units, source, targets, keep_source }
        })
}

/// Resolution succeeds, leaves no linguistic arrow, is a fixed point of
/// itself, and duplicates exactly the source unit's tokens.
pub fn check_mixed(c: &MixedCase) -> Result<(), String> {
    let once = apply_linguistic_arrows(&c.doc).map_err(|e| e.to_string())?;
    if once.relations.iter().any(|r| r.arrow.is_linguistic()) {
        return Err("linguistic arrows remain".into());
    }
    let twice = apply_linguistic_arrows(&once).map_err(|e| e.to_string())?;
    if twice != once {
        return Err("not idempotent".into());
    }
    let unit_tokens = |u: usize| -> Vec<u32> { c.units[u].iter().flat_map(|id| c.spans[*id as usize - 1].clone()).collect() };
    let copies = if c.targets.is_empty() { 1 } else { c.targets.len() + usize::from(c.keep_source) };
    let mut want = BTreeMap::new();
    for (u, _) in c.units.iter().enumerate() {
        let times = if u == c.source { copies } else { 1 };
        for t in unit_tokens(u) {
            *want.entry(t).or_insert(0) += times;
        }
    }
    let got = token_counts(&class_spans(&once));
    if got != want {
        return Err(format!("token counts {got:?}, expected {want:?}"));
    }
    Ok(())
}
