//! Hand-transcribed expected trees for the two worked examples.

use regowl::codegen::Quantifier;
use regowl::owl::{Axiom, ClassExpression as CE, DataRange, Datatype, Facet, Literal, PropertyKind};

pub const REG: &str = "https://example.org/regulation#";
pub const IFC: &str = "https://example.org/ifc#";

pub fn r(local: &str) -> String {
    format!("{REG}{local}")
}

pub fn n(local: &str) -> CE {
    CE::named(r(local))
}

fn restrict(q: Quantifier, p: &str, filler: CE) -> CE {
    match q {
        Quantifier::Some => CE::some(r(p), filler),
        Quantifier::Only => CE::only(r(p), filler),
    }
}

fn data(q: Quantifier, p: &str, range: DataRange) -> CE {
    match q {
        Quantifier::Some => CE::DataSome(r(p), range),
        Quantifier::Only => CE::DataOnly(r(p), range),
    }
}

pub fn sorted(axioms: &[Axiom]) -> Vec<Axiom> {
    let mut v: Vec<Axiom> = axioms.iter().map(Axiom::canonical).collect();
    v.sort();
    v
}

pub fn example1(q: Quantifier) -> Vec<Axiom> {
    let subject = n("if_the_degree_of_fire_resistance_of_a_building_is_iii_the_beams_in_it");
    let requirement = n("the_fire_resistance_limit_should_be_r15");
    let iii = DataRange::one_of(vec![Literal::string("III")]);
    let r15 = DataRange::one_of(vec![Literal::string("R15")]);
    let eq_data = |a: &str, b: &str| Axiom::EquivalentProperties {
        first: format!("{IFC}{a}"),
        second: r(b),
        kind: PropertyKind::Data,
    };
    vec![
        Axiom::EquivalentClasses(vec![CE::named(format!("{IFC}IfcBeam")), n("beams")]),
        Axiom::EquivalentClasses(vec![CE::named(format!("{IFC}IfcBuilding")), n("building")]),
        eq_data("FireSafety", "degree_of_fire_resistance"),
        eq_data("FireProtection", "fire_resistance_limit"),
        Axiom::EquivalentClasses(vec![
            subject.clone(),
            CE::and(vec![
                n("beams"),
                restrict(q, "in", CE::and(vec![n("building"), data(q, "degree_of_fire_resistance", iii)])),
            ]),
        ]),
        Axiom::EquivalentClasses(vec![requirement.clone(), CE::DataOnly(r("fire_resistance_limit"), r15)]),
        Axiom::SubClassOf { sub: subject, sup: requirement },
    ]
}

pub fn example2() -> Vec<Axiom> {
    let int = |v: &str| Literal::new(v, Datatype::Integer).unwrap();
    let float = |v: &str| Literal::new(v, Datatype::Float).unwrap();
    let subject = n("for_buildings_with_a_capacity_of_not_more_than_300_students_classrooms");
    let requirement = n("height_must_be_at_least_3_0_m");
    let capacity = DataRange::restricted(Datatype::Integer, vec![(Facet::MaxInclusive, int("300"))]).unwrap();
    let height = DataRange::restricted(Datatype::Float, vec![(Facet::MinInclusive, float("3.0"))]).unwrap();
    vec![
        Axiom::EquivalentClasses(vec![CE::named(format!("{IFC}IfcBuilding")), n("buildings")]),
        Axiom::EquivalentClasses(vec![
            subject.clone(),
            CE::and(vec![n("classrooms"), CE::some(r("for"), CE::and(vec![n("buildings"), CE::DataSome(r("capacity"), capacity)]))]),
        ]),
        Axiom::EquivalentClasses(vec![requirement.clone(), CE::DataOnly(r("height"), height)]),
        Axiom::SubClassOf { sub: subject, sup: requirement },
    ]
}
