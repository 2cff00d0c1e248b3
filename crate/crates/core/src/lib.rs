//! Compiler from WebAnno TSV regulation annotations to OWL DL, with a
//! closed-world compliance checker.
//!
//! The pipeline runs [`tsv_ingest::parse_tsv`], [`preprocess`],
//! [`schema_check::validate`] and [`codegen::compile`]; the result is
//! written with [`manchester::to_manchester`] and checked against an ABox
//! with [`checker::check_compliance`].

pub mod checker;
pub mod cli;
pub mod codegen;
pub mod manchester;
pub mod owl;
pub mod preprocess;
pub mod schema_check;
pub mod tsv_ingest;
pub mod vocab;
