//! Phrase vocabularies: cardinality words, comparison phrases and the term
//! vocabulary that maps Term-layer labels onto IRIs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::owl::{EntityKind, Facet};

const DEFAULT_CARD: &str = include_str!("../data/card.tsv");
const DEFAULT_CONSTR: &str = include_str!("../data/constr.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("no cardinality for phrase `{0}`")]
    UnmappedCardPhrase(String),
    #[error("no comparison for phrase `{0}`")]
    UnmappedConstrPhrase(String),
    #[error("line {line}: {reason}")]
    BadLine { line: usize, reason: String },
}

/// Lowercases and collapses whitespace runs to single spaces.
pub fn normalize_phrase(phrase: &str) -> String {
    phrase
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Non-comment, non-blank lines split at the first tab.
fn entries(text: &str) -> impl Iterator<Item = Result<(usize, &str, &str), VocabError>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            return None;
        }
        Some(match line.split_once('\t') {
            Some((k, v)) => Ok((i + 1, k, v)),
            None => Err(VocabError::BadLine { line: i + 1, reason: "expected `phrase<TAB>value`".into() }),
        })
    })
}

fn insert_unique<V>(map: &mut BTreeMap<String, V>, line: usize, key: String, value: V) -> Result<(), VocabError> {
    if key.is_empty() {
        return Err(VocabError::BadLine { line, reason: "empty phrase".into() });
    }
    if map.contains_key(&key) {
        return Err(VocabError::BadLine { line, reason: format!("duplicate phrase `{key}`") });
    }
    map.insert(key, value);
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CardMap {
    entries: BTreeMap<String, u64>,
}

impl CardMap {
    pub fn parse(text: &str) -> Result<Self, VocabError> {
        let mut map = BTreeMap::new();
        for entry in entries(text) {
            let (line, phrase, value) = entry?;
            let n = value.trim().parse::<u64>().map_err(|_| VocabError::BadLine {
                line,
                reason: format!("`{value}` is not a non-negative integer"),
            })?;
            insert_unique(&mut map, line, normalize_phrase(phrase), n)?;
        }
        Ok(CardMap { entries: map })
    }

    pub fn insert(&mut self, phrase: &str, n: u64) {
        self.entries.insert(normalize_phrase(phrase), n);
    }

    pub fn lookup(&self, phrase: &str) -> Result<u64, VocabError> {
        let key = normalize_phrase(phrase);
        if let Some(n) = self.entries.get(&key) {
            return Ok(*n);
        }
        if !key.is_empty() && key.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(n) = key.parse() {
                return Ok(n);
            }
        }
        Err(VocabError::UnmappedCardPhrase(phrase.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}\t{v}");
        }
        out
    }
}

/// English number words one to twenty.
pub fn default_card_map() -> CardMap {
    CardMap::parse(DEFAULT_CARD).expect("bundled card map is valid")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstrMap {
    entries: BTreeMap<String, Facet>,
}

impl ConstrMap {
    pub fn parse(text: &str) -> Result<Self, VocabError> {
        let mut map = BTreeMap::new();
        for entry in entries(text) {
            let (line, phrase, value) = entry?;
            let facet = Facet::from_keyword(value.trim()).ok_or_else(|| VocabError::BadLine {
                line,
                reason: format!("`{value}` is not a facet keyword"),
            })?;
            insert_unique(&mut map, line, normalize_phrase(phrase), facet)?;
        }
        Ok(ConstrMap { entries: map })
    }

    pub fn insert(&mut self, phrase: &str, facet: Facet) {
        self.entries.insert(normalize_phrase(phrase), facet);
    }

    pub fn lookup(&self, phrase: &str) -> Result<Facet, VocabError> {
        self.entries
            .get(&normalize_phrase(phrase))
            .copied()
            .ok_or_else(|| VocabError::UnmappedConstrPhrase(phrase.to_string()))
    }

    /// Longest mapped phrase that prefixes `phrase` on a word boundary, with
    /// the remaining words.
    pub fn split_prefix(&self, phrase: &str) -> Option<(Facet, String)> {
        let words: Vec<String> = normalize_phrase(phrase).split(' ').map(str::to_string).collect();
        (1..=words.len()).rev().find_map(|k| {
            let head = words[..k].join(" ");
            self.entries.get(&head).map(|f| (*f, words[k..].join(" ")))
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Facet)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}\t{}", v.keyword());
        }
        out
    }
}

pub fn default_constr_map() -> ConstrMap {
    ConstrMap::parse(DEFAULT_CONSTR).expect("bundled constr map is valid")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub iri: String,
    /// Optional third column: `Class`, `ObjectProperty` or `DataProperty`.
    pub kind: Option<EntityKind>,
}

/// `LABEL<TAB>IRI[<TAB>KIND]` per line. Labels are matched exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermVocabulary {
    entries: BTreeMap<String, Term>,
}

impl TermVocabulary {
    pub fn parse(text: &str) -> Result<Self, VocabError> {
        let mut map = BTreeMap::new();
        for entry in entries(text) {
            let (line, label, rest) = entry?;
            let mut cols = rest.split('\t').map(str::trim);
            let iri = cols.next().filter(|s| !s.is_empty()).ok_or_else(|| VocabError::BadLine {
                line,
                reason: "missing IRI".into(),
            })?;
            let kind = match cols.next() {
                None | Some("") => None,
                Some("Class") => Some(EntityKind::Class),
                Some("ObjectProperty") => Some(EntityKind::ObjectProperty),
                Some("DataProperty") => Some(EntityKind::DataProperty),
                Some(other) => {
                    return Err(VocabError::BadLine { line, reason: format!("unknown kind `{other}`") })
                }
            };
            insert_unique(&mut map, line, label.trim().to_string(), Term { iri: iri.to_string(), kind })?;
        }
        Ok(TermVocabulary { entries: map })
    }

    pub fn get(&self, label: &str) -> Option<&Term> {
        self.entries.get(label.trim())
    }

    pub fn insert(&mut self, label: &str, iri: &str, kind: Option<EntityKind>) {
        self.entries.insert(label.trim().to_string(), Term { iri: iri.to_string(), kind });
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The three vocabularies used by a compilation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabularies {
    pub terms: TermVocabulary,
    pub card: CardMap,
    pub constr: ConstrMap,
}

impl Default for Vocabularies {
    fn default() -> Self {
        Vocabularies {
            terms: TermVocabulary::default(),
            card: default_card_map(),
            constr: default_constr_map(),
        }
    }
}
