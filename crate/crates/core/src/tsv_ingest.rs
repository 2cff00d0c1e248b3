//! Reader for the WebAnno TSV 3.3 subset produced by the annotation schema.
//!
//! A file declares up to three span layers (terms, semantic types, semantic
//! roles) and any number of relation layers whose base type is one of them.
//! Each token row carries one column per declared feature. Span cells hold
//! `_`, `Tag` or `Tag[n]` (stacked values separated by `|`); relation cells
//! hold the arrow name on the row of the target span's token and the source
//! token address (`s-t` or `s-t[src_tgt]`) in the `BT_` column.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_LINE: &str = "#FORMAT=WebAnno TSV 3.3";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Layer {
    #[serde(rename = "TERM")]
    Term,
    #[serde(rename = "SEMTYPE")]
    SemType,
    #[serde(rename = "SEMROLE")]
    SemRole,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Term, Layer::SemType, Layer::SemRole];

    /// Maps a WebAnno layer name such as `webanno.custom.SemanticTypes` onto a
    /// schema layer. Only the last dotted segment is significant.
    pub fn from_layer_name(name: &str) -> Option<Layer> {
        let last = name.rsplit('.').next().unwrap_or(name).to_ascii_lowercase();
        let stem = last.strip_suffix('s').unwrap_or(&last);
        match stem {
            "term" => Some(Layer::Term),
            "semantictype" => Some(Layer::SemType),
            "semanticrole" => Some(Layer::SemRole),
            _ => None,
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::Term => "TERM",
            Layer::SemType => "SEMTYPE",
            Layer::SemRole => "SEMROLE",
        })
    }
}

/// Tags of the semantic-type layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SemanticType {
    Literal,
    Class,
    Not,
    Or,
    Relation,
    Property,
    Some,
    Only,
    Number,
    Comparison,
}

impl SemanticType {
    pub const ALL: [SemanticType; 10] = [
        SemanticType::Literal,
        SemanticType::Class,
        SemanticType::Not,
        SemanticType::Or,
        SemanticType::Relation,
        SemanticType::Property,
        SemanticType::Some,
        SemanticType::Only,
        SemanticType::Number,
        SemanticType::Comparison,
    ];

    pub fn is_predicate(self) -> bool {
        matches!(self, SemanticType::Relation | SemanticType::Property)
    }

    pub fn is_quantifier(self) -> bool {
        matches!(self, SemanticType::Some | SemanticType::Only | SemanticType::Number)
    }
}

impl FromStr for SemanticType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        SemanticType::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or(())
    }
}

impl fmt::Display for SemanticType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Subject,
    Requirement,
}

impl FromStr for Role {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "Subject" => Ok(Role::Subject),
            "Requirement" => Ok(Role::Requirement),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Arrow {
    Domain,
    Range,
    Of,
    To,
    Concatenation,
    Distribution,
    SelfDistribution,
}

impl Arrow {
    pub const ALL: [Arrow; 7] = [
        Arrow::Domain,
        Arrow::Range,
        Arrow::Of,
        Arrow::To,
        Arrow::Concatenation,
        Arrow::Distribution,
        Arrow::SelfDistribution,
    ];

    pub fn is_linguistic(self) -> bool {
        matches!(
            self,
            Arrow::Concatenation | Arrow::Distribution | Arrow::SelfDistribution
        )
    }

    /// Whether the arrow may be drawn between spans of `layer`.
    pub fn allowed_on(self, layer: Layer) -> bool {
        match self {
            Arrow::Domain | Arrow::Range | Arrow::Of => layer == Layer::SemType,
            Arrow::To => layer == Layer::SemRole,
            _ => true,
        }
    }
}

impl FromStr for Arrow {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let key: String = s.chars().filter(|c| *c != '-' && *c != '_').collect();
        Arrow::ALL
            .into_iter()
            .find(|a| format!("{a:?}").eq_ignore_ascii_case(&key))
            .ok_or(())
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Address of a token: 1-based sentence and token indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TokenRef {
    pub sentence: u32,
    pub token: u32,
}

impl TokenRef {
    pub fn new(sentence: u32, token: u32) -> Self {
        TokenRef { sentence, token }
    }
}

impl fmt::Display for TokenRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.sentence, self.token)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub sentence_index: u32,
    pub token_index: u32,
    /// Byte offsets into [`AnnotatedDocument::source_text`].
    pub char_start: usize,
    pub char_end: usize,
    pub text: String,
}

impl Token {
    pub fn token_ref(&self) -> TokenRef {
        TokenRef::new(self.sentence_index, self.token_index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanAnnotation {
    pub layer: Layer,
    pub tag: String,
    pub span_id: u32,
    pub tokens: Vec<TokenRef>,
}

impl SpanAnnotation {
    pub fn span_ref(&self) -> SpanRef {
        SpanRef { layer: self.layer, span_id: self.span_id }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpanRef {
    pub layer: Layer,
    pub span_id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationAnnotation {
    pub arrow: Arrow,
    pub source: SpanRef,
    pub target: SpanRef,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedDocument {
    pub source_text: String,
    pub tokens: Vec<Token>,
    pub spans: Vec<SpanAnnotation>,
    pub relations: Vec<RelationAnnotation>,
}

impl AnnotatedDocument {
    pub fn span(&self, r: SpanRef) -> Option<&SpanAnnotation> {
        self.spans
            .iter()
            .find(|s| s.layer == r.layer && s.span_id == r.span_id)
    }

    pub fn token(&self, r: TokenRef) -> Option<&Token> {
        self.tokens
            .binary_search_by(|t| t.token_ref().cmp(&r))
            .ok()
            .map(|i| &self.tokens[i])
    }

    pub fn spans_in(&self, layer: Layer) -> impl Iterator<Item = &SpanAnnotation> {
        self.spans.iter().filter(move |s| s.layer == layer)
    }

    /// Token texts of `tokens` joined by single spaces.
    pub fn surface(&self, tokens: &[TokenRef]) -> String {
        tokens
            .iter()
            .filter_map(|t| self.token(*t))
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TsvError {
    #[error("line {line}: expected `{FORMAT_LINE}` header")]
    MissingHeader { line: usize },
    #[error("line {line}: layer `{name}` is not one of the schema layers")]
    UnknownLayer { line: usize, name: String },
    #[error("line {line}: reference `{reference}` does not resolve to a span")]
    DanglingReference { line: usize, reference: String },
    #[error("line {line}: expected token {expected}, found {found}")]
    IndexGap { line: usize, expected: String, found: String },
    #[error("line {line}, column {column}: bad cell `{cell}`: {reason}")]
    BadCell {
        line: usize,
        column: usize,
        cell: String,
        reason: String,
    },
}

#[derive(Debug, Clone)]
enum LayerDecl {
    Span { layer: Layer, columns: usize },
    Relation { base: Layer, columns: usize },
}

impl LayerDecl {
    fn columns(&self) -> usize {
        match self {
            LayerDecl::Span { columns, .. } | LayerDecl::Relation { columns, .. } => *columns,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum SpanKey {
    Explicit(u32),
    Anonymous(u32),
}

#[derive(Debug)]
struct SpanPiece {
    tag: String,
    tokens: Vec<TokenRef>,
    line: usize,
}

#[derive(Debug)]
struct PendingRelation {
    line: usize,
    column: usize,
    base: Layer,
    arrow: Arrow,
    source_token: TokenRef,
    source_id: u32,
    target_token: TokenRef,
    target_id: u32,
    cell: String,
}

struct Sentence {
    text: String,
    rows: Vec<(usize, Token, usize, usize)>, // line, token, tsv char start, tsv char end
}

fn bad(line: usize, column: usize, cell: &str, reason: impl Into<String>) -> TsvError {
    TsvError::BadCell {
        line,
        column,
        cell: cell.to_string(),
        reason: reason.into(),
    }
}

fn parse_token_ref(s: &str) -> Option<TokenRef> {
    let (a, b) = s.split_once('-')?;
    let sentence = a.parse().ok().filter(|n| *n > 0)?;
    let token = b.parse().ok().filter(|n| *n > 0)?;
    Some(TokenRef { sentence, token })
}

/// `Tag` or `Tag[n]`.
fn parse_span_value(v: &str) -> Option<(String, Option<u32>)> {
    let (tag, id) = match v.strip_suffix(']') {
        Some(rest) => {
            let (tag, id) = rest.rsplit_once('[')?;
            (tag, Some(id.parse::<u32>().ok().filter(|n| *n > 0)?))
        }
        None => (v, None),
    };
    let ok = !tag.is_empty()
        && tag != "_"
        && tag != "*"
        && !tag.contains(['[', ']', '|', '\t']);
    ok.then(|| (tag.to_string(), id))
}

/// `s-t` or `s-t[src_tgt]`.
fn parse_bt_value(v: &str) -> Option<(TokenRef, u32, u32)> {
    match v.strip_suffix(']') {
        Some(rest) => {
            let (addr, ids) = rest.split_once('[')?;
            let (a, b) = ids.split_once('_')?;
            Some((parse_token_ref(addr)?, a.parse().ok()?, b.parse().ok()?))
        }
        None => Some((parse_token_ref(v)?, 0, 0)),
    }
}

/// Parses a WebAnno TSV 3.3 export into an [`AnnotatedDocument`].
pub fn parse_tsv(input: &str) -> Result<AnnotatedDocument, TsvError> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let lines: Vec<&str> = input
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();

    let mut idx = 0;
    while idx < lines.len() && lines[idx].trim().is_empty() {
        idx += 1;
    }
    if idx >= lines.len() || lines[idx].trim() != FORMAT_LINE {
        return Err(TsvError::MissingHeader { line: idx + 1 });
    }
    idx += 1;

    // Layer declarations.
    let mut decls: Vec<LayerDecl> = Vec::new();
    let mut span_names: HashMap<String, Layer> = HashMap::new();
    while idx < lines.len() {
        let line = lines[idx];
        let lineno = idx + 1;
        if let Some(rest) = line.strip_prefix("#T_SP=") {
            let mut parts = rest.split('|');
            let name = parts.next().unwrap_or_default();
            let layer = Layer::from_layer_name(name).ok_or_else(|| TsvError::UnknownLayer {
                line: lineno,
                name: name.to_string(),
            })?;
            if decls
                .iter()
                .any(|d| matches!(d, LayerDecl::Span { layer: l, .. } if *l == layer))
            {
                return Err(TsvError::UnknownLayer { line: lineno, name: format!("{name} (declared twice)") });
            }
            span_names.insert(name.to_string(), layer);
            let columns = parts.count().max(1);
            decls.push(LayerDecl::Span { layer, columns });
        } else if let Some(rest) = line.strip_prefix("#T_RL=") {
            let parts: Vec<&str> = rest.split('|').collect();
            let name = parts[0];
            let base_name = parts
                .last()
                .and_then(|p| p.strip_prefix("BT_"))
                .filter(|_| parts.len() >= 3)
                .ok_or_else(|| TsvError::UnknownLayer { line: lineno, name: name.to_string() })?;
            let base = *span_names.get(base_name).ok_or_else(|| TsvError::UnknownLayer {
                line: lineno,
                name: format!("{name} (base {base_name})"),
            })?;
            decls.push(LayerDecl::Relation { base, columns: parts.len() - 1 });
        } else if let Some(rest) = line.strip_prefix("#T_CH=") {
            let name = rest.split('|').next().unwrap_or_default();
            return Err(TsvError::UnknownLayer { line: lineno, name: name.to_string() });
        } else if line.trim().is_empty() {
            // header block ends at the first #Text line
        } else {
            break;
        }
        idx += 1;
    }
    let expected_columns = 3 + decls.iter().map(LayerDecl::columns).sum::<usize>();

    // Sentences and rows.
    let mut sentences: Vec<Sentence> = Vec::new();
    let mut pieces: BTreeMap<(Layer, SpanKey), SpanPiece> = BTreeMap::new();
    let mut anon = 0u32;
    let mut pending: Vec<PendingRelation> = Vec::new();
    let mut in_text_block = false;

    while idx < lines.len() {
        let line = lines[idx];
        let lineno = idx + 1;
        idx += 1;
        if let Some(text) = line.strip_prefix("#Text=") {
            if in_text_block {
                let s = sentences.last_mut().expect("text block open");
                s.text.push('\n');
                s.text.push_str(text);
            } else {
                sentences.push(Sentence { text: text.to_string(), rows: Vec::new() });
                in_text_block = true;
            }
            continue;
        }
        in_text_block = false;
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with('#') {
            return Err(bad(lineno, 1, line, "unexpected header line in body"));
        }
        let mut cells: Vec<&str> = line.split('\t').collect();
        if cells.len() == expected_columns + 1 && cells.last() == Some(&"") {
            cells.pop();
        }
        if cells.len() != expected_columns {
            return Err(bad(
                lineno,
                cells.len().min(expected_columns) + 1,
                line,
                format!("expected {expected_columns} columns, found {}", cells.len()),
            ));
        }
        let sentence_no = sentences.len() as u32;
        let Some(sentence) = sentences.last_mut() else {
            return Err(bad(lineno, 1, cells[0], "token row before any #Text line"));
        };
        let tref = parse_token_ref(cells[0])
            .ok_or_else(|| bad(lineno, 1, cells[0], "token id must be `sentence-token`"))?;
        let expected = TokenRef::new(sentence_no, sentence.rows.len() as u32 + 1);
        if tref != expected {
            return Err(TsvError::IndexGap {
                line: lineno,
                expected: expected.to_string(),
                found: tref.to_string(),
            });
        }
        let (start, end) = cells[1]
            .split_once('-')
            .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
            .filter(|(a, b)| a < b)
            .ok_or_else(|| bad(lineno, 2, cells[1], "offsets must be `start-end` with start < end"))?;
        let text = cells[2];
        if text.is_empty() {
            return Err(bad(lineno, 3, text, "empty token"));
        }
        sentence.rows.push((
            lineno,
            Token {
                sentence_index: tref.sentence,
                token_index: tref.token,
                char_start: 0,
                char_end: 0,
                text: text.to_string(),
            },
            start,
            end,
        ));

        let mut col = 3;
        for decl in &decls {
            match decl {
                LayerDecl::Span { layer, .. } => {
                    let cell = cells[col];
                    if cell != "_" {
                        let mut seen_tags: Vec<&str> = Vec::new();
                        for value in cell.split('|') {
                            let (tag, id) = parse_span_value(value).ok_or_else(|| {
                                bad(lineno, col + 1, cell, "expected `_`, `Tag` or `Tag[n]`")
                            })?;
                            check_tag(*layer, &tag)
                                .map_err(|reason| bad(lineno, col + 1, cell, reason))?;
                            if seen_tags.contains(&value.split('[').next().unwrap_or(value)) {
                                return Err(bad(lineno, col + 1, cell, "overlapping spans with the same tag"));
                            }
                            seen_tags.push(value.split('[').next().unwrap_or(value));
                            let key = match id {
                                Some(n) => SpanKey::Explicit(n),
                                None => {
                                    anon += 1;
                                    SpanKey::Anonymous(anon)
                                }
                            };
                            let piece = pieces.entry((*layer, key)).or_insert_with(|| SpanPiece {
                                tag: tag.clone(),
                                tokens: Vec::new(),
                                line: lineno,
                            });
                            if piece.tag != tag {
                                return Err(bad(
                                    lineno,
                                    col + 1,
                                    cell,
                                    format!("span id reused with tag `{}`", piece.tag),
                                ));
                            }
                            if piece.tokens.contains(&tref) {
                                return Err(bad(lineno, col + 1, cell, "span id repeated on one token"));
                            }
                            piece.tokens.push(tref);
                        }
                    }
                }
                LayerDecl::Relation { base, columns } => {
                    let arrow_cell = cells[col];
                    let bt_cell = cells[col + columns - 1];
                    if arrow_cell != "_" || bt_cell != "_" {
                        let arrows: Vec<&str> = arrow_cell.split('|').collect();
                        let bts: Vec<&str> = bt_cell.split('|').collect();
                        if arrows.len() != bts.len() {
                            return Err(bad(lineno, col + 1, arrow_cell, "arrow and BT cells disagree in arity"));
                        }
                        for (a, b) in arrows.into_iter().zip(bts) {
                            let arrow: Arrow = a
                                .parse()
                                .map_err(|_| bad(lineno, col + 1, a, "unknown arrow"))?;
                            if !arrow.allowed_on(*base) {
                                return Err(bad(
                                    lineno,
                                    col + 1,
                                    a,
                                    format!("arrow {arrow} is not allowed on layer {base}"),
                                ));
                            }
                            let (source_token, source_id, target_id) = parse_bt_value(b).ok_or_else(|| {
                                bad(lineno, col + columns, b, "expected `s-t` or `s-t[src_tgt]`")
                            })?;
                            pending.push(PendingRelation {
                                line: lineno,
                                column: col + columns,
                                base: *base,
                                arrow,
                                source_token,
                                source_id,
                                target_token: tref,
                                target_id,
                                cell: b.to_string(),
                            });
                        }
                    }
                }
            }
            col += decl.columns();
        }
    }

    // Assemble source text and byte offsets from the sentence blocks.
    let mut source_text = String::new();
    let mut tokens = Vec::new();
    for sentence in sentences {
        if !source_text.is_empty() {
            source_text.push('\n');
        }
        let base_byte = source_text.len();
        let chars: Vec<(usize, char)> = sentence.text.char_indices().collect();
        let byte_at = |ci: usize| chars.get(ci).map_or(sentence.text.len(), |(b, _)| *b);
        if let Some((_, first, first_start, _)) = sentence.rows.first() {
            let lead = sentence
                .text
                .find(first.text.as_str())
                .map(|b| sentence.text[..b].chars().count())
                .unwrap_or(0);
            let origin = first_start.checked_sub(lead);
            for (lineno, mut token, start, end) in sentence.rows.iter().cloned() {
                let rel = origin
                    .and_then(|o| Some((start.checked_sub(o)?, end.checked_sub(o)?)))
                    .filter(|(_, e)| *e <= chars.len());
                let Some((rs, re)) = rel else {
                    return Err(bad(lineno, 2, &format!("{start}-{end}"), "offsets fall outside the #Text line"));
                };
                let (bs, be) = (byte_at(rs), byte_at(re));
                if sentence.text[bs..be] != token.text {
                    return Err(bad(
                        lineno,
                        2,
                        &format!("{start}-{end}"),
                        format!("offsets select `{}`, not `{}`", &sentence.text[bs..be], token.text),
                    ));
                }
                token.char_start = base_byte + bs;
                token.char_end = base_byte + be;
                tokens.push(token);
            }
        }
        source_text.push_str(&sentence.text);
    }

    // Assign ids to anonymous spans after the explicit ones of each layer.
    let mut next_id: HashMap<Layer, u32> = HashMap::new();
    for (layer, key) in pieces.keys() {
        if let SpanKey::Explicit(n) = key {
            let e = next_id.entry(*layer).or_insert(0);
            *e = (*e).max(*n);
        }
    }
    let mut ordered: Vec<((Layer, SpanKey), SpanPiece)> = pieces.into_iter().collect();
    ordered.sort_by_key(|((layer, key), piece)| (piece.line, *layer, *key));
    let mut spans = Vec::with_capacity(ordered.len());
    for ((layer, key), piece) in ordered {
        let span_id = match key {
            SpanKey::Explicit(n) => n,
            SpanKey::Anonymous(_) => {
                let e = next_id.entry(layer).or_insert(0);
                *e += 1;
                *e
            }
        };
        spans.push(SpanAnnotation { layer, tag: piece.tag, span_id, tokens: piece.tokens });
    }

    let resolve = |layer: Layer, token: TokenRef, id: u32, rel: &PendingRelation| -> Result<SpanRef, TsvError> {
        let dangling = || TsvError::DanglingReference {
            line: rel.line,
            reference: if id == 0 { format!("{layer} span at {token}") } else { format!("{layer} span {id} ({})", rel.cell) },
        };
        if id != 0 {
            let span = spans
                .iter()
                .find(|s| s.layer == layer && s.span_id == id)
                .ok_or_else(dangling)?;
            if !span.tokens.contains(&token) {
                return Err(dangling());
            }
            return Ok(span.span_ref());
        }
        let mut covering = spans
            .iter()
            .filter(|s| s.layer == layer && s.tokens.contains(&token));
        let first = covering.next().ok_or_else(dangling)?;
        if covering.next().is_some() {
            return Err(bad(rel.line, rel.column, &rel.cell, "ambiguous span reference; use `s-t[src_tgt]`"));
        }
        Ok(first.span_ref())
    };

    let mut relations = Vec::with_capacity(pending.len());
    for rel in &pending {
        let source = resolve(rel.base, rel.source_token, rel.source_id, rel)?;
        let target = resolve(rel.base, rel.target_token, rel.target_id, rel)?;
        relations.push(RelationAnnotation { arrow: rel.arrow, source, target });
    }

    Ok(AnnotatedDocument { source_text, tokens, spans, relations })
}

fn check_tag(layer: Layer, tag: &str) -> Result<(), String> {
    match layer {
        Layer::Term => Ok(()),
        Layer::SemType => tag
            .parse::<SemanticType>()
            .map(|_| ())
            .map_err(|_| format!("`{tag}` is not a semantic type")),
        Layer::SemRole => tag
            .parse::<Role>()
            .map(|_| ())
            .map_err(|_| format!("`{tag}` is not a semantic role")),
    }
}
