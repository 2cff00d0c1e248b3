//! Command-line front end.
//!
//! Exit codes: 0 success, 1 annotation errors or compliance violations,
//! 2 unreadable or unparseable input and evaluation errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::checker::{check_compliance, Abox, CheckOptions};
use crate::codegen::{check_document, compile, CompileConfig, CompileError, Defaults, Quantifier, DEFAULT_BASE_IRI};
use crate::manchester::{parse_manchester, parse_manchester_subset, to_manchester, Names, ParseOptions};
use crate::schema_check::{has_errors, to_json, to_lines, Code, Diagnostic, ValidateOptions};
use crate::tsv_ingest::parse_tsv;
use crate::vocab::{CardMap, ConstrMap, TermVocabulary, Vocabularies};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "regowl", version, about = "Compile annotated regulations to OWL and check data against them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an annotation export against the schema rules.
    Validate {
        tsv: PathBuf,
        #[command(flatten)]
        vocab: VocabArgs,
        /// Print diagnostics as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compile an annotation export (or a directory of them) to Manchester syntax.
    Compile {
        input: PathBuf,
        /// Output file, or output directory when the input is a directory.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        vocab: VocabArgs,
        #[arg(long, default_value = DEFAULT_BASE_IRI)]
        base_iri: String,
        /// Quantifier for unannotated predicates in the subject.
        #[arg(long, default_value = "some")]
        subject_default: Quantifier,
        /// Quantifier for unannotated predicates in the requirement.
        #[arg(long, default_value = "only")]
        requirement_default: Quantifier,
    },
    /// Classify the individuals of an ABox and report violated regulations.
    Check {
        ontology: PathBuf,
        abox: PathBuf,
        /// Close every individual on every property before evaluating.
        #[arg(long)]
        close: bool,
        /// Compare string literals exactly, including whitespace.
        #[arg(long)]
        strict_literals: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct VocabArgs {
    /// Term vocabulary: `LABEL<TAB>IRI[<TAB>KIND]` lines.
    #[arg(long)]
    terms: Option<PathBuf>,
    /// Number words: `PHRASE<TAB>N` lines, replacing the shipped map.
    #[arg(long)]
    card_map: Option<PathBuf>,
    /// Comparison phrases: `PHRASE<TAB>FACET` lines, replacing the shipped map.
    #[arg(long)]
    constr_map: Option<PathBuf>,
    /// Also report predicates that fall back to a default quantifier inside roles.
    #[arg(long)]
    pedantic: bool,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn error(message: impl Into<String>) -> Self {
        Failure { code: EXIT_ERROR, message: message.into() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

impl VocabArgs {
    fn load(&self) -> Result<(Vocabularies, ValidateOptions), Failure> {
        let mut v = Vocabularies::default();
        let bad = |p: &Path, e: &dyn std::fmt::Display| Failure::error(format!("{}: {e}", p.display()));
        if let Some(p) = &self.terms {
            v.terms = TermVocabulary::parse(&read(p)?).map_err(|e| bad(p, &e))?;
        }
        if let Some(p) = &self.card_map {
            v.card = CardMap::parse(&read(p)?).map_err(|e| bad(p, &e))?;
        }
        if let Some(p) = &self.constr_map {
            v.constr = ConstrMap::parse(&read(p)?).map_err(|e| bad(p, &e))?;
        }
        Ok((v, ValidateOptions { pedantic: self.pedantic }))
    }
}

/// Exit code for a failed compilation, with the text to print.
fn compile_failure(path: &Path, e: CompileError) -> Failure {
    match e {
        CompileError::Tsv(e) => Failure::error(format!("{}: {e}", path.display())),
        CompileError::Schema(diags) => Failure { code: EXIT_FAIL, message: to_lines(&diags).trim_end().to_string() },
        CompileError::Vocab(e) => Failure::error(format!("{}: {e}", path.display())),
        other => Failure { code: EXIT_FAIL, message: format!("{}: {other}", path.display()) },
    }
}

fn validate_cmd(tsv: &Path, vocab: &VocabArgs, json: bool) -> Result<i32, Failure> {
    let (vocab, validate) = vocab.load()?;
    let text = read(tsv)?;
    let doc = parse_tsv(&text).map_err(|e| Failure::error(format!("{}: {e}", tsv.display())))?;
    let config = CompileConfig { vocab, validate, ..CompileConfig::default() };
    let diags = match check_document(&doc, &config) {
        Ok((_, d)) => d,
        Err(CompileError::Preprocess(e)) => vec![Diagnostic::error(Code::ArrowStructure, None, e.to_string())],
        Err(e) => return Err(compile_failure(tsv, e)),
    };
    if json {
        println!("{}", to_json(&diags));
    } else {
        print!("{}", to_lines(&diags));
    }
    Ok(if has_errors(&diags) { EXIT_FAIL } else { EXIT_OK })
}

fn compile_one(path: &Path, config: &CompileConfig) -> Result<String, Failure> {
    let text = read(path)?;
    let doc = parse_tsv(&text).map_err(|e| compile_failure(path, e.into()))?;
    let compiled = compile(&doc, config).map_err(|e| compile_failure(path, e))?;
    for d in &compiled.diagnostics {
        eprintln!("{}: {d}", path.display());
    }
    to_manchester(&compiled.ontology).map_err(|e| Failure::error(format!("{}: {e}", path.display())))
}

/// Writes through a temporary sibling so a failed write leaves no file.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::error(format!("{}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let result = fs::File::create(&tmp).and_then(|mut f| f.write_all(contents.as_bytes())).and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

fn compile_cmd(input: &Path, output: Option<&Path>, config: &CompileConfig) -> Result<i32, Failure> {
    if !input.is_dir() {
        let text = compile_one(input, config)?;
        match output {
            Some(out) => write_atomic(out, &text)?,
            None => print!("{text}"),
        }
        return Ok(EXIT_OK);
    }
    let out_dir = output.ok_or_else(|| Failure::error("compiling a directory needs --output DIR"))?;
    let mut inputs: Vec<PathBuf> = fs::read_dir(input)
        .map_err(|e| Failure::error(format!("{}: {e}", input.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
        .collect();
    inputs.sort();
    let results: Vec<Result<String, Failure>> = std::thread::scope(|s| {
        let handles: Vec<_> = inputs.iter().map(|p| s.spawn(move || compile_one(p, config))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(Failure::error("worker panicked")))).collect()
    });
    let mut outputs = Vec::new();
    let mut worst = None;
    for (path, r) in inputs.iter().zip(results) {
        match r {
            Ok(text) => outputs.push((path, text)),
            Err(f) => {
                eprintln!("{}", f.message);
                worst = Some(worst.map_or(f.code, |w: i32| w.max(f.code)));
            }
        }
    }
    if let Some(code) = worst {
        return Ok(code);
    }
    fs::create_dir_all(out_dir).map_err(|e| Failure::error(format!("{}: {e}", out_dir.display())))?;
    for (path, text) in outputs {
        let stem = path.file_stem().unwrap_or_default();
        write_atomic(&out_dir.join(stem).with_extension("omn"), &text)?;
    }
    Ok(EXIT_OK)
}

fn check_cmd(ontology: &Path, abox: &Path, options: CheckOptions, json: bool) -> Result<i32, Failure> {
    let tbox = parse_manchester_subset(&read(ontology)?)
        .map_err(|e| Failure::error(format!("{}: {e}", ontology.display())))?;
    let data = parse_manchester(&read(abox)?, ParseOptions { context: Some(&tbox), default_namespace: None })
        .map_err(|e| Failure::error(format!("{}: {e}", abox.display())))?;
    let mut merged = tbox.clone();
    merged.merge(&data).map_err(|e| Failure::error(e.to_string()))?;
    let report =
        check_compliance(&merged, &Abox::from_ontology(&data), options).map_err(|e| Failure::error(e.to_string()))?;
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text(&Names::new(&merged)));
    }
    Ok(if report.consistent { EXIT_OK } else { EXIT_FAIL })
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Validate { tsv, vocab, json } => validate_cmd(tsv, vocab, *json),
        Command::Compile { input, output, vocab, base_iri, subject_default, requirement_default } => {
            vocab.load().and_then(|(vocab, validate)| {
                let config = CompileConfig {
                    base_iri: base_iri.clone(),
                    defaults: Defaults { subject: *subject_default, requirement: *requirement_default },
                    vocab,
                    validate,
                };
                compile_cmd(input, output.as_deref(), &config)
            })
        }
        Command::Check { ontology, abox, close, strict_literals, json } => {
            check_cmd(ontology, abox, CheckOptions { close: *close, strict_literals: *strict_literals }, *json)
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", f.message);
            f.code
        }
    }
}
