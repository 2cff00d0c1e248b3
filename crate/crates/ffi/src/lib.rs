//! C ABI over the regowl compiler and compliance checker.
//!
//! All text crosses the boundary as NUL-terminated UTF-8. Strings returned
//! through `out` parameters are owned by the caller and must be released
//! with `regowl_string_free`. When a call fails, a description of the
//! failure is available from `regowl_last_error_message` on the same thread
//! until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use regowl::checker::{check_compliance, Abox, CheckOptions};
use regowl::codegen::{check_document, compile, CompileConfig, CompileError, Quantifier};
use regowl::manchester::{parse_manchester, parse_manchester_subset, to_manchester, ParseOptions};
use regowl::schema_check::{has_errors, to_json, Code, Diagnostic};
use regowl::tsv_ingest::parse_tsv;
use regowl::vocab::{CardMap, ConstrMap, TermVocabulary};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegowlStatus {
    Ok = 0,
    /// A null pointer, invalid UTF-8 or an unknown option value.
    InvalidArgument = 1,
    /// Input text that could not be parsed.
    ParseError = 2,
    /// The annotation breaks schema rules; diagnostics were produced.
    SchemaError = 3,
    /// The annotation is valid but cannot be compiled.
    CompileError = 4,
    /// Evaluation failed, e.g. on an individual not closed on a property.
    CheckError = 5,
    /// The check ran and found violations.
    Violations = 6,
    /// An internal error; the library caught a panic.
    Panic = 7,
}

/// Close every individual before checking.
pub const REGOWL_CHECK_CLOSE: u32 = 1;
/// Compare string literals exactly.
pub const REGOWL_CHECK_STRICT_LITERALS: u32 = 2;

/// Compiler settings: base IRI, default quantifiers and vocabularies.
pub struct RegowlCompiler {
    config: CompileConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(RegowlStatus, String);

fn guard(f: impl FnOnce() -> Result<RegowlStatus, Fail>) -> RegowlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            RegowlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(RegowlStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(RegowlStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn compiler<'a>(c: *mut RegowlCompiler) -> Result<&'a mut RegowlCompiler, Fail> {
    c.as_mut().ok_or_else(|| Fail(RegowlStatus::InvalidArgument, "compiler is null".into()))
}

unsafe fn emit(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(RegowlStatus::InvalidArgument, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| Fail(RegowlStatus::Panic, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn invalid(e: impl std::fmt::Display) -> Fail {
    Fail(RegowlStatus::InvalidArgument, e.to_string())
}

fn parse_failure(e: impl std::fmt::Display) -> Fail {
    Fail(RegowlStatus::ParseError, e.to_string())
}

fn compile_failure(e: CompileError) -> Fail {
    match e {
        CompileError::Tsv(e) => parse_failure(e),
        CompileError::Schema(d) => Fail(RegowlStatus::SchemaError, to_json(&d)),
        other => Fail(RegowlStatus::CompileError, other.to_string()),
    }
}

/// A compiler with the default base IRI, quantifiers and shipped maps.
/// Returns null only if allocation panics.
#[no_mangle]
pub extern "C" fn regowl_compiler_new() -> *mut RegowlCompiler {
    catch_unwind(|| Box::into_raw(Box::new(RegowlCompiler { config: CompileConfig::default() })))
        .unwrap_or(ptr::null_mut())
}

/// # Safety
/// `c` must be null or a pointer from `regowl_compiler_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn regowl_compiler_free(c: *mut RegowlCompiler) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live compiler and `iri` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn regowl_compiler_set_base_iri(c: *mut RegowlCompiler, iri: *const c_char) -> RegowlStatus {
    guard(|| {
        let iri = text(iri, "iri")?;
        if iri.trim().is_empty() {
            return Err(invalid("base IRI is empty"));
        }
        compiler(c)?.config.base_iri = iri.to_string();
        Ok(RegowlStatus::Ok)
    })
}

/// `quantifier` is `"some"` or `"only"`.
///
/// # Safety
/// `c` must be a live compiler and `quantifier` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn regowl_compiler_set_subject_default(
    c: *mut RegowlCompiler,
    quantifier: *const c_char,
) -> RegowlStatus {
    guard(|| {
        let q: Quantifier = text(quantifier, "quantifier")?.parse().map_err(invalid)?;
        compiler(c)?.config.defaults.subject = q;
        Ok(RegowlStatus::Ok)
    })
}

/// `quantifier` is `"some"` or `"only"`.
///
/// # Safety
/// `c` must be a live compiler and `quantifier` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn regowl_compiler_set_requirement_default(
    c: *mut RegowlCompiler,
    quantifier: *const c_char,
) -> RegowlStatus {
    guard(|| {
        let q: Quantifier = text(quantifier, "quantifier")?.parse().map_err(invalid)?;
        compiler(c)?.config.defaults.requirement = q;
        Ok(RegowlStatus::Ok)
    })
}

/// Replaces the term vocabulary with the contents of a terms file.
///
/// # Safety
/// `c` must be a live compiler and `contents` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn regowl_compiler_load_terms(c: *mut RegowlCompiler, contents: *const c_char) -> RegowlStatus {
    guard(|| {
        let terms = TermVocabulary::parse(text(contents, "contents")?).map_err(parse_failure)?;
        compiler(c)?.config.vocab.terms = terms;
        Ok(RegowlStatus::Ok)
    })
}

/// Replaces the number-word map.
///
/// # Safety
/// `c` must be a live compiler and `contents` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn regowl_compiler_load_card_map(
    c: *mut RegowlCompiler,
    contents: *const c_char,
) -> RegowlStatus {
    guard(|| {
        let map = CardMap::parse(text(contents, "contents")?).map_err(parse_failure)?;
        compiler(c)?.config.vocab.card = map;
        Ok(RegowlStatus::Ok)
    })
}

/// Replaces the comparison-phrase map.
///
/// # Safety
/// `c` must be a live compiler and `contents` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn regowl_compiler_load_constr_map(
    c: *mut RegowlCompiler,
    contents: *const c_char,
) -> RegowlStatus {
    guard(|| {
        let map = ConstrMap::parse(text(contents, "contents")?).map_err(parse_failure)?;
        compiler(c)?.config.vocab.constr = map;
        Ok(RegowlStatus::Ok)
    })
}

/// Validates a TSV export. On `Ok` or `SchemaError`, `*out_json` receives
/// the diagnostics as a JSON array.
///
/// # Safety
/// `c` must be a live compiler, `tsv` a NUL-terminated string and
/// `out_json` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn regowl_validate(
    c: *mut RegowlCompiler,
    tsv: *const c_char,
    out_json: *mut *mut c_char,
) -> RegowlStatus {
    guard(|| {
        let c = compiler(c)?;
        let doc = parse_tsv(text(tsv, "tsv")?).map_err(parse_failure)?;
        let diags = match check_document(&doc, &c.config) {
            Ok((_, d)) => d,
            Err(CompileError::Preprocess(e)) => vec![Diagnostic::error(Code::ArrowStructure, None, e.to_string())],
            Err(e) => return Err(compile_failure(e)),
        };
        emit(out_json, to_json(&diags))?;
        if has_errors(&diags) {
            set_error(format!("{} schema error(s)", diags.iter().filter(|d| d.is_error()).count()));
            Ok(RegowlStatus::SchemaError)
        } else {
            Ok(RegowlStatus::Ok)
        }
    })
}

/// Compiles a TSV export to Manchester syntax in `*out_omn`. On
/// `SchemaError` the last error message holds the diagnostics as JSON.
///
/// # Safety
/// `c` must be a live compiler, `tsv` a NUL-terminated string and
/// `out_omn` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn regowl_compile(
    c: *mut RegowlCompiler,
    tsv: *const c_char,
    out_omn: *mut *mut c_char,
) -> RegowlStatus {
    guard(|| {
        let c = compiler(c)?;
        let doc = parse_tsv(text(tsv, "tsv")?).map_err(parse_failure)?;
        let compiled = compile(&doc, &c.config).map_err(compile_failure)?;
        let omn = to_manchester(&compiled.ontology).map_err(|e| Fail(RegowlStatus::CompileError, e.to_string()))?;
        emit(out_omn, omn)?;
        Ok(RegowlStatus::Ok)
    })
}

/// Checks an ABox against an ontology, both in Manchester syntax. `flags`
/// combines `REGOWL_CHECK_*` bits. On `Ok` or `Violations`, `*out_json`
/// receives the report.
///
/// # Safety
/// `ontology` and `abox` must be NUL-terminated strings and `out_json` a
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn regowl_check(
    ontology: *const c_char,
    abox: *const c_char,
    flags: u32,
    out_json: *mut *mut c_char,
) -> RegowlStatus {
    guard(|| {
        let tbox = parse_manchester_subset(text(ontology, "ontology")?).map_err(parse_failure)?;
        let data = parse_manchester(text(abox, "abox")?, ParseOptions { context: Some(&tbox), default_namespace: None })
            .map_err(parse_failure)?;
        let mut merged = tbox.clone();
        merged.merge(&data).map_err(parse_failure)?;
        let options = CheckOptions {
            close: flags & REGOWL_CHECK_CLOSE != 0,
            strict_literals: flags & REGOWL_CHECK_STRICT_LITERALS != 0,
        };
        let report = check_compliance(&merged, &Abox::from_ontology(&data), options)
            .map_err(|e| Fail(RegowlStatus::CheckError, e.to_string()))?;
        emit(out_json, report.to_json())?;
        Ok(if report.consistent { RegowlStatus::Ok } else { RegowlStatus::Violations })
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn regowl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version; a static string.
#[no_mangle]
pub extern "C" fn regowl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn regowl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
