/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef REGOWL_H
#define REGOWL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Close every individual before checking.
#define REGOWL_CHECK_CLOSE 1

// Compare string literals exactly.
#define REGOWL_CHECK_STRICT_LITERALS 2

// Result of every fallible call.
typedef enum RegowlStatus {
  REGOWL_STATUS_OK = 0,
  // A null pointer, invalid UTF-8 or an unknown option value.
  REGOWL_STATUS_INVALID_ARGUMENT = 1,
  // Input text that could not be parsed.
  REGOWL_STATUS_PARSE_ERROR = 2,
  // The annotation breaks schema rules; diagnostics were produced.
  REGOWL_STATUS_SCHEMA_ERROR = 3,
  // The annotation is valid but cannot be compiled.
  REGOWL_STATUS_COMPILE_ERROR = 4,
  // Evaluation failed, e.g. on an individual not closed on a property.
  REGOWL_STATUS_CHECK_ERROR = 5,
  // The check ran and found violations.
  REGOWL_STATUS_VIOLATIONS = 6,
  // An internal error; the library caught a panic.
  REGOWL_STATUS_PANIC = 7,
} RegowlStatus;

// Compiler settings: base IRI, default quantifiers and vocabularies.
typedef struct RegowlCompiler RegowlCompiler;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// A compiler with the default base IRI, quantifiers and shipped maps.
// Returns null only if allocation panics.
struct RegowlCompiler *regowl_compiler_new(void);

// # Safety
// `c` must be null or a pointer from `regowl_compiler_new` not yet freed.
void regowl_compiler_free(struct RegowlCompiler *c);

// # Safety
// `c` must be a live compiler and `iri` a NUL-terminated string.
enum RegowlStatus regowl_compiler_set_base_iri(struct RegowlCompiler *c, const char *iri);

// `quantifier` is `"some"` or `"only"`.
//
// # Safety
// `c` must be a live compiler and `quantifier` a NUL-terminated string.
enum RegowlStatus regowl_compiler_set_subject_default(struct RegowlCompiler *c,
                                                      const char *quantifier);

// `quantifier` is `"some"` or `"only"`.
//
// # Safety
// `c` must be a live compiler and `quantifier` a NUL-terminated string.
enum RegowlStatus regowl_compiler_set_requirement_default(struct RegowlCompiler *c,
                                                          const char *quantifier);

// Replaces the term vocabulary with the contents of a terms file.
//
// # Safety
// `c` must be a live compiler and `contents` a NUL-terminated string.
enum RegowlStatus regowl_compiler_load_terms(struct RegowlCompiler *c, const char *contents);

// Replaces the number-word map.
//
// # Safety
// `c` must be a live compiler and `contents` a NUL-terminated string.
enum RegowlStatus regowl_compiler_load_card_map(struct RegowlCompiler *c, const char *contents);

// Replaces the comparison-phrase map.
//
// # Safety
// `c` must be a live compiler and `contents` a NUL-terminated string.
enum RegowlStatus regowl_compiler_load_constr_map(struct RegowlCompiler *c, const char *contents);

// Validates a TSV export. On `Ok` or `SchemaError`, `*out_json` receives
// the diagnostics as a JSON array.
//
// # Safety
// `c` must be a live compiler, `tsv` a NUL-terminated string and
// `out_json` a writable pointer.
enum RegowlStatus regowl_validate(struct RegowlCompiler *c, const char *tsv, char **out_json);

// Compiles a TSV export to Manchester syntax in `*out_omn`. On
// `SchemaError` the last error message holds the diagnostics as JSON.
//
// # Safety
// `c` must be a live compiler, `tsv` a NUL-terminated string and
// `out_omn` a writable pointer.
enum RegowlStatus regowl_compile(struct RegowlCompiler *c, const char *tsv, char **out_omn);

// Checks an ABox against an ontology, both in Manchester syntax. `flags`
// combines `REGOWL_CHECK_*` bits. On `Ok` or `Violations`, `*out_json`
// receives the report.
//
// # Safety
// `ontology` and `abox` must be NUL-terminated strings and `out_json` a
// writable pointer.
enum RegowlStatus regowl_check(const char *ontology,
                               const char *abox,
                               uint32_t flags,
                               char **out_json);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void regowl_string_free(char *s);

// Library version; a static string.
const char *regowl_version(void);

// Message for the last failed call on this thread, or null. Valid until
// the next call into the library on the same thread.
const char *regowl_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGOWL_H */
