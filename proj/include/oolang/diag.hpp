#pragma once

#include <string>
#include <vector>

#include "oolang/source.hpp"

namespace oolang {

enum class Severity { Warning, Error };

// Stable diagnostic codes. The string form is part of the tool's output
// contract, so codes are never renamed once shipped.
namespace diag_code {
// parse / import
inline constexpr const char *parse = "E_PARSE";
inline constexpr const char *header_body = "E_HEADER_BODY";
inline constexpr const char *import = "E_IMPORT";
// hierarchy construction
inline constexpr const char *unknown_parent = "E_UNKNOWN_PARENT";
inline constexpr const char *cyclic_inheritance = "E_CYCLIC_INHERITANCE";
inline constexpr const char *mixed_virtuality = "E_MIXED_VIRTUALITY";
// intra-module type checking
inline constexpr const char *no_applicable = "E_NO_APPLICABLE";
inline constexpr const char *ambiguous_return = "E_AMBIGUOUS_RETURN";
inline constexpr const char *override_param = "E_OVERRIDE_PARAM";
inline constexpr const char *no_most_specific = "W_NO_MOST_SPECIFIC";
inline constexpr const char *ambig_subtype = "W_AMBIG_SUBTYPE";
inline constexpr const char *latent_conflict = "W_LATENT_CONFLICT";
inline constexpr const char *return_constraint_warn = "W_RETURN_CONSTRAINT";
// general static errors
inline constexpr const char *type = "E_TYPE";
inline constexpr const char *undefined = "E_UNDEFINED";
inline constexpr const char *redefined = "E_REDEFINED";
// object files
inline constexpr const char *bad_object = "E_BAD_OBJECT";
// link time
inline constexpr const char *class_mismatch = "E_CLASS_MISMATCH";
inline constexpr const char *duplicate_body = "E_DUPLICATE_BODY";
inline constexpr const char *missing_body = "E_MISSING_BODY";
inline constexpr const char *no_main = "E_NO_MAIN";
inline constexpr const char *multiple_main = "E_MULTIPLE_MAIN";
inline constexpr const char *link_ambiguous = "E_LINK_AMBIGUOUS";
inline constexpr const char *return_constraint = "E_RETURN_CONSTRAINT";
inline constexpr const char *ambig_pole = "E_AMBIG_POLE";
} // namespace diag_code

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    Span span;
    std::string message;
    // Secondary positions (the other specialization of a conflicting pair,
    // the parent declaration, ...). Shown in long form only.
    std::vector<Span> related;
};

struct DiagnosticList {
    std::vector<Diagnostic> items;

    void error(std::string code, Span span, std::string message);
    void warning(std::string code, Span span, std::string message);
    bool has_errors() const;
    size_t error_count() const;
    // Sorts by (file, line, col, code, message) for deterministic output.
    void sort();
    void append(const DiagnosticList &other);
};

// One line per diagnostic: "severity code file:line:col message".
std::string format_diagnostic(const Diagnostic &d);
std::string format_diagnostics(const DiagnosticList &list, int max_errors = -1);

// Demotes nothing, promotes warnings to errors (for --werror).
void promote_warnings(DiagnosticList &list);

} // namespace oolang
