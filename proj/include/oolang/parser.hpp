#pragma once

#include "oolang/ast.hpp"
#include "oolang/diag.hpp"
#include "oolang/lexer.hpp"

namespace oolang {

struct ParseOptions {
    // Headers may contain declarations only; any body is rejected.
    bool header = false;
};

// Parses one translation unit. Errors are collected in diags with recovery
// at statement and declaration boundaries, so several errors can be reported
// in one run. The returned unit contains whatever parsed cleanly.
ast::Unit parse_unit(const std::string &text, const std::string &file,
                     DiagnosticList &diags, const ParseOptions &opts = {});

} // namespace oolang
