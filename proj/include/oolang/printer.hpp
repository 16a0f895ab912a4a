#pragma once

#include <string>

#include "oolang/ast.hpp"

namespace oolang {

// Canonical source form of a unit. parse(print(parse(s))) produces the same
// text as print(parse(s)); the round-trip property tests rely on that.
std::string print_unit(const ast::Unit &unit);

std::string print_expr(const ast::Expr &e);
std::string print_type(const TypeRef &t);
std::string print_param(const ast::Param &p);

} // namespace oolang
