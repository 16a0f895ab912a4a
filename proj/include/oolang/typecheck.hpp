#pragma once

#include "oolang/ast.hpp"
#include "oolang/diag.hpp"
#include "oolang/module.hpp"

namespace oolang {

// First-phase check of one translation unit (the unit already contains every
// declaration pulled in through headers). Members are desugared, every
// expression is typed, dispatch families are formed and their declared
// consistency is checked, and bodies are lowered to IR. The returned module
// must only be emitted when `diags` gained no errors.
Module check_unit(ast::Unit unit, DiagnosticList &diags);

// Shared predicates over specialization interfaces, reused by the pre-linker
// for its whole-program versions of the same checks.

// True iff every dispatch-position parameter of `s1` is a unique dispatch
// subtype of the corresponding parameter of `s2`.
bool more_specific(const Hierarchy &h, const FuncRecord &s1,
                   const FuncRecord &s2);

enum class Applicability { No, Unique, Ambiguous };

// Applicability of one specialization to a tuple of argument dispatch types
// (one per dispatch position). Unique requires every position Unique;
// Ambiguous means every position Unique-or-Ambiguous with at least one
// Ambiguous.
Applicability applicable(const Hierarchy &h, const FuncRecord &s,
                         const std::vector<DispatchType> &args);

// True iff r1 may stand where r2 is promised: identical scalars, both void,
// or class types with r1 a unique subtype of r2.
bool return_compatible(const Hierarchy &h, const TypeRef &r1, const TypeRef &r2);

} // namespace oolang
