#pragma once

#include "oolang/ast.hpp"

namespace oolang {

// Lowers class members into free declarations:
//   - a member multimethod 'bool @equal(Point p)' of class Point becomes the
//     free specialization 'bool @equal(Point &this, Point p)';
//   - a member function 'void dump()' becomes a receiver-dispatched
//     specialization 'void dump(Point &this)' (virtual function semantics:
//     only the receiver position takes part in dispatch);
//   - method-call syntax 'o.@m(a)' becomes '@m(o, a)'. Calls 'o.f(a)' of
//     non-multimethod members keep a MethodCall node; the type checker turns
//     them into receiver-dispatched invocations.
// Field names in member bodies stay unresolved; they bind through the
// implicit 'this' during type checking. The pass is idempotent.
void desugar_members(ast::Unit &unit);

} // namespace oolang
