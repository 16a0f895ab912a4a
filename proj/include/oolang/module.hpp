#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oolang/hierarchy.hpp"
#include "oolang/ir.hpp"
#include "oolang/types.hpp"

// In-memory form of a compiled translation unit: the classes it declares
// (including ones pulled in through headers) and every function it declares
// or defines. This is what object files store and what the pre-linker merges.

namespace oolang {

struct ParamRec {
    TypeRef type;
    bool is_const = false;
    bool by_ref = false;
    std::string name;

    bool same_interface(const ParamRec &o) const {
        return type == o.type && is_const == o.is_const && by_ref == o.by_ref;
    }
};

enum class FuncKind : uint8_t {
    Free,        // statically bound function
    Multimethod, // dispatches on every class-typed parameter
    Virtual,     // member function: dispatches on the receiver only
};

struct FuncRecord {
    FuncKind kind = FuncKind::Free;
    std::string name;      // source name, '@'-prefixed for multimethods
    std::string family;    // dispatch family key; empty for Free
    std::string member_of; // declaring class for members, else empty
    std::vector<ParamRec> params;
    TypeRef return_type;
    std::vector<int> dispatch_positions;
    std::shared_ptr<const ir::Body> body; // null for pure declarations
};

struct Module {
    std::vector<ClassInfo> classes;
    std::vector<FuncRecord> funcs;
};

// Family keys look like "@area/2:ci" (name, arity, one marker per parameter:
// c for class, i/b/f for scalars) for multimethods and "area/2" for member
// functions, whose non-receiver interface must be invariant across the family.
std::string family_key(const std::string &name, const std::vector<ParamRec> &params,
                       bool receiver_only);

// Identity of one specialization inside its family: the family key plus the
// class and constness at every dispatch position.
std::string spec_key(const FuncRecord &f);

// Display form used in diagnostics, traces and table dumps:
//   "@m(B, const C)" for free specializations,
//   "Point::@equal(Point)" for members (receiver dropped, class prefixed),
//   "f1" for statically bound functions.
std::string display_spec(const FuncRecord &f);

// The dispatch tuple as DispatchTypes, in dispatch-position order.
std::vector<DispatchType> dispatch_tuple(const FuncRecord &f);

} // namespace oolang
