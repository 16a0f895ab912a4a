#pragma once

#include <cstdint>
#include <string>

namespace oolang {

enum class ScalarType : uint8_t { Int, Bool, Float };

// Static type of an expression, parameter or return slot.
struct TypeRef {
    enum class Kind : uint8_t { Void, Scalar, Class } kind = Kind::Void;
    ScalarType scalar = ScalarType::Int;
    std::string class_name; // Kind::Class only

    static TypeRef void_type() { return {}; }
    static TypeRef scalar_type(ScalarType s) { return {Kind::Scalar, s, {}}; }
    static TypeRef class_type(std::string name) {
        return {Kind::Class, ScalarType::Int, std::move(name)};
    }

    bool is_void() const { return kind == Kind::Void; }
    bool is_scalar() const { return kind == Kind::Scalar; }
    bool is_class() const { return kind == Kind::Class; }
    bool operator==(const TypeRef &) const = default;
};

const char *scalar_name(ScalarType t);
std::string type_name(const TypeRef &t);

// A type as seen by the dispatcher: every class exists in a const and a
// non-const variant, and the const variant acts as a parent of the non-const
// one.
struct DispatchType {
    std::string class_name;
    bool is_const = false;

    bool operator==(const DispatchType &) const = default;
    auto operator<=>(const DispatchType &) const = default;
};

std::string dispatch_type_name(const DispatchType &t);

} // namespace oolang
