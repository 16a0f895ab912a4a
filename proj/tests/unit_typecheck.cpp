#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "inproc.hpp"

#include "oolang/typecheck.hpp"

using namespace oolang;

namespace {

// Compiles and returns the diagnostic codes, in order.
std::vector<std::string> codes_of(const std::string &src) {
    DiagnosticList diags;
    inproc::check_source(src, diags);
    return inproc::codes(diags);
}

Module module_of(const std::string &src) {
    DiagnosticList diags;
    Module m = inproc::check_source(src, diags);
    INFO(format_diagnostics(diags));
    REQUIRE_FALSE(diags.has_errors());
    return m;
}

bool clean(const std::string &src) {
    DiagnosticList diags;
    inproc::check_source(src, diags);
    return !diags.has_errors();
}

const FuncRecord *find_func(const Module &m, const std::string &name) {
    for (const auto &f : m.funcs)
        if (f.name == name)
            return &f;
    return nullptr;
}

const char *diamond = "class A { int a; };\n"
                      "class B: public A { int b; };\n"
                      "class C: public A { int c; };\n"
                      "class D: public B, public C { int d; };\n";

const char *joint = "class A { int a; };\n"
                    "class B { int b; };\n"
                    "class C: public A, public B { int c; };\n";

} // namespace

TEST_CASE("invocation type: unique most-specific specialization") {
    // The invocation takes the winner's return type: B here, so .b resolves.
    std::string src = "class A { int a; };\n"
                      "class B: public A { int b; };\n"
                      "A @m(A x) { A r; return r; }\n"
                      "B @m(B x) { B r; return r; }\n"
                      "int main() { B b; return @m(b).b; }\n";
    auto cs = codes_of(src);
    CHECK(cs.empty());

    // Statically A-typed argument: the A specialization decides, so .b is
    // now a type error.
    std::string bad = "class A { int a; };\n"
                      "class B: public A { int b; };\n"
                      "A @m(A x) { A r; return r; }\n"
                      "B @m(B x) { B r; return r; }\n"
                      "int main() { A a; return @m(a).b; }\n";
    DiagnosticList d;
    inproc::check_source(bad, d);
    CHECK(d.has_errors());
}

TEST_CASE("invocation type: nothing applicable") {
    std::string src = "class A { int a; };\n"
                      "class B: public A { int b; };\n"
                      "int @m(B x) { return 1; }\n"
                      "int main() { A a; return @m(a); }\n";
    auto cs = codes_of(src);
    CHECK(std::count(cs.begin(), cs.end(),
                     std::string(diag_code::no_applicable)) == 1);
}

TEST_CASE("invocation type: only ambiguously applicable") {
    // D reaches A twice; the single A specialization still decides the
    // static type, with a warning that dispatch may trap.
    std::string src = std::string(diamond) +
                      "A @m(A x, A y) { A r; return r; }\n"
                      "int main() { D d1, d2; return @m(d1, d2).a; }\n";
    auto cs = codes_of(src);
    CHECK(cs == std::vector<std::string>{diag_code::ambig_subtype});
}

TEST_CASE("invocation type: several minimal winners, same return type") {
    std::string src = std::string(joint) +
                      "int @m(A x, A y) { return 1; }\n"
                      "int @m(B x, B y) { return 2; }\n"
                      "int main() { C c1, c2; return @m(c1, c2); }\n";
    auto cs = codes_of(src);
    CHECK(std::count(cs.begin(), cs.end(),
                     std::string(diag_code::no_most_specific)) == 1);
    CHECK(std::count(cs.begin(), cs.end(),
                     std::string(diag_code::latent_conflict)) >= 1);
}

TEST_CASE("invocation type: several minimal winners, different returns") {
    std::string src = std::string(joint) +
                      "A @m(A x, A y) { A r; return r; }\n"
                      "B @m(B x, B y) { B r; return r; }\n"
                      "int main() { C c1, c2; @m(c1, c2); return 0; }\n";
    auto cs = codes_of(src);
    CHECK(std::count(cs.begin(), cs.end(),
                     std::string(diag_code::ambiguous_return)) == 1);

    // A declaration of the joint specialization settles the type; no error.
    std::string fixed = std::string(joint) +
                        "A @m(A x, A y) { A r; return r; }\n"
                        "B @m(B x, B y) { B r; return r; }\n"
                        "C @m(C x, C y);\n"
                        "int main() { C c1, c2; return @m(c1, c2).c; }\n";
    auto fixed_cs = codes_of(fixed);
    CHECK(std::count(fixed_cs.begin(), fixed_cs.end(),
                     std::string(diag_code::ambiguous_return)) == 0);
}

TEST_CASE("virtual override must keep the signature") {
    auto cs = codes_of(fixtures::bad_override);
    CHECK(std::count(cs.begin(), cs.end(),
                     std::string(diag_code::override_param)) == 1);

    // Changing only the return type is rejected the same way.
    std::string ret = "class A { int a; };\n"
                      "class B: public A { int b; };\n"
                      "class P { int x; virtual int f() { return 1; } };\n"
                      "class Q: public P { bool f() { return true; } };\n"
                      "int main() { return 0; }\n";
    auto cs2 = codes_of(ret);
    CHECK(std::count(cs2.begin(), cs2.end(),
                     std::string(diag_code::override_param)) == 1);
}

TEST_CASE("member multimethods may specialize freely") {
    auto cs = codes_of(fixtures::equal_mm);
    CHECK(cs.empty());

    Module m = module_of(fixtures::equal_mm);
    const FuncRecord *spec = nullptr;
    for (const auto &f : m.funcs)
        if (f.name == "@equal" && f.member_of == "ColorPoint")
            spec = &f;
    REQUIRE(spec != nullptr);
    CHECK(spec->kind == FuncKind::Multimethod);
    CHECK(spec->family == "@equal/2:cc");
    CHECK(spec->dispatch_positions == std::vector<int>({0, 1}));
    CHECK(display_spec(*spec) == "ColorPoint::@equal(ColorPoint)");
}

TEST_CASE("virtual members dispatch on the receiver only") {
    Module m = module_of(fixtures::point_dump);
    const FuncRecord *base = nullptr;
    for (const auto &f : m.funcs)
        if (f.name == "dump" && f.member_of == "Point")
            base = &f;
    REQUIRE(base != nullptr);
    CHECK(base->kind == FuncKind::Virtual);
    CHECK(base->family == "dump/1");
    CHECK(base->dispatch_positions == std::vector<int>({0}));
    REQUIRE(base->params.size() == 1);
    CHECK(base->params[0].by_ref);
}

TEST_CASE("less specific specialization with narrower return only warns") {
    std::string src = "class A { int a; };\n"
                      "class B: public A { int b; };\n"
                      "A @m(A x) { A r; return r; }\n"
                      "int @m(B x) { return 1; }\n"
                      "int main() { return 0; }\n";
    auto cs = codes_of(src);
    CHECK(std::count(cs.begin(), cs.end(),
                     std::string(diag_code::return_constraint_warn)) == 1);
    // Warning, not error: the module still compiles.
    DiagnosticList diags;
    inproc::check_source(src, diags);
    CHECK_FALSE(diags.has_errors());
}

TEST_CASE("scalar rules: widening, conditions, reference parameters") {
    // bool widens to int where an int is required.
    CHECK(clean("int main() { int x; x = true; return x; }"));
    CHECK(clean("int main() { return 2 < 3; }"));
    // int does not narrow to bool.
    {
        auto cs = codes_of("int main() { bool b; b = 1; return 0; }");
        CHECK(std::count(cs.begin(), cs.end(),
                         std::string(diag_code::type)) >= 1);
    }
    // floats stay separate.
    {
        auto cs = codes_of("int main() { int x; x = 1.5; return x; }");
        CHECK(std::count(cs.begin(), cs.end(),
                         std::string(diag_code::type)) >= 1);
    }
    // Conditions must be bool.
    {
        auto cs = codes_of("int main() { if (1) { return 1; } return 0; }");
        CHECK(std::count(cs.begin(), cs.end(),
                         std::string(diag_code::type)) >= 1);
    }
    // Scalars pass by value only.
    {
        auto cs = codes_of("void f(int &x) { x = 1; }\n"
                           "int main() { return 0; }");
        CHECK(std::count(cs.begin(), cs.end(),
                         std::string(diag_code::type)) >= 1);
    }
}

TEST_CASE("const parameters are read-only and never convert away") {
    // Writing through a const view is rejected.
    {
        auto cs = codes_of("class A { int a; };\n"
                           "void f(const A x) { x.a = 1; }\n"
                           "int main() { return 0; }");
        CHECK(std::count(cs.begin(), cs.end(),
                         std::string(diag_code::type)) >= 1);
    }
    // A const argument cannot feed a non-const parameter, by value or not.
    {
        auto cs = codes_of("class A { int a; };\n"
                           "int g(A y) { return y.a; }\n"
                           "int f(const A x) { return g(x); }\n"
                           "int main() { return 0; }");
        CHECK_FALSE(cs.empty());
    }
    // Reading is fine.
    CHECK(clean("class A { int a; };\n"
                "int f(const A x) { return x.a; }\n"
                "int main() { A a; a.a = 3; return f(a); }"));
}

TEST_CASE("undefined names and redefinitions") {
    {
        auto cs = codes_of("int main() { return zz; }");
        CHECK(std::count(cs.begin(), cs.end(),
                         std::string(diag_code::undefined)) == 1);
    }
    {
        auto cs = codes_of("int main() { int x; int x; return 0; }");
        CHECK(std::count(cs.begin(), cs.end(),
                         std::string(diag_code::redefined)) == 1);
    }
    {
        auto cs = codes_of("int f() { return 1; }\nint f() { return 2; }\n"
                           "int main() { return 0; }");
        CHECK(std::count(cs.begin(), cs.end(),
                         std::string(diag_code::redefined)) == 1);
    }
    {
        auto cs = codes_of("class A { int a; int a; };\n"
                           "int main() { return 0; }");
        CHECK(std::count(cs.begin(), cs.end(),
                         std::string(diag_code::redefined)) == 1);
    }
}

TEST_CASE("declaration groups share the enclosing scope") {
    CHECK(clean("int main() { int x, y; x = 1; y = x + 1; return y; }"));
    // Names in a genuinely nested block do not leak out.
    auto cs = codes_of("int main() { { int x; x = 1; } return x; }");
    CHECK(std::count(cs.begin(), cs.end(),
                     std::string(diag_code::undefined)) == 1);
}

TEST_CASE("family interface invariants") {
    // Same name and arity but different scalar parameter types form
    // distinct families and coexist.
    CHECK(clean("class A { int a; };\n"
                "int @m(A x, int n) { return n; }\n"
                "int @m(A x, bool b) { return 0; }\n"
                "int main() { A a; return @m(a, 3); }"));

    // A multimethod without class parameters behaves like a plain function.
    Module m = module_of("int @plain(int n) { return n + 1; }\n"
                         "int main() { return @plain(4); }");
    const FuncRecord *f = find_func(m, "@plain");
    REQUIRE(f != nullptr);
    CHECK(f->dispatch_positions.empty());
}

TEST_CASE("specialization predicates over a small hierarchy") {
    Module m = module_of(std::string(diamond) +
                         "A @m(A x, A y) { A r; return r; }\n"
                         "B @m(B x, B y) { B r; return r; }\n"
                         "int main() { return 0; }\n");
    DiagnosticList diags;
    Hierarchy h = Hierarchy::build(m.classes, diags);
    REQUIRE(h.valid());

    const FuncRecord *at_a = nullptr;
    const FuncRecord *at_b = nullptr;
    for (const auto &f : m.funcs) {
        if (f.name != "@m")
            continue;
        if (f.params[0].type.class_name == "A")
            at_a = &f;
        else
            at_b = &f;
    }
    REQUIRE(at_a != nullptr);
    REQUIRE(at_b != nullptr);

    CHECK(more_specific(h, *at_b, *at_a));
    CHECK_FALSE(more_specific(h, *at_a, *at_b));

    using DT = DispatchType;
    CHECK(applicable(h, *at_b, {DT{"B", false}, DT{"B", false}}) ==
          Applicability::Unique);
    CHECK(applicable(h, *at_b, {DT{"A", false}, DT{"B", false}}) ==
          Applicability::No);
    // D sees A ambiguously, so the A specialization is only ambiguously
    // applicable at (D, D).
    CHECK(applicable(h, *at_a, {DT{"D", false}, DT{"D", false}}) ==
          Applicability::Ambiguous);

    CHECK(return_compatible(h, TypeRef::class_type("B"),
                            TypeRef::class_type("A")));
    CHECK_FALSE(return_compatible(h, TypeRef::class_type("A"),
                                  TypeRef::class_type("B")));
    CHECK_FALSE(return_compatible(h, TypeRef::class_type("D"),
                                  TypeRef::class_type("A")));
    CHECK(return_compatible(h, TypeRef::scalar_type(ScalarType::Int),
                            TypeRef::scalar_type(ScalarType::Int)));
    CHECK_FALSE(return_compatible(h, TypeRef::scalar_type(ScalarType::Bool),
                                  TypeRef::scalar_type(ScalarType::Int)));
}

TEST_CASE("mixed member and free specializations form one family") {
    auto cs = codes_of(fixtures::equal_mixed);
    CHECK(cs.empty());
    Module m = module_of(fixtures::equal_mixed);
    int family_members = 0;
    for (const auto &f : m.funcs)
        if (f.family == "@equal/2:cc")
            family_members++;
    CHECK(family_members == 2);
}

TEST_CASE("canned figure sources compile cleanly") {
    for (const char *src :
         {fixtures::point_dump, fixtures::equal_mm, fixtures::equal_mixed,
          fixtures::diamond_returns, fixtures::const_dispatch,
          fixtures::byvalue_dynamic, fixtures::return_realign,
          fixtures::five_class_table}) {
        DiagnosticList diags;
        inproc::check_source(src, diags);
        INFO(format_diagnostics(diags));
        CHECK_FALSE(diags.has_errors());
    }
}
