#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gen.hpp"
#include "inproc.hpp"

#include "oolang/objmod.hpp"

using namespace oolang;

namespace {

// Compile to a module plus its phase-1 warnings.
Module compile(const std::string &src, std::vector<Diagnostic> &warnings) {
    DiagnosticList diags;
    Module m = inproc::check_source(src, diags);
    INFO(format_diagnostics(diags));
    REQUIRE_FALSE(diags.has_errors());
    for (const auto &d : diags.items)
        if (d.severity == Severity::Warning)
            warnings.push_back(d);
    return m;
}

std::vector<uint8_t> compile_bytes(const std::string &src) {
    std::vector<Diagnostic> warnings;
    Module m = compile(src, warnings);
    return serialize_module(m, warnings);
}

} // namespace

TEST_CASE("module files round-trip bit-exactly") {
    for (const char *src :
         {fixtures::point_dump, fixtures::equal_mm, fixtures::equal_mixed,
          fixtures::diamond_returns, fixtures::const_dispatch,
          fixtures::return_realign, fixtures::five_class_table}) {
        std::vector<Diagnostic> warnings;
        Module m = compile(src, warnings);
        std::vector<uint8_t> bytes = serialize_module(m, warnings);

        Module back;
        std::vector<Diagnostic> warnings_back;
        REQUIRE(deserialize_module(bytes.data(), bytes.size(), back,
                                   warnings_back) == FileError::None);
        CHECK(back.classes.size() == m.classes.size());
        CHECK(back.funcs.size() == m.funcs.size());

        // Serializing the deserialized module reproduces the same bytes.
        CHECK(serialize_module(back, warnings_back) == bytes);
        CHECK(warnings_back.size() == warnings.size());
    }
}

TEST_CASE("declaration order does not change the file") {
    const char *one = "class A { int a; };\n"
                      "class B: public A { int b; };\n"
                      "int f(A x) { return x.a; }\n"
                      "int @m(A x) { return 1; }\n"
                      "int @m(B x) { return 2; }\n"
                      "int main() { B b; return @m(b); }\n";
    const char *two = "class B: public A { int b; };\n"
                      "class A { int a; };\n"
                      "int main() { B b; return @m(b); }\n"
                      "int @m(B x) { return 2; }\n"
                      "int @m(A x) { return 1; }\n"
                      "int f(A x) { return x.a; }\n";
    CHECK(compile_bytes(one) == compile_bytes(two));
}

TEST_CASE("scrambling record order in memory does not change the file") {
    std::vector<Diagnostic> warnings;
    Module m = compile(fixtures::five_class_table, warnings);
    std::vector<uint8_t> bytes = serialize_module(m, warnings);

    std::reverse(m.funcs.begin(), m.funcs.end());
    std::reverse(m.classes.begin(), m.classes.end());
    CHECK(serialize_module(m, warnings) == bytes);
}

TEST_CASE("envelope rejects damaged files") {
    std::vector<uint8_t> bytes = compile_bytes(fixtures::equal_mm);
    Module out;
    std::vector<Diagnostic> w;

    SUBCASE("flipped magic") {
        bytes[0] ^= 0xFF;
        CHECK(deserialize_module(bytes.data(), bytes.size(), out, w) ==
              FileError::BadMagic);
    }
    SUBCASE("future format version") {
        bytes[4] += 1;
        CHECK(deserialize_module(bytes.data(), bytes.size(), out, w) ==
              FileError::VersionMismatch);
    }
    SUBCASE("truncated tail") {
        bytes.resize(bytes.size() - 3);
        CHECK(deserialize_module(bytes.data(), bytes.size(), out, w) ==
              FileError::Truncated);
    }
    SUBCASE("truncated to a stub") {
        bytes.resize(3);
        CHECK(deserialize_module(bytes.data(), bytes.size(), out, w) ==
              FileError::Truncated);
    }
    SUBCASE("flipped payload byte") {
        bytes[bytes.size() - 1] ^= 0x01;
        CHECK(deserialize_module(bytes.data(), bytes.size(), out, w) ==
              FileError::ChecksumMismatch);
    }
    SUBCASE("well-sealed garbage payload") {
        std::vector<uint8_t> garbage = {9, 9, 9, 9, 9, 9, 9, 9};
        auto sealed = seal_payload(MODULE_MAGIC, garbage);
        CHECK(deserialize_module(sealed.data(), sealed.size(), out, w) ==
              FileError::Malformed);
    }
    SUBCASE("empty payload") {
        auto sealed = seal_payload(MODULE_MAGIC, {});
        CHECK(deserialize_module(sealed.data(), sealed.size(), out, w) ==
              FileError::Malformed);
    }
    SUBCASE("image magic on a module reader") {
        // 22 = envelope size (magic + version + length + checksum).
        std::vector<uint8_t> payload(bytes.begin() + 22, bytes.end());
        auto sealed = seal_payload(IMAGE_MAGIC, payload);
        CHECK(deserialize_module(sealed.data(), sealed.size(), out, w) ==
              FileError::BadMagic);
    }
}

TEST_CASE("phase-1 warnings are stored in the file") {
    const char *src = "class A { int a; };\n"
                      "class B: public A { int b; };\n"
                      "A @m(A x) { A r; return r; }\n"
                      "int @m(B x) { return 1; }\n"
                      "int main() { return 0; }\n";
    std::vector<uint8_t> bytes = compile_bytes(src);

    Module out;
    std::vector<Diagnostic> warnings;
    REQUIRE(deserialize_module(bytes.data(), bytes.size(), out, warnings) ==
            FileError::None);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].code == diag_code::return_constraint_warn);
    CHECK(warnings[0].severity == Severity::Warning);
    CHECK(warnings[0].span.line > 0);

    std::string dump = dump_module(out, warnings);
    CHECK(dump.find("W_RETURN_CONSTRAINT") != std::string::npos);
}

TEST_CASE("dump is deterministic and names every specialization") {
    std::vector<Diagnostic> warnings;
    Module m = compile(fixtures::five_class_table, warnings);
    std::string dump = dump_module(m, warnings);
    CHECK(dump == dump_module(m, warnings));
    CHECK(dump.find("@m(B, B)") != std::string::npos);
    CHECK(dump.find("@m(D, D)") != std::string::npos);
    CHECK(dump.find("main") != std::string::npos);
}

TEST_CASE("generated modules round-trip bit-exactly") {
    int done = 0;
    for (uint32_t seed = 1; seed <= 80 && done < 40; seed++) {
        gen::Fixture fx = gen::random_fixture(seed);
        DiagnosticList diags;
        Module m = inproc::check_source(fx.source, diags);
        if (diags.has_errors())
            continue; // some random spec sets are rejected by design
        std::vector<Diagnostic> warnings;
        for (const auto &d : diags.items)
            if (d.severity == Severity::Warning)
                warnings.push_back(d);

        std::vector<uint8_t> bytes = serialize_module(m, warnings);
        Module back;
        std::vector<Diagnostic> wback;
        REQUIRE(deserialize_module(bytes.data(), bytes.size(), back, wback) ==
                FileError::None);
        CHECK(serialize_module(back, wback) == bytes);
        done++;
    }
    CHECK(done >= 20);
}
