#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gen.hpp"
#include "inproc.hpp"
#include "oracle.hpp"

#include "oolang/hierarchy.hpp"

using namespace oolang;

namespace {

ClassInfo make_class(const std::string &name,
                     std::vector<std::pair<std::string, bool>> parents,
                     std::vector<std::string> fields) {
    ClassInfo c;
    c.name = name;
    for (auto &[pname, virt] : parents)
        c.parents.push_back({pname, virt, true});
    for (auto &f : fields)
        c.fields.push_back({f, ScalarType::Int});
    return c;
}

Hierarchy build_ok(const std::vector<ClassInfo> &classes) {
    DiagnosticList diags;
    Hierarchy h = Hierarchy::build(classes, diags);
    INFO(format_diagnostics(diags));
    REQUIRE(h.valid());
    return h;
}

// (offset, field, owner) triples of a layout, for compact comparison.
std::vector<std::tuple<int, std::string, std::string>>
slot_triples(const Layout &l) {
    std::vector<std::tuple<int, std::string, std::string>> out;
    for (const auto &s : l.slots)
        out.push_back({s.offset, s.name, s.owner});
    return out;
}

// A shared diamond: both B and C inherit A virtually, so D holds one A.
std::vector<ClassInfo> shared_diamond() {
    return {
        make_class("A", {}, {"a"}),
        make_class("B", {{"A", true}}, {"b"}),
        make_class("C", {{"A", true}}, {"c"}),
        make_class("D", {{"B", false}, {"C", false}}, {"d"}),
    };
}

// A replicated diamond: plain inheritance, so D holds two A copies.
std::vector<ClassInfo> replicated_diamond() {
    return {
        make_class("A", {}, {"a"}),
        make_class("B", {{"A", false}}, {"b"}),
        make_class("C", {{"A", false}}, {"c"}),
        make_class("D", {{"B", false}, {"C", false}}, {"d"}),
    };
}

} // namespace

TEST_CASE("shared diamond: one A at the end of the object") {
    Hierarchy h = build_ok(shared_diamond());
    const Layout &d = h.layout("D");

    CHECK(d.size == 4);
    CHECK(d.nvsize == 3);
    std::vector<std::tuple<int, std::string, std::string>> want = {
        {0, "b", "B"}, {1, "c", "C"}, {2, "d", "D"}, {3, "a", "A"}};
    CHECK(slot_triples(d) == want);
    REQUIRE(d.vbases.size() == 1);
    CHECK(d.vbases[0] == std::pair<std::string, int>("A", 3));
    CHECK(h.vbase_offset("D", "A") == 3);

    auto s = h.subtype("D", "A");
    CHECK(s.unique());
    CHECK(s.offset() == 3);

    // Complete-object identity: every ancestor is reachable.
    const Region *complete = nullptr;
    for (const auto &r : d.regions)
        if (r.is_complete())
            complete = &r;
    REQUIRE(complete != nullptr);
    RTTable rt = h.rttable("D", *complete);
    CHECK(rt.type_id == h.class_id("D"));
    CHECK(rt.size == 4);
    CHECK(rt.subobject_offset == 0);
    std::vector<std::pair<int, int>> anc = {{h.class_id("B"), 0},
                                            {h.class_id("C"), 1},
                                            {h.class_id("A"), 3}};
    CHECK(rt.ancestors == anc);
}

TEST_CASE("replicated diamond: two A copies, ambiguous ancestor") {
    Hierarchy h = build_ok(replicated_diamond());
    const Layout &d = h.layout("D");

    CHECK(d.size == 5);
    CHECK(d.nvsize == 5);
    std::vector<std::tuple<int, std::string, std::string>> want = {
        {0, "a", "A"}, {1, "b", "B"}, {2, "a", "A"}, {3, "c", "C"},
        {4, "d", "D"}};
    CHECK(slot_triples(d) == want);
    CHECK(d.vbases.empty());

    auto s = h.subtype("D", "A");
    CHECK(s.ambiguous());
    CHECK(s.offsets == std::vector<int>({0, 2}));
    CHECK(h.unique_region("D", "A") == nullptr);
    CHECK_FALSE(h.convert_step("D", "A").has_value());

    // The ambiguous ancestor is absent from the runtime table: no reference
    // to it can be formed directly from a D view.
    const Region *complete = nullptr;
    for (const auto &r : d.regions)
        if (r.is_complete())
            complete = &r;
    REQUIRE(complete != nullptr);
    RTTable rt = h.rttable("D", *complete);
    std::vector<std::pair<int, int>> anc = {{h.class_id("B"), 0},
                                            {h.class_id("C"), 2}};
    CHECK(rt.ancestors == anc);

    // Through an intermediate view the same copy becomes reachable.
    CHECK(h.subtype("B", "A").unique());
    CHECK(h.subtype("B", "A").offset() == 0);
}

TEST_CASE("embedded-region tables of the replicated diamond") {
    Hierarchy h = build_ok(replicated_diamond());
    const Layout &d = h.layout("D");

    // Find the C region (starts at slot 2).
    const Region *c_region = nullptr;
    for (const auto &r : d.regions)
        if (r.cls == "C" && !r.is_complete())
            c_region = &r;
    REQUIRE(c_region != nullptr);
    CHECK(c_region->start == 2);
    CHECK(c_region->size == 2);

    RTTable rt = h.rttable("D", *c_region);
    CHECK(rt.type_id == h.class_id("C"));
    CHECK(rt.subobject_offset == 2);
    // From the C view, its own A copy sits right at its start.
    std::vector<std::pair<int, int>> anc = {{h.class_id("A"), 0}};
    CHECK(rt.ancestors == anc);
}

TEST_CASE("virtual base reachable from an embedded region") {
    Hierarchy h = build_ok(shared_diamond());
    const Layout &d = h.layout("D");
    const Region *b_region = nullptr;
    for (const auto &r : d.regions)
        if (r.cls == "B" && !r.is_complete())
            b_region = &r;
    REQUIRE(b_region != nullptr);
    CHECK(b_region->start == 0);
    CHECK(b_region->size == 1); // the shared A is not part of the region

    // Relative to the B subobject, the shared A sits at +3.
    RTTable rt = h.rttable("D", *b_region);
    std::vector<std::pair<int, int>> anc = {{h.class_id("A"), 3}};
    CHECK(rt.ancestors == anc);
}

TEST_CASE("five-class hierarchy used by the table tests") {
    Hierarchy h = build_ok({
        make_class("A", {}, {"a"}),
        make_class("B", {}, {"b"}),
        make_class("C", {}, {"c"}),
        make_class("D", {{"A", false}, {"B", false}}, {"d"}),
        make_class("E", {{"C", false}, {"D", false}}, {"e"}),
    });
    const Layout &e = h.layout("E");
    CHECK(e.size == 5);
    std::vector<std::tuple<int, std::string, std::string>> want = {
        {0, "c", "C"}, {1, "a", "A"}, {2, "b", "B"}, {3, "d", "D"},
        {4, "e", "E"}};
    CHECK(slot_triples(e) == want);

    CHECK(h.subtype("E", "D").offset() == 1);
    CHECK(h.subtype("E", "B").offset() == 2);
    CHECK(h.subtype("D", "B").offset() == 1);

    auto step = h.convert_step("E", "B");
    REQUIRE(step.has_value());
    CHECK(step->anchor.empty());
    CHECK(step->offset == 2);
}

TEST_CASE("single inheritance chain keeps prefix layout") {
    Hierarchy h = build_ok({
        make_class("Point", {}, {"x", "y"}),
        make_class("ColorPoint", {{"Point", false}}, {"color"}),
    });
    const Layout &cp = h.layout("ColorPoint");
    CHECK(cp.size == 3);
    std::vector<std::tuple<int, std::string, std::string>> want = {
        {0, "x", "Point"}, {1, "y", "Point"}, {2, "color", "ColorPoint"}};
    CHECK(slot_triples(cp) == want);
    CHECK(h.subtype("ColorPoint", "Point").offset() == 0);
    CHECK(h.subtype("Point", "ColorPoint").no());

    std::string dump = h.dump_layout("ColorPoint");
    CHECK(dump.find("slot 2 field=color type=int owner=ColorPoint") !=
          std::string::npos);
    CHECK(dump == h.dump_layout("ColorPoint")); // deterministic
}

TEST_CASE("empty classes keep distinct identities") {
    Hierarchy h = build_ok({
        make_class("A", {}, {}),
        make_class("B", {{"A", false}}, {}),
        make_class("C", {{"A", false}}, {}),
        make_class("D", {{"B", false}, {"C", false}}, {}),
    });
    CHECK(h.layout("D").size == 0);
    auto s = h.subtype("D", "A");
    CHECK(s.ambiguous());
    // Both copies collapse to offset 0, yet stay distinct regions.
    CHECK(s.offsets == std::vector<int>({0, 0}));
}

TEST_CASE("field resolution: found, inherited, ambiguous, missing") {
    Hierarchy h = build_ok(replicated_diamond());
    auto own = h.resolve_field("B", "b");
    CHECK(own.kind == Hierarchy::FieldResolution::Kind::Found);
    CHECK(own.owner == "B");

    auto inherited = h.resolve_field("B", "a");
    CHECK(inherited.kind == Hierarchy::FieldResolution::Kind::Found);
    CHECK(inherited.owner == "A");
    CHECK(inherited.offset == 0);

    auto ambig = h.resolve_field("D", "a");
    CHECK(ambig.kind == Hierarchy::FieldResolution::Kind::Ambiguous);

    auto missing = h.resolve_field("D", "nope");
    CHECK(missing.kind == Hierarchy::FieldResolution::Kind::None);
}

TEST_CASE("hierarchy errors: unknown parent, cycle, mixed virtuality") {
    {
        DiagnosticList diags;
        Hierarchy h = Hierarchy::build({make_class("B", {{"X", false}}, {})},
                                       diags);
        CHECK_FALSE(h.valid());
        CHECK(inproc::has_code(diags, diag_code::unknown_parent));
    }
    {
        DiagnosticList diags;
        Hierarchy h = Hierarchy::build({make_class("A", {{"B", false}}, {}),
                                        make_class("B", {{"A", false}}, {})},
                                       diags);
        CHECK_FALSE(h.valid());
        CHECK(inproc::has_code(diags, diag_code::cyclic_inheritance));
    }
    {
        // A reaches D both through a virtual and a plain path.
        DiagnosticList diags;
        Hierarchy h = Hierarchy::build(
            {make_class("A", {}, {"a"}),
             make_class("B", {{"A", true}}, {"b"}),
             make_class("C", {{"A", false}}, {"c"}),
             make_class("D", {{"B", false}, {"C", false}}, {"d"})},
            diags);
        CHECK_FALSE(h.valid());
        CHECK(inproc::has_code(diags, diag_code::mixed_virtuality));
    }
}

TEST_CASE("dispatch universe: ids, const edges, subtype lifting") {
    Hierarchy h = build_ok({
        make_class("A", {}, {"a"}),
        make_class("B", {{"A", false}}, {"b"}),
    });

    auto uni = h.universe();
    REQUIRE(uni.size() == 4);
    // Interleaved ids: class k -> 2k (plain), 2k+1 (const).
    CHECK(uni[0] == DispatchType{"A", false});
    CHECK(uni[1] == DispatchType{"A", true});
    CHECK(uni[2] == DispatchType{"B", false});
    CHECK(uni[3] == DispatchType{"B", true});
    for (int i = 0; i < 4; i++)
        CHECK(h.dispatch_id(h.dispatch_from_id(i)) == i);

    auto edges = h.universe_edges();
    CHECK(edges.size() == 4);

    // Constness is only ever added.
    CHECK(h.dispatch_subtype({"B", false}, {"A", true}).unique());
    CHECK(h.dispatch_subtype({"B", true}, {"A", true}).unique());
    CHECK(h.dispatch_subtype({"B", true}, {"A", false}).no());
    CHECK(h.dispatch_subtype({"A", false}, {"A", true}).unique());
    CHECK(h.dispatch_subtype({"A", true}, {"A", false}).no());
}

TEST_CASE("layouts are independent of declaration order") {
    gen::Rng rng(20240817);
    for (int round = 0; round < 40; round++) {
        auto classes = gen::random_classes(rng, 8, 2);
        auto shuffled = classes;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);

        Hierarchy h1 = build_ok(classes);
        Hierarchy h2 = build_ok(shuffled);
        CHECK(h1.class_names() == h2.class_names());
        for (const auto &name : h1.class_names())
            CHECK(h1.dump_layout(name) == h2.dump_layout(name));
    }
}

TEST_CASE("property: layouts and subtype answers match the reference model") {
    gen::Rng rng(987654321);
    int pairs_checked = 0;
    for (int round = 0; round < 300; round++) {
        auto classes = gen::random_classes(rng, 8, 2);
        Hierarchy h = build_ok(classes);
        oracle::Model m(classes);

        REQUIRE(h.class_names() == m.names());
        for (const auto &name : h.class_names()) {
            const Layout &l = h.layout(name);
            CHECK(l.size == m.size(name));
            CHECK(l.nvsize == m.nvsize(name));
            CHECK((int)l.slots.size() == l.size);
            CHECK(l.vbases == m.vbases(name));
            CHECK((int)l.regions.size() == (int)m.regions(name).size());
            for (const auto &vb : l.vbases)
                CHECK(h.vbase_offset(name, vb.first) == vb.second);
        }

        for (const auto &sub : h.class_names()) {
            for (const auto &sup : h.class_names()) {
                auto got = h.subtype(sub, sup);
                auto want = m.subtype(sub, sup);
                CHECK((int)got.kind == (int)want.kind);
                CHECK(got.offsets == want.offsets);

                // unique_region and convert_step agree with the answer.
                const Region *r = h.unique_region(sub, sup);
                auto step = h.convert_step(sub, sup);
                if (want.unique()) {
                    REQUIRE(r != nullptr);
                    CHECK(r->start == want.offset());
                    REQUIRE(step.has_value());
                    if (step->anchor.empty())
                        CHECK(step->offset == want.offset());
                    else
                        CHECK(h.vbase_offset(sub, step->anchor) +
                                  step->offset ==
                              want.offset());
                } else {
                    CHECK(r == nullptr);
                    CHECK_FALSE(step.has_value());
                }
                pairs_checked++;
            }
        }

        // Complete-object runtime tables list exactly the unambiguous
        // ancestors.
        for (const auto &name : h.class_names()) {
            const Layout &l = h.layout(name);
            const Region *complete = nullptr;
            for (const auto &r : l.regions)
                if (r.is_complete())
                    complete = &r;
            REQUIRE(complete != nullptr);
            RTTable rt = h.rttable(name, *complete);
            CHECK(rt.type_id == h.class_id(name));
            CHECK(rt.size == l.size);
            CHECK(rt.subobject_offset == 0);
            std::set<std::pair<int, int>> got(rt.ancestors.begin(),
                                              rt.ancestors.end());
            CHECK(got.size() == rt.ancestors.size());
            std::set<std::pair<int, int>> want;
            for (const auto &sup : h.class_names()) {
                if (sup == name)
                    continue;
                auto s = m.subtype(name, sup);
                if (s.unique())
                    want.insert({h.class_id(sup), s.offset()});
            }
            CHECK(got == want);
        }
    }
    CHECK(pairs_checked >= 4000);
}

TEST_CASE("property: dispatch subtyping matches the reference model") {
    gen::Rng rng(555001);
    for (int round = 0; round < 120; round++) {
        auto classes = gen::random_classes(rng, 6, 1);
        Hierarchy h = build_ok(classes);
        oracle::Model m(classes);

        auto uni = h.universe();
        REQUIRE(uni.size() == 2 * h.class_names().size());
        for (size_t i = 0; i < uni.size(); i++)
            CHECK(h.dispatch_id(uni[i]) == (int)i);

        for (const auto &sub : uni) {
            for (const auto &sup : uni) {
                auto got = h.dispatch_subtype(sub, sup);
                auto want = m.dispatch_subtype(sub, sup);
                CHECK((int)got.kind == (int)want.kind);
                CHECK(got.offsets == want.offsets);
            }
        }

        // Direct edges: const-variant above each type, parents in both
        // variants.
        std::set<std::pair<std::string, std::string>> want_edges;
        for (const auto &name : h.class_names()) {
            want_edges.insert({name, "const " + name});
            for (const auto &p : h.info(name).parents) {
                want_edges.insert({name, p.name});
                want_edges.insert({"const " + name, "const " + p.name});
            }
        }
        std::set<std::pair<std::string, std::string>> got_edges;
        for (const auto &[from, to] : h.universe_edges())
            got_edges.insert(
                {dispatch_type_name(from), dispatch_type_name(to)});
        CHECK(got_edges == want_edges);
    }
}
