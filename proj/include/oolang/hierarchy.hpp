#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oolang/diag.hpp"
#include "oolang/types.hpp"

namespace oolang {

// Class shape as the hierarchy sees it; produced from AST class declarations
// or from object-module class tables.
struct ClassInfo {
    struct Parent {
        std::string name;
        bool is_virtual = false;
        bool is_public = true;
    };
    struct Field {
        std::string name;
        ScalarType type = ScalarType::Int;
    };
    std::string name;
    std::vector<Parent> parents;
    std::vector<Field> fields;
    Span span;

    bool operator==(const ClassInfo &o) const {
        if (name != o.name || parents.size() != o.parents.size() ||
            fields.size() != o.fields.size())
            return false;
        for (size_t i = 0; i < parents.size(); i++)
            if (parents[i].name != o.parents[i].name ||
                parents[i].is_virtual != o.parents[i].is_virtual ||
                parents[i].is_public != o.parents[i].is_public)
                return false;
        for (size_t i = 0; i < fields.size(); i++)
            if (fields[i].name != o.fields[i].name ||
                fields[i].type != o.fields[i].type)
                return false;
        return true;
    }
};

struct PathEdge {
    std::string cls;
    bool is_virtual = false;
    bool operator==(const PathEdge &) const = default;
};

std::string path_string(const std::vector<PathEdge> &path);

// A distinct subobject of a complete object. The complete object itself is
// the region with an empty path. Virtual bases appear exactly once, at the
// end of the object, with a path that starts at the virtual edge.
struct Region {
    std::string cls;
    int start = 0; // slot offset from the complete object
    int size = 0;  // non-virtual extent; full size for the complete region
    std::vector<PathEdge> path;
    std::string virtual_anchor; // virtual base this region lives in, or ""

    bool is_complete() const { return path.empty(); }
    bool in_virtual_tail() const { return !virtual_anchor.empty(); }
};

struct FieldSlot {
    int offset = 0;
    std::string name;
    ScalarType type = ScalarType::Int;
    std::string owner; // class whose own field occupies the slot
    std::vector<PathEdge> owner_path;
};

struct Layout {
    std::string cls;
    int size = 0;   // complete object, in slots
    int nvsize = 0; // non-virtual part
    std::vector<FieldSlot> slots;
    std::vector<Region> regions;
    // virtual bases in layout order (most derived first, then name)
    std::vector<std::pair<std::string, int>> vbases;
};

struct SubtypeAnswer {
    enum class Kind { No, Unique, Ambiguous } kind = Kind::No;
    // Region start offsets: one for Unique, all of them (sorted) for
    // Ambiguous. Offsets can repeat when empty classes overlap.
    std::vector<int> offsets;

    bool no() const { return kind == Kind::No; }
    bool unique() const { return kind == Kind::Unique; }
    bool ambiguous() const { return kind == Kind::Ambiguous; }
    int offset() const { return offsets.at(0); }
};

// Runtime type information for one subobject: identity, extent, where the
// subobject sits inside its complete object, and where every unambiguous
// ancestor sits relative to the subobject. Ambiguous ancestors are absent;
// a reference to them can only be formed through an intermediate class.
struct RTTable {
    int type_id = -1;
    int size = 0;
    int subobject_offset = 0;
    std::vector<std::pair<int, int>> ancestors; // (class id, relative offset)
};

class Hierarchy {
public:
    Hierarchy() = default;

    // Checks the class set and computes every layout. On error, diagnostics
    // are reported and valid() is false.
    static Hierarchy build(const std::vector<ClassInfo> &classes,
                           DiagnosticList &diags);

    bool valid() const { return valid_; }
    bool has_class(const std::string &name) const;
    const ClassInfo &info(const std::string &name) const;
    const Layout &layout(const std::string &name) const;
    // Sorted by name; index in this list is the class id.
    const std::vector<std::string> &class_names() const { return names_; }
    int class_id(const std::string &name) const;

    // Counts the distinct sup-regions in sub's layout.
    SubtypeAnswer subtype(const std::string &sub, const std::string &sup) const;

    // Lifts subtype to const-qualified dispatch types: T is a dispatch
    // subtype of const T, and constness can only be added, never dropped.
    SubtypeAnswer dispatch_subtype(const DispatchType &sub,
                                   const DispatchType &sup) const;

    // The unique target-region in host's layout, or null when subtype(host,
    // target) is not Unique.
    const Region *unique_region(const std::string &host,
                                const std::string &target) const;

    RTTable rttable(const std::string &cls, const Region &region) const;
    std::vector<RTTable> rttables(const std::string &cls) const;

    // Static resolution results for the type checker / IR generation.
    // A step is applied to a reference as:
    //   anchor empty: new_offset = ref_offset + offset
    //   anchor set:   new_offset = vbase_offset(dynamic class, anchor) + offset
    struct FieldResolution {
        enum class Kind { None, Found, Ambiguous } kind = Kind::None;
        ScalarType type = ScalarType::Int;
        std::string owner;
        std::string anchor;
        int offset = 0;
    };
    FieldResolution resolve_field(const std::string &cls,
                                  const std::string &field) const;

    struct ConvertStep {
        std::string anchor;
        int offset = 0;
    };
    // Subsumption step from a reference of static type 'from' to the unique
    // 'to' subobject. Null unless subtype(from, to) is Unique.
    std::optional<ConvertStep> convert_step(const std::string &from,
                                            const std::string &to) const;

    // Slot position of a virtual base inside a complete object, -1 if the
    // class has no such virtual base.
    int vbase_offset(const std::string &complete, const std::string &vbase) const;

    // Dispatch universe: every class doubled into a non-const and a const
    // variant. Ids interleave: class id k -> non-const 2k, const 2k+1.
    std::vector<DispatchType> universe() const;
    int dispatch_id(const DispatchType &t) const;
    DispatchType dispatch_from_id(int id) const;
    // Direct edges of the universe: T -> const T for every T, plus the
    // direct-parent edges in both const variants.
    std::vector<std::pair<DispatchType, DispatchType>> universe_edges() const;

    std::string dump_layout(const std::string &cls) const;

private:
    bool valid_ = false;
    std::vector<std::string> names_;
    std::map<std::string, ClassInfo> infos_;
    std::map<std::string, Layout> layouts_;
};

} // namespace oolang
