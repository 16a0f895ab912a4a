#pragma once

// Reference model used by the test suites. It recomputes layouts, subtype
// answers and multimethod selection from first principles over a plain class
// list, without calling the library's Hierarchy or pre-linker, so that the
// suites compare two unrelated implementations of the same rules.

#include <map>
#include <string>
#include <vector>

#include "oolang/hierarchy.hpp"
#include "oolang/module.hpp"
#include "oolang/types.hpp"

namespace oracle {

struct Answer {
    enum class Kind { No, Unique, Ambiguous } kind = Kind::No;
    std::vector<int> offsets; // sorted; exactly one entry when Unique

    bool no() const { return kind == Kind::No; }
    bool unique() const { return kind == Kind::Unique; }
    bool ambiguous() const { return kind == Kind::Ambiguous; }
    int offset() const { return offsets.at(0); }
};

// One distinct subobject of a complete object, identified by its derivation
// path (so two empty-class subobjects at the same offset stay distinct, and
// every route into a virtual base collapses to one region).
struct Region {
    std::string cls;
    int offset = 0;
    std::string key;
};

class Model {
public:
    explicit Model(const std::vector<oolang::ClassInfo> &classes);

    bool has_class(const std::string &cls) const;
    int field_count(const std::string &cls) const;
    // Size of the non-virtual part: embedded non-virtual parents, then own
    // fields.
    int nvsize(const std::string &cls) const;
    // Size of a complete object: nvsize plus every virtual base's nvsize.
    int size(const std::string &cls) const;
    // Virtual bases of a complete object with their slot offsets, in layout
    // order (most derived first, ties by name).
    const std::vector<std::pair<std::string, int>> &
    vbases(const std::string &cls) const;
    const std::vector<Region> &regions(const std::string &cls) const;

    Answer subtype(const std::string &sub, const std::string &sup) const;
    Answer dispatch_subtype(const oolang::DispatchType &sub,
                            const oolang::DispatchType &sup) const;

    // All class names, sorted; position is the class id used for dispatch
    // ids (non-const 2k, const 2k+1), mirroring the documented rule.
    const std::vector<std::string> &names() const { return names_; }

private:
    void ensure(const std::string &cls) const;

    std::map<std::string, oolang::ClassInfo> infos_;
    std::vector<std::string> names_;
    mutable std::map<std::string, int> nvsize_;
    mutable std::map<std::string, std::vector<std::pair<std::string, int>>>
        vbases_;
    mutable std::map<std::string, std::vector<Region>> regions_;
};

// ---- selection ------------------------------------------------------------

enum class Applic { No, Unique, Ambiguous };

// Applicability of a specialization's dispatch tuple to an argument tuple:
// Unique when every position is a unique dispatch subtype, No when any
// position fails outright, Ambiguous otherwise.
Applic applicability(const Model &m,
                     const std::vector<oolang::DispatchType> &spec,
                     const std::vector<oolang::DispatchType> &args);

// True iff every position of a is a unique dispatch subtype of b's.
bool more_specific(const Model &m, const std::vector<oolang::DispatchType> &a,
                   const std::vector<oolang::DispatchType> &b);

struct Verdict {
    enum class Kind {
        Trap,         // nothing applicable at all
        AmbigBlocked, // nothing uniquely applicable, but some ambiguously
        Ambiguous,    // several minimal uniquely-applicable specializations
        Winner,
    } kind = Kind::Trap;
    int winner = -1; // index into the specialization list, Winner only
};

// Full-table selection at one argument tuple over a list of specialization
// dispatch tuples.
Verdict select(const Model &m,
               const std::vector<std::vector<oolang::DispatchType>> &specs,
               const std::vector<oolang::DispatchType> &args);

// Dispatch tuples of every member of a linked family, in the family's member
// order (so verdict winners index that order).
std::vector<std::vector<oolang::DispatchType>>
family_tuples(const std::vector<oolang::FuncRecord> &funcs,
              const std::vector<int32_t> &members);

} // namespace oracle
