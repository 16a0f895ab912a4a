#include "oolang/hierarchy.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

namespace oolang {

namespace {

// Non-virtual fragment of a class: everything except virtual bases. This is
// what gets embedded when the class appears as a non-virtual parent.
struct NvLayout {
    int size = 0;
    std::vector<FieldSlot> slots;
    std::vector<Region> regions; // region 0 is the class itself (empty path)
};

struct Builder {
    const std::map<std::string, ClassInfo> &infos;
    DiagnosticList &diags;
    std::map<std::string, NvLayout> nv_cache;
    std::map<std::string, std::set<std::string>> vbase_cache;
    std::map<std::string, std::set<std::string>> ancestor_cache;

    const std::set<std::string> &ancestors(const std::string &name) {
        auto it = ancestor_cache.find(name);
        if (it != ancestor_cache.end())
            return it->second;
        std::set<std::string> acc;
        for (const auto &p : infos.at(name).parents) {
            acc.insert(p.name);
            const auto &up = ancestors(p.name);
            acc.insert(up.begin(), up.end());
        }
        return ancestor_cache.emplace(name, std::move(acc)).first->second;
    }

    const std::set<std::string> &vbases(const std::string &name) {
        auto it = vbase_cache.find(name);
        if (it != vbase_cache.end())
            return it->second;
        std::set<std::string> acc;
        for (const auto &p : infos.at(name).parents) {
            if (p.is_virtual)
                acc.insert(p.name);
            const auto &up = vbases(p.name);
            acc.insert(up.begin(), up.end());
        }
        return vbase_cache.emplace(name, std::move(acc)).first->second;
    }

    const NvLayout &nvlayout(const std::string &name) {
        auto it = nv_cache.find(name);
        if (it != nv_cache.end())
            return it->second;
        const ClassInfo &info = infos.at(name);
        NvLayout out;
        out.regions.push_back(Region{name, 0, 0, {}, ""});
        int offset = 0;
        for (const auto &p : info.parents) {
            if (p.is_virtual)
                continue;
            const NvLayout &sub = nvlayout(p.name);
            for (const auto &r : sub.regions) {
                Region copy = r;
                copy.start += offset;
                copy.path.insert(copy.path.begin(), PathEdge{p.name, false});
                out.regions.push_back(std::move(copy));
            }
            for (const auto &s : sub.slots) {
                FieldSlot copy = s;
                copy.offset += offset;
                copy.owner_path.insert(copy.owner_path.begin(),
                                       PathEdge{p.name, false});
                out.slots.push_back(std::move(copy));
            }
            offset += sub.size;
        }
        for (const auto &f : info.fields) {
            out.slots.push_back(FieldSlot{offset, f.name, f.type, name, {}});
            offset++;
        }
        out.size = offset;
        out.regions[0].size = offset;
        return nv_cache.emplace(name, std::move(out)).first->second;
    }

    // Virtual bases ordered most-derived-first so that every virtual base
    // precedes its own virtual ancestors; ties broken by name.
    std::vector<std::string> ordered_vbases(const std::string &name) {
        std::set<std::string> remaining = vbases(name);
        std::vector<std::string> out;
        while (!remaining.empty()) {
            std::string pick;
            for (const auto &cand : remaining) {
                bool is_ancestor_of_other = false;
                for (const auto &other : remaining)
                    if (other != cand && ancestors(other).count(cand)) {
                        is_ancestor_of_other = true;
                        break;
                    }
                if (!is_ancestor_of_other) {
                    pick = cand;
                    break;
                }
            }
            assert(!pick.empty());
            out.push_back(pick);
            remaining.erase(pick);
        }
        return out;
    }

    Layout complete(const std::string &name) {
        const NvLayout &nv = nvlayout(name);
        Layout out;
        out.cls = name;
        out.nvsize = nv.size;
        out.slots = nv.slots;
        out.regions = nv.regions;
        int offset = nv.size;
        for (const auto &v : ordered_vbases(name)) {
            const NvLayout &sub = nvlayout(v);
            out.vbases.emplace_back(v, offset);
            for (const auto &r : sub.regions) {
                Region copy = r;
                copy.start += offset;
                copy.path.insert(copy.path.begin(), PathEdge{v, true});
                copy.virtual_anchor = v;
                out.regions.push_back(std::move(copy));
            }
            for (const auto &s : sub.slots) {
                FieldSlot copy = s;
                copy.offset += offset;
                copy.owner_path.insert(copy.owner_path.begin(),
                                       PathEdge{v, true});
                out.slots.push_back(std::move(copy));
            }
            offset += sub.size;
        }
        out.size = offset;
        out.regions[0].size = offset;
        std::sort(out.slots.begin(), out.slots.end(),
                  [](const FieldSlot &a, const FieldSlot &b) {
                      return a.offset < b.offset;
                  });
        return out;
    }
};

} // namespace

std::string path_string(const std::vector<PathEdge> &path) {
    std::string out;
    for (size_t i = 0; i < path.size(); i++) {
        if (i)
            out += "::";
        if (path[i].is_virtual)
            out += "virtual ";
        out += path[i].cls;
    }
    return out;
}

Hierarchy Hierarchy::build(const std::vector<ClassInfo> &classes,
                           DiagnosticList &diags) {
    Hierarchy h;
    size_t initial_errors = diags.error_count();

    for (const auto &c : classes) {
        if (h.infos_.count(c.name)) {
            diags.error(diag_code::redefined, c.span,
                        "class '" + c.name + "' is already defined");
            continue;
        }
        h.infos_.emplace(c.name, c);
    }

    for (const auto &[name, info] : h.infos_) {
        std::set<std::string> seen;
        for (const auto &p : info.parents) {
            if (!h.infos_.count(p.name))
                diags.error(diag_code::unknown_parent, info.span,
                            "class '" + name + "' inherits unknown class '" +
                                p.name + "'");
            if (!seen.insert(p.name).second)
                diags.error(diag_code::redefined, info.span,
                            "class '" + name + "' lists parent '" + p.name +
                                "' twice");
        }
    }
    if (diags.error_count() != initial_errors)
        return h;

    // Cycle detection over the parent graph.
    std::map<std::string, int> state; // 0 new, 1 visiting, 2 done
    bool cyclic = false;
    auto dfs = [&](auto &&self, const std::string &name) -> void {
        int &st = state[name];
        if (st == 2)
            return;
        if (st == 1) {
            if (!cyclic)
                diags.error(diag_code::cyclic_inheritance,
                            h.infos_.at(name).span,
                            "inheritance cycle through class '" + name + "'");
            cyclic = true;
            return;
        }
        st = 1;
        for (const auto &p : h.infos_.at(name).parents)
            self(self, p.name);
        state[name] = 2;
    };
    for (const auto &[name, info] : h.infos_)
        dfs(dfs, name);
    if (cyclic)
        return h;

    Builder b{h.infos_, diags, {}, {}, {}};
    for (const auto &[name, info] : h.infos_)
        h.layouts_.emplace(name, b.complete(name));

    // A class must not reach the same ancestor both through a virtual and a
    // non-virtual path: the two copies would make every reference to it
    // ambiguous between a shared and an embedded subobject.
    for (const auto &[name, layout] : h.layouts_) {
        const auto &vb = b.vbases(name);
        std::set<std::string> reported;
        for (const auto &r : layout.regions) {
            if (r.is_complete())
                continue;
            bool is_vbase_root = r.path.size() == 1 && r.path[0].is_virtual;
            if (!is_vbase_root && vb.count(r.cls) && reported.insert(r.cls).second)
                diags.error(diag_code::mixed_virtuality, h.infos_.at(name).span,
                            "class '" + name + "' inherits '" + r.cls +
                                "' both virtually and non-virtually");
        }
    }
    if (diags.error_count() != initial_errors)
        return h;

    for (const auto &[name, info] : h.infos_)
        h.names_.push_back(name);
    // std::map iterates sorted, but keep the contract explicit.
    std::sort(h.names_.begin(), h.names_.end());
    h.valid_ = true;
    return h;
}

bool Hierarchy::has_class(const std::string &name) const {
    return infos_.count(name) != 0;
}

const ClassInfo &Hierarchy::info(const std::string &name) const {
    return infos_.at(name);
}

const Layout &Hierarchy::layout(const std::string &name) const {
    return layouts_.at(name);
}

int Hierarchy::class_id(const std::string &name) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), name);
    if (it == names_.end() || *it != name)
        return -1;
    return (int)(it - names_.begin());
}

SubtypeAnswer Hierarchy::subtype(const std::string &sub,
                                 const std::string &sup) const {
    SubtypeAnswer out;
    auto it = layouts_.find(sub);
    if (it == layouts_.end() || !layouts_.count(sup))
        return out;
    for (const auto &r : it->second.regions)
        if (r.cls == sup)
            out.offsets.push_back(r.start);
    std::sort(out.offsets.begin(), out.offsets.end());
    if (out.offsets.empty())
        out.kind = SubtypeAnswer::Kind::No;
    else if (out.offsets.size() == 1)
        out.kind = SubtypeAnswer::Kind::Unique;
    else
        out.kind = SubtypeAnswer::Kind::Ambiguous;
    return out;
}

SubtypeAnswer Hierarchy::dispatch_subtype(const DispatchType &sub,
                                          const DispatchType &sup) const {
    if (sub.is_const && !sup.is_const)
        return {}; // constness cannot be dropped
    return subtype(sub.class_name, sup.class_name);
}

const Region *Hierarchy::unique_region(const std::string &host,
                                       const std::string &target) const {
    auto it = layouts_.find(host);
    if (it == layouts_.end())
        return nullptr;
    const Region *found = nullptr;
    for (const auto &r : it->second.regions) {
        if (r.cls != target)
            continue;
        if (found)
            return nullptr;
        found = &r;
    }
    return found;
}

int Hierarchy::vbase_offset(const std::string &complete,
                            const std::string &vbase) const {
    auto it = layouts_.find(complete);
    if (it == layouts_.end())
        return -1;
    for (const auto &[name, off] : it->second.vbases)
        if (name == vbase)
            return off;
    return -1;
}

RTTable Hierarchy::rttable(const std::string &cls, const Region &region) const {
    RTTable t;
    t.type_id = class_id(region.cls);
    t.size = region.size;
    t.subobject_offset = region.start;

    const Layout &own = layout(region.cls); // standalone layout of the region's class

    // Regions of the standalone layout, grouped per ancestor class; only
    // classes with exactly one region are listed.
    std::map<std::string, std::vector<const Region *>> by_class;
    for (const auto &r : own.regions)
        if (!r.is_complete())
            by_class[r.cls].push_back(&r);

    struct Entry {
        bool in_tail;
        int order;
        int id;
        int rel;
    };
    std::vector<Entry> entries;
    for (const auto &[ancestor, rs] : by_class) {
        if (rs.size() != 1)
            continue; // ambiguous ancestor: no entry
        const Region &ra = *rs.front();
        int rel;
        if (ra.virtual_anchor.empty()) {
            // Non-virtual part: position is invariant under embedding.
            rel = ra.start;
        } else {
            // Virtual bases live at the end of the complete object; their
            // placement depends on the dynamic type.
            int anchor_in_own = -1;
            for (const auto &[vb, off] : own.vbases)
                if (vb == ra.virtual_anchor)
                    anchor_in_own = off;
            assert(anchor_in_own >= 0);
            int abs = vbase_offset(cls, ra.virtual_anchor) +
                      (ra.start - anchor_in_own);
            rel = abs - region.start;
        }
        entries.push_back(
            {!ra.virtual_anchor.empty(), ra.start, class_id(ancestor), rel});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) {
        return std::tie(a.in_tail, a.order, a.id) <
               std::tie(b.in_tail, b.order, b.id);
    });
    for (const auto &e : entries)
        t.ancestors.emplace_back(e.id, e.rel);
    return t;
}

std::vector<RTTable> Hierarchy::rttables(const std::string &cls) const {
    std::vector<RTTable> out;
    for (const auto &r : layout(cls).regions)
        out.push_back(rttable(cls, r));
    return out;
}

Hierarchy::FieldResolution
Hierarchy::resolve_field(const std::string &cls, const std::string &field) const {
    FieldResolution out;
    auto it = layouts_.find(cls);
    if (it == layouts_.end())
        return out;
    const Layout &lay = it->second;

    auto own_field_offset = [&](const std::string &owner) -> std::optional<std::pair<int, ScalarType>> {
        const Layout &ol = layout(owner);
        for (const auto &s : ol.slots)
            if (s.owner == owner && s.owner_path.empty() && s.name == field)
                return std::make_pair(s.offset, s.type);
        return std::nullopt;
    };

    // The class's own field shadows every inherited one.
    if (auto own = own_field_offset(cls)) {
        out.kind = FieldResolution::Kind::Found;
        out.type = own->second;
        out.owner = cls;
        out.offset = own->first;
        return out;
    }

    const Region *found = nullptr;
    std::optional<std::pair<int, ScalarType>> found_field;
    for (const auto &r : lay.regions) {
        if (r.is_complete())
            continue;
        auto f = own_field_offset(r.cls);
        if (!f)
            continue;
        if (found) {
            out.kind = FieldResolution::Kind::Ambiguous;
            return out;
        }
        found = &r;
        found_field = f;
    }
    if (!found)
        return out;

    out.kind = FieldResolution::Kind::Found;
    out.type = found_field->second;
    out.owner = found->cls;
    if (found->virtual_anchor.empty()) {
        out.offset = found->start + found_field->first;
    } else {
        out.anchor = found->virtual_anchor;
        int anchor_start = -1;
        for (const auto &[vb, off] : lay.vbases)
            if (vb == out.anchor)
                anchor_start = off;
        assert(anchor_start >= 0);
        out.offset = (found->start - anchor_start) + found_field->first;
    }
    return out;
}

std::optional<Hierarchy::ConvertStep>
Hierarchy::convert_step(const std::string &from, const std::string &to) const {
    if (from == to)
        return ConvertStep{"", 0};
    const Region *r = unique_region(from, to);
    if (!r)
        return std::nullopt;
    if (r->virtual_anchor.empty())
        return ConvertStep{"", r->start};
    int anchor_start = -1;
    for (const auto &[vb, off] : layout(from).vbases)
        if (vb == r->virtual_anchor)
            anchor_start = off;
    assert(anchor_start >= 0);
    return ConvertStep{r->virtual_anchor, r->start - anchor_start};
}

std::vector<DispatchType> Hierarchy::universe() const {
    std::vector<DispatchType> out;
    for (const auto &name : names_) {
        out.push_back({name, false});
        out.push_back({name, true});
    }
    return out;
}

int Hierarchy::dispatch_id(const DispatchType &t) const {
    int cid = class_id(t.class_name);
    if (cid < 0)
        return -1;
    return cid * 2 + (t.is_const ? 1 : 0);
}

DispatchType Hierarchy::dispatch_from_id(int id) const {
    assert(id >= 0 && id < (int)names_.size() * 2);
    return {names_[id / 2], id % 2 == 1};
}

std::vector<std::pair<DispatchType, DispatchType>>
Hierarchy::universe_edges() const {
    std::vector<std::pair<DispatchType, DispatchType>> out;
    for (const auto &name : names_) {
        out.push_back({{name, false}, {name, true}});
        for (const auto &p : infos_.at(name).parents) {
            out.push_back({{name, false}, {p.name, false}});
            out.push_back({{name, true}, {p.name, true}});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string Hierarchy::dump_layout(const std::string &cls) const {
    std::ostringstream os;
    auto it = layouts_.find(cls);
    if (it == layouts_.end()) {
        os << "unknown class " << cls << "\n";
        return os.str();
    }
    const Layout &lay = it->second;
    os << "layout " << cls << "\n";
    os << "  size " << lay.size << "\n";
    os << "  nvsize " << lay.nvsize << "\n";
    for (const auto &r : lay.regions) {
        os << "  region " << r.cls << " start=" << r.start
           << " size=" << r.size << " path="
           << (r.is_complete() ? "<complete>" : path_string(r.path)) << "\n";
    }
    for (const auto &[vb, off] : lay.vbases)
        os << "  vbase " << vb << " offset=" << off << "\n";
    for (const auto &s : lay.slots) {
        os << "  slot " << s.offset << " field=" << s.name << " type="
           << scalar_name(s.type) << " owner=" << s.owner << " path="
           << (s.owner_path.empty() ? "<own>" : path_string(s.owner_path))
           << "\n";
    }
    return os.str();
}

} // namespace oolang
