#include "oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

using oolang::ClassInfo;
using oolang::DispatchType;

namespace oracle {

Model::Model(const std::vector<ClassInfo> &classes) {
    for (const auto &c : classes) {
        infos_[c.name] = c;
        names_.push_back(c.name);
    }
    std::sort(names_.begin(), names_.end());
}

bool Model::has_class(const std::string &cls) const {
    return infos_.count(cls) != 0;
}

int Model::field_count(const std::string &cls) const {
    return (int)infos_.at(cls).fields.size();
}

int Model::nvsize(const std::string &cls) const {
    auto it = nvsize_.find(cls);
    if (it != nvsize_.end())
        return it->second;
    int total = 0;
    for (const auto &p : infos_.at(cls).parents)
        if (!p.is_virtual)
            total += nvsize(p.name);
    total += field_count(cls);
    nvsize_[cls] = total;
    return total;
}

namespace {

// Every class reachable from cls through parent edges (cls excluded).
void collect_ancestors(const std::map<std::string, ClassInfo> &infos,
                       const std::string &cls, std::set<std::string> &out) {
    for (const auto &p : infos.at(cls).parents)
        if (out.insert(p.name).second)
            collect_ancestors(infos, p.name, out);
}

// Classes reached through at least one virtual edge, from any subobject.
void collect_vbases(const std::map<std::string, ClassInfo> &infos,
                    const std::string &cls, std::set<std::string> &out) {
    for (const auto &p : infos.at(cls).parents) {
        if (p.is_virtual)
            out.insert(p.name);
        collect_vbases(infos, p.name, out);
    }
}

} // namespace

const std::vector<std::pair<std::string, int>> &
Model::vbases(const std::string &cls) const {
    auto it = vbases_.find(cls);
    if (it != vbases_.end())
        return it->second;

    std::set<std::string> found;
    collect_vbases(infos_, cls, found);

    // Layout order: most derived first, ties by name. Repeatedly take the
    // name-least class that is not an ancestor of any remaining one.
    std::vector<std::string> remaining(found.begin(), found.end());
    std::vector<std::string> ordered;
    while (!remaining.empty()) {
        size_t pick = remaining.size();
        for (size_t i = 0; i < remaining.size(); i++) {
            bool is_ancestor_of_other = false;
            for (size_t j = 0; j < remaining.size(); j++) {
                if (i == j)
                    continue;
                std::set<std::string> anc;
                collect_ancestors(infos_, remaining[j], anc);
                if (anc.count(remaining[i])) {
                    is_ancestor_of_other = true;
                    break;
                }
            }
            if (!is_ancestor_of_other) {
                pick = i;
                break;
            }
        }
        if (pick == remaining.size())
            throw std::logic_error("cycle among virtual bases");
        ordered.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + pick);
    }

    std::vector<std::pair<std::string, int>> result;
    int at = nvsize(cls);
    for (const auto &v : ordered) {
        result.emplace_back(v, at);
        at += nvsize(v);
    }
    return vbases_[cls] = std::move(result);
}

int Model::size(const std::string &cls) const {
    int total = nvsize(cls);
    for (const auto &[v, off] : vbases(cls)) {
        (void)off;
        total += nvsize(v);
    }
    return total;
}

const std::vector<Region> &Model::regions(const std::string &cls) const {
    auto it = regions_.find(cls);
    if (it != regions_.end())
        return it->second;

    std::vector<Region> out;
    std::set<std::string> seen_keys;
    auto add = [&](const std::string &c, int off, const std::string &key) {
        if (seen_keys.insert(key).second)
            out.push_back(Region{c, off, key});
    };

    // walk(c, key, off): emit the subobjects below an already-emitted region
    // of class c. Non-virtual parents are embedded at the front of c's
    // non-virtual part; virtual parents jump to the complete object's tail.
    std::function<void(const std::string &, const std::string &, int)> walk =
        [&](const std::string &c, const std::string &key, int off) {
            int local = 0;
            for (size_t i = 0; i < infos_.at(c).parents.size(); i++) {
                const auto &p = infos_.at(c).parents[i];
                if (p.is_virtual) {
                    std::string vkey = "V:" + p.name;
                    bool fresh = !seen_keys.count(vkey);
                    int voff = -1;
                    for (const auto &[v, o] : vbases(cls))
                        if (v == p.name)
                            voff = o;
                    add(p.name, voff, vkey);
                    if (fresh)
                        walk(p.name, vkey, voff);
                } else {
                    std::string ckey =
                        key + "/" + std::to_string(i) + ":" + p.name;
                    add(p.name, off + local, ckey);
                    walk(p.name, ckey, off + local);
                    local += nvsize(p.name);
                }
            }
        };

    add(cls, 0, "");
    walk(cls, "", 0);
    return regions_[cls] = std::move(out);
}

Answer Model::subtype(const std::string &sub, const std::string &sup) const {
    Answer a;
    for (const auto &r : regions(sub))
        if (r.cls == sup)
            a.offsets.push_back(r.offset);
    std::sort(a.offsets.begin(), a.offsets.end());
    if (a.offsets.empty())
        a.kind = Answer::Kind::No;
    else if (a.offsets.size() == 1)
        a.kind = Answer::Kind::Unique;
    else
        a.kind = Answer::Kind::Ambiguous;
    return a;
}

Answer Model::dispatch_subtype(const DispatchType &sub,
                               const DispatchType &sup) const {
    // Constness can be added, never dropped.
    if (sub.is_const && !sup.is_const)
        return {};
    return subtype(sub.class_name, sup.class_name);
}

void Model::ensure(const std::string &cls) const {
    if (!infos_.count(cls))
        throw std::out_of_range("oracle: unknown class " + cls);
}

// ---- selection ------------------------------------------------------------

Applic applicability(const Model &m, const std::vector<DispatchType> &spec,
                     const std::vector<DispatchType> &args) {
    bool any_ambiguous = false;
    for (size_t i = 0; i < spec.size(); i++) {
        Answer a = m.dispatch_subtype(args[i], spec[i]);
        if (a.no())
            return Applic::No;
        if (a.ambiguous())
            any_ambiguous = true;
    }
    return any_ambiguous ? Applic::Ambiguous : Applic::Unique;
}

bool more_specific(const Model &m, const std::vector<DispatchType> &a,
                   const std::vector<DispatchType> &b) {
    for (size_t i = 0; i < a.size(); i++)
        if (!m.dispatch_subtype(a[i], b[i]).unique())
            return false;
    return true;
}

Verdict select(const Model &m,
               const std::vector<std::vector<DispatchType>> &specs,
               const std::vector<DispatchType> &args) {
    std::vector<int> unique_app;
    bool any_ambiguous = false;
    for (size_t i = 0; i < specs.size(); i++) {
        Applic a = applicability(m, specs[i], args);
        if (a == Applic::Unique)
            unique_app.push_back((int)i);
        else if (a == Applic::Ambiguous)
            any_ambiguous = true;
    }
    Verdict v;
    if (unique_app.empty()) {
        v.kind = any_ambiguous ? Verdict::Kind::AmbigBlocked
                               : Verdict::Kind::Trap;
        return v;
    }
    std::vector<int> minimal;
    for (int i : unique_app) {
        bool dominated = false;
        for (int j : unique_app)
            if (j != i && more_specific(m, specs[j], specs[i])) {
                dominated = true;
                break;
            }
        if (!dominated)
            minimal.push_back(i);
    }
    if (minimal.size() == 1) {
        v.kind = Verdict::Kind::Winner;
        v.winner = minimal[0];
    } else {
        v.kind = Verdict::Kind::Ambiguous;
    }
    return v;
}

std::vector<std::vector<DispatchType>>
family_tuples(const std::vector<oolang::FuncRecord> &funcs,
              const std::vector<int32_t> &members) {
    std::vector<std::vector<DispatchType>> out;
    for (int32_t idx : members)
        out.push_back(oolang::dispatch_tuple(funcs[idx]));
    return out;
}

} // namespace oracle
