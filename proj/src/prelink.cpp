#include "oolang/prelink.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>
#include <sstream>

#include "oolang/typecheck.hpp"

namespace oolang {

namespace {

Span link_span() {
    Span s;
    s.file = "<link>";
    return s;
}

// Upper bound on exhaustive tuple enumeration inside one matrix cell when
// probing a TRAP for ambiguity-blocked combinations.
constexpr long TUPLE_BUDGET = 200000;

bool same_interface(const FuncRecord &a, const FuncRecord &b) {
    if (a.kind != b.kind || a.name != b.name || a.family != b.family)
        return false;
    if (a.params.size() != b.params.size())
        return false;
    for (size_t i = 0; i < a.params.size(); i++)
        if (!a.params[i].same_interface(b.params[i]))
            return false;
    return a.return_type == b.return_type &&
           a.dispatch_positions == b.dispatch_positions;
}

std::string tuple_display(const std::vector<DispatchType> &ts) {
    std::string out = "(";
    for (size_t i = 0; i < ts.size(); i++) {
        if (i)
            out += ", ";
        out += dispatch_type_name(ts[i]);
    }
    return out + ")";
}

// ---------------------------------------------------------------- merging

struct Merger {
    explicit Merger(DiagnosticList &diags) : diags(diags) {}

    DiagnosticList &diags;
    std::map<std::string, ClassInfo> classes;
    std::map<std::string, FuncRecord> funcs; // by merge key
    int main_defs = 0;

    static std::string merge_key(const FuncRecord &f) {
        if (f.kind == FuncKind::Free)
            return "fn:" + link_name(f);
        return "spec:" + spec_key(f);
    }

    void add(const Module &m) {
        for (const ClassInfo &c : m.classes) {
            auto it = classes.find(c.name);
            if (it == classes.end())
                classes.emplace(c.name, c);
            else if (!(it->second == c))
                diags.error(diag_code::class_mismatch, link_span(),
                            "class '" + c.name +
                                "' has structurally different definitions "
                                "across modules");
        }
        bool defines_main = false;
        for (const FuncRecord &f : m.funcs) {
            if (f.kind == FuncKind::Free && f.family.empty() &&
                f.name == "main" && f.body)
                defines_main = true;
            add_func(f);
        }
        if (defines_main)
            main_defs++;
    }

    void add_func(const FuncRecord &f) {
        auto key = merge_key(f);
        auto it = funcs.find(key);
        if (it == funcs.end()) {
            funcs.emplace(std::move(key), f);
            return;
        }
        FuncRecord &e = it->second;
        if (!same_interface(e, f)) {
            diags.error(diag_code::redefined, link_span(),
                        "conflicting declarations of '" + display_spec(e) +
                            "' across modules");
            return;
        }
        // Cosmetic fields are merged towards the smallest value so the
        // result cannot depend on the order modules were listed in.
        if (!f.member_of.empty() &&
            (e.member_of.empty() || f.member_of < e.member_of))
            e.member_of = f.member_of;
        for (size_t i = 0; i < e.params.size(); i++)
            if (!f.params[i].name.empty() &&
                (e.params[i].name.empty() ||
                 f.params[i].name < e.params[i].name))
                e.params[i].name = f.params[i].name;
        if (f.body) {
            if (!e.body)
                e.body = f.body;
            else if (ir::serialize_body(*e.body) !=
                     ir::serialize_body(*f.body))
                diags.error(diag_code::duplicate_body, link_span(),
                            "'" + display_spec(e) +
                                "' has two differing definitions");
        }
    }
};

// Member functions of one family must present the same interface to every
// caller apart from the receiver; this re-checks the rule across modules.
void check_virtual_families(const std::vector<FuncRecord> &funcs,
                            DiagnosticList &diags) {
    std::map<std::string, const FuncRecord *> first_of;
    for (const FuncRecord &f : funcs) {
        if (f.kind != FuncKind::Virtual)
            continue;
        auto [it, fresh] = first_of.emplace(f.family, &f);
        if (fresh)
            continue;
        const FuncRecord &base = *it->second;
        bool ok = f.params.size() == base.params.size() &&
                  f.return_type == base.return_type;
        for (size_t i = 1; ok && i < f.params.size(); i++)
            ok = f.params[i].same_interface(base.params[i]);
        if (!ok)
            diags.error(diag_code::override_param, link_span(),
                        "'" + display_spec(f) + "' overrides '" +
                            display_spec(base) +
                            "' with a different interface");
    }
}

// ------------------------------------------------------ table construction

struct TableBuilder {
    const Hierarchy &h;
    const std::vector<FuncRecord> &funcs;
    DiagnosticList &diags;
    std::vector<DispatchType> universe;

    explicit TableBuilder(const Hierarchy &h,
                          const std::vector<FuncRecord> &funcs,
                          DiagnosticList &diags)
        : h(h), funcs(funcs), diags(diags), universe(h.universe()) {}

    DispatchType param_type(int32_t member, int pos) const {
        const ParamRec &p = funcs[member].params[pos];
        return DispatchType{p.type.class_name, p.is_const};
    }

    DispatchTable build(const std::string &family,
                        std::vector<int32_t> members) {
        DispatchTable t;
        t.family = family;
        t.members = std::move(members);
        t.positions = funcs[t.members[0]].dispatch_positions;
        const std::string head = funcs[t.members[0]].name;

        size_t npos = t.positions.size();
        t.pole_of.resize(npos);
        t.realign.resize(npos);
        t.poles.resize(npos);
        for (size_t i = 0; i < npos; i++)
            compute_position(t, i, head);
        fill_matrix(t, head);
        return t;
    }

    void compute_position(DispatchTable &t, size_t i, const std::string &head) {
        const size_t U = universe.size();
        // Distinct parameter types at this position, in id order.
        std::vector<DispatchType> ptypes;
        for (int32_t m : t.members) {
            DispatchType p = param_type(m, t.positions[i]);
            if (std::find(ptypes.begin(), ptypes.end(), p) == ptypes.end())
                ptypes.push_back(p);
        }
        std::sort(ptypes.begin(), ptypes.end(),
                  [&](const DispatchType &a, const DispatchType &b) {
                      return h.dispatch_id(a) < h.dispatch_id(b);
                  });

        std::vector<int> pole_dispatch(U, -1);
        for (size_t tid = 0; tid < U; tid++) {
            const DispatchType &ty = universe[tid];
            std::vector<DispatchType> cands, blocked;
            for (const DispatchType &p : ptypes) {
                SubtypeAnswer a = h.dispatch_subtype(ty, p);
                if (a.unique())
                    cands.push_back(p);
                else if (a.ambiguous())
                    blocked.push_back(p);
            }
            if (cands.empty()) {
                if (!blocked.empty())
                    diags.error(
                        diag_code::ambig_pole, link_span(),
                        "type '" + dispatch_type_name(ty) +
                            "' is an ambiguous subtype of '" +
                            dispatch_type_name(blocked[0]) +
                            "' at dispatch position " + std::to_string(i + 1) +
                            " of '" + head + "'");
                continue;
            }
            // Most specific candidate.
            std::vector<DispatchType> mins;
            for (const DispatchType &p : cands) {
                bool minimal = true;
                for (const DispatchType &q : cands)
                    if (!(q == p) && h.dispatch_subtype(q, p).unique()) {
                        minimal = false;
                        break;
                    }
                if (minimal)
                    mins.push_back(p);
            }
            bool split = mins.size() != 1;
            DispatchType pole = ty;
            if (!split) {
                const DispatchType &m = mins[0];
                // Grouping ty under m must keep the exact applicability
                // classification of every parameter type (unique, ambiguous
                // or inapplicable) and the parameter subobject offsets;
                // otherwise the type keeps an exact row of its own. A class
                // blocked for ty must stay ambiguous for m, or the pole's
                // cell would miss a conflict that exists at ty.
                for (const DispatchType &p : blocked)
                    if (!h.dispatch_subtype(m, p).ambiguous()) {
                        split = true;
                        break;
                    }
                for (const DispatchType &p : cands) {
                    if (split)
                        break;
                    if (!h.dispatch_subtype(m, p).unique()) {
                        split = true;
                        break;
                    }
                    int ty_p = h.subtype(ty.class_name, p.class_name).offset();
                    int ty_m = h.subtype(ty.class_name, m.class_name).offset();
                    int m_p = h.subtype(m.class_name, p.class_name).offset();
                    if (ty_p != ty_m + m_p) {
                        split = true;
                        break;
                    }
                }
                if (!split)
                    pole = m;
            }
            pole_dispatch[tid] = h.dispatch_id(pole);
        }

        std::vector<int32_t> poles;
        for (int pd : pole_dispatch)
            if (pd >= 0 &&
                std::find(poles.begin(), poles.end(), pd) == poles.end())
                poles.push_back(pd);
        std::sort(poles.begin(), poles.end());

        t.poles[i] = poles;
        t.pole_of[i].assign(U, -1);
        t.realign[i].assign(U, -1);
        for (size_t tid = 0; tid < U; tid++) {
            int pd = pole_dispatch[tid];
            if (pd < 0)
                continue;
            auto at = std::find(poles.begin(), poles.end(), pd);
            t.pole_of[i][tid] = (int32_t)(at - poles.begin());
            DispatchType pole = h.dispatch_from_id(pd);
            t.realign[i][tid] =
                h.subtype(universe[tid].class_name, pole.class_name).offset();
        }
    }

    void fill_matrix(DispatchTable &t, const std::string &head) {
        const size_t npos = t.positions.size();
        size_t total = 1;
        for (size_t i = 0; i < npos; i++)
            total *= t.poles[i].size();
        t.matrix.resize(total);

        std::set<std::pair<int32_t, int32_t>> return_reported;
        std::vector<int32_t> idx(npos, 0);
        for (size_t e = 0; e < total; e++) {
            std::vector<DispatchType> at(npos);
            for (size_t i = 0; i < npos; i++)
                at[i] = h.dispatch_from_id(t.poles[i][idx[i]]);

            std::vector<int32_t> app, amb;
            for (int32_t m : t.members) {
                switch (applicable(h, funcs[m], at)) {
                case Applicability::Unique:
                    app.push_back(m);
                    break;
                case Applicability::Ambiguous:
                    amb.push_back(m);
                    break;
                case Applicability::No:
                    break;
                }
            }

            MatrixEntry &cell = t.matrix[e];
            cell.offsets.assign(npos, -1);
            if (app.empty()) {
                probe_trap(t, idx, head);
            } else {
                std::vector<int32_t> mins;
                for (int32_t s : app) {
                    bool minimal = true;
                    for (int32_t q : app)
                        if (q != s && more_specific(h, funcs[q], funcs[s])) {
                            minimal = false;
                            break;
                        }
                    if (minimal)
                        mins.push_back(s);
                }
                if (mins.size() != 1) {
                    std::string cs;
                    for (size_t k = 0; k < mins.size(); k++) {
                        if (k)
                            cs += ", ";
                        cs += "'" + display_spec(funcs[mins[k]]) + "'";
                    }
                    diags.error(diag_code::link_ambiguous, link_span(),
                                "invocation of '" + head +
                                    "' is ambiguous for argument types " +
                                    tuple_display(at) + ": candidates " + cs);
                } else {
                    int32_t w = mins[0];
                    for (int32_t s : app)
                        check_return(w, s, return_reported);
                    for (int32_t s : amb)
                        check_return(w, s, return_reported);
                    cell.spec = w;
                    for (size_t i = 0; i < npos; i++) {
                        const ParamRec &p =
                            funcs[w].params[t.positions[i]];
                        cell.offsets[i] =
                            h.subtype(at[i].class_name, p.type.class_name)
                                .offset();
                    }
                }
            }

            for (size_t i = npos; i-- > 0;) {
                if (++idx[i] < (int32_t)t.poles[i].size())
                    break;
                idx[i] = 0;
            }
        }
    }

    void check_return(int32_t w, int32_t s,
                      std::set<std::pair<int32_t, int32_t>> &reported) {
        if (s == w)
            return;
        if (return_compatible(h, funcs[w].return_type, funcs[s].return_type))
            return;
        if (!reported.insert({w, s}).second)
            return;
        diags.error(diag_code::return_constraint, link_span(),
                    "return type of '" + display_spec(funcs[w]) +
                        "' is not a unique subtype of the return type of '" +
                        display_spec(funcs[s]) + "'");
    }

    // A TRAP cell is fine when nothing applies anywhere in it, but if some
    // member is held back only by ambiguous subtyping for a combination of
    // grouped types, running that combination would trap where the static
    // phase promised a selection; reject the link instead.
    void probe_trap(DispatchTable &t, const std::vector<int32_t> &idx,
                    const std::string &head) {
        const size_t npos = t.positions.size();

        // The pole tuple itself is always checked: grouping preserves the
        // applicability classification, so a conflict in any grouped tuple
        // shows at the poles as well.
        {
            std::vector<DispatchType> at(npos);
            for (size_t i = 0; i < npos; i++)
                at[i] = h.dispatch_from_id(t.poles[i][idx[i]]);
            for (int32_t m : t.members) {
                if (applicable(h, funcs[m], at) != Applicability::Ambiguous)
                    continue;
                diags.error(diag_code::ambig_pole, link_span(),
                            "no specialization of '" + head +
                                "' is applicable for argument types " +
                                tuple_display(at) + ", and '" +
                                display_spec(funcs[m]) +
                                "' is blocked only by ambiguous subtyping");
                return;
            }
        }

        std::vector<std::vector<int>> groups(npos);
        long tuples = 1;
        for (size_t i = 0; i < npos; i++) {
            for (size_t tid = 0; tid < universe.size(); tid++)
                if (t.pole_of[i][tid] == idx[i])
                    groups[i].push_back((int)tid);
            tuples *= (long)groups[i].size();
            if (groups[i].empty() || tuples > TUPLE_BUDGET)
                return;
        }
        std::vector<size_t> gi(npos, 0);
        for (long n = 0; n < tuples; n++) {
            std::vector<DispatchType> at(npos);
            for (size_t i = 0; i < npos; i++)
                at[i] = universe[groups[i][gi[i]]];
            for (int32_t m : t.members) {
                if (applicable(h, funcs[m], at) != Applicability::Ambiguous)
                    continue;
                diags.error(diag_code::ambig_pole, link_span(),
                            "no specialization of '" + head +
                                "' is applicable for argument types " +
                                tuple_display(at) + ", and '" +
                                display_spec(funcs[m]) +
                                "' is blocked only by ambiguous subtyping");
                return;
            }
            for (size_t i = npos; i-- > 0;) {
                if (++gi[i] < groups[i].size())
                    break;
                gi[i] = 0;
            }
        }
    }
};

// Any function a compiled body calls statically must have a body somewhere;
// any specialization a matrix cell selects must, too.
void check_missing_bodies(const LinkedProgram &p, DiagnosticList &diags) {
    std::set<std::string> called;
    std::function<void(const ir::Expr &)> scan_expr;
    std::function<void(const ir::Block &)> scan_block;
    scan_expr = [&](const ir::Expr &e) {
        std::visit(
            [&](const auto &n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ir::FieldGet>) {
                    scan_expr(*n.base);
                } else if constexpr (std::is_same_v<T, ir::Convert>) {
                    scan_expr(*n.value);
                } else if constexpr (std::is_same_v<T, ir::Binary>) {
                    scan_expr(*n.lhs);
                    scan_expr(*n.rhs);
                } else if constexpr (std::is_same_v<T, ir::Unary>) {
                    scan_expr(*n.operand);
                } else if constexpr (std::is_same_v<T, ir::CallFn>) {
                    called.insert(n.name);
                    for (const auto &a : n.args)
                        scan_expr(*a);
                } else if constexpr (std::is_same_v<T, ir::CallMm>) {
                    for (const auto &a : n.args)
                        scan_expr(*a);
                }
            },
            e.node);
    };
    scan_block = [&](const ir::Block &b) {
        for (const ir::Stmt &s : b.stmts) {
            std::visit(
                [&](const auto &n) {
                    using T = std::decay_t<decltype(n)>;
                    if constexpr (std::is_same_v<T, ir::Block>) {
                        scan_block(n);
                    } else if constexpr (std::is_same_v<T, ir::LocalScalar>) {
                        if (n.init)
                            scan_expr(*n.init);
                    } else if constexpr (std::is_same_v<T, ir::AssignLocal>) {
                        scan_expr(*n.value);
                    } else if constexpr (std::is_same_v<T, ir::AssignField>) {
                        scan_expr(*n.base);
                        scan_expr(*n.value);
                    } else if constexpr (std::is_same_v<T, ir::ExprStmt>) {
                        scan_expr(*n.expr);
                    } else if constexpr (std::is_same_v<T, ir::PrintStmt>) {
                        for (const auto &a : n.args)
                            scan_expr(*a);
                    } else if constexpr (std::is_same_v<T, ir::ReturnStmt>) {
                        if (n.value)
                            scan_expr(*n.value);
                    } else if constexpr (std::is_same_v<T, ir::IfStmt>) {
                        scan_expr(*n.cond);
                        scan_block(n.then_body);
                        if (n.else_body)
                            scan_block(*n.else_body);
                    } else if constexpr (std::is_same_v<T, ir::WhileStmt>) {
                        scan_expr(*n.cond);
                        scan_block(n.body);
                    }
                },
                s.node);
        }
    };
    for (const FuncRecord &f : p.funcs)
        if (f.body)
            scan_block(f.body->block);

    for (const auto &[name, fi] : p.func_by_name)
        if (called.count(name) && !p.funcs[fi].body)
            diags.error(diag_code::missing_body, link_span(),
                        "function '" + display_spec(p.funcs[fi]) +
                            "' is called but never defined");

    std::set<int32_t> undefined_selected;
    for (const auto &[family, table] : p.tables)
        for (const MatrixEntry &cell : table.matrix)
            if (cell.spec >= 0 && !p.funcs[cell.spec].body)
                undefined_selected.insert(cell.spec);
    for (int32_t s : undefined_selected)
        diags.error(diag_code::missing_body, link_span(),
                    "specialization '" + display_spec(p.funcs[s]) +
                        "' is selected by dispatch but never defined");
}

} // namespace

size_t DispatchTable::entry_index(const std::vector<int32_t> &pole_idx) const {
    assert(pole_idx.size() == poles.size());
    size_t e = 0;
    for (size_t i = 0; i < poles.size(); i++) {
        assert(pole_idx[i] >= 0 && pole_idx[i] < (int32_t)poles[i].size());
        e = e * poles[i].size() + (size_t)pole_idx[i];
    }
    return e;
}

std::string link_name(const FuncRecord &f) {
    return f.family.empty() ? f.name : f.family;
}

bool link_modules(const std::vector<Module> &modules, LinkedProgram &out,
                  DiagnosticList &diags) {
    const size_t base_errors = diags.error_count();

    Merger merger{diags};
    for (const Module &m : modules)
        merger.add(m);

    out.classes.clear();
    for (auto &[name, c] : merger.classes)
        out.classes.push_back(c);
    out.hierarchy = Hierarchy::build(out.classes, diags);

    out.funcs.clear();
    for (auto &[key, f] : merger.funcs)
        out.funcs.push_back(f);
    std::sort(out.funcs.begin(), out.funcs.end(),
              [](const FuncRecord &a, const FuncRecord &b) {
                  return func_sort_key(a) < func_sort_key(b);
              });

    out.func_by_name.clear();
    out.main_index = -1;
    for (size_t i = 0; i < out.funcs.size(); i++) {
        const FuncRecord &f = out.funcs[i];
        if (f.kind != FuncKind::Free)
            continue;
        out.func_by_name[link_name(f)] = (int32_t)i;
        if (f.family.empty() && f.name == "main")
            out.main_index = (int32_t)i;
    }

    check_virtual_families(out.funcs, diags);

    // Structural damage makes the table pass meaningless; stop here.
    if (diags.error_count() > base_errors || !out.hierarchy.valid())
        return false;

    out.tables.clear();
    std::map<std::string, std::vector<int32_t>> families;
    for (size_t i = 0; i < out.funcs.size(); i++)
        if (out.funcs[i].kind != FuncKind::Free)
            families[out.funcs[i].family].push_back((int32_t)i);

    TableBuilder builder(out.hierarchy, out.funcs, diags);
    for (auto &[family, members] : families)
        out.tables.emplace(family, builder.build(family, members));

    check_missing_bodies(out, diags);

    if (merger.main_defs == 0)
        diags.error(diag_code::no_main, link_span(),
                    "no module defines 'main'");
    else if (merger.main_defs > 1)
        diags.error(diag_code::multiple_main, link_span(),
                    "'main' is defined by " +
                        std::to_string(merger.main_defs) + " modules");

    return diags.error_count() == base_errors;
}

// ------------------------------------------------------------ serialization

std::vector<uint8_t> serialize_program(const LinkedProgram &p) {
    PayloadWriter w;
    write_classes(w, p.classes);
    w.u32((uint32_t)p.funcs.size());
    for (const FuncRecord &f : p.funcs)
        write_func(w, f);
    w.i32(p.main_index);
    w.u32((uint32_t)p.tables.size());
    for (const auto &[family, t] : p.tables) {
        w.str(family);
        w.u8((uint8_t)t.positions.size());
        for (int32_t pos : t.positions)
            w.i32(pos);
        w.u32((uint32_t)t.members.size());
        for (int32_t m : t.members)
            w.i32(m);
        for (size_t i = 0; i < t.positions.size(); i++) {
            w.u32((uint32_t)t.pole_of[i].size());
            for (int32_t v : t.pole_of[i])
                w.i32(v);
            for (int32_t v : t.realign[i])
                w.i32(v);
            w.u32((uint32_t)t.poles[i].size());
            for (int32_t v : t.poles[i])
                w.i32(v);
        }
        w.u32((uint32_t)t.matrix.size());
        for (const MatrixEntry &cell : t.matrix) {
            w.i32(cell.spec);
            for (int32_t o : cell.offsets)
                w.i32(o);
        }
    }
    return seal_payload(IMAGE_MAGIC, w.out);
}

FileError deserialize_program(const uint8_t *data, size_t len,
                                      LinkedProgram &out) {
    std::vector<uint8_t> payload;
    FileError err =
        open_payload(data, len, IMAGE_MAGIC, payload);
    if (err != FileError::None)
        return err;
    PayloadReader r{payload.data(), payload.data() + payload.size()};

    out = LinkedProgram{};
    if (!read_classes(r, out.classes))
        return FileError::Malformed;
    uint32_t nfuncs = r.u32();
    for (uint32_t i = 0; i < nfuncs && !r.fail; i++) {
        FuncRecord f;
        if (!read_func(r, f))
            return FileError::Malformed;
        out.funcs.push_back(std::move(f));
    }
    out.main_index = r.i32();
    uint32_t ntables = r.u32();
    if (r.fail)
        return FileError::Malformed;
    for (uint32_t k = 0; k < ntables; k++) {
        DispatchTable t;
        t.family = r.str();
        uint8_t npos = r.u8();
        for (uint8_t i = 0; i < npos; i++)
            t.positions.push_back(r.i32());
        uint32_t nmem = r.u32();
        if (r.fail || nmem > (uint32_t)out.funcs.size())
            return FileError::Malformed;
        for (uint32_t i = 0; i < nmem; i++) {
            int32_t m = r.i32();
            if (m < 0 || m >= (int32_t)out.funcs.size())
                return FileError::Malformed;
            t.members.push_back(m);
        }
        size_t matrix_size = 1;
        for (uint8_t i = 0; i < npos; i++) {
            uint32_t U = r.u32();
            if (r.fail || U > 1u << 20)
                return FileError::Malformed;
            std::vector<int32_t> pole_of(U), realign(U);
            for (uint32_t j = 0; j < U; j++)
                pole_of[j] = r.i32();
            for (uint32_t j = 0; j < U; j++)
                realign[j] = r.i32();
            uint32_t npoles = r.u32();
            if (r.fail || npoles > U)
                return FileError::Malformed;
            std::vector<int32_t> poles(npoles);
            for (uint32_t j = 0; j < npoles; j++)
                poles[j] = r.i32();
            t.pole_of.push_back(std::move(pole_of));
            t.realign.push_back(std::move(realign));
            t.poles.push_back(std::move(poles));
            matrix_size *= npoles;
        }
        uint32_t ncells = r.u32();
        if (r.fail || ncells != matrix_size)
            return FileError::Malformed;
        for (uint32_t e = 0; e < ncells; e++) {
            MatrixEntry cell;
            cell.spec = r.i32();
            if (cell.spec >= (int32_t)out.funcs.size())
                return FileError::Malformed;
            for (uint8_t i = 0; i < npos; i++)
                cell.offsets.push_back(r.i32());
            t.matrix.push_back(std::move(cell));
        }
        out.tables.emplace(t.family, std::move(t));
    }
    if (r.fail || !r.done())
        return FileError::Malformed;
    if (out.main_index < 0 || out.main_index >= (int32_t)out.funcs.size())
        return FileError::Malformed;

    DiagnosticList rebuild;
    out.hierarchy = Hierarchy::build(out.classes, rebuild);
    if (!out.hierarchy.valid())
        return FileError::Malformed;
    size_t U = out.hierarchy.universe().size();
    for (const auto &[family, t] : out.tables)
        for (size_t i = 0; i < t.positions.size(); i++)
            if (t.pole_of[i].size() != U)
                return FileError::Malformed;

    for (size_t i = 0; i < out.funcs.size(); i++) {
        const FuncRecord &f = out.funcs[i];
        if (f.kind == FuncKind::Free)
            out.func_by_name[link_name(f)] = (int32_t)i;
    }
    return FileError::None;
}

// --------------------------------------------------------------- table dump

std::string dump_tables(const LinkedProgram &p) {
    const Hierarchy &h = p.hierarchy;
    std::ostringstream os;

    os << "classes:";
    for (const std::string &name : h.class_names())
        os << " " << name;
    os << "\n";

    auto universe = h.universe();
    os << "universe:";
    for (size_t i = 0; i < universe.size(); i++)
        os << (i ? ", " : " ") << dispatch_type_name(universe[i]);
    os << "\n";
    os << "edges:\n";
    for (const auto &[from, to] : h.universe_edges())
        os << "  " << dispatch_type_name(from) << " -> "
           << dispatch_type_name(to) << "\n";

    for (const auto &[family, t] : p.tables) {
        os << "family " << family << "\n";
        for (size_t k = 0; k < t.members.size(); k++) {
            const FuncRecord &f = p.funcs[t.members[k]];
            os << "  spec " << k << ": " << display_spec(f) << " -> "
               << type_name(f.return_type) << "\n";
        }
        for (size_t i = 0; i < t.positions.size(); i++) {
            os << "  position " << i + 1 << "\n";
            for (size_t k = 0; k < t.poles[i].size(); k++) {
                DispatchType pole = h.dispatch_from_id(t.poles[i][k]);
                os << "    pole P" << k + 1 << " = "
                   << dispatch_type_name(pole) << "\n";
                os << "    group P" << k + 1 << " {";
                bool first = true;
                for (size_t tid = 0; tid < universe.size(); tid++)
                    if (t.pole_of[i][tid] == (int32_t)k) {
                        os << (first ? " " : ", ")
                           << dispatch_type_name(universe[tid]);
                        first = false;
                    }
                os << " }\n";
            }
            os << "    selector:";
            for (size_t tid = 0; tid < universe.size(); tid++) {
                os << (tid ? ", " : " ") << dispatch_type_name(universe[tid])
                   << "=";
                if (t.pole_of[i][tid] < 0)
                    os << "-";
                else
                    os << "P" << t.pole_of[i][tid] + 1;
            }
            os << "\n";
            os << "    realign:";
            for (size_t tid = 0; tid < universe.size(); tid++) {
                os << (tid ? ", " : " ") << dispatch_type_name(universe[tid])
                   << "=";
                if (t.realign[i][tid] < 0)
                    os << "-";
                else
                    os << t.realign[i][tid];
            }
            os << "\n";
        }
        os << "  matrix:\n";
        std::vector<int32_t> idx(t.positions.size(), 0);
        for (const MatrixEntry &cell : t.matrix) {
            os << "    [";
            for (size_t i = 0; i < idx.size(); i++)
                os << (i ? ", " : "") << "P" << idx[i] + 1;
            os << "] -> ";
            if (cell.spec < 0) {
                os << "TRAP";
            } else {
                os << display_spec(p.funcs[cell.spec]) << " offsets (";
                for (size_t i = 0; i < cell.offsets.size(); i++)
                    os << (i ? ", " : "") << cell.offsets[i];
                os << ")";
            }
            os << "\n";
            for (size_t i = idx.size(); i-- > 0;) {
                if (++idx[i] < (int32_t)t.poles[i].size())
                    break;
                idx[i] = 0;
            }
        }
    }
    return os.str();
}

} // namespace oolang
