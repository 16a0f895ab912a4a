#include "oolang/typecheck.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "oolang/desugar.hpp"

namespace oolang {

bool more_specific(const Hierarchy &h, const FuncRecord &s1,
                   const FuncRecord &s2) {
    auto t1 = dispatch_tuple(s1);
    auto t2 = dispatch_tuple(s2);
    assert(t1.size() == t2.size());
    for (size_t i = 0; i < t1.size(); i++)
        if (!h.dispatch_subtype(t1[i], t2[i]).unique())
            return false;
    return true;
}

Applicability applicable(const Hierarchy &h, const FuncRecord &s,
                         const std::vector<DispatchType> &args) {
    auto params = dispatch_tuple(s);
    assert(params.size() == args.size());
    bool ambiguous = false;
    for (size_t i = 0; i < args.size(); i++) {
        SubtypeAnswer a = h.dispatch_subtype(args[i], params[i]);
        if (a.no())
            return Applicability::No;
        if (a.ambiguous())
            ambiguous = true;
    }
    return ambiguous ? Applicability::Ambiguous : Applicability::Unique;
}

bool return_compatible(const Hierarchy &h, const TypeRef &r1,
                       const TypeRef &r2) {
    if (r1 == r2)
        return true;
    if (r1.is_class() && r2.is_class())
        return h.subtype(r1.class_name, r2.class_name).unique();
    return false;
}

namespace {

std::string tuple_str(const std::vector<DispatchType> &tuple) {
    std::string out = "(";
    for (size_t i = 0; i < tuple.size(); i++) {
        if (i)
            out += ", ";
        out += dispatch_type_name(tuple[i]);
    }
    return out + ")";
}

struct ExprInfo {
    ir::ExprPtr node;
    TypeRef type = TypeRef::void_type();
    bool is_const = false;  // meaningful for class-typed values
    bool is_string = false; // bare string literal; only print may consume it
    std::string literal;
    bool bad = false;
};

ExprInfo bad_expr() {
    ExprInfo e;
    e.bad = true;
    e.node = std::make_unique<ir::Expr>();
    return e;
}

struct Checker {
    DiagnosticList &diags;
    Hierarchy h;
    std::vector<FuncRecord> funcs;
    std::vector<Span> spans;
    // "fn:" + link name for statically bound functions,
    // "spec:" + spec_key for dispatch-family members.
    std::map<std::string, size_t> index;
    std::map<std::string, std::vector<size_t>> families;
    std::vector<std::pair<const ast::FuncDecl *, size_t>> to_lower;

    explicit Checker(DiagnosticList &d) : diags(d) {}

    std::string link_name(const FuncRecord &rec) const {
        return rec.family.empty() ? rec.name : rec.family;
    }

    const FuncRecord *find_free(const std::string &name) const {
        auto it = index.find("fn:" + name);
        return it == index.end() ? nullptr : &funcs[it->second];
    }

    // ---- signature collection -------------------------------------------

    bool build_params(const ast::FuncDecl &d, std::vector<ParamRec> &out) {
        bool ok = true;
        std::set<std::string> names;
        for (const auto &p : d.params) {
            ParamRec rec{p.type, p.is_const, p.by_ref, p.name};
            if (p.type.is_class() && !h.has_class(p.type.class_name)) {
                diags.error(diag_code::undefined, p.span,
                            "unknown class '" + p.type.class_name +
                                "' in parameter type");
                ok = false;
            }
            if (p.type.is_scalar() && p.by_ref) {
                diags.error(diag_code::type, p.span,
                            "scalar parameters cannot be passed by reference");
                ok = false;
            }
            if (!p.name.empty() && !names.insert(p.name).second) {
                diags.error(diag_code::redefined, p.span,
                            "duplicate parameter name '" + p.name + "'");
                ok = false;
            }
            out.push_back(std::move(rec));
        }
        if (d.return_type.is_class() && !h.has_class(d.return_type.class_name)) {
            diags.error(diag_code::undefined, d.span,
                        "unknown class '" + d.return_type.class_name +
                            "' in return type");
            ok = false;
        }
        return ok;
    }

    void collect(const ast::FuncDecl &d) {
        FuncRecord rec;
        rec.name = d.name;
        rec.member_of = d.member_of;
        rec.return_type = d.return_type;
        if (!build_params(d, rec.params))
            return;

        if (d.is_multimethod()) {
            for (size_t i = 0; i < rec.params.size(); i++)
                if (rec.params[i].type.is_class())
                    rec.dispatch_positions.push_back((int)i);
            if (rec.dispatch_positions.empty()) {
                // No class-typed parameters: statically bound, but keyed by
                // the full scalar signature so overloads stay separate.
                rec.kind = FuncKind::Free;
                rec.family = family_key(rec.name, rec.params, false);
            } else {
                rec.kind = FuncKind::Multimethod;
                rec.family = family_key(rec.name, rec.params, false);
            }
        } else if (d.receiver_only) {
            rec.kind = FuncKind::Virtual;
            rec.family = family_key(rec.name, rec.params, true);
            rec.dispatch_positions = {0};
        } else {
            rec.kind = FuncKind::Free;
        }

        if (rec.kind == FuncKind::Free && rec.name == "main") {
            if (!rec.params.empty() || !(rec.return_type.is_scalar() &&
                                         rec.return_type.scalar ==
                                             ScalarType::Int))
                diags.error(diag_code::type, d.span,
                            "main must be declared as 'int main()'");
        }

        std::string key = rec.kind == FuncKind::Free ? "fn:" + link_name(rec)
                                                     : "spec:" + spec_key(rec);
        auto it = index.find(key);
        if (it == index.end()) {
            size_t idx = funcs.size();
            index.emplace(key, idx);
            if (!rec.family.empty())
                families[rec.family].push_back(idx);
            funcs.push_back(std::move(rec));
            spans.push_back(d.span);
            if (d.body)
                to_lower.emplace_back(&d, idx);
            return;
        }

        FuncRecord &prev = funcs[it->second];
        bool same = prev.params.size() == rec.params.size() &&
                    prev.return_type == rec.return_type;
        for (size_t i = 0; same && i < rec.params.size(); i++)
            same = prev.params[i].same_interface(rec.params[i]);
        if (!same) {
            Diagnostic diag = {Severity::Error, diag_code::redefined, d.span,
                               "conflicting declarations of '" +
                                   display_spec(rec) + "'",
                               {}};
            diag.related.push_back(spans[it->second]);
            diags.items.push_back(std::move(diag));
            return;
        }
        if (prev.member_of.empty())
            prev.member_of = rec.member_of;
        if (d.body) {
            bool prev_has_body =
                std::any_of(to_lower.begin(), to_lower.end(),
                            [&](const auto &p) { return p.second == it->second; });
            if (prev_has_body) {
                Diagnostic diag = {Severity::Error, diag_code::redefined,
                                   d.span,
                                   "redefinition of '" + display_spec(rec) +
                                       "'",
                                   {}};
                diag.related.push_back(spans[it->second]);
                diags.items.push_back(std::move(diag));
                return;
            }
            to_lower.emplace_back(&d, it->second);
        }
    }

    // ---- family-level declaration checks --------------------------------

    void check_families() {
        for (const auto &[family, members] : families) {
            const FuncRecord &first = funcs[members.front()];
            if (first.kind == FuncKind::Virtual)
                check_override_invariance(members);
            check_return_constraints(members);
            check_latent_conflicts(members);
        }
    }

    void check_override_invariance(const std::vector<size_t> &members) {
        const FuncRecord &base = funcs[members.front()];
        for (size_t k = 1; k < members.size(); k++) {
            const FuncRecord &rec = funcs[members[k]];
            bool same = rec.return_type == base.return_type;
            for (size_t i = 1; same && i < rec.params.size(); i++)
                same = rec.params[i].same_interface(base.params[i]);
            if (!same)
                diags.error(
                    diag_code::override_param, spans[members[k]],
                    "virtual function '" + rec.name + "' in class '" +
                        rec.member_of +
                        "' overrides with a different signature; parameter "
                        "and return types must not change on override");
        }
    }

    void check_return_constraints(const std::vector<size_t> &members) {
        for (size_t a : members)
            for (size_t b : members) {
                if (a == b)
                    continue;
                const FuncRecord &s1 = funcs[a];
                const FuncRecord &s2 = funcs[b];
                if (more_specific(h, s1, s2) &&
                    !return_compatible(h, s1.return_type, s2.return_type))
                    diags.warning(
                        diag_code::return_constraint_warn, spans[a],
                        "return type of '" + display_spec(s1) +
                            "' is not a unique subtype of the return type "
                            "of the less specific '" +
                            display_spec(s2) + "'");
            }
    }

    // Enumerates dispatch-type tuples; returns false when the space is too
    // large to search (nothing is reported in that case).
    bool for_each_tuple(size_t npos,
                        const std::function<bool(const std::vector<DispatchType> &)> &fn) {
        auto universe = h.universe();
        if (universe.empty())
            return true;
        double total = 1;
        for (size_t i = 0; i < npos; i++) {
            total *= (double)universe.size();
            if (total > 200000)
                return false;
        }
        std::vector<size_t> odo(npos, 0);
        std::vector<DispatchType> tuple(npos, universe[0]);
        while (true) {
            for (size_t i = 0; i < npos; i++)
                tuple[i] = universe[odo[i]];
            if (!fn(tuple))
                return true;
            size_t i = 0;
            for (; i < npos; i++) {
                if (++odo[i] < universe.size())
                    break;
                odo[i] = 0;
            }
            if (i == npos)
                return true;
        }
    }

    void check_latent_conflicts(const std::vector<size_t> &members) {
        for (size_t ai = 0; ai < members.size(); ai++)
            for (size_t bi = ai + 1; bi < members.size(); bi++) {
                const FuncRecord &s1 = funcs[members[ai]];
                const FuncRecord &s2 = funcs[members[bi]];
                if (more_specific(h, s1, s2) || more_specific(h, s2, s1))
                    continue;
                std::vector<DispatchType> witness;
                for_each_tuple(
                    s1.dispatch_positions.size(),
                    [&](const std::vector<DispatchType> &tuple) {
                        if (applicable(h, s1, tuple) != Applicability::Unique ||
                            applicable(h, s2, tuple) != Applicability::Unique)
                            return true;
                        for (size_t c : members) {
                            const FuncRecord &s3 = funcs[c];
                            if (&s3 == &s1 || &s3 == &s2)
                                continue;
                            if (applicable(h, s3, tuple) ==
                                    Applicability::Unique &&
                                more_specific(h, s3, s1) &&
                                more_specific(h, s3, s2))
                                return true; // covered
                        }
                        witness = tuple;
                        return false;
                    });
                if (!witness.empty())
                    diags.warning(
                        diag_code::latent_conflict, spans[members[bi]],
                        "'" + display_spec(s2) + "' conflicts with '" +
                            display_spec(s1) + "': at argument types " +
                            tuple_str(witness) +
                            " both apply and neither is more specific");
            }
    }

    // ---- invocation typing ----------------------------------------------

    std::vector<size_t> minimal_of(const std::vector<size_t> &set) {
        std::vector<size_t> out;
        for (size_t a : set) {
            bool dominated = false;
            for (size_t b : set)
                if (b != a && more_specific(h, funcs[b], funcs[a]) &&
                    !more_specific(h, funcs[a], funcs[b])) {
                    dominated = true;
                    break;
                }
            if (!dominated)
                out.push_back(a);
        }
        return out;
    }

    struct Invocation {
        bool ok = false;
        TypeRef ret = TypeRef::void_type();
        size_t static_winner = 0; // index into funcs; for interface reuse
    };

    Invocation type_invocation(const std::string &display_name,
                               const std::vector<size_t> &members,
                               const std::vector<DispatchType> &args,
                               const Span &span) {
        Invocation inv;
        std::vector<size_t> unique_set, ambig_set;
        for (size_t idx : members) {
            switch (applicable(h, funcs[idx], args)) {
            case Applicability::Unique: unique_set.push_back(idx); break;
            case Applicability::Ambiguous: ambig_set.push_back(idx); break;
            case Applicability::No: break;
            }
        }

        auto resolve_minimal = [&](const std::vector<size_t> &set,
                                   bool ambiguous_route) -> bool {
            std::vector<size_t> minimal = minimal_of(set);
            assert(!minimal.empty());
            if (minimal.size() == 1) {
                if (ambiguous_route)
                    diags.warning(diag_code::ambig_subtype, span,
                                  "arguments " + tuple_str(args) +
                                      " are ambiguous subtypes of the "
                                      "parameters of '" +
                                      display_spec(funcs[minimal[0]]) + "'");
                inv.ok = true;
                inv.ret = funcs[minimal[0]].return_type;
                inv.static_winner = minimal[0];
                return true;
            }
            bool same_ret = true;
            for (size_t idx : minimal)
                same_ret = same_ret && funcs[idx].return_type ==
                                           funcs[minimal[0]].return_type;
            if (same_ret) {
                diags.warning(ambiguous_route ? diag_code::ambig_subtype
                                              : diag_code::no_most_specific,
                              span,
                              "no most specific specialization of '" +
                                  display_name + "' for arguments " +
                                  tuple_str(args) +
                                  "; all candidates return the same type");
                inv.ok = true;
                inv.ret = funcs[minimal[0]].return_type;
                inv.static_winner = minimal[0];
                return true;
            }
            std::string msg = "cannot establish the return type of '" +
                              display_name + "' for arguments " +
                              tuple_str(args) + "; candidates:";
            for (size_t idx : minimal)
                msg += " '" + display_spec(funcs[idx]) + "'";
            diags.error(diag_code::ambiguous_return, span, msg);
            return false;
        };

        if (!unique_set.empty()) {
            resolve_minimal(unique_set, false);
            return inv;
        }
        if (!ambig_set.empty()) {
            resolve_minimal(ambig_set, true);
            return inv;
        }
        diags.error(diag_code::no_applicable, span,
                    "no applicable specialization of '" + display_name +
                        "' for argument types " + tuple_str(args));
        return inv;
    }

    // ---- body lowering --------------------------------------------------

    struct Var {
        std::string name;
        TypeRef type;
        bool is_const = false;
        int slot = 0;
    };

    struct BodyCtx {
        const FuncRecord *rec = nullptr;
        std::vector<std::vector<Var>> scopes;
        int next_slot = 0;
        bool in_member = false;
        std::string member_class;
    };

    BodyCtx *ctx = nullptr;

    const Var *lookup(const std::string &name) {
        for (auto it = ctx->scopes.rbegin(); it != ctx->scopes.rend(); ++it)
            for (const auto &v : *it)
                if (v.name == name)
                    return &v;
        return nullptr;
    }

    static ir::ExprPtr mk(ir::Expr &&e) {
        return std::make_unique<ir::Expr>(std::move(e));
    }

    // bool-to-int widening, permitted at return, assignment and
    // initialization positions only.
    bool coerce_scalar(ExprInfo &info, ScalarType want, const Span &span,
                       const char *what) {
        if (info.bad)
            return false;
        if (info.is_string || !info.type.is_scalar()) {
            diags.error(diag_code::type, span,
                        std::string(what) + " must have type " +
                            scalar_name(want));
            return false;
        }
        if (info.type.scalar == want)
            return true;
        if (want == ScalarType::Int && info.type.scalar == ScalarType::Bool) {
            ir::Unary widen;
            widen.op = ir::UnOp::BoolToInt;
            widen.operand = std::move(info.node);
            info.node = mk(ir::Expr{std::move(widen)});
            info.type = TypeRef::scalar_type(ScalarType::Int);
            return true;
        }
        diags.error(diag_code::type, span,
                    std::string(what) + " has type " + type_name(info.type) +
                        " but " + scalar_name(want) + " is required");
        return false;
    }

    ExprInfo check_expr(const ast::Expr &e);

    std::vector<ExprInfo> check_args(const std::vector<ast::ExprPtr> &args) {
        std::vector<ExprInfo> out;
        for (const auto &a : args)
            out.push_back(check_expr(*a));
        return out;
    }

    // Fits one argument to a statically typed parameter; returns the lowered
    // argument or nullopt after reporting. Inserts Convert for class upcasts.
    std::optional<ir::ExprPtr> fit_static_arg(ExprInfo &arg,
                                              const ParamRec &param,
                                              const Span &span) {
        if (arg.bad)
            return std::nullopt;
        if (param.type.is_scalar()) {
            if (arg.is_string || !arg.type.is_scalar() ||
                arg.type.scalar != param.type.scalar) {
                diags.error(diag_code::type, span,
                            "argument has type " +
                                (arg.is_string ? std::string("string")
                                               : type_name(arg.type)) +
                                " but " + type_name(param.type) +
                                " is required");
                return std::nullopt;
            }
            return std::move(arg.node);
        }
        if (arg.is_string || !arg.type.is_class()) {
            diags.error(diag_code::type, span,
                        "argument must be an instance of class '" +
                            param.type.class_name + "'");
            return std::nullopt;
        }
        if (arg.is_const && !param.is_const) {
            diags.error(diag_code::type, span,
                        "cannot pass a const object as the non-const "
                        "parameter '" +
                            param.type.class_name + "'");
            return std::nullopt;
        }
        SubtypeAnswer sub =
            h.subtype(arg.type.class_name, param.type.class_name);
        if (sub.ambiguous()) {
            diags.error(diag_code::type, span,
                        "conversion from '" + arg.type.class_name + "' to '" +
                            param.type.class_name +
                            "' is ambiguous: the target occurs " +
                            std::to_string(sub.offsets.size()) + " times");
            return std::nullopt;
        }
        if (sub.no()) {
            diags.error(diag_code::type, span,
                        "argument of class '" + arg.type.class_name +
                            "' is not a subtype of '" + param.type.class_name +
                            "'");
            return std::nullopt;
        }
        if (arg.type.class_name == param.type.class_name)
            return std::move(arg.node);
        auto step = h.convert_step(arg.type.class_name, param.type.class_name);
        assert(step);
        ir::Convert cv;
        cv.value = std::move(arg.node);
        cv.to_class = param.type.class_name;
        cv.anchor = step->anchor;
        cv.delta = step->offset;
        cv.make_const = param.is_const;
        return mk(ir::Expr{std::move(cv)});
    }

    // Pure compatibility test used to decide whether a user-defined
    // print/printf beats the builtin. Mirrors fit_static_arg sans effects.
    bool args_fit(const std::vector<ExprInfo> &args, const FuncRecord &fn) {
        if (args.size() != fn.params.size())
            return false;
        for (size_t i = 0; i < args.size(); i++) {
            const ExprInfo &a = args[i];
            const ParamRec &p = fn.params[i];
            if (a.bad)
                return false;
            if (p.type.is_scalar()) {
                if (a.is_string || !a.type.is_scalar() ||
                    a.type.scalar != p.type.scalar)
                    return false;
            } else {
                if (a.is_string || !a.type.is_class())
                    return false;
                if (a.is_const && !p.is_const)
                    return false;
                if (!h.subtype(a.type.class_name, p.type.class_name).unique())
                    return false;
            }
        }
        return true;
    }

    ExprInfo lower_static_call(const FuncRecord &fn, const std::string &link,
                               std::vector<ExprInfo> args, const Span &span) {
        if (args.size() != fn.params.size()) {
            diags.error(diag_code::type, span,
                        "'" + fn.name + "' takes " +
                            std::to_string(fn.params.size()) +
                            " argument(s), " + std::to_string(args.size()) +
                            " given");
            return bad_expr();
        }
        ir::CallFn call;
        call.name = link;
        bool ok = true;
        for (size_t i = 0; i < args.size(); i++) {
            auto lowered = fit_static_arg(args[i], fn.params[i], span);
            if (!lowered) {
                ok = false;
                continue;
            }
            call.args.push_back(std::move(*lowered));
        }
        if (!ok)
            return bad_expr();
        ExprInfo info;
        info.node = mk(ir::Expr{std::move(call)});
        info.type = fn.return_type;
        return info;
    }

    // Dispatched invocation: family members must share scalar signature and
    // dispatch positions; class arguments at dispatch positions stay raw
    // (realigned at run time), scalar positions are checked exactly, class
    // non-dispatch positions do not exist for multimethods and are converted
    // for virtual families.
    ExprInfo lower_dispatch_call(const std::string &display_name,
                                 const std::string &family,
                                 std::vector<ExprInfo> args, const Span &span) {
        const auto &members = families.at(family);
        const FuncRecord &shape = funcs[members.front()];
        assert(args.size() == shape.params.size());

        std::vector<DispatchType> tuple;
        for (int pos : shape.dispatch_positions) {
            const ExprInfo &a = args[pos];
            assert(a.type.is_class());
            tuple.push_back({a.type.class_name, a.is_const});
        }
        Invocation inv = type_invocation(display_name, members, tuple, span);
        if (!inv.ok)
            return bad_expr();

        ir::CallMm call;
        call.family = family;
        if (inv.ret.is_class())
            call.ret_class = inv.ret.class_name;
        std::set<int> dpos(shape.dispatch_positions.begin(),
                           shape.dispatch_positions.end());
        bool ok = true;
        for (size_t i = 0; i < args.size(); i++) {
            if (dpos.count((int)i)) {
                call.args.push_back(std::move(args[i].node));
                continue;
            }
            auto lowered = fit_static_arg(args[i], shape.params[i], span);
            if (!lowered) {
                ok = false;
                continue;
            }
            call.args.push_back(std::move(*lowered));
        }
        if (!ok)
            return bad_expr();
        ExprInfo info;
        info.node = mk(ir::Expr{std::move(call)});
        info.type = inv.ret;
        return info;
    }

    ExprInfo lower_mm_call(const std::string &name,
                           std::vector<ExprInfo> args, const Span &span) {
        std::string markers;
        for (const auto &a : args) {
            if (a.bad)
                return bad_expr();
            if (a.is_string || a.type.is_void()) {
                diags.error(diag_code::type, span,
                            "invalid argument in invocation of '" + name +
                                "'");
                return bad_expr();
            }
            if (a.type.is_class())
                markers += 'c';
            else
                markers += a.type.scalar == ScalarType::Int    ? 'i'
                           : a.type.scalar == ScalarType::Bool ? 'b'
                                                               : 'f';
        }
        std::string family =
            name + "/" + std::to_string(args.size()) + ":" + markers;
        if (families.count(family))
            return lower_dispatch_call(name, family, std::move(args), span);
        if (const FuncRecord *fn = find_free(family))
            return lower_static_call(*fn, family, std::move(args), span);
        diags.error(diag_code::no_applicable, span,
                    "no applicable specialization of '" + name +
                        "' for these argument types");
        return bad_expr();
    }

    ExprInfo lower_method_call(ExprInfo recv, const std::string &method,
                               std::vector<ExprInfo> args, const Span &span) {
        if (recv.bad)
            return bad_expr();
        if (!recv.type.is_class()) {
            diags.error(diag_code::type, span,
                        "method invocation requires an object receiver");
            return bad_expr();
        }
        std::string family =
            method + "/" + std::to_string(1 + args.size());
        auto it = families.find(family);
        if (it == families.end()) {
            diags.error(diag_code::undefined, span,
                        "class '" + recv.type.class_name +
                            "' has no member function '" + method +
                            "' taking " + std::to_string(args.size()) +
                            " argument(s)");
            return bad_expr();
        }
        std::vector<ExprInfo> all;
        all.push_back(std::move(recv));
        for (auto &a : args)
            all.push_back(std::move(a));
        return lower_dispatch_call(method, family, std::move(all), span);
    }

    ExprInfo check_field(ExprInfo base, const std::string &field,
                         const Span &span) {
        if (base.bad)
            return bad_expr();
        if (base.is_string || !base.type.is_class()) {
            diags.error(diag_code::type, span,
                        "field access requires an object");
            return bad_expr();
        }
        auto res = h.resolve_field(base.type.class_name, field);
        if (res.kind == Hierarchy::FieldResolution::Kind::None) {
            diags.error(diag_code::undefined, span,
                        "class '" + base.type.class_name +
                            "' has no field '" + field + "'");
            return bad_expr();
        }
        if (res.kind == Hierarchy::FieldResolution::Kind::Ambiguous) {
            diags.error(diag_code::type, span,
                        "field '" + field + "' is ambiguous in class '" +
                            base.type.class_name + "'");
            return bad_expr();
        }
        ir::FieldGet get;
        get.base = std::move(base.node);
        get.anchor = res.anchor;
        get.offset = res.offset;
        get.type = res.type;
        ExprInfo info;
        info.node = mk(ir::Expr{std::move(get)});
        info.type = TypeRef::scalar_type(res.type);
        info.is_const = base.is_const;
        return info;
    }

    // ---- statements ------------------------------------------------------

    void check_block(const ast::Block &b, ir::Block &out);
    void check_stmt(const ast::Stmt &s, ir::Block &out);
    // Lowers a branch/loop body (single statement or block) into `out`;
    // the caller has already opened the scope.
    void check_into(const ast::Stmt &s, ir::Block &out);
    void lower_body(const ast::FuncDecl &decl, FuncRecord &rec);

    bool try_builtin_print(const ast::Call &call, const Span &span,
                           ir::Block &out);
};

ExprInfo Checker::check_expr(const ast::Expr &e) {
    return std::visit(
        [&](const auto &n) -> ExprInfo {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::IntLit>) {
                ExprInfo info;
                info.node = mk(ir::Expr{ir::IntLit{n.value}});
                info.type = TypeRef::scalar_type(ScalarType::Int);
                return info;
            } else if constexpr (std::is_same_v<T, ast::FloatLit>) {
                ExprInfo info;
                info.node = mk(ir::Expr{ir::FloatLit{n.value}});
                info.type = TypeRef::scalar_type(ScalarType::Float);
                return info;
            } else if constexpr (std::is_same_v<T, ast::BoolLit>) {
                ExprInfo info;
                info.node = mk(ir::Expr{ir::BoolLit{n.value}});
                info.type = TypeRef::scalar_type(ScalarType::Bool);
                return info;
            } else if constexpr (std::is_same_v<T, ast::StringLit>) {
                ExprInfo info;
                info.node = mk(ir::Expr{});
                info.is_string = true;
                info.literal = n.value;
                return info;
            } else if constexpr (std::is_same_v<T, ast::NameRef>) {
                if (const Var *v = lookup(n.name)) {
                    ExprInfo info;
                    info.node = mk(ir::Expr{ir::LocalGet{v->slot}});
                    info.type = v->type;
                    info.is_const = v->is_const;
                    return info;
                }
                if (ctx->in_member) {
                    auto res = h.resolve_field(ctx->member_class, n.name);
                    if (res.kind == Hierarchy::FieldResolution::Kind::Found) {
                        ir::FieldGet get;
                        get.base = mk(ir::Expr{ir::LocalGet{0}});
                        get.anchor = res.anchor;
                        get.offset = res.offset;
                        get.type = res.type;
                        ExprInfo info;
                        info.node = mk(ir::Expr{std::move(get)});
                        info.type = TypeRef::scalar_type(res.type);
                        return info;
                    }
                    if (res.kind ==
                        Hierarchy::FieldResolution::Kind::Ambiguous) {
                        diags.error(diag_code::type, e.span,
                                    "field '" + n.name +
                                        "' is ambiguous in class '" +
                                        ctx->member_class + "'");
                        return bad_expr();
                    }
                }
                diags.error(diag_code::undefined, e.span,
                            "undefined name '" + n.name + "'");
                return bad_expr();
            } else if constexpr (std::is_same_v<T, ast::FieldAccess>) {
                return check_field(check_expr(*n.base), n.field, e.span);
            } else if constexpr (std::is_same_v<T, ast::Call>) {
                std::vector<ExprInfo> args = check_args(n.args);
                if (!n.callee.empty() && n.callee[0] == '@')
                    return lower_mm_call(n.callee, std::move(args), e.span);
                if (const FuncRecord *fn = find_free(n.callee)) {
                    bool is_print_name =
                        n.callee == "print" || n.callee == "printf";
                    if (!is_print_name || args_fit(args, *fn))
                        return lower_static_call(*fn, n.callee,
                                                 std::move(args), e.span);
                }
                if (ctx->in_member) {
                    // Bare call to a member function of the enclosing class.
                    std::string family =
                        n.callee + "/" + std::to_string(1 + args.size());
                    if (families.count(family)) {
                        ExprInfo recv;
                        recv.node = mk(ir::Expr{ir::LocalGet{0}});
                        recv.type = TypeRef::class_type(ctx->member_class);
                        return lower_method_call(std::move(recv), n.callee,
                                                 std::move(args), e.span);
                    }
                }
                if (n.callee == "print" || n.callee == "printf") {
                    diags.error(diag_code::type, e.span,
                                "'" + n.callee +
                                    "' cannot be used as a value; call it as "
                                    "a statement");
                    return bad_expr();
                }
                diags.error(diag_code::undefined, e.span,
                            "call to undefined function '" + n.callee + "'");
                return bad_expr();
            } else if constexpr (std::is_same_v<T, ast::MethodCall>) {
                return lower_method_call(check_expr(*n.receiver), n.method,
                                         check_args(n.args), e.span);
            } else if constexpr (std::is_same_v<T, ast::Unary>) {
                ExprInfo operand = check_expr(*n.operand);
                if (operand.bad)
                    return bad_expr();
                if (n.op == "-") {
                    if (!operand.type.is_scalar() ||
                        operand.type.scalar == ScalarType::Bool) {
                        diags.error(diag_code::type, e.span,
                                    "unary '-' requires int or float");
                        return bad_expr();
                    }
                    ExprInfo info;
                    info.type = operand.type;
                    ir::Unary u;
                    u.op = ir::UnOp::Neg;
                    u.operand = std::move(operand.node);
                    info.node = mk(ir::Expr{std::move(u)});
                    return info;
                }
                if (!operand.type.is_scalar() ||
                    operand.type.scalar != ScalarType::Bool) {
                    diags.error(diag_code::type, e.span,
                                "'!' requires a bool operand");
                    return bad_expr();
                }
                ExprInfo info;
                info.type = operand.type;
                ir::Unary u;
                u.op = ir::UnOp::Not;
                u.operand = std::move(operand.node);
                info.node = mk(ir::Expr{std::move(u)});
                return info;
            } else {
                static_assert(std::is_same_v<T, ast::Binary>);
                ExprInfo lhs = check_expr(*n.lhs);
                ExprInfo rhs = check_expr(*n.rhs);
                if (lhs.bad || rhs.bad)
                    return bad_expr();
                static const std::map<std::string, ir::BinOp> ops = {
                    {"+", ir::BinOp::Add}, {"-", ir::BinOp::Sub},
                    {"*", ir::BinOp::Mul}, {"/", ir::BinOp::Div},
                    {"%", ir::BinOp::Mod}, {"<", ir::BinOp::Lt},
                    {"<=", ir::BinOp::Le}, {">", ir::BinOp::Gt},
                    {">=", ir::BinOp::Ge}, {"==", ir::BinOp::Eq},
                    {"!=", ir::BinOp::Ne}, {"&&", ir::BinOp::And},
                    {"||", ir::BinOp::Or}};
                ir::BinOp op = ops.at(n.op);
                auto fail = [&](const std::string &msg) {
                    diags.error(diag_code::type, e.span, msg);
                    return bad_expr();
                };
                if (lhs.is_string || rhs.is_string)
                    return fail("string literals cannot be used with '" +
                                n.op + "'");
                if (!lhs.type.is_scalar() || !rhs.type.is_scalar())
                    return fail("operator '" + n.op +
                                "' requires scalar operands");
                if (lhs.type.scalar != rhs.type.scalar)
                    return fail("operands of '" + n.op +
                                "' have different types " +
                                type_name(lhs.type) + " and " +
                                type_name(rhs.type));
                ScalarType st = lhs.type.scalar;
                ScalarType result = st;
                switch (op) {
                case ir::BinOp::Add:
                case ir::BinOp::Sub:
                case ir::BinOp::Mul:
                case ir::BinOp::Div:
                    if (st == ScalarType::Bool)
                        return fail("operator '" + n.op +
                                    "' requires int or float");
                    break;
                case ir::BinOp::Mod:
                    if (st != ScalarType::Int)
                        return fail("operator '%' requires int operands");
                    break;
                case ir::BinOp::Lt:
                case ir::BinOp::Le:
                case ir::BinOp::Gt:
                case ir::BinOp::Ge:
                    if (st == ScalarType::Bool)
                        return fail("comparison requires int or float");
                    result = ScalarType::Bool;
                    break;
                case ir::BinOp::Eq:
                case ir::BinOp::Ne:
                    result = ScalarType::Bool;
                    break;
                case ir::BinOp::And:
                case ir::BinOp::Or:
                    if (st != ScalarType::Bool)
                        return fail("'" + n.op + "' requires bool operands");
                    break;
                }
                ir::Binary b;
                b.op = op;
                b.operand = st;
                b.lhs = std::move(lhs.node);
                b.rhs = std::move(rhs.node);
                ExprInfo info;
                info.node = mk(ir::Expr{std::move(b)});
                info.type = TypeRef::scalar_type(result);
                return info;
            }
        },
        e.node);
}

// Lowers `print`/`printf` statements to PrintStmt when the builtin applies.
// Returns false if the call should go through normal expression checking
// (user-defined function wins).
bool Checker::try_builtin_print(const ast::Call &call, const Span &span,
                                ir::Block &out) {
    bool is_print = call.callee == "print";
    bool is_printf = call.callee == "printf";
    if (!is_print && !is_printf)
        return false;
    std::vector<ExprInfo> args = check_args(call.args);
    for (const auto &a : args)
        if (a.bad)
            return true; // error already reported
    if (const FuncRecord *fn = find_free(call.callee))
        if (args_fit(args, *fn)) {
            ExprInfo info =
                lower_static_call(*fn, call.callee, std::move(args), span);
            if (!info.bad)
                out.stmts.push_back(ir::Stmt{ir::ExprStmt{std::move(info.node)}});
            return true;
        }

    ir::PrintStmt ps;
    if (is_print) {
        if (args.size() != 1) {
            diags.error(diag_code::type, span, "print takes one argument");
            return true;
        }
        if (args[0].is_string) {
            ps.mode = ir::PrintMode::Literal;
            ps.format = args[0].literal;
        } else if (args[0].type.is_scalar()) {
            ps.mode = ir::PrintMode::Value;
            ps.arg_types.push_back(args[0].type.scalar);
            ps.args.push_back(std::move(args[0].node));
        } else {
            diags.error(diag_code::type, span,
                        "print requires a scalar or a string literal");
            return true;
        }
    } else {
        if (args.empty() || !args[0].is_string) {
            diags.error(diag_code::type, span,
                        "printf requires a literal format string");
            return true;
        }
        ps.mode = ir::PrintMode::Format;
        ps.format = args[0].literal;
        std::vector<ScalarType> wanted;
        for (size_t i = 0; i + 1 < ps.format.size(); i++) {
            if (ps.format[i] != '%')
                continue;
            char c = ps.format[i + 1];
            if (c == '%') {
                i++;
                continue;
            }
            if (c == 'd')
                wanted.push_back(ScalarType::Int);
            else if (c == 'b')
                wanted.push_back(ScalarType::Bool);
            else if (c == 'f')
                wanted.push_back(ScalarType::Float);
            else {
                diags.error(diag_code::type, span,
                            std::string("unknown conversion '%") + c +
                                "' in printf format");
                return true;
            }
            i++;
        }
        if (wanted.size() != args.size() - 1) {
            diags.error(diag_code::type, span,
                        "printf format expects " +
                            std::to_string(wanted.size()) +
                            " argument(s), " +
                            std::to_string(args.size() - 1) + " given");
            return true;
        }
        for (size_t i = 0; i < wanted.size(); i++) {
            ExprInfo &a = args[i + 1];
            if (a.is_string || !a.type.is_scalar() ||
                a.type.scalar != wanted[i]) {
                diags.error(diag_code::type, span,
                            "printf argument " + std::to_string(i + 1) +
                                " does not match its conversion");
                return true;
            }
            ps.arg_types.push_back(wanted[i]);
            ps.args.push_back(std::move(a.node));
        }
    }
    out.stmts.push_back(ir::Stmt{std::move(ps)});
    return true;
}

void Checker::check_stmt(const ast::Stmt &s, ir::Block &out) {
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::Block>) {
                if (!n.scoped) {
                    // Declaration group: lower in place, no nested scope.
                    check_block(n, out);
                    return;
                }
                ir::Block inner;
                ctx->scopes.emplace_back();
                check_block(n, inner);
                ctx->scopes.pop_back();
                out.stmts.push_back(ir::Stmt{std::move(inner)});
            } else if constexpr (std::is_same_v<T, ast::VarDecl>) {
                for (const auto &v : ctx->scopes.back())
                    if (v.name == n.name) {
                        diags.error(diag_code::redefined, s.span,
                                    "redefinition of variable '" + n.name +
                                        "'");
                        return;
                    }
                if (n.type.is_class()) {
                    if (!h.has_class(n.type.class_name)) {
                        diags.error(diag_code::undefined, s.span,
                                    "unknown class '" + n.type.class_name +
                                        "'");
                        return;
                    }
                    if (n.init) {
                        diags.error(diag_code::type, s.span,
                                    "object variables cannot be initialized; "
                                    "objects are default-constructed");
                        return;
                    }
                    int slot = ctx->next_slot++;
                    ctx->scopes.back().push_back(
                        {n.name, n.type, false, slot});
                    out.stmts.push_back(
                        ir::Stmt{ir::LocalObject{slot, n.type.class_name}});
                    return;
                }
                int slot = ctx->next_slot++;
                ir::LocalScalar ls;
                ls.slot = slot;
                ls.type = n.type.scalar;
                if (n.init) {
                    ExprInfo init = check_expr(*n.init);
                    if (!coerce_scalar(init, n.type.scalar, s.span,
                                       "initializer"))
                        return;
                    ls.init = std::move(init.node);
                }
                ctx->scopes.back().push_back({n.name, n.type, false, slot});
                out.stmts.push_back(ir::Stmt{std::move(ls)});
            } else if constexpr (std::is_same_v<T, ast::Assign>) {
                ExprInfo value = check_expr(*n.value);
                if (auto *name = std::get_if<ast::NameRef>(&n.target->node)) {
                    if (const Var *v = lookup(name->name)) {
                        if (v->type.is_class()) {
                            diags.error(diag_code::type, s.span,
                                        "objects cannot be assigned");
                            return;
                        }
                        if (v->is_const) {
                            diags.error(diag_code::type, s.span,
                                        "cannot assign to const '" +
                                            name->name + "'");
                            return;
                        }
                        if (!coerce_scalar(value, v->type.scalar, s.span,
                                           "assigned value"))
                            return;
                        out.stmts.push_back(ir::Stmt{
                            ir::AssignLocal{v->slot, std::move(value.node)}});
                        return;
                    }
                    if (ctx->in_member) {
                        auto res =
                            h.resolve_field(ctx->member_class, name->name);
                        if (res.kind ==
                            Hierarchy::FieldResolution::Kind::Found) {
                            if (!coerce_scalar(value, res.type, s.span,
                                               "assigned value"))
                                return;
                            ir::AssignField af;
                            af.base = mk(ir::Expr{ir::LocalGet{0}});
                            af.anchor = res.anchor;
                            af.offset = res.offset;
                            af.value = std::move(value.node);
                            out.stmts.push_back(ir::Stmt{std::move(af)});
                            return;
                        }
                        if (res.kind ==
                            Hierarchy::FieldResolution::Kind::Ambiguous) {
                            diags.error(diag_code::type, s.span,
                                        "field '" + name->name +
                                            "' is ambiguous in class '" +
                                            ctx->member_class + "'");
                            return;
                        }
                    }
                    diags.error(diag_code::undefined, s.span,
                                "undefined name '" + name->name + "'");
                    return;
                }
                const auto &fa = std::get<ast::FieldAccess>(n.target->node);
                ExprInfo base = check_expr(*fa.base);
                if (base.bad)
                    return;
                if (!base.type.is_class()) {
                    diags.error(diag_code::type, s.span,
                                "field assignment requires an object");
                    return;
                }
                if (base.is_const) {
                    diags.error(diag_code::type, s.span,
                                "cannot assign to a field of a const object");
                    return;
                }
                auto res = h.resolve_field(base.type.class_name, fa.field);
                if (res.kind == Hierarchy::FieldResolution::Kind::None) {
                    diags.error(diag_code::undefined, s.span,
                                "class '" + base.type.class_name +
                                    "' has no field '" + fa.field + "'");
                    return;
                }
                if (res.kind == Hierarchy::FieldResolution::Kind::Ambiguous) {
                    diags.error(diag_code::type, s.span,
                                "field '" + fa.field +
                                    "' is ambiguous in class '" +
                                    base.type.class_name + "'");
                    return;
                }
                if (!coerce_scalar(value, res.type, s.span, "assigned value"))
                    return;
                ir::AssignField af;
                af.base = std::move(base.node);
                af.anchor = res.anchor;
                af.offset = res.offset;
                af.value = std::move(value.node);
                out.stmts.push_back(ir::Stmt{std::move(af)});
            } else if constexpr (std::is_same_v<T, ast::ExprStmt>) {
                if (auto *call = std::get_if<ast::Call>(&n.expr->node))
                    if (try_builtin_print(*call, n.expr->span, out))
                        return;
                ExprInfo info = check_expr(*n.expr);
                if (info.bad)
                    return;
                if (info.is_string) {
                    diags.error(diag_code::type, s.span,
                                "string literal is not a statement");
                    return;
                }
                out.stmts.push_back(ir::Stmt{ir::ExprStmt{std::move(info.node)}});
            } else if constexpr (std::is_same_v<T, ast::Return>) {
                const TypeRef &want = ctx->rec->return_type;
                ir::ReturnStmt ret;
                if (want.is_void()) {
                    if (n.value) {
                        diags.error(diag_code::type, s.span,
                                    "void function cannot return a value");
                        return;
                    }
                } else if (!n.value) {
                    diags.error(diag_code::type, s.span,
                                "return value required");
                    return;
                } else if (want.is_scalar()) {
                    ExprInfo value = check_expr(*n.value);
                    if (!coerce_scalar(value, want.scalar, s.span,
                                       "returned value"))
                        return;
                    ret.value = std::move(value.node);
                } else {
                    ExprInfo value = check_expr(*n.value);
                    ParamRec as_param{want, true, true, ""};
                    auto lowered = fit_static_arg(value, as_param, s.span);
                    if (!lowered)
                        return;
                    ret.value = std::move(*lowered);
                }
                out.stmts.push_back(ir::Stmt{std::move(ret)});
            } else if constexpr (std::is_same_v<T, ast::If>) {
                ExprInfo cond = check_expr(*n.cond);
                if (!cond.bad &&
                    (!cond.type.is_scalar() ||
                     cond.type.scalar != ScalarType::Bool))
                    diags.error(diag_code::type, s.span,
                                "if condition must be bool");
                ir::IfStmt st;
                st.cond = cond.bad ? mk(ir::Expr{ir::BoolLit{false}})
                                   : std::move(cond.node);
                ctx->scopes.emplace_back();
                check_into(*n.then_body, st.then_body);
                ctx->scopes.pop_back();
                if (n.else_body) {
                    st.else_body.emplace();
                    ctx->scopes.emplace_back();
                    check_into(*n.else_body, *st.else_body);
                    ctx->scopes.pop_back();
                }
                out.stmts.push_back(ir::Stmt{std::move(st)});
            } else if constexpr (std::is_same_v<T, ast::While>) {
                ExprInfo cond = check_expr(*n.cond);
                if (!cond.bad &&
                    (!cond.type.is_scalar() ||
                     cond.type.scalar != ScalarType::Bool))
                    diags.error(diag_code::type, s.span,
                                "while condition must be bool");
                ir::WhileStmt st;
                st.cond = cond.bad ? mk(ir::Expr{ir::BoolLit{false}})
                                   : std::move(cond.node);
                ctx->scopes.emplace_back();
                check_into(*n.body, st.body);
                ctx->scopes.pop_back();
                out.stmts.push_back(ir::Stmt{std::move(st)});
            } else if constexpr (std::is_same_v<T, ast::Empty>) {
                // nothing
            }
        },
        s.node);
}

void Checker::check_block(const ast::Block &b, ir::Block &out) {
    for (const auto &s : b.stmts)
        check_stmt(*s, out);
}

void Checker::check_into(const ast::Stmt &s, ir::Block &out) {
    if (const auto *b = std::get_if<ast::Block>(&s.node)) {
        check_block(*b, out);
        return;
    }
    check_stmt(s, out);
}

void Checker::lower_body(const ast::FuncDecl &decl, FuncRecord &rec) {
    BodyCtx bc;
    bc.rec = &rec;
    bc.in_member = !rec.member_of.empty();
    bc.member_class = rec.member_of;
    bc.scopes.emplace_back();
    for (size_t i = 0; i < rec.params.size(); i++) {
        const ParamRec &p = rec.params[i];
        if (!p.name.empty())
            bc.scopes.back().push_back({p.name, p.type, p.is_const, (int)i});
    }
    bc.next_slot = (int)rec.params.size();

    ctx = &bc;
    auto body = std::make_shared<ir::Body>();
    check_block(*decl.body, body->block);
    body->frame_size = bc.next_slot;
    ctx = nullptr;
    rec.body = std::move(body);
}

} // namespace

Module check_unit(ast::Unit unit, DiagnosticList &diags) {
    desugar_members(unit);

    std::vector<ClassInfo> classes;
    for (const auto &c : unit.classes) {
        ClassInfo info;
        info.name = c.name;
        info.span = c.span;
        for (const auto &p : c.parents)
            info.parents.push_back({p.name, p.is_virtual, p.is_public});
        std::set<std::string> fields;
        for (const auto &f : c.fields) {
            if (!fields.insert(f.name).second) {
                diags.error(diag_code::redefined, f.span,
                            "duplicate field '" + f.name + "' in class '" +
                                c.name + "'");
                continue;
            }
            info.fields.push_back({f.name, f.type});
        }
        classes.push_back(std::move(info));
    }

    Checker ck(diags);
    ck.h = Hierarchy::build(classes, diags);
    if (!ck.h.valid()) {
        Module out;
        out.classes = std::move(classes);
        return out;
    }

    for (const auto &f : unit.functions)
        ck.collect(f);
    for (const auto &f : unit.multimethods)
        ck.collect(f);
    for (const auto &f : unit.virtual_specs)
        ck.collect(f);

    ck.check_families();

    for (auto &[decl, idx] : ck.to_lower)
        ck.lower_body(*decl, ck.funcs[idx]);

    Module out;
    out.classes = std::move(classes);
    out.funcs = std::move(ck.funcs);
    return out;
}

} // namespace oolang
