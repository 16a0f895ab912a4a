#include "oolang/runtime.hpp"

#include <cassert>
#include <charconv>
#include <climits>
#include <iostream>
#include <memory>
#include <sstream>

namespace oolang::rt {

namespace {

struct RuntimeFault {
    std::string message;
};

[[noreturn]] void fault(const std::string &message) {
    throw RuntimeFault{message};
}

// A frame slot holds nothing (yet), a scalar, or an object reference.
using Value = std::variant<std::monostate, Scalar, FatRef>;

Scalar &as_scalar(Value &v) {
    if (auto *s = std::get_if<Scalar>(&v))
        return *s;
    fault("internal: scalar expected");
}

FatRef &as_ref(Value &v) {
    if (auto *r = std::get_if<FatRef>(&v))
        return *r;
    fault("internal: object reference expected");
}

Scalar zero_scalar(ScalarType t) {
    switch (t) {
    case ScalarType::Int:
        return Scalar{(long long)0};
    case ScalarType::Bool:
        return Scalar{false};
    case ScalarType::Float:
        return Scalar{0.0};
    }
    return Scalar{(long long)0};
}

struct Frame {
    std::vector<Value> slots;
    // Object locals; destroyed with the frame. References to them cannot
    // outlive the call: class-typed returns are copied to the heap.
    std::vector<std::unique_ptr<ObjectStorage>> locals;
};

enum class Flow { Next, Returned };

struct Interp {
    const LinkedProgram &p;
    const RunOptions &opts;
    const Hierarchy &h;
    std::ostream &out;
    std::ostream &trace;

    std::vector<std::unique_ptr<ObjectStorage>> heap; // returned objects
    std::vector<std::unique_ptr<ObjectStorage>> secondary;
    size_t max_secondary = 0;
    size_t dispatches = 0;
    int depth = 0;

    Interp(const LinkedProgram &p, const RunOptions &opts)
        : p(p), opts(opts), h(p.hierarchy),
          out(opts.out ? *opts.out : std::cout),
          trace(opts.trace ? *opts.trace : std::cerr) {}

    const std::string &class_name(int id) const {
        return h.class_names().at((size_t)id);
    }

    ObjectStorage *instantiate(const std::string &cls,
                               std::vector<std::unique_ptr<ObjectStorage>> &pool) {
        const Layout &lay = h.layout(cls);
        auto obj = std::make_unique<ObjectStorage>();
        obj->dynamic_type = h.class_id(cls);
        obj->slots.resize((size_t)lay.size);
        for (const FieldSlot &slot : lay.slots)
            obj->slots[(size_t)slot.offset] = zero_scalar(slot.type);
        pool.push_back(std::move(obj));
        return pool.back().get();
    }

    // anchor/offset pairs from the IR: an empty anchor is relative to the
    // reference itself, otherwise the position of virtual base `anchor` is
    // looked up in the complete object's layout.
    int locate(const FatRef &r, const std::string &anchor, int offset) const {
        if (anchor.empty())
            return r.offset + offset;
        int vb = h.vbase_offset(class_name(r.storage->dynamic_type), anchor);
        if (vb < 0)
            fault("internal: virtual base '" + anchor + "' not present");
        return vb + offset;
    }

    // ---------------------------------------------------------- expressions

    Value eval(Frame &f, const ir::Expr &e) {
        return std::visit([&](const auto &n) { return eval_node(f, n); },
                          e.node);
    }

    Value eval_node(Frame &, const ir::IntLit &n) {
        return Scalar{(long long)n.value};
    }
    Value eval_node(Frame &, const ir::FloatLit &n) { return Scalar{n.value}; }
    Value eval_node(Frame &, const ir::BoolLit &n) { return Scalar{n.value}; }

    Value eval_node(Frame &f, const ir::LocalGet &n) {
        return f.slots.at((size_t)n.slot);
    }

    Value eval_node(Frame &f, const ir::FieldGet &n) {
        Value base = eval(f, *n.base);
        FatRef &r = as_ref(base);
        return r.storage->slots.at((size_t)locate(r, n.anchor, n.offset));
    }

    Value eval_node(Frame &f, const ir::Convert &n) {
        Value base = eval(f, *n.value);
        FatRef r = as_ref(base);
        r.offset = locate(r, n.anchor, n.delta);
        r.static_type = n.to_class;
        r.is_const = r.is_const || n.make_const;
        return r;
    }

    Value eval_node(Frame &f, const ir::Binary &n) {
        // && and || short-circuit; everything else is strict.
        if (n.op == ir::BinOp::And || n.op == ir::BinOp::Or) {
            bool lhs = std::get<bool>(as_scalar_value(f, *n.lhs));
            if (n.op == ir::BinOp::And && !lhs)
                return Scalar{false};
            if (n.op == ir::BinOp::Or && lhs)
                return Scalar{true};
            return Scalar{std::get<bool>(as_scalar_value(f, *n.rhs))};
        }
        Scalar lhs = as_scalar_value(f, *n.lhs);
        Scalar rhs = as_scalar_value(f, *n.rhs);
        switch (n.operand) {
        case ScalarType::Int:
            return int_op(n.op, std::get<long long>(lhs),
                          std::get<long long>(rhs));
        case ScalarType::Float:
            return float_op(n.op, std::get<double>(lhs),
                            std::get<double>(rhs));
        case ScalarType::Bool:
            return bool_op(n.op, std::get<bool>(lhs), std::get<bool>(rhs));
        }
        fault("internal: bad operand type");
    }

    Scalar as_scalar_value(Frame &f, const ir::Expr &e) {
        Value v = eval(f, e);
        return as_scalar(v);
    }

    static Scalar int_op(ir::BinOp op, long long a, long long b) {
        switch (op) {
        case ir::BinOp::Add:
            return Scalar{(long long)((unsigned long long)a +
                                      (unsigned long long)b)};
        case ir::BinOp::Sub:
            return Scalar{(long long)((unsigned long long)a -
                                      (unsigned long long)b)};
        case ir::BinOp::Mul:
            return Scalar{(long long)((unsigned long long)a *
                                      (unsigned long long)b)};
        case ir::BinOp::Div:
            if (b == 0)
                fault("integer division by zero");
            if (a == LLONG_MIN && b == -1)
                return Scalar{LLONG_MIN};
            return Scalar{a / b};
        case ir::BinOp::Mod:
            if (b == 0)
                fault("integer modulo by zero");
            if (a == LLONG_MIN && b == -1)
                return Scalar{(long long)0};
            return Scalar{a % b};
        case ir::BinOp::Lt:
            return Scalar{a < b};
        case ir::BinOp::Le:
            return Scalar{a <= b};
        case ir::BinOp::Gt:
            return Scalar{a > b};
        case ir::BinOp::Ge:
            return Scalar{a >= b};
        case ir::BinOp::Eq:
            return Scalar{a == b};
        case ir::BinOp::Ne:
            return Scalar{a != b};
        default:
            fault("internal: bad int operator");
        }
    }

    static Scalar float_op(ir::BinOp op, double a, double b) {
        switch (op) {
        case ir::BinOp::Add:
            return Scalar{a + b};
        case ir::BinOp::Sub:
            return Scalar{a - b};
        case ir::BinOp::Mul:
            return Scalar{a * b};
        case ir::BinOp::Div:
            return Scalar{a / b}; // IEEE: inf/nan, no fault
        case ir::BinOp::Lt:
            return Scalar{a < b};
        case ir::BinOp::Le:
            return Scalar{a <= b};
        case ir::BinOp::Gt:
            return Scalar{a > b};
        case ir::BinOp::Ge:
            return Scalar{a >= b};
        case ir::BinOp::Eq:
            return Scalar{a == b};
        case ir::BinOp::Ne:
            return Scalar{a != b};
        default:
            fault("internal: bad float operator");
        }
    }

    static Scalar bool_op(ir::BinOp op, bool a, bool b) {
        switch (op) {
        case ir::BinOp::Eq:
            return Scalar{a == b};
        case ir::BinOp::Ne:
            return Scalar{a != b};
        default:
            fault("internal: bad bool operator");
        }
    }

    Value eval_node(Frame &f, const ir::Unary &n) {
        Scalar v = as_scalar_value(f, *n.operand);
        switch (n.op) {
        case ir::UnOp::Neg:
            if (auto *i = std::get_if<long long>(&v))
                return Scalar{(long long)(0ULL - (unsigned long long)*i)};
            return Scalar{-std::get<double>(v)};
        case ir::UnOp::Not:
            return Scalar{!std::get<bool>(v)};
        case ir::UnOp::BoolToInt:
            return Scalar{(long long)(std::get<bool>(v) ? 1 : 0)};
        }
        fault("internal: bad unary operator");
    }

    Value eval_node(Frame &f, const ir::CallFn &n) {
        auto it = p.func_by_name.find(n.name);
        if (it == p.func_by_name.end())
            fault("internal: unknown function '" + n.name + "'");
        std::vector<Value> args;
        args.reserve(n.args.size());
        for (const auto &a : n.args)
            args.push_back(eval(f, *a));
        return call((size_t)it->second, std::move(args));
    }

    Value eval_node(Frame &f, const ir::CallMm &n) {
        auto it = p.tables.find(n.family);
        if (it == p.tables.end())
            fault("internal: unknown family '" + n.family + "'");
        const DispatchTable &t = it->second;

        std::vector<Value> args;
        args.reserve(n.args.size());
        for (const auto &a : n.args)
            args.push_back(eval(f, *a));

        Value result = dispatch(t, args);
        if (!n.ret_class.empty()) {
            FatRef r = as_ref(result);
            return realign_return(r, n.ret_class);
        }
        return result;
    }

    // ------------------------------------------------------------- dispatch

    Value dispatch(const DispatchTable &t, std::vector<Value> &args) {
        const size_t npos = t.positions.size();
        std::vector<int> dyn_ids(npos);
        std::vector<DispatchType> dyn(npos);
        std::vector<int32_t> pole_idx(npos);

        for (size_t j = 0; j < npos; j++) {
            FatRef &r = as_ref(args[(size_t)t.positions[j]]);
            // Rebase: dispatch happens on the complete object's type, no
            // matter which subobject the reference currently views.
            dyn[j] = DispatchType{class_name(r.storage->dynamic_type),
                                  r.is_const};
            dyn_ids[j] = h.dispatch_id(dyn[j]);
            pole_idx[j] = t.pole_of[j][(size_t)dyn_ids[j]];
            if (pole_idx[j] < 0)
                fault("dispatch trap");
        }
        const MatrixEntry &cell = t.matrix[t.entry_index(pole_idx)];
        if (cell.spec < 0)
            fault("dispatch trap");
        const FuncRecord &winner = p.funcs[(size_t)cell.spec];

        dispatches++;
        if (opts.on_dispatch)
            opts.on_dispatch(t.family, dyn, cell.spec);

        std::ostringstream tr;
        if (opts.trace_dispatch) {
            tr << "dispatch " << winner.name << " dyn=(";
            for (size_t j = 0; j < npos; j++)
                tr << (j ? ", " : "") << dispatch_type_name(dyn[j]);
            tr << ") poles=(";
            for (size_t j = 0; j < npos; j++)
                tr << (j ? ", " : "") << "P" << pole_idx[j] + 1;
            tr << ") -> " << display_spec(winner);
        }

        for (size_t j = 0; j < npos; j++) {
            FatRef &r = as_ref(args[(size_t)t.positions[j]]);
            int realign = t.realign[j][(size_t)dyn_ids[j]];
            int extra = cell.offsets[j];
            int target = 0 + realign + extra;
            if (opts.trace_dispatch)
                tr << (j ? "; " : " ") << "arg" << j + 1 << ": 0 + " << realign
                   << " + " << extra << " = " << target;
            const ParamRec &param = winner.params[(size_t)t.positions[j]];
            r.offset = target;
            r.static_type = param.type.class_name;
            r.is_const = param.is_const;
        }
        if (opts.trace_dispatch)
            trace << tr.str() << "\n";

        return call((size_t)cell.spec, std::move(args));
    }

    FatRef realign_return(FatRef r, const std::string &expected) {
        if (r.static_type == expected)
            return r;
        const std::string &dyn = class_name(r.storage->dynamic_type);
        int want_region = h.class_id(r.static_type);
        int want_ancestor = h.class_id(expected);
        for (const RTTable &table : h.rttables(dyn)) {
            if (table.type_id != want_region ||
                table.subobject_offset != r.offset)
                continue;
            for (const auto &[cls, rel] : table.ancestors)
                if (cls == want_ancestor) {
                    r.offset += rel;
                    r.static_type = expected;
                    return r;
                }
        }
        fault("realign miss: no '" + expected + "' subobject at '" +
              r.static_type + "' view of '" + dyn + "'");
    }

    // ----------------------------------------------------------------- calls

    Value call(size_t fi, std::vector<Value> args) {
        const FuncRecord &fn = p.funcs[fi];
        if (!fn.body)
            fault("internal: call of undefined '" + display_spec(fn) + "'");
        if (++depth > opts.max_depth) {
            depth--;
            fault("stack depth limit exceeded");
        }
        const size_t secondary_mark = secondary.size();

        Frame frame;
        frame.slots.resize((size_t)fn.body->frame_size);

        for (size_t i = 0; i < fn.params.size(); i++) {
            const ParamRec &param = fn.params[i];
            if (!param.type.is_class()) {
                frame.slots[i] = as_scalar(args[i]);
                continue;
            }
            FatRef r = as_ref(args[i]);
            if (!param.by_ref && !param.is_const) {
                // By-value: the callee copies the whole complete object to
                // the secondary stack, keeping the subobject offset, so the
                // copy still dispatches as its dynamic type.
                secondary.push_back(
                    std::make_unique<ObjectStorage>(*r.storage));
                max_secondary = std::max(max_secondary, secondary.size());
                r.storage = secondary.back().get();
                r.is_const = false;
            } else {
                // Const and by-reference parameters see the original.
                r.is_const = param.is_const || r.is_const;
            }
            frame.slots[i] = r;
        }

        Value result;
        try {
            Flow flow = exec_block(frame, fn.body->block, result);
            if (flow == Flow::Next) {
                // Fell off the end: scalars default to zero, class values
                // have no default.
                if (fn.return_type.is_scalar())
                    result = zero_scalar(fn.return_type.scalar);
                else if (fn.return_type.is_class())
                    fault("missing return value in '" + display_spec(fn) +
                          "'");
            }
        } catch (...) {
            secondary.resize(secondary_mark);
            depth--;
            throw;
        }
        secondary.resize(secondary_mark);
        depth--;

        if (fn.return_type.is_class()) {
            // Returned objects are complete copies with program lifetime;
            // references into the callee frame never escape.
            FatRef r = as_ref(result);
            heap.push_back(std::make_unique<ObjectStorage>(*r.storage));
            r.storage = heap.back().get();
            r.is_const = false;
            return r;
        }
        return result;
    }

    // ------------------------------------------------------------ statements

    Flow exec_block(Frame &f, const ir::Block &b, Value &result) {
        for (const ir::Stmt &s : b.stmts)
            if (exec_stmt(f, s, result) == Flow::Returned)
                return Flow::Returned;
        return Flow::Next;
    }

    Flow exec_stmt(Frame &f, const ir::Stmt &s, Value &result) {
        return std::visit(
            [&](const auto &n) { return exec_node(f, n, result); }, s.node);
    }

    Flow exec_node(Frame &f, const ir::Block &n, Value &result) {
        return exec_block(f, n, result);
    }

    Flow exec_node(Frame &f, const ir::LocalScalar &n, Value &) {
        f.slots.at((size_t)n.slot) =
            n.init ? as_scalar_value(f, *n.init) : zero_scalar(n.type);
        return Flow::Next;
    }

    Flow exec_node(Frame &f, const ir::LocalObject &n, Value &) {
        ObjectStorage *obj = instantiate(n.cls, f.locals);
        f.slots.at((size_t)n.slot) = FatRef{obj, 0, n.cls, false};
        return Flow::Next;
    }

    Flow exec_node(Frame &f, const ir::AssignLocal &n, Value &) {
        f.slots.at((size_t)n.slot) = as_scalar_value(f, *n.value);
        return Flow::Next;
    }

    Flow exec_node(Frame &f, const ir::AssignField &n, Value &) {
        Value base = eval(f, *n.base);
        FatRef &r = as_ref(base);
        Scalar v = as_scalar_value(f, *n.value);
        r.storage->slots.at((size_t)locate(r, n.anchor, n.offset)) = v;
        return Flow::Next;
    }

    Flow exec_node(Frame &f, const ir::ExprStmt &n, Value &) {
        eval(f, *n.expr);
        return Flow::Next;
    }

    Flow exec_node(Frame &f, const ir::PrintStmt &n, Value &) {
        switch (n.mode) {
        case ir::PrintMode::Literal:
            out << n.format << "\n";
            break;
        case ir::PrintMode::Value:
            out << format_scalar(as_scalar_value(f, *n.args[0])) << "\n";
            break;
        case ir::PrintMode::Format: {
            std::string text;
            size_t arg = 0;
            for (size_t i = 0; i < n.format.size(); i++) {
                char c = n.format[i];
                if (c != '%' || i + 1 >= n.format.size()) {
                    text += c;
                    continue;
                }
                char k = n.format[++i];
                if (k == '%')
                    text += '%';
                else
                    text += format_scalar(as_scalar_value(f, *n.args[arg++]));
            }
            out << text;
            break;
        }
        }
        return Flow::Next;
    }

    Flow exec_node(Frame &f, const ir::ReturnStmt &n, Value &result) {
        result = n.value ? eval(f, *n.value) : Value{};
        return Flow::Returned;
    }

    Flow exec_node(Frame &f, const ir::IfStmt &n, Value &result) {
        if (std::get<bool>(as_scalar_value(f, *n.cond)))
            return exec_block(f, n.then_body, result);
        if (n.else_body)
            return exec_block(f, *n.else_body, result);
        return Flow::Next;
    }

    Flow exec_node(Frame &f, const ir::WhileStmt &n, Value &result) {
        while (std::get<bool>(as_scalar_value(f, *n.cond)))
            if (exec_block(f, n.body, result) == Flow::Returned)
                return Flow::Returned;
        return Flow::Next;
    }
};

} // namespace

std::string format_scalar(const Scalar &v) {
    if (const auto *i = std::get_if<long long>(&v))
        return std::to_string(*i);
    if (const auto *b = std::get_if<bool>(&v))
        return *b ? "true" : "false";
    double d = std::get<double>(v);
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    if (ec != std::errc())
        return "0";
    return std::string(buf, end);
}

RunResult run_program(const LinkedProgram &p, const RunOptions &opts) {
    RunResult res;
    Interp interp(p, opts);
    try {
        if (p.main_index < 0)
            fault("internal: no entry point");
        Value v = interp.call((size_t)p.main_index, {});
        res.exit_code = std::get<long long>(as_scalar(v));
    } catch (const RuntimeFault &f) {
        res.faulted = true;
        res.fault_message = f.message;
    }
    res.secondary_final_depth = interp.secondary.size();
    res.max_secondary_depth = interp.max_secondary;
    res.dispatch_count = interp.dispatches;
    return res;
}

} // namespace oolang::rt
