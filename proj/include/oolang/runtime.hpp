#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "oolang/prelink.hpp"

// Tree-walking interpreter over a linked program. Objects are flat slot
// arrays; references are (storage, offset, static view) triples; parameters
// pass through a primary stack of reference cells plus a secondary stack
// holding whole-object copies of by-value arguments.

namespace oolang::rt {

// Alternative order matches ScalarType: Int, Bool, Float.
using Scalar = std::variant<long long, bool, double>;

struct ObjectStorage {
    int dynamic_type = -1; // class id of the complete object, fixed for life
    std::vector<Scalar> slots;
};

// Reference to one subobject. offset is the slot index of the subobject's
// start inside the complete object; the complete object itself has offset 0.
struct FatRef {
    ObjectStorage *storage = nullptr;
    int offset = 0;
    std::string static_type;
    bool is_const = false;
};

struct RunOptions {
    bool trace_dispatch = false;
    std::ostream *out = nullptr;   // program output; defaults to std::cout
    std::ostream *trace = nullptr; // trace lines; defaults to std::cerr
    int max_depth = 4096;          // primary-stack frame limit
    // Observation hook: called once per table dispatch with the family key,
    // the dynamic dispatch types after rebasing, and the selected function
    // index. Used by the equivalence test suites.
    std::function<void(const std::string &, const std::vector<DispatchType> &,
                       int32_t)>
        on_dispatch;
};

struct RunResult {
    bool faulted = false;
    std::string fault_message;
    long long exit_code = 0;
    // Instrumentation for the invariant suites.
    size_t secondary_final_depth = 0;
    size_t max_secondary_depth = 0;
    size_t dispatch_count = 0;
};

RunResult run_program(const LinkedProgram &p, const RunOptions &opts);

// Scalar formatting shared by print, printf and the trace writer: ints in
// decimal, bools as true/false, floats in shortest round-trip form.
std::string format_scalar(const Scalar &v);

} // namespace oolang::rt
