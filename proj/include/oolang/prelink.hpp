#pragma once

#include <map>
#include <string>
#include <vector>

#include "oolang/module.hpp"
#include "oolang/objmod.hpp"

// Pre-link phase: merges object modules into one program, assigns type ids,
// builds the compressed dispatch structures (pole vectors, realignment
// vectors, selection matrices) and runs the whole-program consistency checks.

namespace oolang {

// One cell of a selection matrix: the winning specialization (index into
// LinkedProgram::funcs) plus, per dispatch position, the slot offset of the
// winner's parameter subobject inside the pole's standalone layout. spec < 0
// marks TRAP: no applicable specialization for any tuple in the cell.
struct MatrixEntry {
    int32_t spec = -1;
    std::vector<int32_t> offsets;
};

// Compressed dispatch structures of one family, covering multimethods and
// receiver-dispatched member functions alike.
struct DispatchTable {
    std::string family;
    std::vector<int32_t> positions; // parameter indices used for dispatch
    std::vector<int32_t> members;   // specializations, indices into funcs

    // Per position, indexed by dispatch-type id: the index of the type's
    // pole within poles[pos], or -1 when no specialization can apply.
    std::vector<std::vector<int32_t>> pole_of;
    // Per position, indexed by dispatch-type id: slot offset of the pole
    // subobject from the start of the complete object, or -1.
    std::vector<std::vector<int32_t>> realign;
    // Per position: the poles themselves, as dispatch-type ids, ascending.
    std::vector<std::vector<int32_t>> poles;

    // Row-major over pole indices; size = product of poles[pos].size().
    std::vector<MatrixEntry> matrix;

    size_t entry_index(const std::vector<int32_t> &pole_idx) const;
};

struct LinkedProgram {
    std::vector<ClassInfo> classes; // sorted by name; index = class id
    Hierarchy hierarchy;            // rebuilt, never serialized
    std::vector<FuncRecord> funcs;  // canonical order
    std::map<std::string, DispatchTable> tables; // by family key
    // Statically bound functions by link name (plain name, or family key for
    // dispatch-free multimethods).
    std::map<std::string, int32_t> func_by_name;
    int32_t main_index = -1;
};

// Free-function link name: the family key when present, else the name.
std::string link_name(const FuncRecord &f);

// Merge + check + table construction. Returns false when any diagnostic was
// raised; the program is then unusable.
bool link_modules(const std::vector<Module> &modules, LinkedProgram &out,
                  DiagnosticList &diags);

// Image serialization (.ool1). Deterministic: equal programs produce equal
// bytes, and link_modules itself is order-independent in its inputs.
std::vector<uint8_t> serialize_program(const LinkedProgram &p);
FileError deserialize_program(const uint8_t *data, size_t len,
                                      LinkedProgram &out);

// Human-readable dump of every dispatch structure, plus the dispatch
// universe and its direct edges.
std::string dump_tables(const LinkedProgram &p);

} // namespace oolang
