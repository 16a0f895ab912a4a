#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "oolang/ast.hpp"
#include "oolang/diag.hpp"
#include "oolang/module.hpp"

// Toolchain entry points behind the CLI: each returns the process exit code
// (0 success, 1 diagnostics, 2 usage/file error, 3 runtime fault; run
// forwards the program's own exit code). Diagnostics go to `err`, dump text
// to `out`.

namespace oolang::driver {

struct Options {
    bool werror = false;
    int max_errors = -1; // unlimited
    bool trace_dispatch = false;
};

int compile(const std::string &source_path, const std::string &out_path,
            const Options &opts, std::ostream &err);
int link(const std::vector<std::string> &inputs, const std::string &out_path,
         const Options &opts, std::ostream &err);
int run(const std::string &image_path, const Options &opts, std::ostream &out,
        std::ostream &err);
int dump_module_file(const std::string &path, std::ostream &out,
                     std::ostream &err);
int dump_tables_file(const std::string &path, std::ostream &out,
                     std::ostream &err);
int dump_layout_file(const std::string &path, const std::string &cls,
                     std::ostream &out, std::ostream &err);

// Parses `source_path` plus its transitive declaration imports into a
// single unit. Used by compile and by the test harnesses.
ast::Unit load_unit(const std::string &source_path, DiagnosticList &diags);

} // namespace oolang::driver
