#include "oolang/driver.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "oolang/objmod.hpp"
#include "oolang/parser.hpp"
#include "oolang/prelink.hpp"
#include "oolang/runtime.hpp"
#include "oolang/typecheck.hpp"

namespace oolang::driver {

namespace {

constexpr int MAX_INCLUDE_DEPTH = 16;

bool read_file(const std::string &path, std::string &out) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

bool read_bytes(const std::string &path, std::vector<uint8_t> &out) {
    std::string text;
    if (!read_file(path, text))
        return false;
    out.assign(text.begin(), text.end());
    return true;
}

bool write_bytes(const std::string &path, const std::vector<uint8_t> &bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        return false;
    out.write((const char *)bytes.data(), (std::streamsize)bytes.size());
    return out.good();
}

std::string dir_of(const std::string &path) {
    size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

std::string join_path(const std::string &dir, const std::string &rel) {
    if (dir.empty() || rel.starts_with("/"))
        return rel;
    return dir + "/" + rel;
}

// Depth-first include resolution with include-once semantics: a header
// pulled in through two paths contributes its declarations exactly once.
void load_into(const std::string &path, ast::Unit &target,
               std::set<std::string> &visited, int depth,
               DiagnosticList &diags) {
    std::string text;
    if (!read_file(path, text)) {
        diags.error(diag_code::import, Span{path, 0, 0}, "cannot open file");
        return;
    }
    ParseOptions popts;
    popts.header = path.ends_with(".oolh");
    ast::Unit unit = parse_unit(text, path, diags, popts);

    for (const std::string &inc : unit.includes) {
        std::string inc_path = join_path(dir_of(path), inc);
        if (!visited.insert(inc_path).second)
            continue;
        if (!inc.ends_with(".oolh")) {
            diags.error(diag_code::import, Span{path, 0, 0},
                        "import '" + inc +
                            "' is not a declaration header (.oolh)");
            continue;
        }
        if (depth + 1 > MAX_INCLUDE_DEPTH) {
            diags.error(diag_code::import, Span{path, 0, 0},
                        "imports nested deeper than " +
                            std::to_string(MAX_INCLUDE_DEPTH) + " levels");
            continue;
        }
        load_into(inc_path, target, visited, depth + 1, diags);
    }
    for (auto &c : unit.classes)
        target.classes.push_back(std::move(c));
    for (auto &fn : unit.functions)
        target.functions.push_back(std::move(fn));
    for (auto &mm : unit.multimethods)
        target.multimethods.push_back(std::move(mm));
    for (auto &v : unit.virtual_specs)
        target.virtual_specs.push_back(std::move(v));
}

int report_file_error(std::ostream &err, const std::string &path,
                      FileError fe) {
    err << "error " << diag_code::bad_object << " " << path
        << ":0:0 " << file_error_name(fe) << "\n";
    return 2;
}

int load_program(const std::string &path, LinkedProgram &prog,
                 std::ostream &err) {
    std::vector<uint8_t> bytes;
    if (!read_bytes(path, bytes)) {
        err << "error: cannot open '" << path << "'\n";
        return 2;
    }
    FileError fe =
        deserialize_program(bytes.data(), bytes.size(), prog);
    if (fe != FileError::None)
        return report_file_error(err, path, fe);
    return 0;
}

} // namespace

ast::Unit load_unit(const std::string &source_path, DiagnosticList &diags) {
    ast::Unit unit;
    unit.file = source_path;
    std::set<std::string> visited{source_path};
    load_into(source_path, unit, visited, 0, diags);
    return unit;
}

int compile(const std::string &source_path, const std::string &out_path,
            const Options &opts, std::ostream &err) {
    DiagnosticList diags;
    ast::Unit unit = load_unit(source_path, diags);
    Module m;
    if (!diags.has_errors())
        m = check_unit(std::move(unit), diags);
    if (opts.werror)
        promote_warnings(diags);
    diags.sort();
    err << format_diagnostics(diags, opts.max_errors);
    if (diags.has_errors())
        return 1;

    std::vector<Diagnostic> warnings = diags.items;
    if (!write_bytes(out_path, serialize_module(m, warnings))) {
        err << "error: cannot write '" << out_path << "'\n";
        return 2;
    }
    return 0;
}

int link(const std::vector<std::string> &inputs, const std::string &out_path,
         const Options &opts, std::ostream &err) {
    std::vector<Module> modules;
    for (const std::string &path : inputs) {
        std::vector<uint8_t> bytes;
        if (!read_bytes(path, bytes)) {
            err << "error: cannot open '" << path << "'\n";
            return 2;
        }
        Module m;
        std::vector<Diagnostic> warnings;
        FileError fe =
            deserialize_module(bytes.data(), bytes.size(), m,
                                       warnings);
        if (fe != FileError::None)
            return report_file_error(err, path, fe);
        modules.push_back(std::move(m));
    }

    LinkedProgram prog;
    DiagnosticList diags;
    bool ok = link_modules(modules, prog, diags);
    if (opts.werror)
        promote_warnings(diags);
    diags.sort();
    err << format_diagnostics(diags, opts.max_errors);
    if (!ok || diags.has_errors())
        return 1;

    if (!write_bytes(out_path, serialize_program(prog))) {
        err << "error: cannot write '" << out_path << "'\n";
        return 2;
    }
    return 0;
}

int run(const std::string &image_path, const Options &opts, std::ostream &out,
        std::ostream &err) {
    LinkedProgram prog;
    if (int rc = load_program(image_path, prog, err))
        return rc;

    rt::RunOptions ropts;
    ropts.trace_dispatch = opts.trace_dispatch;
    ropts.out = &out;
    ropts.trace = &err;
    rt::RunResult res = rt::run_program(prog, ropts);
    if (res.faulted) {
        err << "runtime fault: " << res.fault_message << "\n";
        return 3;
    }
    return (int)res.exit_code;
}

int dump_module_file(const std::string &path, std::ostream &out,
                     std::ostream &err) {
    std::vector<uint8_t> bytes;
    if (!read_bytes(path, bytes)) {
        err << "error: cannot open '" << path << "'\n";
        return 2;
    }
    Module m;
    std::vector<Diagnostic> warnings;
    FileError fe =
        deserialize_module(bytes.data(), bytes.size(), m, warnings);
    if (fe != FileError::None)
        return report_file_error(err, path, fe);
    out << dump_module(m, warnings);
    return 0;
}

int dump_tables_file(const std::string &path, std::ostream &out,
                     std::ostream &err) {
    LinkedProgram prog;
    if (int rc = load_program(path, prog, err))
        return rc;
    out << dump_tables(prog);
    return 0;
}

int dump_layout_file(const std::string &path, const std::string &cls,
                     std::ostream &out, std::ostream &err) {
    std::vector<uint8_t> bytes;
    if (!read_bytes(path, bytes)) {
        err << "error: cannot open '" << path << "'\n";
        return 2;
    }

    // Works on either container: an object module or a linked image.
    std::vector<ClassInfo> classes;
    if (bytes.size() >= 4 &&
        memcmp(bytes.data(), IMAGE_MAGIC, 4) == 0) {
        LinkedProgram prog;
        FileError fe =
            deserialize_program(bytes.data(), bytes.size(), prog);
        if (fe != FileError::None)
            return report_file_error(err, path, fe);
        classes = std::move(prog.classes);
    } else {
        Module m;
        std::vector<Diagnostic> warnings;
        FileError fe = deserialize_module(
            bytes.data(), bytes.size(), m, warnings);
        if (fe != FileError::None)
            return report_file_error(err, path, fe);
        classes = std::move(m.classes);
    }

    DiagnosticList diags;
    Hierarchy h = Hierarchy::build(classes, diags);
    if (!h.valid()) {
        err << "error: class set in '" << path << "' does not form a valid "
            << "hierarchy\n";
        return 2;
    }
    if (!cls.empty()) {
        if (!h.has_class(cls)) {
            err << "error: unknown class '" << cls << "'\n";
            return 2;
        }
        out << h.dump_layout(cls);
        return 0;
    }
    for (const std::string &name : h.class_names())
        out << h.dump_layout(name);
    return 0;
}

} // namespace oolang::driver
