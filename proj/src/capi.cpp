#include "oolang/oolang.h"

#include <sstream>
#include <string>
#include <vector>

#include "oolang/driver.hpp"

struct ool_result {
    int status = 0;
    std::string output;
    std::string errors;
};

namespace {

oolang::driver::Options to_options(const ool_options *opts) {
    oolang::driver::Options o;
    if (opts) {
        o.werror = opts->werror != 0;
        o.max_errors = opts->max_errors > 0 ? opts->max_errors : -1;
        o.trace_dispatch = opts->trace_dispatch != 0;
    }
    return o;
}

template <class Fn> ool_result *capture(Fn &&fn) {
    auto *r = new ool_result;
    std::ostringstream out, err;
    r->status = fn(out, err);
    r->output = out.str();
    r->errors = err.str();
    return r;
}

ool_result *usage_error(const std::string &message) {
    auto *r = new ool_result;
    r->status = OOL_USAGE;
    r->errors = "error: " + message + "\n";
    return r;
}

} // namespace

extern "C" {

void ool_options_init(ool_options *opts) {
    if (!opts)
        return;
    opts->werror = 0;
    opts->max_errors = 0;
    opts->trace_dispatch = 0;
}

ool_result *ool_compile(const char *source_path, const char *out_path,
                        const ool_options *opts) {
    if (!source_path || !out_path)
        return usage_error("compile needs a source path and an output path");
    return capture([&](std::ostream &, std::ostream &err) {
        return oolang::driver::compile(source_path, out_path,
                                       to_options(opts), err);
    });
}

ool_result *ool_link(const char *const *inputs, size_t n_inputs,
                     const char *out_path, const ool_options *opts) {
    if (!inputs || n_inputs == 0 || !out_path)
        return usage_error("link needs input modules and an output path");
    std::vector<std::string> paths;
    for (size_t i = 0; i < n_inputs; i++) {
        if (!inputs[i])
            return usage_error("link input path is null");
        paths.emplace_back(inputs[i]);
    }
    return capture([&](std::ostream &, std::ostream &err) {
        return oolang::driver::link(paths, out_path, to_options(opts), err);
    });
}

ool_result *ool_run(const char *image_path, const ool_options *opts) {
    if (!image_path)
        return usage_error("run needs an image path");
    return capture([&](std::ostream &out, std::ostream &err) {
        return oolang::driver::run(image_path, to_options(opts), out, err);
    });
}

ool_result *ool_dump_module(const char *path) {
    if (!path)
        return usage_error("dump-module needs a path");
    return capture([&](std::ostream &out, std::ostream &err) {
        return oolang::driver::dump_module_file(path, out, err);
    });
}

ool_result *ool_dump_tables(const char *path) {
    if (!path)
        return usage_error("dump-tables needs a path");
    return capture([&](std::ostream &out, std::ostream &err) {
        return oolang::driver::dump_tables_file(path, out, err);
    });
}

ool_result *ool_dump_layout(const char *path, const char *class_name) {
    if (!path)
        return usage_error("dump-layout needs a path");
    std::string cls = class_name ? class_name : "";
    return capture([&](std::ostream &out, std::ostream &err) {
        return oolang::driver::dump_layout_file(path, cls, out, err);
    });
}

int ool_result_status(const ool_result *r) { return r ? r->status : OOL_USAGE; }

const char *ool_result_output(const ool_result *r) {
    return r ? r->output.c_str() : "";
}

const char *ool_result_errors(const ool_result *r) {
    return r ? r->errors.c_str() : "";
}

void ool_result_free(ool_result *r) { delete r; }

const char *ool_version(void) { return "1.0.0"; }

} // extern "C"
