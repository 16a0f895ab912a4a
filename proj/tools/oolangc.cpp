// Command-line driver. All real work happens behind the C API of the
// shared library; this file only parses arguments and moves text between
// the result handles and the process streams.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oolang/oolang.h"

namespace {

int finish(ool_result *r) {
    std::fputs(ool_result_output(r), stdout);
    std::fputs(ool_result_errors(r), stderr);
    int status = ool_result_status(r);
    ool_result_free(r);
    return status;
}

// fig1.ool -> fig1 + ext; keeps directories intact.
std::string with_extension(const std::string &path, const char *ext) {
    std::string stem = path;
    size_t dot = stem.find_last_of('.');
    size_t slash = stem.find_last_of('/');
    if (dot != std::string::npos &&
        (slash == std::string::npos || dot > slash))
        stem.resize(dot);
    return stem + ext;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"toolchain for a class-based language with multimethods"};
    app.require_subcommand(1);

    ool_options opts;
    ool_options_init(&opts);
    bool werror = false;
    bool trace = false;

    std::string source, output, image, path, cls;
    std::vector<std::string> inputs;

    CLI::App *compile =
        app.add_subcommand("compile", "compile a source file (.ool) to an "
                                      "object module (.oom)");
    compile->add_option("source", source, "source file")->required();
    compile->add_option("-o,--output", output,
                        "output path (default: source with .oom)");
    compile->add_flag("--werror", werror, "treat warnings as errors");
    compile->add_option("--max-errors", opts.max_errors,
                        "print at most N errors");

    CLI::App *link = app.add_subcommand(
        "link", "link object modules into an image (.ool1)");
    link->add_option("modules", inputs, "object modules (.oom)")->required();
    link->add_option("-o,--output", output,
                     "output path (default: first module with .ool1)");
    link->add_flag("--werror", werror, "treat warnings as errors");
    link->add_option("--max-errors", opts.max_errors,
                     "print at most N errors");

    CLI::App *run = app.add_subcommand("run", "execute a linked image");
    run->add_option("image", image, "linked image (.ool1)")->required();
    run->add_flag("--trace-dispatch", trace,
                  "print one line per multimethod dispatch");

    CLI::App *dump_module =
        app.add_subcommand("dump-module", "print an object module");
    dump_module->add_option("module", path, "object module (.oom)")
        ->required();

    CLI::App *dump_tables = app.add_subcommand(
        "dump-tables", "print the dispatch structures of a linked image");
    dump_tables->add_option("image", path, "linked image (.ool1)")
        ->required();

    CLI::App *dump_layout = app.add_subcommand(
        "dump-layout", "print object layouts from a module or image");
    dump_layout->add_option("file", path, "object module or linked image")
        ->required();
    dump_layout->add_option("class", cls, "single class (default: all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return OOL_USAGE;
    }

    opts.werror = werror ? 1 : 0;
    opts.trace_dispatch = trace ? 1 : 0;

    if (app.got_subcommand(compile)) {
        if (output.empty())
            output = with_extension(source, ".oom");
        return finish(ool_compile(source.c_str(), output.c_str(), &opts));
    }
    if (app.got_subcommand(link)) {
        if (output.empty())
            output = with_extension(inputs[0], ".ool1");
        std::vector<const char *> raw;
        for (const std::string &p : inputs)
            raw.push_back(p.c_str());
        return finish(
            ool_link(raw.data(), raw.size(), output.c_str(), &opts));
    }
    if (app.got_subcommand(run))
        return finish(ool_run(image.c_str(), &opts));
    if (app.got_subcommand(dump_module))
        return finish(ool_dump_module(path.c_str()));
    if (app.got_subcommand(dump_tables))
        return finish(ool_dump_tables(path.c_str()));
    if (app.got_subcommand(dump_layout))
        return finish(ool_dump_layout(path.c_str(), cls.c_str()));
    return OOL_USAGE;
}
