/* C interface of the toolchain shared library.
 *
 * Every entry point returns an opaque result handle owning the status code
 * and the captured output/diagnostic text; free it with ool_result_free.
 * The library never writes to stdout or stderr itself.
 */
#ifndef OOLANG_OOLANG_H
#define OOLANG_OOLANG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status values mirror the tool exit codes. ool_run forwards the program's
 * own exit code, so any non-negative value can appear there. */
enum {
    OOL_OK = 0,
    OOL_DIAGNOSTICS = 1, /* compile or link errors were reported */
    OOL_USAGE = 2,       /* unreadable, corrupt or mistyped input */
    OOL_FAULT = 3        /* runtime fault while executing */
};

typedef struct ool_result ool_result;

typedef struct {
    int werror;         /* nonzero: warnings become errors */
    int max_errors;     /* 0 or negative: unlimited */
    int trace_dispatch; /* nonzero: one trace line per dispatch (run only) */
} ool_options;

void ool_options_init(ool_options *opts);

/* source -> object module (.oom) */
ool_result *ool_compile(const char *source_path, const char *out_path,
                        const ool_options *opts);
/* object modules -> linked image (.ool1) */
ool_result *ool_link(const char *const *inputs, size_t n_inputs,
                     const char *out_path, const ool_options *opts);
/* execute a linked image */
ool_result *ool_run(const char *image_path, const ool_options *opts);
/* stable textual dumps */
ool_result *ool_dump_module(const char *path);
ool_result *ool_dump_tables(const char *path);
/* class_name NULL or empty: every class */
ool_result *ool_dump_layout(const char *path, const char *class_name);

int ool_result_status(const ool_result *r);
/* stdout side: dump text, program output. Valid until ool_result_free. */
const char *ool_result_output(const ool_result *r);
/* stderr side: diagnostics, dispatch traces, fault messages. */
const char *ool_result_errors(const ool_result *r);
void ool_result_free(ool_result *r);

const char *ool_version(void);

#ifdef __cplusplus
}
#endif

#endif /* OOLANG_OOLANG_H */
