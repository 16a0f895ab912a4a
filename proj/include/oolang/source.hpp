#pragma once

#include <string>

namespace oolang {

// Source position, 1-based. line/col 0 means "no position" (synthetic nodes,
// link-time diagnostics that have no single source point).
struct Span {
    std::string file;
    int line = 0;
    int col = 0;

    bool operator==(const Span &) const = default;
};

} // namespace oolang
