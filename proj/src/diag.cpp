#include "oolang/diag.hpp"

#include <algorithm>
#include <sstream>

namespace oolang {

void DiagnosticList::error(std::string code, Span span, std::string message) {
    items.push_back(
        {Severity::Error, std::move(code), std::move(span), std::move(message), {}});
}

void DiagnosticList::warning(std::string code, Span span, std::string message) {
    items.push_back({Severity::Warning, std::move(code), std::move(span),
                     std::move(message), {}});
}

bool DiagnosticList::has_errors() const {
    return std::any_of(items.begin(), items.end(), [](const Diagnostic &d) {
        return d.severity == Severity::Error;
    });
}

size_t DiagnosticList::error_count() const {
    return (size_t)std::count_if(items.begin(), items.end(),
                                 [](const Diagnostic &d) {
                                     return d.severity == Severity::Error;
                                 });
}

void DiagnosticList::sort() {
    std::stable_sort(items.begin(), items.end(),
                     [](const Diagnostic &a, const Diagnostic &b) {
                         auto key = [](const Diagnostic &d) {
                             return std::tie(d.span.file, d.span.line,
                                             d.span.col, d.code, d.message);
                         };
                         return key(a) < key(b);
                     });
}

void DiagnosticList::append(const DiagnosticList &other) {
    items.insert(items.end(), other.items.begin(), other.items.end());
}

std::string format_diagnostic(const Diagnostic &d) {
    std::ostringstream os;
    os << (d.severity == Severity::Error ? "error" : "warning");
    os << ' ' << d.code << ' ';
    os << (d.span.file.empty() ? "<unknown>" : d.span.file) << ':'
       << d.span.line << ':' << d.span.col;
    os << ' ' << d.message;
    return os.str();
}

std::string format_diagnostics(const DiagnosticList &list, int max_errors) {
    std::ostringstream os;
    int errors_shown = 0;
    int suppressed = 0;
    for (const auto &d : list.items) {
        if (d.severity == Severity::Error && max_errors >= 0 &&
            errors_shown >= max_errors) {
            suppressed++;
            continue;
        }
        if (d.severity == Severity::Error)
            errors_shown++;
        os << format_diagnostic(d) << '\n';
    }
    if (suppressed > 0)
        os << "note: " << suppressed << " more error(s) suppressed\n";
    return os.str();
}

void promote_warnings(DiagnosticList &list) {
    for (auto &d : list.items)
        d.severity = Severity::Error;
}

} // namespace oolang
