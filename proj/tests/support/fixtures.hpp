#pragma once

// Worked-example programs shared between the unit suites and the acceptance
// runner. Multi-file examples come as (filename, text) lists so a test can
// lay out a directory in one call.

#include <string>
#include <utility>
#include <vector>

namespace fixtures {

using FileSet = std::vector<std::pair<std::string, std::string>>;

// Single-file programs.
extern const char *const point_dump;       // prints "Point\nColorPoint\n"
extern const char *const bad_override;     // rejected: specialized override
extern const char *const equal_mm;         // binary method via multimethod
extern const char *const equal_mixed;      // member + free specializations
extern const char *const diamond_returns;  // return-type constraint at link
extern const char *const const_dispatch;   // const/non-const selection
extern const char *const byvalue_dynamic;  // whole-object copy keeps dyn type
extern const char *const return_realign;   // returned object realigned
extern const char *const five_class_table; // two-pole compressed table

// Multi-file programs.
FileSet ambiguous_return_set();  // compile error in the wide-invocation file
FileSet link_resolution_set();   // ambiguity removed by a third module
FileSet pairwise_link_set();     // two incomparable specializations
FileSet multiple_inh_link_set(); // joint subtype created in second module
FileSet transitivity_link_set(); // ambiguous subtype created in second module
FileSet strip_bodies_set();      // declarations + separate definitions

} // namespace fixtures
