#pragma once

// Command-line surface: argument handling, input selection and the text,
// LaTeX and JSON emitters.  tools/ only wraps run().

#include <iosfwd>
#include <string>
#include <vector>

namespace hamclass::cli {

enum ExitCode : int { kPass = 0, kViolated = 1, kUsage = 2, kUndecided = 3 };

/// Environment variable read for the default --node-budget.
inline constexpr const char* kNodeBudgetEnv = "HAMCLASS_NODE_BUDGET";

/// args excludes the program name.  Input selectors read "-" from `in` and "@path" from a file.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace hamclass::cli
