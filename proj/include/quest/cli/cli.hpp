#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quest::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,          // bad flags, unreadable or invalid input files
  kAnalysis = 2,       // the query or corpus could not be analysed
  kNonconformant = 3,  // only with --fail-on-nonconformant
};

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`, diagnostics to `err`; `in` supplies the query when none is given.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace quest::cli
