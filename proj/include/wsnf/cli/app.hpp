#ifndef WSNF_CLI_APP_HPP
#define WSNF_CLI_APP_HPP

#include <ostream>
#include <string>
#include <vector>

namespace wsnf::cli {

/// Process exit codes. Stable; scripts may rely on them.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,       // unexpected error
  kUsage = 2,         // unknown subcommand or flag, bad flag value
  kIncompatible = 3,  // variant cannot be aggregated with the requested scheme
  kIo = 4,            // missing or unreadable file, malformed artifact
  kData = 5,          // dataset validation failed
  kConfig = 6,        // invalid configuration value
  kDiverged = 7,      // training produced non-finite values
};

/// Runs the command line `args` (without the program name). Human-readable
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wsnf::cli

#endif  // WSNF_CLI_APP_HPP
