#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mpp::cli {

/// Exit codes of the command-line contract.
enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

/// Runs one `mpp` subcommand. `args` excludes the program name. Results go
/// to `out` (or the files named by --output / --periods-csv); failures print
/// a single `error=<Code> message="..."` line to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpp::cli
