#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace somqe::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,    // bad flag, out-of-range value, too few images
  kExitIo = 3,        // missing path, unreadable or undecodable file
  kExitInternal = 4,  // library contract violation
};

/// Runs `somqe <args...>`; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Resolves a --threads value ("auto" or a positive integer). An empty
/// value falls back to SOMQE_THREADS, then to "auto".
unsigned resolve_threads(const std::string& value);

}  // namespace somqe::cli
