#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctlqr::cli {

enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,
    kUsage = 2,
    kData = 3,
    kConvergence = 4,
    kStability = 5,
};

// Runs one command line (args excludes the program name). Reports go to out,
// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctlqr::cli
