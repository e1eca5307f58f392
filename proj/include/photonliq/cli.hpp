#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace photonliq::cli {

// Process exit statuses.
enum ExitCode : int {
    kSuccess = 0,
    kToleranceFailure = 1,  // compare: curves differ by more than --tol
    kUsage = 2,
    kValidation = 3,
    kNumeric = 4,
    kIo = 5,
};

// Runs one invocation; args excludes the program name.  Reports go to out,
// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace photonliq::cli
