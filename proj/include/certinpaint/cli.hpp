#pragma once

#include <string>
#include <vector>

namespace certinpaint {

/// Exit codes of the batch front end.
enum ExitCode : int {
  kExitCertified = 0,     ///< gap <= tol and the maximum principle holds
  kExitInvalidInput = 1,  ///< parse or validation error
  kExitNotCertified = 2,  ///< solver failure or uncertified result (report still written)
};

int run_cli(int argc, char** argv);
/// Same as run_cli with args[0] as the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace certinpaint
