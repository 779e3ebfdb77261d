#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gradreg::cli {

/// Exit codes shared by all subcommands.
enum ExitCode : int {
  kOk = 0,
  kNumericError = 1,   // solver breakdown (run) or an armed certificate failure (certify)
  kParseError = 2,     // malformed manifest, trace, flag or quantity
  kStrictFailure = 3,  // run --strict with an armed certificate failing
};

/// Entry point of the gradreg tool; args excludes the program name.
int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gradreg::cli
