#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdfactor::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 1,
  kNumericalFailure = 2,
  kVerificationFailed = 3,
};

// Entry point of the `pdfactor` tool; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace pdfactor::cli
