#pragma once

#include <iosfwd>

namespace fastgauss::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNumericalFailure = 3,
  kChainFailure = 4,
};

/// Entry point shared by the executable and the tests. Diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fastgauss::cli
