#pragma once

#include <iosfwd>

namespace mots::cli {

enum ExitCode { kOk = 0, kDomainError = 1, kNumericalFailure = 2, kUsageError = 3 };

/// Entry point of the motskit command line. Data goes to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mots::cli
