#pragma once

#include <ostream>

namespace jjtune::shell {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitInfeasible = 3,
  kExitJunctionFailed = 4,
};

// Entry point of the jjtune command line. Single-file outputs without --out
// go to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jjtune::shell
