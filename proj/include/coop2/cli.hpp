#pragma once

#include <ostream>

namespace coop2::cli {

enum ExitCode : int { Ok = 0, Usage = 1, AnalysisFail = 2, Solver = 3, Integration = 4 };

/// Entry point for the coop2 executable; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace coop2::cli
