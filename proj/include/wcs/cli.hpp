#pragma once

#include <iostream>

namespace wcs {

/// Full command-line entry point (run / sweep / validate subcommands).
/// Returns the process exit code: 0 success, 1 validation or configuration
/// error, 2 runtime error. Never calls std::exit.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace wcs
