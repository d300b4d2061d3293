#pragma once

#include <iostream>

namespace holo::cli {

/// Runs one subcommand. Returns 0 on success, 1 on usage errors and 2 on
/// runtime errors (reported on `err` as "error: <kind>: <message>").
int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace holo::cli
