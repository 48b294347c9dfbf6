#pragma once

#include <iosfwd>

namespace otsphere {

/// The otsphere command line: 0 ok, 1 on any error, 2 when the solver did not
/// converge (outputs still written). Errors go to `err` as one line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace otsphere
