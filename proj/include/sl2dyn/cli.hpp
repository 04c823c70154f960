#pragma once

#include <string>

namespace sl2dyn {

// Full command-line front end. Exit codes: 0 success, 1 refuted property
// (a freeness witness), 2 usage error, 3 capacity or convergence failure.
int run_cli(int argc, const char* const* argv);

// Version banner embedding the generator constants and the PRNG name, so
// every report is self-describing.
std::string version_string();

}  // namespace sl2dyn
