#pragma once

// Entry point of the perfun command-line tool.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 certificate violated or validation failed, 5 inconclusive.

#include <ostream>

namespace perfun::cli {

int runApp(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace perfun::cli
