#pragma once

#include <ostream>

namespace alexcmp::cli {

/// Runs the command line tool in-process. Exit codes: 0 success / comparison
/// holds, 2 input error, 3 bad angle or violated audit, 1 internal error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace alexcmp::cli
