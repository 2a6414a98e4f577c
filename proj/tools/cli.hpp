#pragma once

#include <iosfwd>

namespace glyphrank::cli {

// Exit codes: 0 success, 1 validation error, 2 I/O error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace glyphrank::cli
