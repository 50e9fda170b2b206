#pragma once

#include <iosfwd>

namespace losdoe::cli {

/// Runs one command line. Returns 0 on success, 1 for usage or input errors
/// and 2 for numerical failures.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace losdoe::cli
