#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pglab::cli {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2 };

/// Entry point of the pglab executable. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace pglab::cli
