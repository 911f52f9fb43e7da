#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mmnn::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 2;
inline constexpr int kRuntime = 3;

/// Runs the command line in-process. Results go to `out` unless an --out
/// file is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace mmnn::cli
