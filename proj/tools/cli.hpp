#pragma once

#include <ostream>

namespace fent::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

// Parses argv, runs the subcommand, writes artifacts and a one-line summary.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fent::cli
