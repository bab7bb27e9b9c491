#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "fibercuit/error.hpp"

namespace fibercuit::cli {

// Stable process exit codes.
enum ExitStatus : int {
  kOk = 0,
  kInvalid = 1,      // validation or DRC failure
  kUnfoldable = 2,   // collision, bed interference or occluded hinge
  kIoError = 3,      // I/O, parse or usage error
  kUnachievable = 4, // bend angle out of reach
};

int exit_code(Errc code);

// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace fibercuit::cli
