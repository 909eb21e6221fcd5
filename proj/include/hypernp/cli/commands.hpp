#pragma once

#include <iosfwd>

#include "hypernp/common.hpp"

namespace hypernp::cli {

/// Process exit status for each failure class; 0 is success.
int exit_code(ErrorKind kind);
inline constexpr int kUsageExit = 64;
inline constexpr int kInternalExit = 70;

/// Entry point of the `hypernp` tool. Failures print one line
/// `error[<class>]: <detail>` to `err` and return the class's exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hypernp::cli
