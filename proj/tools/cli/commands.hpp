#pragma once

#include <ostream>

namespace dapca::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for the `dapca` tool: toygen, fit, transform, validate.
/// A `--config FILE` of flat `key=value` lines (keys are flag names without
/// dashes) is applied first; explicit flags override it.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dapca::cli
