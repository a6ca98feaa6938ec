#pragma once

#include "gmbe/elimination.hpp"
#include "gmbe/optimize.hpp"

#include <iosfwd>
#include <string>

namespace gmbe {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitFailure = 2, kExitVerify = 3 };

/// One of be, mbe, wmbe, wmbe-w, wmbe-theta, wmbe-wtheta, wmbe-g, wmbe-wg.
/// Optimizer methods need a Forney model. `base` supplies step sizes and T.
BoundResult run_method(const FactorGraph& g, const std::string& method, int ibound,
                       Direction direction, const OptimizerConfig& base = {});

/// Entry point of the gmbe command; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gmbe
