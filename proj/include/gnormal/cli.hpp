#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gnormal/core.hpp"

namespace gnormal::cli {

enum class OutputFormat { csv, json };

/// Flags shared by every subcommand. Defaults reproduce the reference
/// experiment: sigma_lo_sq = 0.04, sigma_hi_sq = 1, T = 1, ratio = 1.1.
struct RunConfig {
    std::string payoff_spec = "sin3x";
    double sigma_lo_sq = 0.04;
    double sigma_hi_sq = 1.0;
    double horizon = 1.0;
    int n_steps = 800;
    double ratio = 1.1;
    double tol = kDefaultTolerance;
    std::uint64_t seed = 42;
    std::int64_t samples = 500000;
    Interval window{-3.0, 3.0};
    OutputFormat output_format = OutputFormat::csv;
    bool strict_cfl = false;
    std::string out_prefix;
    unsigned threads = 0;
};

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kNumericalError = 3 };

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gnormal::cli
