#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "maxattn/cli/config.hpp"
#include "maxattn/cli/report.hpp"

namespace maxattn::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitVerify = 2, kExitCap = 3 };

/// Evaluation uses the dense matrix path up to this score-matrix order in automatic mode.
inline constexpr std::size_t kAutoMatrixOrder = 256;
/// Grids derived from epsilon are clamped to at most this many centers.
inline constexpr std::size_t kAutoGridCap = 16384;

/// Smallest power of two P with 2D/P <= delta, reduced while P^dim exceeds `cap`.
/// `clamped` reports whether the cap bit.
std::size_t auto_grid_points(double delta, double D, std::size_t dim, std::size_t cap,
                             bool& clamped);

/// Report rows for approximate, cross, cover, indicator-demo and sweep.
/// Exceptions propagate (CapExceeded, ArgumentError, ...).
std::vector<ReportRow> compute_rows(const RunConfig& config, std::ostream& log);

/// The property suite behind `verify`.
std::vector<PropertyResult> run_verify_suite(std::uint64_t seed, std::ostream& log);

/// Runs one configuration end to end, writing reports and plot scripts. Returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses arguments and runs; the whole CLI.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maxattn::cli
