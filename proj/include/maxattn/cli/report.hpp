#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace maxattn::cli {

/// One CSV/JSON report line.
struct ReportRow {
  std::string command;
  std::string function;
  std::size_t d = 1;
  std::size_t n = 1;
  double D = 1.0;
  std::size_t p_or_nx = 0;
  std::size_t g = 0;
  double temperature = 0.0;
  std::optional<double> epsilon_target;
  double p = 2.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double sup_err = 0.0;
  double lp_err = 0.0;
  double lp_stderr = 0.0;  // JSON only
  std::size_t out_of_cover = 0;
  double runtime_ms = 0.0;
};

inline constexpr const char* kCsvHeader =
    "command,function,d,n,D,P_or_Nx,G,temperature,epsilon_target,p,samples,seed,sup_err,lp_err,"
    "out_of_cover,runtime_ms";

void write_csv(const std::vector<ReportRow>& rows, std::ostream& out);
void write_json(const std::vector<ReportRow>& rows, std::ostream& out);

/// One row of the property suite.
struct PropertyResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  double runtime_ms = 0.0;
};

void write_verify_csv(const std::vector<PropertyResult>& results, std::ostream& out);
void write_verify_json(const std::vector<PropertyResult>& results, std::ostream& out);

enum class PlotKind { error_vs_size, curve_overlay, partition };

/// Writes `<report stem>.plot.py` next to the report and returns its path.
/// The script reads only the report (and `curve_csv` when given) and is never run here.
/// Throws std::invalid_argument when the report does not exist.
std::filesystem::path emit_plot_script(const std::filesystem::path& report_path, PlotKind kind,
                                       const std::optional<std::filesystem::path>& curve_csv = {});

}  // namespace maxattn::cli
