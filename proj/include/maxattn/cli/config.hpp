#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxattn::cli {

/// Bad flags, bad config file contents or an invalid option combination (exit code 1).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class OutputFormat { csv, json };
enum class EvalPath { automatic, matrix, oracle };

inline const std::vector<std::string> kCommands{"approximate",    "cross", "cover",
                                                "indicator-demo", "sweep", "verify",
                                                "params-count"};

struct RunConfig {
  std::string command;
  std::string function = "sinprod";
  std::size_t d = 1;
  std::size_t n = 1;
  double D = 1.0;
  std::vector<std::size_t> P;  // empty: derived from epsilon, else 4
  std::optional<std::size_t> centers;
  std::optional<std::string> cover;
  std::vector<double> temperature;
  std::optional<double> epsilon;
  double p = 2.0;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::string out;  // empty: stdout
  OutputFormat format = OutputFormat::csv;
  EvalPath path = EvalPath::automatic;
  double delta_min = 0.05;  // indicator-demo margin gate

  /// Throws UsageError when the combination of fields makes no sense for the command.
  void validate() const;
};

/// Splits "4,8,16" (or a single value). Throws UsageError on junk.
std::vector<std::size_t> parse_size_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// Reads a JSON object with the same keys as the long flags.
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Parses `maxaffine-attn <command> [flags]` (args excludes the program name).
/// Config-file values are applied first, flags override them.
/// Returns std::nullopt when help was requested (text written to `help`).
std::optional<RunConfig> parse_arguments(const std::vector<std::string>& args, std::string& help);

}  // namespace maxattn::cli
