#include "maxattn/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace maxattn::cli {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw UsageError("empty entry in list '" + text + "'");
    parts.push_back(item);
  }
  if (parts.empty()) throw UsageError("empty list");
  return parts;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw UsageError("not a number: '" + s + "'");
  }
  return v;
}

std::size_t to_size(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw UsageError("not a nonnegative integer: '" + s + "'");
  }
  try {
    return static_cast<std::size_t>(std::stoull(s));
  } catch (const std::exception&) {
    throw UsageError("integer out of range: '" + s + "'");
  }
}

OutputFormat to_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw UsageError("format must be csv or json, got '" + s + "'");
}

EvalPath to_path(const std::string& s) {
  if (s == "auto") return EvalPath::automatic;
  if (s == "matrix") return EvalPath::matrix;
  if (s == "oracle") return EvalPath::oracle;
  throw UsageError("path must be auto, matrix or oracle, got '" + s + "'");
}

// Lists may be given as a JSON array, a number or a comma-separated string.
std::string list_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string joined;
    for (const auto& x : v) {
      if (!x.is_number()) throw UsageError("config key '" + key + "': arrays must hold numbers");
      joined += (joined.empty() ? "" : ",") + x.dump();
    }
    return joined;
  }
  throw UsageError("config key '" + key + "' must be a number, list or string");
}

template <typename T>
T scalar(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    throw UsageError("unknown command '" + command + "'");
  }
  if (d == 0 || n == 0) throw UsageError("--d and --n must be positive");
  if (!(D > 0.0)) throw UsageError("--D must be positive");
  if (!(p >= 1.0)) throw UsageError("--p must be at least 1");
  if (samples == 0) throw UsageError("--samples must be positive");
  for (auto x : P)
    if (x == 0) throw UsageError("--P entries must be positive");
  for (double t : temperature)
    if (!(t > 0.0)) throw UsageError("--temperature entries must be positive");
  if (epsilon && !(*epsilon > 0.0 && *epsilon < 1.0)) {
    throw UsageError("--epsilon must lie in (0, 1)");
  }
  const bool needs_one = command == "approximate" || command == "cross" || command == "cover" ||
                         command == "sweep";
  if (needs_one && temperature.empty() == !epsilon.has_value()) {
    throw UsageError(command + ": give exactly one of --temperature and --epsilon");
  }
  if ((command == "approximate" || command == "cross") && P.size() > 1) {
    throw UsageError(command + ": --P takes a single value; use sweep for lists");
  }
  if (command == "cover" || command == "params-count") {
    if (centers.has_value() == cover.has_value()) {
      throw UsageError(command + ": give exactly one of --centers and --cover");
    }
    if (centers && *centers == 0) throw UsageError("--centers must be positive");
  }
  if (command == "cover" && centers && !epsilon) {
    throw UsageError("cover --centers needs --epsilon to set the radius");
  }
  if (command == "indicator-demo" && !temperature.empty()) {
    throw UsageError("indicator-demo derives its temperature from --epsilon");
  }
  if (!(delta_min > 0.0)) throw UsageError("--delta-min must be positive");
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& s : split(text)) out.push_back(to_size(s));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text)) out.push_back(to_double(s));
  return out;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config file '" + path + "' must hold one object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "command") base.command = scalar<std::string>(v, key);
    else if (key == "function") base.function = scalar<std::string>(v, key);
    else if (key == "d") base.d = scalar<std::size_t>(v, key);
    else if (key == "n") base.n = scalar<std::size_t>(v, key);
    else if (key == "D") base.D = scalar<double>(v, key);
    else if (key == "P") base.P = parse_size_list(list_text(v, key));
    else if (key == "centers") base.centers = scalar<std::size_t>(v, key);
    else if (key == "cover") base.cover = scalar<std::string>(v, key);
    else if (key == "temperature") base.temperature = parse_double_list(list_text(v, key));
    else if (key == "epsilon") base.epsilon = scalar<double>(v, key);
    else if (key == "p") base.p = scalar<double>(v, key);
    else if (key == "samples") base.samples = scalar<std::size_t>(v, key);
    else if (key == "seed") base.seed = scalar<std::uint64_t>(v, key);
    else if (key == "out") base.out = scalar<std::string>(v, key);
    else if (key == "format") base.format = to_format(scalar<std::string>(v, key));
    else if (key == "path") base.path = to_path(scalar<std::string>(v, key));
    else if (key == "delta-min" || key == "delta_min") base.delta_min = scalar<double>(v, key);
    else throw UsageError("config file '" + path + "': unknown key '" + key + "'");
  }
  return base;
}

std::optional<RunConfig> parse_arguments(const std::vector<std::string>& args, std::string& help) {
  CLI::App app{"Constructive attention approximators: build, evaluate and verify.",
               "maxaffine-attn"};
  std::string command, config_path, function, P, temperature, format, path, cover, out;
  std::size_t d = 0, n = 0, centers = 0, samples = 0;
  double D = 0.0, epsilon = 0.0, p = 0.0, delta_min = 0.0;
  std::uint64_t seed = 0;

  app.add_option("command", command, "approximate | cross | cover | indicator-demo | sweep | "
                                     "verify | params-count");
  auto* o_config = app.add_option("--config", config_path, "JSON file with the same keys as the flags");
  auto* o_function = app.add_option("--function", function, "target NAME[:ARG]");
  auto* o_d = app.add_option("--d", d, "token dimension");
  auto* o_n = app.add_option("--n", n, "sequence length");
  auto* o_D = app.add_option("--D", D, "domain half-width");
  auto* o_P = app.add_option("--P", P, "grid points per axis, or a comma list for sweep");
  auto* o_centers = app.add_option("--centers", centers, "number of random cover centers");
  auto* o_cover = app.add_option("--cover", cover, "cover file");
  auto* o_temp = app.add_option("--temperature", temperature, "temperature, or a comma list");
  auto* o_eps = app.add_option("--epsilon", epsilon, "target accuracy");
  auto* o_p = app.add_option("--p", p, "L_p exponent");
  auto* o_samples = app.add_option("--samples", samples, "Monte Carlo samples");
  auto* o_seed = app.add_option("--seed", seed, "seed for targets and sampling");
  auto* o_out = app.add_option("--out", out, "report path (stdout when absent)");
  auto* o_format = app.add_option("--format", format, "csv | json");
  auto* o_path = app.add_option("--path", path, "auto | matrix | oracle");
  auto* o_delta = app.add_option("--delta-min", delta_min, "indicator-demo margin gate");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    help = app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig config;
  if (*o_config) config = load_config_file(config_path);
  if (!command.empty()) config.command = command;
  if (config.command.empty()) throw UsageError("missing command; see --help");
  if (*o_function) config.function = function;
  if (*o_d) config.d = d;
  if (*o_n) config.n = n;
  if (*o_D) config.D = D;
  if (*o_P) config.P = parse_size_list(P);
  if (*o_centers) {
    config.centers = centers;
    config.cover.reset();
  }
  if (*o_cover) {
    config.cover = cover;
    config.centers.reset();
  }
  if (*o_temp) {
    config.temperature = parse_double_list(temperature);
    if (!*o_eps) config.epsilon.reset();
  }
  if (*o_eps) {
    config.epsilon = epsilon;
    if (!*o_temp) config.temperature.clear();
  }
  if (*o_p) config.p = p;
  if (*o_samples) config.samples = samples;
  if (*o_seed) config.seed = seed;
  if (*o_out) config.out = out;
  if (*o_format) config.format = to_format(format);
  if (*o_path) config.path = to_path(path);
  if (*o_delta) config.delta_min = delta_min;
  config.validate();
  return config;
}

}  // namespace maxattn::cli
