#include "maxattn/cli/runner.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "maxattn/cli/registry.hpp"
#include "maxattn/errors.hpp"
#include "maxattn/indicator.hpp"
#include "maxattn/oracle.hpp"
#include "maxattn/sphere_cover.hpp"
#include "maxattn/universal_cross.hpp"
#include "maxattn/universal_self.hpp"

namespace maxattn::cli {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool use_matrix(EvalPath path, std::size_t order) {
  switch (path) {
    case EvalPath::matrix:
      return true;
    case EvalPath::oracle:
      return false;
    case EvalPath::automatic:
      return order <= kAutoMatrixOrder;
  }
  return false;
}

double require_lipschitz(const ResolvedTarget& t) {
  if (!t.lipschitz) {
    throw UsageError("'" + t.name + "' has no Lipschitz constant; pass --temperature instead");
  }
  return *t.lipschitz;
}

// delta = epsilon / (3 L) per side; R from the corrected bound over `count` centers.
double temperature_for(double epsilon, double lipschitz, double b0, double count) {
  if (lipschitz == 0.0) return 1.0;
  return choose_temperature(epsilon / (3.0 * lipschitz), b0, count, epsilon);
}

ReportRow base_row(const RunConfig& c, const std::string& function) {
  ReportRow row;
  row.command = c.command;
  row.function = function;
  row.d = c.d;
  row.n = c.n;
  row.D = c.D;
  row.epsilon_target = c.epsilon;
  row.p = c.p;
  row.seed = c.seed;
  return row;
}

void fill_errors(ReportRow& row, const ErrorReport& rep) {
  row.samples = rep.samples;
  row.sup_err = rep.sup_error;
  row.lp_err = rep.lp_error;
  row.lp_stderr = rep.lp_stderr;
  row.out_of_cover = rep.out_of_cover;
}

EstimateOptions options_for(const RunConfig& c) {
  EstimateOptions opt;
  opt.samples = c.samples;
  opt.p = c.p;
  opt.seed = c.seed;
  return opt;
}

ResolvedTarget single_target(const RunConfig& c) {
  ResolvedTarget t = resolve_target(c.function, {std::nullopt, c.d, c.n, c.D, c.seed});
  if (!t.single) throw UsageError("'" + t.name + "' is a pair function; use the cross command");
  return t;
}

std::vector<std::size_t> grid_list(const RunConfig& c, const ResolvedTarget& t, std::ostream& log) {
  if (!c.P.empty()) return c.P;
  if (!c.epsilon) return {4};
  const double lip = require_lipschitz(t);
  if (lip == 0.0) return {1};
  bool clamped = false;
  const std::size_t dim = c.d * c.n;
  const std::size_t cap = c.command == "cross" ? kMaxCrossCenters : kAutoGridCap;
  const std::size_t P = auto_grid_points(*c.epsilon / (3.0 * lip), c.D, dim, cap, clamped);
  if (clamped) {
    log << fmt::format("note: the grid required by epsilon exceeds {} centers; using P = {}\n", cap,
                       P);
  }
  return {P};
}

std::vector<ReportRow> self_rows(const RunConfig& c, std::ostream& log) {
  const ResolvedTarget t = single_target(c);
  std::vector<ReportRow> rows;
  for (std::size_t P : grid_list(c, t, log)) {
    const GridSpec spec{c.D, P, c.d, c.n};
    const auto centers = grid_centers(spec);
    const double b0 = estimate_bound(t.single, centers, spec, 1024, c.seed);
    const TargetFunction f(t.name, c.seed, t.single, b0);
    std::vector<double> temps = c.temperature;
    if (c.epsilon) {
      temps = {temperature_for(*c.epsilon, require_lipschitz(t), b0,
                               static_cast<double>(centers.size()))};
    }
    for (double temp : temps) {
      const auto start = Clock::now();
      SequenceMap eval;
      if (use_matrix(c.path, 2 * c.d * centers.size())) {
        auto approx =
            std::make_shared<ConstructedApproximator>(build_universal_self(f, spec, temp));
        eval = [approx](const Matrix& z) { return evaluate_approximator(*approx, z); };
      } else {
        auto oracle = std::make_shared<SelfOracle>(f, centers, c.d, c.n, temp);
        eval = [oracle](const Matrix& z) { return (*oracle)(z); };
      }
      const ErrorReport rep =
          estimate_errors(t.single, eval, box_sampler(c.d, c.n, c.D), options_for(c));
      ReportRow row = base_row(c, t.name);
      row.p_or_nx = P;
      row.g = centers.size();
      row.temperature = temp;
      fill_errors(row, rep);
      row.runtime_ms = elapsed_ms(start);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ReportRow> cross_rows(const RunConfig& c, std::ostream& log) {
  const ResolvedTarget t = resolve_target(c.function, {std::nullopt, c.d, c.n, c.D, c.seed});
  if (!t.pair) throw UsageError("'" + t.name + "' is not a pair function");
  const std::size_t P = grid_list(c, t, log).front();
  const GridSpec spec{c.D, P, c.d, c.n};
  const auto centers = grid_centers(spec, kMaxCrossCenters);
  const double b0 = estimate_pair_bound(t.pair, centers, spec, 1024, c.seed);
  const PairTargetFunction f(t.name, c.seed, t.pair, b0);
  const double pairs = static_cast<double>(centers.size() * centers.size());
  std::vector<double> temps = c.temperature;
  if (c.epsilon) temps = {temperature_for(*c.epsilon, require_lipschitz(t), b0, pairs)};

  std::vector<ReportRow> rows;
  for (double temp : temps) {
    const auto start = Clock::now();
    SequenceMap eval;
    std::shared_ptr<ConstructedApproximator> approx;
    const std::size_t order = 2 * c.d * centers.size() * centers.size();
    if (use_matrix(c.path, order)) {
      approx = std::make_shared<ConstructedApproximator>(build_universal_cross(f, spec, temp));
      eval = [approx](const Matrix& z) {
        auto [zk, zq] = unpack_pair(z);
        return evaluate_approximator_cross(*approx, zk, zq);
      };
    } else {
      auto oracle = std::make_shared<CrossOracle>(f, centers, c.d, c.n, temp);
      eval = [oracle](const Matrix& z) {
        auto [zk, zq] = unpack_pair(z);
        return (*oracle)(zk, zq);
      };
    }
    const ErrorReport rep =
        estimate_errors(packed(t.pair), eval, box_sampler(c.d, 2 * c.n, c.D), options_for(c));
    ReportRow row = base_row(c, t.name);
    row.p_or_nx = P;
    row.g = centers.size();
    row.temperature = temp;
    fill_errors(row, rep);
    row.runtime_ms = elapsed_ms(start);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ReportRow> cover_rows(const RunConfig& c, std::ostream&) {
  const ResolvedTarget t = single_target(c);
  const std::size_t dim = c.d * c.n;
  SphereCover cover;
  if (c.cover) {
    cover = read_cover_file(*c.cover, dim);
  } else {
    const double lip = require_lipschitz(t);
    const double radius = lip > 0.0 ? *c.epsilon / (3.0 * lip) : c.D;
    cover = random_cover(c.seed, *c.centers, dim, c.D, radius);
  }
  const GridSpec probe_spec{c.D, 1, c.d, c.n};
  const double b0 = estimate_bound(t.single, cover.centers, probe_spec, 1024, c.seed);
  const TargetFunction f(t.name, c.seed, t.single, b0);
  std::vector<double> temps = c.temperature;
  if (c.epsilon) {
    temps = {choose_temperature(cover.radius, b0, static_cast<double>(cover.centers.size()),
                                *c.epsilon)};
  }
  const Sampler sampler = ball_union_sampler(cover.centers, cover.radius, c.d, c.n);
  std::vector<ReportRow> rows;
  for (double temp : temps) {
    const auto start = Clock::now();
    SequenceMap eval;
    if (use_matrix(c.path, 2 * c.d * cover.centers.size())) {
      auto approx =
          std::make_shared<ConstructedApproximator>(build_small_region(f, cover, c.d, c.n, temp));
      eval = [approx](const Matrix& z) { return evaluate_approximator(*approx, z); };
    } else {
      auto oracle = std::make_shared<SelfOracle>(f, cover.centers, c.d, c.n, temp);
      eval = [oracle](const Matrix& z) { return (*oracle)(z); };
    }
    EstimateOptions opt = options_for(c);
    opt.in_domain = [&cover](const Matrix& z) {
      return cover.contains(flatten_sequence(z).values());
    };
    const ErrorReport rep = estimate_errors(t.single, eval, sampler, opt);
    ReportRow row = base_row(c, t.name);
    row.p_or_nx = cover.centers.size();
    row.g = cover.centers.size();
    row.temperature = temp;
    fill_errors(row, rep);
    row.runtime_ms = elapsed_ms(start);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ReportRow> indicator_rows(const RunConfig& c, std::ostream&) {
  if (c.function != "step1d") throw UsageError("indicator-demo uses --function step1d");
  const ResolvedTarget t = single_target(c);
  const MaxAffine ma = step1d_partition();
  std::vector<Vector> values;
  for (double level : step1d_levels()) values.push_back({level});
  const double eps = c.epsilon.value_or(1e-3);
  const auto start = Clock::now();
  const PartitionAttention pa = build_reassign_attention(ma, values, c.n, eps, c.delta_min);
  EstimateOptions opt = options_for(c);
  opt.in_domain = [&ma, &c](const Matrix& z) {
    for (std::size_t k = 0; k < z.cols(); ++k) {
      const double x = z(0, k);
      if (evaluate(ma, std::span<const double>(&x, 1)).margin < c.delta_min) return false;
    }
    return true;
  };
  const ErrorReport rep = estimate_errors(
      t.single, [&pa](const Matrix& z) { return apply_partition_attention(pa, z); },
      box_sampler(1, c.n, c.D), opt);
  ReportRow row = base_row(c, t.name);
  row.epsilon_target = eps;
  row.p_or_nx = ma.size();
  row.g = ma.size();
  row.temperature = pa.chosen_r;
  fill_errors(row, rep);
  row.runtime_ms = elapsed_ms(start);
  return {row};
}

// x, target and approximant on a 401-point grid, for the d = n = 1 overlay plot.
void write_curve(const std::filesystem::path& path, const RunConfig& c) {
  const ResolvedTarget t = single_target(c);
  std::ofstream out(path);
  if (c.command == "indicator-demo") {
    const MaxAffine ma = step1d_partition();
    std::vector<Vector> values;
    for (double level : step1d_levels()) values.push_back({level});
    const PartitionAttention pa =
        build_reassign_attention(ma, values, 1, c.epsilon.value_or(1e-3), c.delta_min);
    out << "x,envelope,cell,level,approx\n";
    for (int i = 0; i <= 400; ++i) {
      const double x = -c.D + 2.0 * c.D * i / 400.0;
      const auto rep = evaluate(ma, std::span<const double>(&x, 1));
      out << fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g}\n", x, rep.value, rep.cell_index,
                         step1d_levels()[rep.cell_index],
                         apply_partition_attention(pa, Matrix{{x}})(0, 0));
    }
    return;
  }
  std::ostringstream quiet;
  const GridSpec spec{c.D, grid_list(c, t, quiet).front(), 1, 1};
  const auto centers = grid_centers(spec);
  const double b0 = estimate_bound(t.single, centers, spec, 1024, c.seed);
  double temp = c.temperature.empty() ? 0.0 : c.temperature.front();
  if (c.epsilon) {
    temp =
        temperature_for(*c.epsilon, require_lipschitz(t), b0, static_cast<double>(centers.size()));
  }
  const SelfOracle oracle(t.single, centers, 1, 1, temp);
  out << "x,f,approx\n";
  for (int i = 0; i <= 400; ++i) {
    const double x = -c.D + 2.0 * c.D * i / 400.0;
    const Matrix z{{x}};
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", x, t.single(z)(0, 0), oracle(z)(0, 0));
  }
}

void write_report(const RunConfig& c, const std::vector<ReportRow>& rows, std::ostream& out) {
  auto emit = [&](std::ostream& os) {
    if (c.format == OutputFormat::json)
      write_json(rows, os);
    else
      write_csv(rows, os);
  };
  if (c.out.empty()) {
    emit(out);
    return;
  }
  {
    std::ofstream file(c.out);
    if (!file) throw UsageError("cannot write '" + c.out + "'");
    emit(file);
  }
  const std::filesystem::path report(c.out);
  if (c.command == "indicator-demo" && c.n == 1) {
    std::filesystem::path curve = report;
    curve.replace_extension(".curve.csv");
    write_curve(curve, c);
    emit_plot_script(report, PlotKind::partition, curve);
  } else if (c.command == "approximate" && c.d == 1 && c.n == 1) {
    std::filesystem::path curve = report;
    curve.replace_extension(".curve.csv");
    write_curve(curve, c);
    emit_plot_script(report, PlotKind::curve_overlay, curve);
  } else {
    emit_plot_script(report, PlotKind::error_vs_size);
  }
}

int run_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto results = run_verify_suite(c.seed, err);
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    err << fmt::format("{} {} (worst {:.3g}, tolerance {:.3g})\n", r.passed ? "PASS" : "FAIL",
                       r.name, r.worst, r.tolerance);
  }
  auto emit = [&](std::ostream& os) {
    if (c.format == OutputFormat::json)
      write_verify_json(results, os);
    else
      write_verify_csv(results, os);
  };
  if (c.out.empty()) {
    emit(out);
  } else {
    std::ofstream file(c.out);
    if (!file) throw UsageError("cannot write '" + c.out + "'");
    emit(file);
  }
  return ok ? kExitOk : kExitVerify;
}

int run_params_count(const RunConfig& c, std::ostream& out) {
  const std::size_t n_x =
      c.cover ? read_cover_file(*c.cover, c.d * c.n).centers.size() : *c.centers;
  if (2 * c.d * n_x < c.n) {
    throw UsageError(
        fmt::format("params-count: 2 d N_x = {} is smaller than n = {}", 2 * c.d * n_x, c.n));
  }
  const ParamTally tally = tally_trainable_params(c.d, c.n, n_x);
  std::ostringstream text;
  if (c.format == OutputFormat::json) {
    nlohmann::ordered_json doc{{"d", c.d},
                               {"n", c.n},
                               {"N_x", n_x},
                               {"linear", tally.linear},
                               {"w_k", tally.w_k},
                               {"w_o", tally.w_o},
                               {"count", tally.total()}};
    text << doc.dump(2) << '\n';
  } else {
    text << tally.total() << '\n';
  }
  if (c.out.empty()) {
    out << text.str();
  } else {
    std::ofstream file(c.out);
    if (!file) throw UsageError("cannot write '" + c.out + "'");
    file << text.str();
  }
  return kExitOk;
}

}  // namespace

std::size_t auto_grid_points(double delta, double D, std::size_t dim, std::size_t cap,
                             bool& clamped) {
  if (!(delta > 0.0)) throw ArgumentError("auto_grid_points: delta must be positive");
  std::size_t P = 1;
  while (2.0 * D / static_cast<double>(P) > delta) P *= 2;
  clamped = false;
  auto fits = [&](std::size_t q) {
    double g = 1.0;
    for (std::size_t i = 0; i < dim; ++i) g *= static_cast<double>(q);
    return g <= static_cast<double>(cap);
  };
  while (P > 1 && !fits(P)) {
    P /= 2;
    clamped = true;
  }
  return P;
}

std::vector<ReportRow> compute_rows(const RunConfig& config, std::ostream& log) {
  config.validate();
  const std::string& cmd = config.command;
  if (cmd == "approximate" || cmd == "sweep") return self_rows(config, log);
  if (cmd == "cross") return cross_rows(config, log);
  if (cmd == "cover") return cover_rows(config, log);
  if (cmd == "indicator-demo") return indicator_rows(config, log);
  throw UsageError("command '" + cmd + "' produces no report rows");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    if (config.command == "verify") return run_verify(config, out, err);
    if (config.command == "params-count") return run_params_count(config, out);
    write_report(config, compute_rows(config, err), out);
    return kExitOk;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << " (limiting size " << e.limiting_size() << ")\n";
    return kExitCap;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    std::string help;
    config = parse_arguments(args, help);
    if (!config) {
      out << help;
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return run(*config, out, err);
}

}  // namespace maxattn::cli
