// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Reference values come from the small oracles in this file, not from the library.

#include <fmt/format.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "maxattn/cli/registry.hpp"
#include "maxattn/cli/runner.hpp"
#include "maxattn/indicator.hpp"
#include "maxattn/oracle.hpp"
#include "maxattn/sphere_cover.hpp"
#include "maxattn/universal_cross.hpp"
#include "maxattn/universal_self.hpp"
#include "param_walk.hpp"
#include "test_support.hpp"

#ifndef MAXATTN_CLI_PATH
#error "MAXATTN_CLI_PATH must point at the maxaffine-attn binary"
#endif

using namespace maxattn;
using maxattn::testing::random_matrix;
using maxattn::testing::rel_diff;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

// vec(Z): columns stacked, entry (r, k) at k * d + r.
Vector stack_columns(const Matrix& z) {
  Vector v;
  for (std::size_t k = 0; k < z.cols(); ++k)
    for (std::size_t r = 0; r < z.rows(); ++r) v.push_back(z(r, k));
  return v;
}

Matrix unstack(const Vector& v, std::size_t d, std::size_t n) {
  Matrix z(d, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t r = 0; r < d; ++r) z(r, k) = v[k * d + r];
  return z;
}

double sq_dist(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Gaussian-kernel average over the centers: weight_j ~ exp(-R |z - v_j|^2 / 2).
Vector kernel_weights(const std::vector<Vector>& centers, double R, const Vector& z) {
  Vector logit(centers.size());
  for (std::size_t j = 0; j < centers.size(); ++j) logit[j] = -0.5 * R * sq_dist(z, centers[j]);
  const double top = *std::max_element(logit.begin(), logit.end());
  double total = 0.0;
  for (double& x : logit) total += (x = std::exp(x - top));
  for (double& x : logit) x /= total;
  return logit;
}

Matrix kernel_average(const std::vector<Matrix>& values, const Vector& w) {
  Matrix out(values[0].rows(), values[0].cols());
  for (std::size_t j = 0; j < w.size(); ++j)
    for (std::size_t r = 0; r < out.rows(); ++r)
      for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += w[j] * values[j](r, c);
  return out;
}

std::vector<Vector> grid(double D, std::size_t P, std::size_t dim) {
  std::size_t G = 1;
  for (std::size_t i = 0; i < dim; ++i) G *= P;
  std::vector<Vector> out(G, Vector(dim));
  for (std::size_t s = 0; s < G; ++s) {
    std::size_t rest = s;
    for (std::size_t i = 0; i < dim; ++i) {
      out[s][i] = -D + 2.0 * D * static_cast<double>(rest % P) / static_cast<double>(P);
      rest /= P;
    }
  }
  return out;
}

TargetFunction wave(std::mt19937_64& rng, std::size_t d, std::size_t n) {
  const Matrix a = random_matrix(rng, d * n, d * n, -2.0, 2.0);
  const Matrix b = random_matrix(rng, d * n, 1);
  const double b0 = 0.91 + random_matrix(rng, 1, 1, 0.0, 0.5)(0, 0);
  SequenceMap f = [a, b, d, n](const Matrix& z) {
    const Vector v = stack_columns(z);
    Vector out(d * n);
    for (std::size_t i = 0; i < d * n; ++i) {
      double s = b(i, 0);
      for (std::size_t k = 0; k < d * n; ++k) s += a(i, k) * v[k];
      out[i] = 0.9 * std::sin(s);
    }
    return unstack(out, d, n);
  };
  return TargetFunction("wave", 0, f, b0);
}

PairTargetFunction pair_wave(std::mt19937_64& rng, std::size_t d) {
  const Matrix a = random_matrix(rng, d, d, -2.0, 2.0);
  const Matrix b = random_matrix(rng, d, d, -2.0, 2.0);
  PairMap f = [a, b](const Matrix& zk, const Matrix& zq) {
    const Matrix s = matmul(a, zk) + matmul(b, zq);
    Matrix out(s.rows(), s.cols());
    for (std::size_t r = 0; r < s.rows(); ++r)
      for (std::size_t c = 0; c < s.cols(); ++c) out(r, c) = 0.9 * std::cos(s(r, c));
    return out;
  };
  return PairTargetFunction("pair-wave", 0, f, 0.91);
}

Outcome criterion1() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> temp(0.5, 100.0);
  double worst = 0.0, worst_kernel = 0.0;
  int configs = 0;
  for (std::size_t d = 1; d <= 2; ++d)
    for (std::size_t n = 1; n <= 2; ++n)
      for (std::size_t P = 1; P <= 4; ++P)
        for (int rep = 0; rep < 4; ++rep) {
          if (2 * d * grid(1.0, P, d * n).size() < n) continue;
          const TargetFunction f = wave(rng, d, n);
          const double R = temp(rng);
          const auto approx = build_universal_self(f, {1.0, P, d, n}, R);
          const auto centers = grid(1.0, P, d * n);
          std::vector<Matrix> values;
          for (const auto& v : centers) values.push_back(f(unstack(v, d, n)));
          for (int i = 0; i < 100; ++i) {
            const Matrix z = random_matrix(rng, d, n);
            const Matrix out = evaluate_approximator(approx, z);
            worst = std::max(worst, rel_diff(out, closed_form_self(f, approx.centers, R, z)));
            worst_kernel = std::max(
                worst_kernel,
                rel_diff(out,
                         kernel_average(values, kernel_weights(centers, R, stack_columns(z)))));
          }
          ++configs;
        }
  return {configs >= 50 && worst <= 1e-8 && worst_kernel <= 1e-8,
          fmt::format("{} configs, worst rel diff {:.3g} vs closed form, {:.3g} vs kernel average",
                      configs, worst, worst_kernel)};
}

Outcome criterion2() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> temp(0.5, 100.0);
  double worst = 0.0, worst_kernel = 0.0;
  int configs = 0;
  // Every shape with G <= 16; the order-1024 score matrices get one config each.
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> shapes;
  for (std::size_t d = 1; d <= 2; ++d)
    for (std::size_t n = 1; n <= 2; ++n)
      for (std::size_t P = 1; P <= 4; ++P) {
        const std::size_t G = grid(1.0, P, d * n).size();
        if (G > 16) continue;
        const int reps = 2 * d * G * G >= 1024 ? 1 : 5;
        for (int r = 0; r < reps; ++r) shapes.emplace_back(d, n, P);
      }
  for (const auto& [d, n, P] : shapes) {
    const auto centers = grid(1.0, P, d * n);
    const PairTargetFunction f = pair_wave(rng, d);
    const double R = temp(rng);
    const auto approx = build_universal_cross(f, {1.0, P, d, n}, R);
    const std::size_t G = centers.size();
    std::vector<Matrix> values;
    for (std::size_t j = 0; j < G; ++j)
      for (std::size_t i = 0; i < G; ++i)
        values.push_back(f(unstack(centers[i], d, n), unstack(centers[j], d, n)));
    for (int t = 0; t < 100; ++t) {
      const Matrix zk = random_matrix(rng, d, n), zq = random_matrix(rng, d, n);
      const Matrix out = evaluate_approximator_cross(approx, zk, zq);
      worst = std::max(worst, rel_diff(out, closed_form_cross(f, approx.centers, R, zk, zq)));
      const Vector wk = kernel_weights(centers, R, stack_columns(zk));
      const Vector wq = kernel_weights(centers, R, stack_columns(zq));
      Vector w(G * G);
      for (std::size_t j = 0; j < G; ++j)
        for (std::size_t i = 0; i < G; ++i) w[i + G * j] = wk[i] * wq[j];
      worst_kernel = std::max(worst_kernel, rel_diff(out, kernel_average(values, w)));
    }
    ++configs;
  }
  return {configs >= 50 && worst <= 1e-8 && worst_kernel <= 1e-8,
          fmt::format("{} configs, worst rel diff {:.3g} vs closed form, {:.3g} vs kernel average",
                      configs, worst, worst_kernel)};
}

struct Instance {
  MaxAffine ma;
  Matrix tokens;
  std::vector<std::size_t> cells;  // reference argmax per token
};

std::size_t argmax_component(const MaxAffine& ma, const Vector& x, double& margin) {
  std::vector<double> vals;
  for (const auto& c : ma.components()) {
    double s = c.offset;
    for (std::size_t i = 0; i < x.size(); ++i) s += c.slope[i] * x[i];
    vals.push_back(s);
  }
  const std::size_t best =
      static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  margin = INFINITY;
  for (std::size_t j = 0; j < vals.size(); ++j)
    if (j != best) margin = std::min(margin, vals[best] - vals[j]);
  return best;
}

std::vector<Instance> partition_instances() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Instance> out;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + trial % 3, comps = 1 + trial % 8;
    const std::size_t n = 1 + trial % comps;
    Instance inst{random_maxaffine(rng(), comps, dim, 1.0), Matrix(dim, n), {}};
    for (std::size_t i = 0; i < n; ++i) {
      Vector x(dim);
      double margin = 0.0;
      std::size_t cell = 0;
      do {
        for (double& v : x) v = u(rng);
        cell = argmax_component(inst.ma, x, margin);
      } while (margin < 0.2);
      for (std::size_t r = 0; r < dim; ++r) inst.tokens(r, i) = x[r];
      inst.cells.push_back(cell);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

Outcome criterion3() {
  double worst = 0.0, worst_r = 0.0;
  for (const auto& inst : partition_instances()) {
    const std::size_t N = inst.ma.size();
    const auto pa = build_indicator_attention(inst.ma, inst.tokens.cols(), 1e-3, 0.2);
    const double expected_r = N == 1 ? 1.0 : (std::log(N - 1.0) - std::log(1e-3)) / 0.2;
    worst_r = std::max(worst_r, std::abs(pa.chosen_r - expected_r) / expected_r);
    const Matrix s = partition_scores(pa, inst.tokens);
    for (std::size_t i = 0; i < inst.tokens.cols(); ++i)
      for (std::size_t j = 0; j < N; ++j)
        worst = std::max(worst, std::abs(s(j, i) - (j == inst.cells[i] ? 1.0 : 0.0)));
  }
  return {worst <= 1e-3 && worst_r <= 1e-12,
          fmt::format("worst entry deviation {:.3g}, chosen_R rel error {:.3g}", worst, worst_r)};
}

Outcome criterion4() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (const auto& inst : partition_instances()) {
    const std::size_t rows = 1 + rng() % 3;
    std::vector<Vector> values(inst.ma.size(), Vector(rows));
    for (auto& v : values)
      for (double& x : v) x = u(rng);
    const auto pa = build_reassign_attention(inst.ma, values, inst.tokens.cols(), 1e-3, 0.2);
    const Matrix out = apply_partition_attention(pa, inst.tokens);
    for (std::size_t i = 0; i < inst.tokens.cols(); ++i)
      for (std::size_t r = 0; r < rows; ++r)
        worst = std::max(worst, std::abs(out(r, i) - values[inst.cells[i]][r]));
  }
  return {worst <= 2e-3, fmt::format("worst deviation from the cell value {:.3g}", worst)};
}

Outcome criterion5() {
  cli::RunConfig c;
  c.command = "approximate";
  c.function = "sinprod";
  c.d = 1;
  c.n = 2;
  c.epsilon = 0.1;
  c.samples = 10000;
  c.seed = 5;
  c.path = cli::EvalPath::oracle;
  std::ostringstream log;
  const auto rows = cli::compute_rows(c, log);
  const auto& row = rows.at(0);

  // Independent sup estimate over the same grid and temperature.
  const auto centers = grid(1.0, row.p_or_nx, 2);
  auto f = [](const Vector& v) {
    const double s = std::sin(std::numbers::pi * v[0]) * std::cos(std::numbers::pi * v[1]);
    return Vector{s, s};
  };
  const auto target = cli::resolve_target("sinprod", {std::nullopt, 1, 2, 1.0, 0});
  std::mt19937_64 rng(55);
  double probe = 0.0;
  for (int i = 0; i < 16; ++i) {
    const Matrix z = random_matrix(rng, 1, 2);
    const Vector fv = f(stack_columns(z));
    probe = std::max(probe, max_abs_diff(target.single(z), unstack(fv, 1, 2)));
  }
  std::vector<Matrix> values;
  for (const auto& v : centers) values.push_back(unstack(f(v), 1, 2));
  double sup = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Matrix z = random_matrix(rng, 1, 2);
    const Matrix approx =
        kernel_average(values, kernel_weights(centers, row.temperature, stack_columns(z)));
    sup = std::max(sup, max_abs_diff(approx, unstack(f(stack_columns(z)), 1, 2)));
  }

  // Matrix path at P = 32 with the temperature the same rule gives there.
  const GridSpec small{1.0, 32, 1, 2};
  const double b0 = estimate_bound(target.single, grid_centers(small), small);
  const double r32 = choose_temperature(0.1 / (3.0 * *target.lipschitz), b0, 1024.0, 0.1);
  const TargetFunction f32("sinprod", 0, target.single, b0);
  const auto approx32 = build_universal_self(f32, small, r32);
  double worst32 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Matrix z = random_matrix(rng, 1, 2);
    worst32 =
        std::max(worst32, rel_diff(evaluate_approximator(approx32, z),
                                   closed_form_self(target.single, approx32.centers, r32, z)));
  }
  const bool ok = row.p_or_nx == 128 && row.g == 16384 && row.sup_err <= 0.1 && sup <= 0.1 &&
                  worst32 <= 1e-8 && probe <= 1e-15;
  return {ok,
          fmt::format("P = {}, G = {}, R = {:.6g}, sup error {:.4g} (harness) {:.4g} (reference), "
                      "matrix path at P = 32 rel diff {:.3g}",
                      row.p_or_nx, row.g, row.temperature, row.sup_err, sup, worst32)};
}

Outcome criterion6() {
  std::mt19937_64 rng(606);
  const TargetFunction f(
      "const", 0, [](const Matrix& z) { return Matrix(z.rows(), z.cols(), 0.7); }, 0.7007);
  const PairTargetFunction g(
      "const", 0, [](const Matrix& a, const Matrix&) { return Matrix(a.rows(), a.cols(), 0.7); },
      0.7007);
  const auto self = build_universal_self(f, {1.0, 3, 1, 2}, 40.0);
  const auto cross = build_universal_cross(g, {1.0, 3, 1, 1}, 40.0);
  const auto cover = build_small_region(f, random_cover(7, 20, 2, 1.0, 0.2), 1, 2, 40.0);
  double ws = 0.0, wc = 0.0, wv = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Matrix z = random_matrix(rng, 1, 2);
    ws = std::max(ws, max_abs_diff(evaluate_approximator(self, z), Matrix(1, 2, 0.7)));
    wv = std::max(wv, max_abs_diff(evaluate_approximator(cover, z), Matrix(1, 2, 0.7)));
    wc = std::max(wc, max_abs_diff(evaluate_approximator_cross(cross, random_matrix(rng, 1, 1),
                                                               random_matrix(rng, 1, 1)),
                                   Matrix(1, 1, 0.7)));
  }
  return {std::max({ws, wc, wv}) <= 1e-12,
          fmt::format("worst deviation self {:.3g}, cross {:.3g}, cover {:.3g}", ws, wc, wv)};
}

Outcome criterion7() {
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<std::size_t> small(1, 3), nx(1, 8);
  int agree = 0, triples = 0;
  while (triples < 20) {
    const std::size_t d = small(rng), n = small(rng), count = nx(rng);
    if (2 * d * count < n) continue;
    ++triples;
    auto build = [&](std::uint64_t seed) {
      const SphereCover cover = random_cover(seed, count, d * n, 1.0, 0.1);
      return build_small_region(wave(rng, d, n), cover, d, n, 15.0);
    };
    const auto a = build(rng()), b = build(rng());
    const std::size_t expected = 4 * d * n * count + 2 * d * count + n;
    const auto walked = maxattn::testing::differing_entries(a, b);
    if (count_trainable_params(a) == expected && walked && *walked == expected) ++agree;
  }
  return {agree == triples, fmt::format("{}/{} triples match formula and walk", agree, triples)};
}

Outcome criterion8() {
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<std::size_t> count(2, 12), dimension(1, 4);
  double worst = 0.0;
  int mismatches = 0, limit_cases = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t dim = dimension(rng);
    std::vector<Vector> centers(count(rng));
    for (auto& c : centers) c = stack_columns(random_matrix(rng, dim, 1));
    const Vector z = stack_columns(random_matrix(rng, dim, 1));
    std::vector<double> dist;
    for (const auto& c : centers) dist.push_back(sq_dist(z, c));
    const std::size_t nearest =
        static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
    std::sort(dist.begin(), dist.end());
    if (nearest_center(centers, z) != nearest || affine_argmax_center(centers, z) != nearest)
      ++mismatches;
    if ((dist[1] - dist[0]) / 2.0 < 0.01) continue;
    ++limit_cases;
    SequenceMap f = [](const Matrix& m) {
      Matrix out(m.rows(), m.cols());
      for (std::size_t r = 0; r < m.rows(); ++r) out(r, 0) = std::cos(3.0 * m(r, 0));
      return out;
    };
    const Matrix zm = unstack(z, dim, 1);
    worst = std::max(worst, max_abs_diff(closed_form_self(f, centers, 1e4, zm),
                                         f(unstack(centers[nearest], dim, 1))));
  }
  return {
      mismatches == 0 && worst <= 1e-6,
      fmt::format(
          "{} argmax mismatches over 10^4 instances, worst deviation {:.3g} over {} gapped inputs",
          mismatches, worst, limit_cases)};
}

Outcome criterion9() {
  int ok = 0;
  std::string worst;
  double worst_slack = INFINITY;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cli::RunConfig c;
    c.command = "approximate";
    c.function = seed % 2 ? "randlip" : "sinprod";
    c.d = 1;
    c.n = seed % 2 ? 1 + seed % 3 : 2;
    c.P = {3 + seed % 3};
    c.temperature = {5.0 + 10.0 * static_cast<double>(seed)};
    c.p = seed % 3 == 0 ? 1.0 : seed % 3 == 1 ? 2.0 : 3.5;
    c.samples = 4000;
    c.seed = seed;
    std::ostringstream log;
    const auto rows = cli::compute_rows(c, log);
    for (const auto& row : rows) {
      const double vol = std::pow(2.0 * c.D, static_cast<double>(c.d * c.n));
      const double bound =
          row.sup_err * std::pow(static_cast<double>(c.d * c.n) * vol, 1.0 / row.p) +
          3.0 * row.lp_stderr;
      const double slack = bound - row.lp_err;
      if (slack >= 0.0) ++ok;
      worst_slack = std::min(worst_slack, slack);
    }
  }
  return {ok == 10,
          fmt::format("{}/10 runs satisfy the bound, smallest slack {:.3g}", ok, worst_slack)};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Drops the trailing runtime column of CSV reports and runtime_ms lines of JSON ones.
std::string strip_runtime(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"runtime_ms\"") != std::string::npos) continue;
    if (line.find(',') != std::string::npos && line.front() != '{' && line.front() != ' ') {
      line = line.substr(0, line.rfind(','));
    }
    out += line + "\n";
  }
  return out;
}

Outcome criterion10() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / fmt::format("maxattn-acceptance-{}", ::getpid());
  fs::remove_all(dir);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"verify.csv", "verify --seed 7"},
      {"verify.json", "verify --seed 7 --format json"},
      {"approx.csv",
       "approximate --function sinprod --d 1 --n 2 --P 8 --temperature 300 --samples 2000 --seed "
       "3"},
      {"curve.csv",
       "approximate --function randlip --d 1 --n 1 --epsilon 0.2 --samples 2000 --seed 4"},
      {"cross.json",
       "cross --function addpair --epsilon 0.3 --samples 2000 --seed 5 --format json"},
      {"cover.csv",
       "cover --function randlip --d 1 --n 2 --centers 40 --epsilon 0.2 --samples 2000 --seed 6"},
      {"indicator.csv", "indicator-demo --function step1d --n 1 --samples 2000 --seed 8"},
      {"sweep.csv",
       "sweep --function sinprod --d 1 --n 2 --P 4,8 --temperature 50,500 --samples 1000 --seed 9"},
      {"params.json", "params-count --d 2 --n 3 --centers 4 --format json"},
  };
  int same = 0, compared = 0;
  std::string differing;
  for (int round = 0; round < 2; ++round) {
    const fs::path sub = dir / std::to_string(round);
    fs::create_directories(sub);
    for (const auto& [file, args] : runs) {
      const std::string cmd = fmt::format("\"{}\" {} --out \"{}\" 2>/dev/null", MAXATTN_CLI_PATH,
                                          args, (sub / file).string());
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
    }
  }
  for (const auto& entry : fs::directory_iterator(dir / "0")) {
    const fs::path other = dir / "1" / entry.path().filename();
    const std::string a = read_file(entry.path()), b = read_file(other);
    const bool report = entry.path().extension() == ".csv" || entry.path().extension() == ".json";
    const bool curve = entry.path().filename().string().find(".curve.") != std::string::npos;
    const bool equal = report && !curve ? strip_runtime(a) == strip_runtime(b) : a == b;
    ++compared;
    if (equal && !a.empty())
      ++same;
    else
      differing += " " + entry.path().filename().string();
  }
  fs::remove_all(dir);
  return {same == compared && compared > static_cast<int>(runs.size()),
          fmt::format("{}/{} files identical across two invocations{}", same, compared,
                      differing.empty() ? "" : " (differ:" + differing + ")")};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* title;
    double budget_s;  // 0: no budget
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "self pipeline equals closed form", 30, criterion1},
      {2, "cross pipeline equals closed form", 30, criterion2},
      {3, "indicator construction", 10, criterion3},
      {4, "value reassignment", 10, criterion4},
      {5, "desk-scale sinprod bound", 120, criterion5},
      {6, "constant exactness", 5, criterion6},
      {7, "parameter count", 1, criterion7},
      {8, "temperature-limit concentration", 10, criterion8},
      {9, "L_p consistency", 30, criterion9},
      {10, "determinism", 0, criterion10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s == 0 || secs < c.budget_s;
    const bool pass = o.passed && in_time;
    failures += pass ? 0 : 1;
    std::cout << fmt::format("{} criterion {} ({}): {}; {:.2f} s{}\n", pass ? "PASS" : "FAIL",
                             c.number, c.title, o.detail, secs,
                             in_time ? "" : fmt::format(" exceeds the {} s budget", c.budget_s));
  }
  return failures == 0 ? 0 : 1;
}
