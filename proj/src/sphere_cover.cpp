#include "maxattn/sphere_cover.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "maxattn/errors.hpp"
#include "maxattn/sampling.hpp"
#include "maxattn/universal_self.hpp"

namespace maxattn {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

void SphereCover::validate() const {
  if (centers.empty()) throw ArgumentError("sphere cover: no centers");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ArgumentError("sphere cover: radius must be positive");
  }
  const std::size_t dim = centers.front().size();
  for (const auto& c : centers) {
    if (c.size() != dim) throw DimensionError("sphere cover: ragged centers");
  }
  if (std::set<Vector>(centers.begin(), centers.end()).size() != centers.size()) {
    throw ArgumentError("sphere cover: centers must be pairwise distinct");
  }
}

bool SphereCover::contains(std::span<const double> x) const {
  const double r2 = radius * radius;
  for (const auto& c : centers)
    if (squared_distance(c, x) <= r2) return true;
  return false;
}

ConstructedApproximator build_small_region(const TargetFunction& f, const SphereCover& cover,
                                           std::size_t d, std::size_t n, double temperature) {
  cover.validate();
  return build_center_approximator(f, cover.centers, d, n, temperature,
                                   ApproximatorKind::lipschitz_cover);
}

ParamTally tally_trainable_params(std::size_t d, std::size_t n, std::size_t n_x) {
  ParamTally t;
  t.linear = 2 * d * n * n_x;
  t.w_k = 2 * d * n_x + 2 * d * n * n_x;
  t.w_o = n;
  return t;
}

std::size_t count_trainable_params(const ConstructedApproximator& approx) {
  if (approx.kind != ApproximatorKind::lipschitz_cover) {
    throw ArgumentError(std::string("count_trainable_params: expected a lipschitz-cover "
                                    "approximator, got ") +
                        to_string(approx.kind));
  }
  return tally_trainable_params(approx.d, approx.n, approx.centers.size()).total();
}

SphereCover greedy_cover(const std::vector<Vector>& points, double radius) {
  if (points.empty()) throw ArgumentError("greedy_cover: no points");
  SphereCover cover;
  cover.radius = radius;
  const double r2 = radius * radius;
  for (const auto& p : points) {
    bool covered = false;
    for (const auto& c : cover.centers) {
      if (squared_distance(c, p) <= r2) {
        covered = true;
        break;
      }
    }
    if (!covered) cover.centers.push_back(p);
  }
  cover.validate();
  return cover;
}

SphereCover random_cover(std::uint64_t seed, std::size_t n_x, std::size_t dim, double D,
                         double radius) {
  if (n_x == 0 || dim == 0) throw ArgumentError("random_cover: N_x and dim must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-D, D);
  SphereCover cover;
  cover.radius = radius;
  cover.centers.assign(n_x, Vector(dim));
  for (auto& c : cover.centers)
    for (double& x : c) x = u(rng);
  cover.validate();
  return cover;
}

SphereCover read_cover_file(const std::filesystem::path& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open cover file " + path.string());
  SphereCover cover;
  std::string line;
  std::size_t line_no = 0;
  bool have_radius = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (!have_radius) {
      if (first != "radius" || !(ls >> cover.radius)) {
        throw ArgumentError(path.string() + ":" + std::to_string(line_no) +
                            ": expected `radius <r>`");
      }
      have_radius = true;
      continue;
    }
    Vector c;
    ls.clear();
    ls.str(line);
    double x = 0.0;
    while (ls >> x) c.push_back(x);
    if (!ls.eof()) {
      throw ArgumentError(path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
    if (c.size() != dim) {
      throw ArgumentError(path.string() + ":" + std::to_string(line_no) + ": " +
                          std::to_string(c.size()) + " coordinates, expected " +
                          std::to_string(dim));
    }
    cover.centers.push_back(std::move(c));
  }
  if (!have_radius) throw ArgumentError(path.string() + ": empty cover file");
  cover.validate();
  return cover;
}

void write_cover_file(const std::filesystem::path& path, const SphereCover& cover) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write cover file " + path.string());
  out << fmt::format("radius {:.17g}\n", cover.radius);
  for (const auto& c : cover.centers) {
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << fmt::format("{:.17g}", c[i]);
    out << '\n';
  }
}

}  // namespace maxattn
