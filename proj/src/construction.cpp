#include "maxattn/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxattn/errors.hpp"
#include "maxattn/sampling.hpp"

namespace maxattn {

std::size_t GridSpec::center_count(std::size_t cap) const {
  if (!(D > 0.0) || !std::isfinite(D)) throw ArgumentError("GridSpec: D must be positive");
  if (P == 0 || d == 0 || n == 0) throw ArgumentError("GridSpec: P, d and n must be positive");
  std::size_t g = 1;
  for (std::size_t i = 0; i < token_dim(); ++i) {
    if (g > cap / P) {
      throw CapExceeded("grid of P=" + std::to_string(P) + " points over " +
                            std::to_string(token_dim()) + " axes exceeds the cap of " +
                            std::to_string(cap) + " centers",
                        g > std::numeric_limits<std::size_t>::max() / P ? cap + 1 : g * P);
    }
    g *= P;
  }
  return g;
}

std::vector<Vector> grid_centers(const GridSpec& spec, std::size_t cap) {
  const std::size_t g = spec.center_count(cap);
  const std::size_t dim = spec.token_dim();
  const double P = static_cast<double>(spec.P);
  std::vector<Vector> centers(g, Vector(dim));
  for (std::size_t s = 0; s < g; ++s) {
    std::size_t rest = s;
    for (std::size_t i = 0; i < dim; ++i) {
      const double k = static_cast<double>(rest % spec.P);
      rest /= spec.P;
      centers[s][i] = (2.0 * spec.D * k - spec.D * P) / P;
    }
  }
  return centers;
}

TargetFunction::TargetFunction(std::string name, std::uint64_t seed, SequenceMap evaluator,
                               double bound_b0)
    : name_(std::move(name)), seed_(seed), evaluator_(std::move(evaluator)), bound_b0_(bound_b0) {
  if (!(bound_b0_ > 0.0) || !std::isfinite(bound_b0_)) {
    throw ArgumentError("TargetFunction: bound_b0 must be positive and finite");
  }
}

Matrix TargetFunction::operator()(const Matrix& z) const {
  Matrix value = evaluator_(z);
  if (!(value.max_abs() < bound_b0_)) {
    throw BoundViolation("target '" + name_ + "' reached |f| = " +
                         std::to_string(value.max_abs()) + " >= b0 = " +
                         std::to_string(bound_b0_));
  }
  return value;
}

TargetFunction TargetFunction::with_bound(double b0) const {
  return TargetFunction(name_, seed_, evaluator_, b0);
}

PairTargetFunction::PairTargetFunction(std::string name, std::uint64_t seed, PairMap evaluator,
                                       double bound_b0)
    : name_(std::move(name)), seed_(seed), evaluator_(std::move(evaluator)), bound_b0_(bound_b0) {
  if (!(bound_b0_ > 0.0) || !std::isfinite(bound_b0_)) {
    throw ArgumentError("PairTargetFunction: bound_b0 must be positive and finite");
  }
}

Matrix PairTargetFunction::operator()(const Matrix& z_k, const Matrix& z_q) const {
  Matrix value = evaluator_(z_k, z_q);
  if (!(value.max_abs() < bound_b0_)) {
    throw BoundViolation("target '" + name_ + "' reached |f| = " +
                         std::to_string(value.max_abs()) + " >= b0 = " +
                         std::to_string(bound_b0_));
  }
  return value;
}

PairTargetFunction PairTargetFunction::with_bound(double b0) const {
  return PairTargetFunction(name_, seed_, evaluator_, b0);
}

double inflated_bound(std::span<const double> abs_values) {
  double sup = 0.0;
  for (double v : abs_values) sup = std::max(sup, std::abs(v));
  return std::max(kBoundFloor, (1.0 + kBoundInflation) * sup);
}

double estimate_bound(const SequenceMap& f, std::span<const Vector> centers, const GridSpec& spec,
                      std::size_t probe_samples, std::uint64_t seed) {
  Vector sups;
  sups.reserve(centers.size() + probe_samples);
  for (const auto& v : centers) sups.push_back(f(center_matrix(v, spec.d, spec.n)).max_abs());
  Rng rng(seed);
  for (std::size_t i = 0; i < probe_samples; ++i)
    sups.push_back(f(uniform_sequence(rng, spec.d, spec.n, spec.D)).max_abs());
  return inflated_bound(sups);
}

double estimate_pair_bound(const PairMap& f, std::span<const Vector> centers,
                           const GridSpec& spec, std::size_t probe_samples,
                           std::uint64_t seed) {
  Vector sups;
  sups.reserve(centers.size() * centers.size() + probe_samples);
  std::vector<Matrix> mats;
  mats.reserve(centers.size());
  for (const auto& v : centers) mats.push_back(center_matrix(v, spec.d, spec.n));
  for (const auto& a : mats)
    for (const auto& b : mats) sups.push_back(f(a, b).max_abs());
  Rng rng(seed);
  for (std::size_t i = 0; i < probe_samples; ++i) {
    const Matrix a = uniform_sequence(rng, spec.d, spec.n, spec.D);
    const Matrix b = uniform_sequence(rng, spec.d, spec.n, spec.D);
    sups.push_back(f(a, b).max_abs());
  }
  return inflated_bound(sups);
}

EtPair compute_et_values(const Matrix& f_value, double b0) {
  if (!(f_value.max_abs() < b0)) {
    throw BoundViolation("compute_et: |f| = " + std::to_string(f_value.max_abs()) +
                         " at a center is not below b0 = " + std::to_string(b0));
  }
  EtPair et{Matrix(f_value.rows(), f_value.cols()), Matrix(f_value.rows(), f_value.cols())};
  for (std::size_t r = 0; r < f_value.rows(); ++r) {
    for (std::size_t c = 0; c < f_value.cols(); ++c) {
      const double ratio = f_value(r, c) / b0;
      et.e(r, c) = 1.0 - ratio;
      et.t(r, c) = 1.0 + ratio;
    }
  }
  return et;
}

EtPair compute_et(const TargetFunction& f, const Matrix& center) {
  return compute_et_values(f(center), f.bound_b0());
}

double choose_temperature(double delta, double b0, double count, double epsilon) {
  if (!(delta > 0.0) || !(b0 > 0.0) || !(count > 0.0) || !(epsilon > 0.0)) {
    throw ArgumentError("choose_temperature: delta, b0, count and epsilon must be positive");
  }
  if (!(epsilon < 1.0)) throw ArgumentError("choose_temperature: epsilon must be below 1");
  const double r = 8.0 / (3.0 * delta * delta) * std::log(6.0 * b0 * count / epsilon);
  return r > 0.0 ? r : 1.0;
}

const char* to_string(ApproximatorKind kind) {
  switch (kind) {
    case ApproximatorKind::self: return "self";
    case ApproximatorKind::cross: return "cross";
    case ApproximatorKind::lipschitz_cover: return "lipschitz-cover";
  }
  return "unknown";
}

Matrix center_matrix(std::span<const double> v, std::size_t d, std::size_t n) {
  return unflatten_sequence(v, d, n);
}

}  // namespace maxattn
