#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maxattn/attention.hpp"
#include "maxattn/matrix.hpp"

namespace maxattn {

/// Largest number of grid centers (P^{dn}) any construction will enumerate.
inline constexpr std::size_t kMaxGridCenters = 65536;
/// Largest per-side center count for the cross construction (G^2 <= 65536 pairs).
inline constexpr std::size_t kMaxCrossCenters = 256;
/// Largest order of a dense score matrix (2dG or 2dG^2) the matrix path will build.
inline constexpr std::size_t kMaxDenseOrder = 4096;

/// Relative inflation applied to the empirical sup of |f| to get a strict bound.
inline constexpr double kBoundInflation = 1e-3;
/// Floor on b0 so that f == 0 does not divide by zero.
inline constexpr double kBoundFloor = 1e-6;

/// Uniform grid over [-D, D]^{d x n} with P points per axis.
struct GridSpec {
  double D = 1.0;
  std::size_t P = 2;
  std::size_t d = 1;
  std::size_t n = 1;

  std::size_t token_dim() const noexcept { return d * n; }
  double step() const noexcept { return 2.0 * D / static_cast<double>(P); }
  /// G = P^{dn}. Throws CapExceeded above `cap`, ArgumentError on an invalid spec.
  std::size_t center_count(std::size_t cap = kMaxGridCenters) const;
};

/// Centers v_s, s = sum_i k_i P^{i-1}, coordinate i equal to (2 D k_i - D P) / P.
std::vector<Vector> grid_centers(const GridSpec& spec, std::size_t cap = kMaxGridCenters);

using SequenceMap = std::function<Matrix(const Matrix&)>;
using PairMap = std::function<Matrix(const Matrix&, const Matrix&)>;

/// A sequence-to-sequence target f: R^{d x n} -> R^{d x n} with a strict bound b0 > ||f||_inf.
class TargetFunction {
 public:
  TargetFunction(std::string name, std::uint64_t seed, SequenceMap evaluator, double bound_b0);

  /// Evaluates f and throws BoundViolation if ||f(Z)||_inf >= b0.
  Matrix operator()(const Matrix& z) const;

  const std::string& name() const noexcept { return name_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double bound_b0() const noexcept { return bound_b0_; }
  TargetFunction with_bound(double b0) const;

 private:
  std::string name_;
  std::uint64_t seed_;
  SequenceMap evaluator_;
  double bound_b0_;
};

/// Two-argument target f(Z_K, Z_Q) for the cross construction.
class PairTargetFunction {
 public:
  PairTargetFunction(std::string name, std::uint64_t seed, PairMap evaluator, double bound_b0);

  Matrix operator()(const Matrix& z_k, const Matrix& z_q) const;

  const std::string& name() const noexcept { return name_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double bound_b0() const noexcept { return bound_b0_; }
  PairTargetFunction with_bound(double b0) const;

 private:
  std::string name_;
  std::uint64_t seed_;
  PairMap evaluator_;
  double bound_b0_;
};

/// b0 = (1 + 1e-3) * max|value|, floored at 1e-6.
double inflated_bound(std::span<const double> abs_values);

/// Strict bound for f from its values at `centers` plus `probe_samples`
/// uniform draws over [-D, D]^{d x n}.
double estimate_bound(const SequenceMap& f, std::span<const Vector> centers, const GridSpec& spec,
                      std::size_t probe_samples = 1024, std::uint64_t seed = 0);
double estimate_pair_bound(const PairMap& f, std::span<const Vector> centers,
                           const GridSpec& spec, std::size_t probe_samples = 1024,
                           std::uint64_t seed = 0);

/// E = 1 - f/b0 and T = 1 + f/b0 at a d x n center.
struct EtPair {
  Matrix e;
  Matrix t;
};

/// Throws BoundViolation when |f(center)| >= b0 anywhere.
EtPair compute_et(const TargetFunction& f, const Matrix& center);
EtPair compute_et_values(const Matrix& f_value, double b0);

/// Smallest R with 2 b0 G exp(-3 R delta^2 / 8) <= epsilon / 3, i.e.
/// R = 8 / (3 delta^2) * ln(6 b0 G / epsilon). Returns 1 when every positive
/// R already satisfies the inequality.
double choose_temperature(double delta, double b0, double count, double epsilon);

enum class ApproximatorKind { self, cross, lipschitz_cover };

const char* to_string(ApproximatorKind kind);

/// Linear layer(s) plus attention weights of one construction, together
/// with the center set, b0 and temperature the closed form needs.
struct ConstructedApproximator {
  ApproximatorKind kind = ApproximatorKind::self;
  std::size_t d = 1;
  std::size_t n = 1;
  SumLinear linear;                   // Linear, or Linear_K for cross
  std::optional<SumLinear> linear_q;  // Linear_Q, cross only
  AttentionWeights weights;
  std::vector<Vector> centers;        // v_s, length dn each
  double b0 = 1.0;
  double temperature = 1.0;
};

/// d x n matrix form of a flattened center (column-major, token after token).
Matrix center_matrix(std::span<const double> v, std::size_t d, std::size_t n);

}  // namespace maxattn
