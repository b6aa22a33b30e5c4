#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "maxattn/construction.hpp"
#include "maxattn/sampling.hpp"

namespace maxattn {

/// w_j = softmax_j(R (v_j . z - |v_j|^2 / 2)), computed with log-sum-exp.
Vector closed_form_weights(std::span<const Vector> centers, double temperature,
                           std::span<const double> z_flat);

/// sum_j w_j f(v_j) for a d x n input Z.
Matrix closed_form_self(const SequenceMap& f, std::span<const Vector> centers,
                        double temperature, const Matrix& z);

/// Pair weights, index i + G j; they equal w^K_i * w^Q_j.
Vector closed_form_pair_weights(std::span<const Vector> centers, double temperature,
                                std::span<const double> zk_flat, std::span<const double> zq_flat);

Matrix closed_form_cross(const PairMap& f, std::span<const Vector> centers, double temperature,
                         const Matrix& z_k, const Matrix& z_q);

/// Closed form with the center values of f computed once; for repeated evaluation.
class SelfOracle {
 public:
  SelfOracle(const SequenceMap& f, std::vector<Vector> centers, std::size_t d, std::size_t n,
             double temperature);
  Matrix operator()(const Matrix& z) const;

 private:
  std::vector<Vector> centers_;
  std::vector<Matrix> values_;
  std::size_t d_;
  std::size_t n_;
  double temperature_;
};

class CrossOracle {
 public:
  CrossOracle(const PairMap& f, std::vector<Vector> centers, std::size_t d, std::size_t n,
              double temperature);
  Matrix operator()(const Matrix& z_k, const Matrix& z_q) const;

 private:
  std::vector<Vector> centers_;
  std::vector<Matrix> values_;  // index i + G j
  std::size_t d_;
  std::size_t n_;
  double temperature_;
};

/// Smallest index attaining the minimal 2-norm distance to z.
std::size_t nearest_center(std::span<const Vector> centers, std::span<const double> z);

/// Smallest index maximizing v_j . z - |v_j|^2 / 2.
std::size_t affine_argmax_center(std::span<const Vector> centers, std::span<const double> z);

struct ErrorReport {
  double sup_error = 0.0;
  double lp_error = 0.0;
  double lp_stderr = 0.0;
  double p = 2.0;
  std::size_t samples = 0;
  std::size_t out_of_cover = 0;
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;
};

struct EstimateOptions {
  std::size_t samples = 10000;
  double p = 2.0;
  std::uint64_t seed = 0;
  /// Samples for which this returns false are counted in out_of_cover and skipped.
  std::function<bool(const Matrix&)> in_domain;
};

/// sup and L_p error of `approx` against `f` on one seeded sample set.
/// L_p = (volume * mean |f - approx|_p^p)^(1/p); lp_stderr is its delta-method
/// standard error. Throws ArgumentError for p < 1 or zero samples.
ErrorReport estimate_errors(const SequenceMap& f, const SequenceMap& approx,
                            const Sampler& sampler, const EstimateOptions& options);

ErrorReport sup_error_estimate(const SequenceMap& f, const SequenceMap& approx,
                               const Sampler& sampler, std::size_t num_samples,
                               std::uint64_t seed);
ErrorReport lp_error_estimate(const SequenceMap& f, const SequenceMap& approx,
                              const Sampler& sampler, std::size_t num_samples, double p,
                              std::uint64_t seed);

/// Cross inputs travel through the estimators as one d x 2n matrix [Z_K Z_Q].
Matrix pack_pair(const Matrix& z_k, const Matrix& z_q);
std::pair<Matrix, Matrix> unpack_pair(const Matrix& packed);
SequenceMap packed(const PairMap& f);

}  // namespace maxattn
