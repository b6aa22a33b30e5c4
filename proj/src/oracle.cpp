#include "maxattn/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "maxattn/errors.hpp"

namespace maxattn {

namespace {

double affine_score(std::span<const double> v, std::span<const double> z) {
  double dot = 0.0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    dot += v[i] * z[i];
    norm2 += v[i] * v[i];
  }
  return dot - 0.5 * norm2;
}

Vector softmax(Vector logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& x : logits) {
    x = std::exp(x - top);
    total += x;
  }
  for (double& x : logits) x /= total;
  return logits;
}

void check_centers(std::span<const Vector> centers, std::size_t dim) {
  if (centers.empty()) throw ArgumentError("oracle: no centers");
  for (const auto& c : centers) {
    if (c.size() != dim) {
      throw DimensionError("oracle: center of length " + std::to_string(c.size()) +
                           ", input has " + std::to_string(dim) + " entries");
    }
  }
}

Vector flat(const Matrix& z) { return flatten_sequence(z).values(); }

Matrix weighted_sum(std::span<const double> w, const std::vector<Matrix>& values) {
  Matrix out(values.front().rows(), values.front().cols());
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] == 0.0) continue;
    const auto& src = values[j].values();
    for (std::size_t r = 0; r < out.rows(); ++r)
      for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += w[j] * src[r * out.cols() + c];
  }
  return out;
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t mid = xs.size() / 2;
  return pairwise_sum(xs.first(mid)) + pairwise_sum(xs.subspan(mid));
}

}  // namespace

Vector closed_form_weights(std::span<const Vector> centers, double temperature,
                           std::span<const double> z_flat) {
  check_centers(centers, z_flat.size());
  Vector logits(centers.size());
  for (std::size_t j = 0; j < centers.size(); ++j)
    logits[j] = temperature * affine_score(centers[j], z_flat);
  return softmax(std::move(logits));
}

Matrix closed_form_self(const SequenceMap& f, std::span<const Vector> centers,
                        double temperature, const Matrix& z) {
  const Vector w = closed_form_weights(centers, temperature, flat(z));
  std::vector<Matrix> values;
  values.reserve(centers.size());
  for (const auto& v : centers) values.push_back(f(center_matrix(v, z.rows(), z.cols())));
  return weighted_sum(w, values);
}

Vector closed_form_pair_weights(std::span<const Vector> centers, double temperature,
                                std::span<const double> zk_flat,
                                std::span<const double> zq_flat) {
  check_centers(centers, zk_flat.size());
  check_centers(centers, zq_flat.size());
  const std::size_t G = centers.size();
  Vector logits(G * G);
  Vector sk(G);
  Vector sq(G);
  for (std::size_t i = 0; i < G; ++i) {
    sk[i] = affine_score(centers[i], zk_flat);
    sq[i] = affine_score(centers[i], zq_flat);
  }
  for (std::size_t j = 0; j < G; ++j)
    for (std::size_t i = 0; i < G; ++i) logits[i + G * j] = temperature * (sk[i] + sq[j]);
  return softmax(std::move(logits));
}

Matrix closed_form_cross(const PairMap& f, std::span<const Vector> centers, double temperature,
                         const Matrix& z_k, const Matrix& z_q) {
  const Vector w = closed_form_pair_weights(centers, temperature, flat(z_k), flat(z_q));
  const std::size_t G = centers.size();
  std::vector<Matrix> values;
  values.reserve(G * G);
  for (std::size_t j = 0; j < G; ++j) {
    const Matrix vq = center_matrix(centers[j], z_q.rows(), z_q.cols());
    for (std::size_t i = 0; i < G; ++i)
      values.push_back(f(center_matrix(centers[i], z_k.rows(), z_k.cols()), vq));
  }
  return weighted_sum(w, values);
}

SelfOracle::SelfOracle(const SequenceMap& f, std::vector<Vector> centers, std::size_t d,
                       std::size_t n, double temperature)
    : centers_(std::move(centers)), d_(d), n_(n), temperature_(temperature) {
  check_centers(centers_, d * n);
  values_.resize(centers_.size());
  parallel_for(centers_.size(),
               [&](std::size_t j) { values_[j] = f(center_matrix(centers_[j], d_, n_)); });
}

Matrix SelfOracle::operator()(const Matrix& z) const {
  if (z.rows() != d_ || z.cols() != n_) {
    throw DimensionError("SelfOracle: input is " + z.shape_string());
  }
  return weighted_sum(closed_form_weights(centers_, temperature_, flat(z)), values_);
}

CrossOracle::CrossOracle(const PairMap& f, std::vector<Vector> centers, std::size_t d,
                         std::size_t n, double temperature)
    : centers_(std::move(centers)), d_(d), n_(n), temperature_(temperature) {
  check_centers(centers_, d * n);
  const std::size_t G = centers_.size();
  values_.resize(G * G);
  parallel_for(G * G, [&](std::size_t eta) {
    values_[eta] =
        f(center_matrix(centers_[eta % G], d_, n_), center_matrix(centers_[eta / G], d_, n_));
  });
}

Matrix CrossOracle::operator()(const Matrix& z_k, const Matrix& z_q) const {
  if (z_k.rows() != d_ || z_k.cols() != n_ || z_q.rows() != d_ || z_q.cols() != n_) {
    throw DimensionError("CrossOracle: inputs are " + z_k.shape_string() + " and " +
                         z_q.shape_string());
  }
  return weighted_sum(closed_form_pair_weights(centers_, temperature_, flat(z_k), flat(z_q)),
                      values_);
}

std::size_t nearest_center(std::span<const Vector> centers, std::span<const double> z) {
  check_centers(centers, z.size());
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centers.size(); ++j) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) d2 += (z[i] - centers[j][i]) * (z[i] - centers[j][i]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = j;
    }
  }
  return best;
}

std::size_t affine_argmax_center(std::span<const Vector> centers, std::span<const double> z) {
  check_centers(centers, z.size());
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double s = affine_score(centers[j], z);
    if (s > best_score) {
      best_score = s;
      best = j;
    }
  }
  return best;
}

ErrorReport estimate_errors(const SequenceMap& f, const SequenceMap& approx,
                            const Sampler& sampler, const EstimateOptions& options) {
  if (options.samples == 0) throw ArgumentError("error estimate: need at least one sample");
  if (!(options.p >= 1.0) || !std::isfinite(options.p)) {
    throw ArgumentError("error estimate: p must be at least 1");
  }
  const auto start = std::chrono::steady_clock::now();

  // Draw serially so the sample set depends only on the seed.
  Rng rng(options.seed);
  std::vector<Matrix> inputs;
  inputs.reserve(options.samples);
  for (std::size_t i = 0; i < options.samples; ++i) inputs.push_back(sampler.draw(rng));

  std::vector<char> inside(inputs.size(), 1);
  Vector sup(inputs.size(), 0.0);
  Vector powered(inputs.size(), 0.0);
  parallel_for(inputs.size(), [&](std::size_t i) {
    if (options.in_domain && !options.in_domain(inputs[i])) {
      inside[i] = 0;
      return;
    }
    const Matrix diff = f(inputs[i]) - approx(inputs[i]);
    double m = 0.0;
    double acc = 0.0;
    for (double x : diff.values()) {
      m = std::max(m, std::abs(x));
      acc += std::pow(std::abs(x), options.p);
    }
    sup[i] = m;
    powered[i] = acc;
  });

  ErrorReport report;
  report.p = options.p;
  report.seed = options.seed;
  Vector kept;
  kept.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!inside[i]) {
      ++report.out_of_cover;
      continue;
    }
    report.sup_error = std::max(report.sup_error, sup[i]);
    kept.push_back(powered[i]);
  }
  report.samples = kept.size();
  if (!kept.empty()) {
    const double count = static_cast<double>(kept.size());
    const double mean = pairwise_sum(kept) / count;
    Vector dev(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) dev[i] = (kept[i] - mean) * (kept[i] - mean);
    const double var = kept.size() > 1 ? pairwise_sum(dev) / (count - 1.0) : 0.0;
    const double integral = sampler.volume * mean;
    report.lp_error = std::pow(integral, 1.0 / options.p);
    if (integral > 0.0) {
      // d/dm (V m)^(1/p) = (1/p) V^(1/p) m^(1/p - 1)
      report.lp_stderr = report.lp_error / (options.p * mean) * std::sqrt(var / count);
    }
  }
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ErrorReport sup_error_estimate(const SequenceMap& f, const SequenceMap& approx,
                               const Sampler& sampler, std::size_t num_samples,
                               std::uint64_t seed) {
  EstimateOptions options;
  options.samples = num_samples;
  options.seed = seed;
  return estimate_errors(f, approx, sampler, options);
}

ErrorReport lp_error_estimate(const SequenceMap& f, const SequenceMap& approx,
                              const Sampler& sampler, std::size_t num_samples, double p,
                              std::uint64_t seed) {
  EstimateOptions options;
  options.samples = num_samples;
  options.p = p;
  options.seed = seed;
  return estimate_errors(f, approx, sampler, options);
}

Matrix pack_pair(const Matrix& z_k, const Matrix& z_q) {
  return assemble_blocks({{std::cref(z_k), std::cref(z_q)}});
}

std::pair<Matrix, Matrix> unpack_pair(const Matrix& packed_pair) {
  if (packed_pair.cols() % 2 != 0) {
    throw DimensionError("unpack_pair: odd column count in " + packed_pair.shape_string());
  }
  const std::size_t n = packed_pair.cols() / 2;
  Matrix z_k(packed_pair.rows(), n);
  Matrix z_q(packed_pair.rows(), n);
  for (std::size_t r = 0; r < packed_pair.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      z_k(r, c) = packed_pair(r, c);
      z_q(r, c) = packed_pair(r, n + c);
    }
  }
  return {std::move(z_k), std::move(z_q)};
}

SequenceMap packed(const PairMap& f) {
  return [f](const Matrix& z) {
    auto [z_k, z_q] = unpack_pair(z);
    return f(z_k, z_q);
  };
}

}  // namespace maxattn
