#include "maxattn/universal_self.hpp"

#include <cmath>
#include <set>
#include <string>

#include "maxattn/errors.hpp"
#include "maxattn/sampling.hpp"

namespace maxattn {

namespace {

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void require_dense(const ConstructedApproximator& approx) {
  const std::size_t order = dense_order(approx);
  if (order > kMaxDenseOrder) {
    throw CapExceeded("dense score matrix of order " + std::to_string(order) +
                          " exceeds the cap of " + std::to_string(kMaxDenseOrder),
                      order);
  }
}

void check_self_input(const ConstructedApproximator& approx, const Matrix& z) {
  if (approx.kind == ApproximatorKind::cross) {
    throw ArgumentError("self evaluation called on a cross approximator");
  }
  if (z.rows() != approx.d || z.cols() != approx.n) {
    throw DimensionError("approximator expects a " + std::to_string(approx.d) + "x" +
                         std::to_string(approx.n) + " input, got " + z.shape_string());
  }
  require_dense(approx);
}

Matrix self_scores(const ConstructedApproximator& approx, const Matrix& z) {
  check_self_input(approx, z);
  return self_attention_scores(approx.weights, apply_sum_linear(approx.linear, z));
}

}  // namespace

std::size_t dense_order(const ConstructedApproximator& approx) {
  const std::size_t g = approx.centers.size();
  return approx.kind == ApproximatorKind::cross ? 2 * approx.d * g * g : 2 * approx.d * g;
}

ConstructedApproximator build_universal_self(const TargetFunction& f, const GridSpec& spec,
                                             double temperature) {
  return build_center_approximator(f, grid_centers(spec), spec.d, spec.n, temperature,
                                   ApproximatorKind::self);
}

ConstructedApproximator build_center_approximator(const TargetFunction& f,
                                                  std::vector<Vector> centers, std::size_t d,
                                                  std::size_t n, double temperature,
                                                  ApproximatorKind kind) {
  if (d == 0 || n == 0) throw ArgumentError("approximator: d and n must be positive");
  if (centers.empty()) throw ArgumentError("approximator: no centers");
  if (centers.size() > kMaxGridCenters) {
    throw CapExceeded(std::to_string(centers.size()) + " centers exceed the cap of " +
                          std::to_string(kMaxGridCenters),
                      centers.size());
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ArgumentError("approximator: temperature must be positive and finite");
  }
  const std::size_t dn = d * n;
  for (const auto& v : centers) {
    if (v.size() != dn) {
      throw DimensionError("approximator: center of length " + std::to_string(v.size()) +
                           ", expected d*n = " + std::to_string(dn));
    }
  }
  if (std::set<Vector>(centers.begin(), centers.end()).size() != centers.size()) {
    throw ArgumentError("approximator: centers must be pairwise distinct");
  }

  const std::size_t G = centers.size();
  const std::size_t half = d * G;
  const std::size_t width = 2 * half;
  if (width < n) {
    throw DimensionError("approximator: 2dG = " + std::to_string(width) +
                         " is smaller than n = " + std::to_string(n));
  }
  if (width > kMaxDenseOrder) {
    throw CapExceeded("2dG = " + std::to_string(width) + " exceeds the dense cap of " +
                          std::to_string(kMaxDenseOrder) + "; use the oracle path",
                      width);
  }
  const double b0 = f.bound_b0();

  std::vector<EtPair> et(G);
  parallel_for(G, [&](std::size_t j) { et[j] = compute_et(f, center_matrix(centers[j], d, n)); });

  ConstructedApproximator approx;
  approx.kind = kind;
  approx.d = d;
  approx.n = n;
  approx.b0 = b0;
  approx.temperature = temperature;

  // Row 0 of Linear(Z): sum_r (e_0 e_r^T) Z Q_r with Q_r[k, c] = v_{j(c)}[k d + r].
  for (std::size_t r = 0; r < d; ++r) {
    Matrix p(1 + width, d);
    p(0, r) = 1.0;
    Matrix q(n, width);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < G; ++j) {
        const double coeff = centers[j][k * d + r];
        for (std::size_t s = 0; s < d; ++s) {
          q(k, j * d + s) = coeff;
          q(k, half + j * d + s) = coeff;
        }
      }
    }
    approx.linear.terms.push_back({std::move(p), std::move(q)});
  }
  Matrix bias(1 + width, width);
  for (std::size_t c = 0; c < width; ++c) bias(1 + c, c) = 1.0;
  approx.linear.bias = std::move(bias);

  Matrix w_k(2 + n, 1 + width);
  w_k(0, 0) = 1.0;
  for (std::size_t j = 0; j < G; ++j) {
    const double offset = -0.5 * squared_norm(centers[j]);
    for (std::size_t s = 0; s < d; ++s) {
      const std::size_t ct = 1 + j * d + s;
      const std::size_t ce = 1 + half + j * d + s;
      w_k(1, ct) = offset;
      w_k(1, ce) = offset;
      for (std::size_t k = 0; k < n; ++k) {
        w_k(2 + k, ct) = std::log(et[j].t(s, k));
        w_k(2 + k, ce) = std::log(et[j].e(s, k));
      }
    }
  }

  Matrix w_q(2 + n, 1 + width);
  for (std::size_t k = 0; k < n; ++k) {
    w_q(0, 1 + k) = temperature;
    w_q(1, 1 + k) = temperature;
    w_q(2 + k, 1 + k) = 1.0;
  }

  Matrix w_v(d, 1 + width);
  for (std::size_t j = 0; j < G; ++j) {
    for (std::size_t s = 0; s < d; ++s) {
      w_v(s, 1 + j * d + s) = 1.0;
      w_v(s, 1 + half + j * d + s) = -1.0;
    }
  }

  Matrix w_o(width, n);
  for (std::size_t k = 0; k < n; ++k) w_o(k, k) = static_cast<double>(d) * b0;

  approx.weights = {std::move(w_k), std::move(w_q), std::move(w_v), std::move(w_o)};
  approx.centers = std::move(centers);
  return approx;
}

Matrix evaluate_approximator(const ConstructedApproximator& approx, const Matrix& z) {
  check_self_input(approx, z);
  return self_attention(approx.weights, apply_sum_linear(approx.linear, z));
}

Matrix center_weights_from_scores(const ConstructedApproximator& approx, const Matrix& z) {
  const Matrix scores = self_scores(approx, z);
  const std::size_t G = approx.centers.size();
  const std::size_t d = approx.d;
  const std::size_t half = d * G;
  Matrix w(G, approx.n);
  for (std::size_t i = 0; i < approx.n; ++i) {
    for (std::size_t j = 0; j < G; ++j) {
      double sum = 0.0;
      for (std::size_t s = 0; s < d; ++s)
        sum += scores(j * d + s, i) + scores(half + j * d + s, i);
      w(j, i) = sum;
    }
  }
  return w;
}

}  // namespace maxattn
