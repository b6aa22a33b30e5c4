#include "maxattn/universal_cross.hpp"

#include <cmath>
#include <string>

#include "maxattn/errors.hpp"
#include "maxattn/sampling.hpp"
#include "maxattn/universal_self.hpp"

namespace maxattn {

namespace {

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void check_cross_input(const ConstructedApproximator& approx, const Matrix& z_k,
                       const Matrix& z_q) {
  if (approx.kind != ApproximatorKind::cross || !approx.linear_q) {
    throw ArgumentError("cross evaluation called on a non-cross approximator");
  }
  for (const Matrix* z : {&z_k, &z_q}) {
    if (z->rows() != approx.d || z->cols() != approx.n) {
      throw DimensionError("cross approximator expects " + std::to_string(approx.d) + "x" +
                           std::to_string(approx.n) + " inputs, got " + z->shape_string());
    }
  }
}

}  // namespace

ConstructedApproximator build_universal_cross(const PairTargetFunction& f, const GridSpec& spec,
                                              double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ArgumentError("build_universal_cross: temperature must be positive and finite");
  }
  std::vector<Vector> centers = grid_centers(spec, kMaxCrossCenters);
  const std::size_t d = spec.d;
  const std::size_t n = spec.n;
  const std::size_t G = centers.size();
  const std::size_t pairs = G * G;
  const std::size_t half = d * pairs;
  const std::size_t width = 2 * half;
  if (width > kMaxDenseOrder) {
    throw CapExceeded("cross construction of order 2dG^2 = " + std::to_string(width) +
                          " exceeds the cap of " + std::to_string(kMaxDenseOrder),
                      width);
  }
  if (width < n) throw DimensionError("build_universal_cross: 2dG^2 is smaller than n");

  const double b0 = f.bound_b0();
  std::vector<Matrix> mats;
  mats.reserve(G);
  for (const auto& v : centers) mats.push_back(center_matrix(v, d, n));
  std::vector<EtPair> et(pairs);
  parallel_for(pairs, [&](std::size_t eta) {
    et[eta] = compute_et_values(f(mats[eta % G], mats[eta / G]), b0);
  });

  ConstructedApproximator approx;
  approx.kind = ApproximatorKind::cross;
  approx.d = d;
  approx.n = n;
  approx.b0 = b0;
  approx.temperature = temperature;

  // Linear_K: identity on top, trailing row i carries v_i . vec(Z_K) on the
  // columns whose key center is i.
  for (std::size_t i = 0; i < G; ++i) {
    for (std::size_t r = 0; r < d; ++r) {
      Matrix p(width + G, d);
      p(width + i, r) = 1.0;
      Matrix q(n, width);
      for (std::size_t k = 0; k < n; ++k) {
        const double coeff = centers[i][k * d + r];
        for (std::size_t j = 0; j < G; ++j) {
          const std::size_t eta = i + G * j;
          for (std::size_t s = 0; s < d; ++s) {
            q(k, eta * d + s) = coeff;
            q(k, half + eta * d + s) = coeff;
          }
        }
      }
      approx.linear.terms.push_back({std::move(p), std::move(q)});
    }
  }
  Matrix bias_k(width + G, width);
  for (std::size_t c = 0; c < width; ++c) bias_k(c, c) = 1.0;
  approx.linear.bias = std::move(bias_k);

  // Linear_Q: row j is v_j . vec(Z_Q) on the first n columns, then I_n.
  SumLinear linear_q;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t r = 0; r < d; ++r) {
      Matrix p(G + n, d);
      for (std::size_t j = 0; j < G; ++j) p(j, r) = centers[j][k * d + r];
      Matrix q(n, width);
      for (std::size_t c = 0; c < n; ++c) q(k, c) = 1.0;
      linear_q.terms.push_back({std::move(p), std::move(q)});
    }
  }
  Matrix bias_q(G + n, width);
  for (std::size_t k = 0; k < n; ++k) bias_q(G + k, k) = 1.0;
  linear_q.bias = std::move(bias_q);
  approx.linear_q = std::move(linear_q);

  const std::size_t attn = 2 + G + n;
  Matrix w_k(attn, width + G);
  for (std::size_t i = 0; i < G; ++i) w_k(0, width + i) = 1.0;
  for (std::size_t eta = 0; eta < pairs; ++eta) {
    const std::size_t i = eta % G;
    const std::size_t j = eta / G;
    const double offset = -0.5 * squared_norm(centers[i]) - 0.5 * squared_norm(centers[j]);
    for (std::size_t s = 0; s < d; ++s) {
      const std::size_t ct = eta * d + s;
      const std::size_t ce = half + eta * d + s;
      w_k(1, ct) = offset;
      w_k(1, ce) = offset;
      w_k(2 + j, ct) = temperature;
      w_k(2 + j, ce) = temperature;
      for (std::size_t k = 0; k < n; ++k) {
        w_k(2 + G + k, ct) = std::log(et[eta].t(s, k));
        w_k(2 + G + k, ce) = std::log(et[eta].e(s, k));
      }
    }
  }

  Matrix w_q(attn, G + n);
  for (std::size_t k = 0; k < n; ++k) {
    w_q(0, G + k) = temperature;
    w_q(1, G + k) = temperature;
    w_q(2 + G + k, G + k) = 1.0;
  }
  for (std::size_t j = 0; j < G; ++j) w_q(2 + j, j) = 1.0;

  Matrix w_v(d, width + G);
  for (std::size_t eta = 0; eta < pairs; ++eta) {
    for (std::size_t s = 0; s < d; ++s) {
      w_v(s, eta * d + s) = 1.0;
      w_v(s, half + eta * d + s) = -1.0;
    }
  }

  Matrix w_o(width, n);
  for (std::size_t k = 0; k < n; ++k) w_o(k, k) = static_cast<double>(d) * b0;

  approx.weights = {std::move(w_k), std::move(w_q), std::move(w_v), std::move(w_o)};
  approx.centers = std::move(centers);
  return approx;
}

Matrix evaluate_approximator_cross(const ConstructedApproximator& approx, const Matrix& z_k,
                                   const Matrix& z_q) {
  check_cross_input(approx, z_k, z_q);
  return cross_attention(approx.weights, apply_sum_linear(approx.linear, z_k),
                         apply_sum_linear(*approx.linear_q, z_q));
}

Matrix pair_weights_from_scores(const ConstructedApproximator& approx, const Matrix& z_k,
                                const Matrix& z_q) {
  check_cross_input(approx, z_k, z_q);
  const Matrix scores =
      cross_attention_scores(approx.weights, apply_sum_linear(approx.linear, z_k),
                             apply_sum_linear(*approx.linear_q, z_q));
  const std::size_t G = approx.centers.size();
  const std::size_t pairs = G * G;
  const std::size_t d = approx.d;
  const std::size_t half = d * pairs;
  Matrix w(pairs, approx.n);
  for (std::size_t i = 0; i < approx.n; ++i) {
    for (std::size_t eta = 0; eta < pairs; ++eta) {
      double sum = 0.0;
      for (std::size_t s = 0; s < d; ++s)
        sum += scores(eta * d + s, i) + scores(half + eta * d + s, i);
      w(eta, i) = sum;
    }
  }
  return w;
}

}  // namespace maxattn
