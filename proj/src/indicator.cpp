#include "maxattn/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maxattn/errors.hpp"

namespace maxattn {

namespace {

void check_arguments(const MaxAffine& ma, std::size_t n, double epsilon, double delta_min) {
  if (n == 0) throw ArgumentError("partition attention: n must be positive");
  if (ma.size() < n) {
    throw ArgumentError("partition attention: needs at least n = " + std::to_string(n) +
                        " components, got " + std::to_string(ma.size()));
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ArgumentError("partition attention: epsilon must lie in (0, 1)");
  }
  if (!(delta_min > 0.0) || !std::isfinite(delta_min)) {
    throw ArgumentError("partition attention: delta_min must be positive");
  }
}

// Everything except W_V, which is the only block that differs between the
// indicator and the reassignment.
PartitionAttention build_common(const MaxAffine& ma, std::size_t n, double epsilon,
                                double delta_min) {
  const std::size_t d = ma.dim();
  const std::size_t N = ma.size();
  PartitionAttention pa;
  pa.n = n;
  pa.chosen_r = indicator_temperature(N, epsilon, delta_min);

  Matrix left(d + N, d);
  for (std::size_t r = 0; r < d; ++r) left(r, r) = 1.0;
  Matrix right(n, N);
  for (std::size_t i = 0; i < n; ++i) right(i, i) = 1.0;
  Matrix bias(d + N, N);
  for (std::size_t j = 0; j < N; ++j) bias(d + j, j) = 1.0;
  pa.linear.terms.push_back({std::move(left), std::move(right)});
  pa.linear.bias = std::move(bias);

  Matrix w_k(d + 1, d + N);
  for (std::size_t j = 0; j < N; ++j) {
    const auto& comp = ma.components()[j];
    for (std::size_t r = 0; r < d; ++r) w_k(r, d + j) = pa.chosen_r * comp.slope[r];
    w_k(d, d + j) = pa.chosen_r * comp.offset;
  }
  Matrix w_q(d + 1, d + N);
  for (std::size_t r = 0; r < d; ++r) w_q(r, r) = 1.0;
  for (std::size_t i = 0; i < n; ++i) w_q(d, d + i) = 1.0;
  Matrix w_o(N, n);
  for (std::size_t i = 0; i < n; ++i) w_o(i, i) = 1.0;

  pa.weights.w_k = std::move(w_k);
  pa.weights.w_q = std::move(w_q);
  pa.weights.w_o = std::move(w_o);
  return pa;
}

}  // namespace

double indicator_temperature(std::size_t components, double epsilon, double delta_min) {
  if (components <= 1) return 1.0;
  return (std::log(static_cast<double>(components - 1)) - std::log(epsilon)) / delta_min;
}

PartitionAttention build_indicator_attention(const MaxAffine& ma, std::size_t n, double epsilon,
                                             double delta_min) {
  check_arguments(ma, n, epsilon, delta_min);
  PartitionAttention pa = build_common(ma, n, epsilon, delta_min);
  const std::size_t d = ma.dim();
  const std::size_t N = ma.size();
  Matrix w_v(N, d + N);
  for (std::size_t j = 0; j < N; ++j) w_v(j, d + j) = 1.0;
  pa.weights.w_v = std::move(w_v);
  return pa;
}

PartitionAttention build_reassign_attention(const MaxAffine& ma,
                                            const std::vector<Vector>& cell_values,
                                            std::size_t n, double epsilon, double delta_min) {
  check_arguments(ma, n, epsilon, delta_min);
  if (cell_values.empty()) throw ArgumentError("build_reassign_attention: no cell values");
  if (cell_values.size() != ma.size()) {
    throw ArgumentError("build_reassign_attention: " + std::to_string(cell_values.size()) +
                        " cell values for " + std::to_string(ma.size()) + " components");
  }
  const std::size_t d_out = cell_values.front().size();
  double v_max = 0.0;
  for (const auto& v : cell_values) {
    if (v.size() != d_out) throw DimensionError("build_reassign_attention: ragged cell values");
    for (double x : v) {
      if (!std::isfinite(x)) throw ArgumentError("build_reassign_attention: non-finite value");
      v_max = std::max(v_max, std::abs(x));
    }
  }
  // Output minus V_cell is a convex mix of V_j - V_cell, each at most 2 max|V|.
  const double eps0 = v_max > 0.5 ? epsilon / (2.0 * v_max) : epsilon;

  PartitionAttention pa = build_common(ma, n, eps0, delta_min);
  const std::size_t d = ma.dim();
  Matrix w_v(d_out, d + ma.size());
  for (std::size_t j = 0; j < ma.size(); ++j)
    for (std::size_t r = 0; r < d_out; ++r) w_v(r, d + j) = cell_values[j][r];
  pa.weights.w_v = std::move(w_v);
  return pa;
}

Matrix partition_scores(const PartitionAttention& pa, const Matrix& x) {
  const Matrix h = apply_sum_linear(pa.linear, x);
  return matmul(self_attention_scores(pa.weights, h), pa.weights.w_o);
}

Matrix apply_partition_attention(const PartitionAttention& pa, const Matrix& x) {
  return self_attention(pa.weights, apply_sum_linear(pa.linear, x));
}

}  // namespace maxattn
