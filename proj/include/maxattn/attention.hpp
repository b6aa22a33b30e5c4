#pragma once

#include <vector>

#include "maxattn/matrix.hpp"

namespace maxattn {

/// One P Z Q term of a sum-of-linear-transformations layer.
struct LinearTerm {
  Matrix left;   // D2 x D1
  Matrix right;  // N1 x N2
};

/// Linear(Z) = sum_i P_i Z Q_i + bias, mapping D1 x N1 inputs to D2 x N2.
struct SumLinear {
  std::vector<LinearTerm> terms;
  Matrix bias;  // D2 x N2

  /// Throws DimensionError if the terms disagree on (D1, N1, D2, N2) or with the bias.
  void validate() const;
};

Matrix apply_sum_linear(const SumLinear& layer, const Matrix& z);

/// The four matrices of one single-head attention. No 1/sqrt(d) scaling:
/// any temperature lives inside the weights.
struct AttentionWeights {
  Matrix w_k;  // d_attn x D_K
  Matrix w_q;  // d_attn x D_Q
  Matrix w_v;  // D_out x D_K
  Matrix w_o;  // N_Q x N_out
};

/// Softmax((W_K Z)^T W_Q Z), columns are probability vectors.
Matrix self_attention_scores(const AttentionWeights& w, const Matrix& z);

/// W_V Z Softmax((W_K Z)^T W_Q Z) W_O.
Matrix self_attention(const AttentionWeights& w, const Matrix& z);

/// Softmax((W_K Z_K)^T W_Q Z_Q). Z_K and Z_Q may differ in row count.
Matrix cross_attention_scores(const AttentionWeights& w, const Matrix& z_k, const Matrix& z_q);

/// W_V Z_K Softmax((W_K Z_K)^T W_Q Z_Q) W_O.
Matrix cross_attention(const AttentionWeights& w, const Matrix& z_k, const Matrix& z_q);

}  // namespace maxattn
