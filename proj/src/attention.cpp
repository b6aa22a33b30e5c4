#include "maxattn/attention.hpp"

#include <string>

#include "maxattn/errors.hpp"

namespace maxattn {

void SumLinear::validate() const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (t.left.rows() != bias.rows() || t.right.cols() != bias.cols()) {
      throw DimensionError("SumLinear: term " + std::to_string(i) + " maps to " +
                           std::to_string(t.left.rows()) + "x" + std::to_string(t.right.cols()) +
                           " but the bias is " + bias.shape_string());
    }
    if (i > 0 && (t.left.cols() != terms[0].left.cols() ||
                  t.right.rows() != terms[0].right.rows())) {
      throw DimensionError("SumLinear: term " + std::to_string(i) +
                           " disagrees with term 0 on the input shape");
    }
  }
}

Matrix apply_sum_linear(const SumLinear& layer, const Matrix& z) {
  layer.validate();
  Matrix out = layer.bias;
  for (const auto& t : layer.terms) {
    if (t.left.cols() != z.rows() || t.right.rows() != z.cols()) {
      throw DimensionError("apply_sum_linear: input is " + z.shape_string() +
                           ", layer expects " + std::to_string(t.left.cols()) + "x" +
                           std::to_string(t.right.rows()));
    }
    // (P Z) first: it has only as many columns as Z, and its rows are mostly zero.
    const Matrix pz = matmul(t.left, z);
    for (std::size_t i = 0; i < pz.rows(); ++i) {
      auto out_row = out.row_span(i);
      for (std::size_t k = 0; k < pz.cols(); ++k) {
        const double c = pz(i, k);
        if (c == 0.0) continue;
        const auto q_row = t.right.row_span(k);
        for (std::size_t j = 0; j < q_row.size(); ++j) out_row[j] += c * q_row[j];
      }
    }
  }
  if (!out.all_finite()) throw NonFiniteError("apply_sum_linear: non-finite output");
  return out;
}

Matrix cross_attention_scores(const AttentionWeights& w, const Matrix& z_k, const Matrix& z_q) {
  if (w.w_k.rows() != w.w_q.rows()) {
    throw DimensionError("attention: W_K is " + w.w_k.shape_string() + " but W_Q is " +
                         w.w_q.shape_string() + "; attention dimensions differ");
  }
  const Matrix keys = matmul(w.w_k, z_k);
  const Matrix queries = matmul(w.w_q, z_q);
  return softmax_columns(matmul(keys.transpose(), queries));
}

Matrix self_attention_scores(const AttentionWeights& w, const Matrix& z) {
  return cross_attention_scores(w, z, z);
}

Matrix cross_attention(const AttentionWeights& w, const Matrix& z_k, const Matrix& z_q) {
  const Matrix scores = cross_attention_scores(w, z_k, z_q);
  const Matrix values = matmul(w.w_v, z_k);
  return matmul(matmul(values, scores), w.w_o);
}

Matrix self_attention(const AttentionWeights& w, const Matrix& z) {
  return cross_attention(w, z, z);
}

}  // namespace maxattn
