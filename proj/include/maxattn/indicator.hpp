#pragma once

#include <cstddef>
#include <vector>

#include "maxattn/attention.hpp"
#include "maxattn/matrix.hpp"
#include "maxattn/maxaffine.hpp"

namespace maxattn {

/// Linear layer and attention weights whose score matrix marks, for every
/// token, the max-affine cell it falls in.
struct PartitionAttention {
  SumLinear linear;          // d x n  ->  (d + N) x N
  AttentionWeights weights;  // W_K, W_Q: (d + 1) x (d + N); W_O: N x n
  double chosen_r = 1.0;
  std::size_t n = 1;
};

/// R = (ln(N - 1) - ln eps) / delta_min, or 1 when N = 1.
double indicator_temperature(std::size_t components, double epsilon, double delta_min);

/// Tokens whose margin is at least delta_min get a score column within
/// epsilon of indicator(ma, token). W_V is [0, I_N], so the attention output
/// equals Softmax(K^T Q) W_O.
///
/// Throws ArgumentError if N < n, epsilon is outside (0, 1) or delta_min <= 0.
PartitionAttention build_indicator_attention(const MaxAffine& ma, std::size_t n, double epsilon,
                                             double delta_min);

/// Same partition, W_V = [0, V_1 ... V_N]: each token is mapped to the value of its cell
/// within epsilon. The internal tolerance is epsilon / (2 max|V|).
PartitionAttention build_reassign_attention(const MaxAffine& ma,
                                            const std::vector<Vector>& cell_values,
                                            std::size_t n, double epsilon, double delta_min);

/// Softmax(K^T Q) W_O for a d x n input: column i is the soft indicator of token i.
Matrix partition_scores(const PartitionAttention& pa, const Matrix& x);

/// Attn(Linear(X)).
Matrix apply_partition_attention(const PartitionAttention& pa, const Matrix& x);

}  // namespace maxattn
