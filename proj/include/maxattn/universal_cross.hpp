#pragma once

#include "maxattn/construction.hpp"

namespace maxattn {

/// Cross-attention approximator of f(Z_K, Z_Q) over the grid of `spec` on both sides.
///
/// Center pairs are labelled eta = i + G j (i key center, j query center) and
/// occupy columns eta*d + s of the T-half and then the E-half, 2dG^2 in total.
/// Linear_K is (2dG^2 + G) x 2dG^2 and Linear_Q is (G + n) x 2dG^2.
/// Throws CapExceeded when G exceeds kMaxCrossCenters or 2dG^2 exceeds
/// kMaxDenseOrder.
ConstructedApproximator build_universal_cross(const PairTargetFunction& f, const GridSpec& spec,
                                              double temperature);

/// Attn_c(Linear_K(Z_K), Linear_Q(Z_Q)).
Matrix evaluate_approximator_cross(const ConstructedApproximator& approx, const Matrix& z_k,
                                   const Matrix& z_q);

/// G^2 x n matrix of per-pair weights read off the score matrix (row eta = i + G j).
Matrix pair_weights_from_scores(const ConstructedApproximator& approx, const Matrix& z_k,
                                const Matrix& z_q);

}  // namespace maxattn
