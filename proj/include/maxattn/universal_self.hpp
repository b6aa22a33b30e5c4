#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "maxattn/construction.hpp"

namespace maxattn {

/// Self-attention approximator of f over the grid of `spec`.
///
/// Linear maps a d x n input to [[X_0, X_0], [I_{2dG}]] with X_0 holding
/// v_j . vec(Z) on the d columns of center j; the columns are laid out as
/// the T-half followed by the E-half, column j*d + s inside each half.
/// Throws CapExceeded above kMaxGridCenters or when 2dG exceeds kMaxDenseOrder,
/// and BoundViolation if |f| >= b0 at a center.
ConstructedApproximator build_universal_self(const TargetFunction& f, const GridSpec& spec,
                                             double temperature);

/// The same construction over an arbitrary center list (each of length d*n).
ConstructedApproximator build_center_approximator(const TargetFunction& f,
                                                  std::vector<Vector> centers, std::size_t d,
                                                  std::size_t n, double temperature,
                                                  ApproximatorKind kind);

/// Attn(Linear(Z)). Builds the dense 2dG x 2dG score matrix, so it throws
/// CapExceeded when 2dG exceeds kMaxDenseOrder.
Matrix evaluate_approximator(const ConstructedApproximator& approx, const Matrix& z);

/// G x n matrix of per-center weights read off the score matrix: entry (j, i)
/// sums the T- and E-half scores of center j's d columns in query column i.
Matrix center_weights_from_scores(const ConstructedApproximator& approx, const Matrix& z);

/// Order of the dense score matrix: 2dG for self and cover, 2dG^2 for cross.
std::size_t dense_order(const ConstructedApproximator& approx);

}  // namespace maxattn
