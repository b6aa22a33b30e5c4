#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "maxattn/matrix.hpp"

namespace maxattn {

/// One affine component a^T x + b.
struct AffineComponent {
  Vector slope;
  double offset = 0.0;

  double operator()(std::span<const double> x) const;
};

/// Pointwise maximum of finitely many affine functions over R^dim.
///
/// The arg-max cell of each point induces a partition of the input domain;
/// ties are resolved to the smallest component index.
class MaxAffine {
 public:
  /// Throws ArgumentError for an empty component list, mismatched slope
  /// lengths or non-finite coefficients.
  MaxAffine(std::size_t dim, std::vector<AffineComponent> components);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return components_.size(); }
  const std::vector<AffineComponent>& components() const noexcept { return components_; }

 private:
  std::size_t dim_;
  std::vector<AffineComponent> components_;
};

struct PartitionReport {
  double value = 0.0;           // MaxAff(x)
  std::size_t cell_index = 0;   // smallest maximizing component
  double margin = 0.0;          // largest minus second-largest; 0 with a single component
};

PartitionReport evaluate(const MaxAffine& ma, std::span<const double> x);

/// One-hot vector of length ma.size() marking evaluate(ma, x).cell_index.
Vector indicator(const MaxAffine& ma, std::span<const double> x);

/// Coefficients uniform in [-coeff_range, coeff_range], deterministic in seed.
MaxAffine random_maxaffine(std::uint64_t seed, std::size_t components, std::size_t dim,
                           double coeff_range);

}  // namespace maxattn
