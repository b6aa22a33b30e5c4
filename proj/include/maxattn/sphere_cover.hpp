#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "maxattn/construction.hpp"

namespace maxattn {

/// N_x balls of a common 2-norm radius around centers of length d*n.
struct SphereCover {
  std::vector<Vector> centers;
  double radius = 1.0;

  /// Throws ArgumentError for an empty or duplicated center list or a
  /// nonpositive radius, DimensionError for ragged centers.
  void validate() const;
  bool contains(std::span<const double> x) const;
};

/// The self construction with the cover centers in place of the grid.
ConstructedApproximator build_small_region(const TargetFunction& f, const SphereCover& cover,
                                           std::size_t d, std::size_t n, double temperature);

/// f-dependent entries of a cover approximator, layer by layer.
struct ParamTally {
  std::size_t linear = 0;  // 2 d n N_x
  std::size_t w_k = 0;     // 2 d N_x + 2 d n N_x
  std::size_t w_o = 0;     // n
  std::size_t total() const noexcept { return linear + w_k + w_o; }
};

ParamTally tally_trainable_params(std::size_t d, std::size_t n, std::size_t n_x);

/// 4 d n N_x + 2 d N_x + n. Throws ArgumentError unless kind is lipschitz_cover.
std::size_t count_trainable_params(const ConstructedApproximator& approx);

/// Greedy cover of a point cloud: a point becomes a center when no earlier
/// center lies within `radius` of it.
SphereCover greedy_cover(const std::vector<Vector>& points, double radius);

/// N_x centers uniform in [-D, D]^{dn}.
SphereCover random_cover(std::uint64_t seed, std::size_t n_x, std::size_t dim, double D,
                         double radius);

/// First line `radius r`, then one center per line as whitespace-separated
/// coordinates. Throws ArgumentError on malformed input or a wrong dimension.
SphereCover read_cover_file(const std::filesystem::path& path, std::size_t dim);
void write_cover_file(const std::filesystem::path& path, const SphereCover& cover);

}  // namespace maxattn
