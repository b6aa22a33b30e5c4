#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "maxattn/matrix.hpp"

namespace maxattn {

using Rng = std::mt19937_64;

/// Uniform d x n matrix over [-D, D]^{d x n}.
Matrix uniform_sequence(Rng& rng, std::size_t d, std::size_t n, double D);

/// Draws inputs for the error estimators. `volume` is the Lebesgue measure of
/// the sampled region; `rejected` counts proposals the sampler discarded.
struct Sampler {
  std::function<Matrix(Rng&)> draw;
  double volume = 1.0;
};

/// Uniform over [-D, D]^{rows x cols}; volume (2D)^{rows*cols}.
Sampler box_sampler(std::size_t rows, std::size_t cols, double D);

/// Uniform over the union of 2-norm balls of `radius` around `centers`
/// (length d*n each). Picks a ball uniformly, a point uniformly inside it and
/// keeps it with probability 1/(number of balls containing it).
/// The volume is estimated by Monte Carlo from the same construction.
Sampler ball_union_sampler(std::vector<Vector> centers, double radius, std::size_t d,
                           std::size_t n);

/// Volume of a 2-norm ball of `radius` in `dim` dimensions.
double ball_volume(std::size_t dim, double radius);

/// Runs body(i) for i in [0, count) over the available hardware threads.
/// body must only write to per-index state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace maxattn
