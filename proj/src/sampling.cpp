#include "maxattn/sampling.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <memory>
#include <numbers>
#include <thread>

#include "maxattn/errors.hpp"

namespace maxattn {

namespace {

Vector uniform_in_ball(Rng& rng, std::span<const double> center, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t dim = center.size();
  Vector x(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& xi : x) {
      xi = normal(rng);
      norm += xi * xi;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
  for (std::size_t i = 0; i < dim; ++i) x[i] = center[i] + r * x[i] / norm;
  return x;
}

std::size_t multiplicity(std::span<const Vector> centers, std::span<const double> x,
                         double radius) {
  const double r2 = radius * radius;
  std::size_t m = 0;
  for (const auto& c : centers) {
    double dist2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dist2 += (x[i] - c[i]) * (x[i] - c[i]);
    if (dist2 <= r2) ++m;
  }
  return m;
}

}  // namespace

Matrix uniform_sequence(Rng& rng, std::size_t d, std::size_t n, double D) {
  std::uniform_real_distribution<double> u(-D, D);
  Matrix z(d, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t r = 0; r < d; ++r) z(r, k) = u(rng);
  return z;
}

Sampler box_sampler(std::size_t rows, std::size_t cols, double D) {
  Sampler s;
  s.draw = [rows, cols, D](Rng& rng) { return uniform_sequence(rng, rows, cols, D); };
  s.volume = std::pow(2.0 * D, static_cast<double>(rows * cols));
  return s;
}

double ball_volume(std::size_t dim, double radius) {
  const double k = static_cast<double>(dim);
  return std::pow(std::numbers::pi, k / 2.0) / std::tgamma(k / 2.0 + 1.0) * std::pow(radius, k);
}

Sampler ball_union_sampler(std::vector<Vector> centers, double radius, std::size_t d,
                           std::size_t n) {
  if (centers.empty()) throw ArgumentError("ball_union_sampler: no centers");
  if (!(radius > 0.0)) throw ArgumentError("ball_union_sampler: radius must be positive");
  auto shared = std::make_shared<const std::vector<Vector>>(std::move(centers));

  // vol(union) = N * vol(ball) * E[1 / multiplicity] under the ball-mixture proposal.
  Rng probe(0x5eed);
  std::uniform_int_distribution<std::size_t> pick(0, shared->size() - 1);
  const std::size_t probes = 4096;
  double inv_mult = 0.0;
  for (std::size_t i = 0; i < probes; ++i) {
    const Vector x = uniform_in_ball(probe, (*shared)[pick(probe)], radius);
    inv_mult += 1.0 / static_cast<double>(std::max<std::size_t>(1, multiplicity(*shared, x, radius)));
  }
  Sampler s;
  s.volume = static_cast<double>(shared->size()) * ball_volume(d * n, radius) * inv_mult /
             static_cast<double>(probes);
  s.draw = [shared, radius, d, n](Rng& rng) {
    std::uniform_int_distribution<std::size_t> choose(0, shared->size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
      const Vector x = uniform_in_ball(rng, (*shared)[choose(rng)], radius);
      const auto m = multiplicity(*shared, x, radius);
      if (m <= 1 || unit(rng) * static_cast<double>(m) < 1.0) {
        return unflatten_sequence(x, d, n);
      }
    }
  };
  return s;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) body(i);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace maxattn
