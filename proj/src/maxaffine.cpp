#include "maxattn/maxaffine.hpp"

#include <cmath>
#include <random>
#include <string>

#include "maxattn/errors.hpp"

namespace maxattn {

double AffineComponent::operator()(std::span<const double> x) const {
  double v = offset;
  for (std::size_t i = 0; i < slope.size(); ++i) v += slope[i] * x[i];
  return v;
}

MaxAffine::MaxAffine(std::size_t dim, std::vector<AffineComponent> components)
    : dim_(dim), components_(std::move(components)) {
  if (components_.empty()) throw ArgumentError("MaxAffine: needs at least one component");
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (c.slope.size() != dim_) {
      throw ArgumentError("MaxAffine: component " + std::to_string(i) + " has slope length " +
                          std::to_string(c.slope.size()) + ", expected " +
                          std::to_string(dim_));
    }
    bool finite = std::isfinite(c.offset);
    for (double a : c.slope) finite = finite && std::isfinite(a);
    if (!finite) throw ArgumentError("MaxAffine: component " + std::to_string(i) + " is not finite");
  }
}

PartitionReport evaluate(const MaxAffine& ma, std::span<const double> x) {
  if (x.size() != ma.dim()) {
    throw DimensionError("MaxAffine::evaluate: point has dimension " + std::to_string(x.size()) +
                         ", function expects " + std::to_string(ma.dim()));
  }
  PartitionReport report;
  double second = -INFINITY;
  const auto& comps = ma.components();
  report.value = comps[0](x);
  for (std::size_t i = 1; i < comps.size(); ++i) {
    const double v = comps[i](x);
    if (v > report.value) {
      second = report.value;
      report.value = v;
      report.cell_index = i;
    } else if (v > second) {
      second = v;
    }
  }
  report.margin = comps.size() == 1 ? 0.0 : report.value - second;
  return report;
}

Vector indicator(const MaxAffine& ma, std::span<const double> x) {
  Vector e(ma.size(), 0.0);
  e[evaluate(ma, x).cell_index] = 1.0;
  return e;
}

MaxAffine random_maxaffine(std::uint64_t seed, std::size_t components, std::size_t dim,
                           double coeff_range) {
  if (components == 0) throw ArgumentError("random_maxaffine: components must be >= 1");
  if (!(coeff_range >= 0.0)) throw ArgumentError("random_maxaffine: coeff_range must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<AffineComponent> comps(components);
  for (auto& c : comps) {
    c.slope.resize(dim);
    for (double& a : c.slope) a = coeff_range * u(rng);
    c.offset = coeff_range * u(rng);
  }
  return MaxAffine(dim, std::move(comps));
}

}  // namespace maxattn
