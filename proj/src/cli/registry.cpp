#include "maxattn/cli/registry.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "maxattn/errors.hpp"

namespace maxattn::cli {

namespace {

constexpr double kPi = std::numbers::pi;
const std::vector<double> kStepCenters{-0.75, -0.25, 0.25, 0.75};

ResolvedTarget make_const(const TargetRequest& req) {
  if (!req.arg) throw ArgumentError("const needs a value, e.g. const:0.7");
  std::size_t used = 0;
  double c = 0.0;
  try {
    c = std::stod(*req.arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != req.arg->size() || !std::isfinite(c)) {
    throw ArgumentError("const: cannot parse value '" + *req.arg + "'");
  }
  ResolvedTarget t;
  t.name = "const:" + *req.arg;
  t.single = [c](const Matrix& z) { return Matrix(z.rows(), z.cols(), c); };
  t.pair = [c](const Matrix& zk, const Matrix&) { return Matrix(zk.rows(), zk.cols(), c); };
  t.lipschitz = 0.0;
  return t;
}

ResolvedTarget make_linear(const TargetRequest& req) {
  std::mt19937_64 rng(req.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector a(req.d * req.n);
  for (double& x : a) x = u(rng);
  const double b = u(rng);
  double norm = 0.0;
  for (double x : a) norm += x * x;
  ResolvedTarget t;
  t.name = "linear";
  t.single = [a, b](const Matrix& z) {
    const Matrix flat = flatten_sequence(z);
    double s = b;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * flat(i, 0);
    return Matrix(z.rows(), z.cols(), s);
  };
  t.lipschitz = std::sqrt(norm);
  return t;
}

ResolvedTarget make_sinprod(const TargetRequest& req) {
  if (req.d != 1 || req.n != 2) throw ArgumentError("sinprod is defined for d = 1, n = 2 only");
  ResolvedTarget t;
  t.name = "sinprod";
  t.single = [](const Matrix& z) {
    const double s = std::sin(kPi * z(0, 0)) * std::cos(kPi * z(0, 1));
    return Matrix{{s, s}};
  };
  t.lipschitz = kPi * std::sqrt(2.0);
  return t;
}

ResolvedTarget make_step1d(const TargetRequest& req) {
  if (req.d != 1) throw ArgumentError("step1d is defined for d = 1 only");
  const MaxAffine ma = step1d_partition();
  const std::vector<double> levels = step1d_levels();
  ResolvedTarget t;
  t.name = "step1d";
  t.single = [ma, levels](const Matrix& z) {
    Matrix out(z.rows(), z.cols());
    for (std::size_t k = 0; k < z.cols(); ++k) {
      const double x = z(0, k);
      out(0, k) = levels[evaluate(ma, std::span<const double>(&x, 1)).cell_index];
    }
    return out;
  };
  return t;
}

ResolvedTarget make_randlip(const TargetRequest& req) {
  const std::size_t dim = req.d * req.n;
  const std::size_t terms = 4;
  std::mt19937_64 rng(req.seed);
  std::uniform_real_distribution<double> amp(-0.25, 0.25), freq(-2.0, 2.0), phase(0.0, 2.0 * kPi);
  std::vector<double> alpha(terms), phi(terms);
  std::vector<Vector> omega(terms, Vector(dim));
  double lip = 0.0;
  for (std::size_t m = 0; m < terms; ++m) {
    alpha[m] = amp(rng);
    phi[m] = phase(rng);
    double norm = 0.0;
    for (double& w : omega[m]) {
      w = freq(rng);
      norm += w * w;
    }
    lip += std::abs(alpha[m]) * std::sqrt(norm);
  }
  ResolvedTarget t;
  t.name = "randlip";
  t.single = [=](const Matrix& z) {
    const Matrix flat = flatten_sequence(z);
    Matrix out(z.rows(), z.cols());
    for (std::size_t r = 0; r < z.rows(); ++r) {
      for (std::size_t k = 0; k < z.cols(); ++k) {
        const double shift = 0.5 * static_cast<double>(r + z.rows() * k);
        double s = 0.0;
        for (std::size_t m = 0; m < terms; ++m) {
          double arg = phi[m] + shift;
          for (std::size_t i = 0; i < dim; ++i) arg += omega[m][i] * flat(i, 0);
          s += alpha[m] * std::sin(arg);
        }
        out(r, k) = s;
      }
    }
    return out;
  };
  t.lipschitz = lip;
  return t;
}

ResolvedTarget make_addpair(const TargetRequest&) {
  ResolvedTarget t;
  t.name = "addpair";
  t.pair = [](const Matrix& zk, const Matrix& zq) { return zk + zq; };
  t.lipschitz = std::sqrt(2.0);
  return t;
}

}  // namespace

MaxAffine step1d_partition() {
  std::vector<AffineComponent> comps;
  for (double c : kStepCenters) comps.push_back({{c}, -0.5 * c * c});
  return MaxAffine(1, comps);
}

std::vector<double> step1d_levels() { return {-0.8, 0.4, -0.2, 0.6}; }

const std::vector<FunctionRegistryEntry>& registry_functions() {
  static const std::vector<FunctionRegistryEntry> entries{
      {"const", Arity::any, "constant c in every entry (NAME:c)", "0", make_const},
      {"linear", Arity::single, "seeded a . vec(Z) + b broadcast to every entry", "|a|_2",
       make_linear},
      {"sinprod", Arity::single, "sin(pi z11) cos(pi z12) in both entries; d = 1, n = 2",
       "pi sqrt(2) (exact per entry: pi)", make_sinprod},
      {"step1d", Arity::single, "per-token step function on four cells of [-1, 1]; d = 1",
       "not Lipschitz", make_step1d},
      {"randlip", Arity::single, "seeded sum of four sines", "sum |alpha_m| |omega_m|_2",
       make_randlip},
      {"addpair", Arity::pair, "Z_K + Z_Q entrywise (cross only)", "sqrt(2)", make_addpair},
  };
  return entries;
}

ResolvedTarget resolve_target(const std::string& spec, const TargetRequest& request) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  TargetRequest req = request;
  if (colon != std::string::npos) req.arg = spec.substr(colon + 1);
  for (const auto& entry : registry_functions()) {
    if (entry.name != name) continue;
    if (req.arg && entry.name != "const") {
      throw ArgumentError("function '" + name + "' takes no argument");
    }
    return entry.make(req);
  }
  throw ArgumentError("unknown function '" + name + "'");
}

}  // namespace maxattn::cli
