#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "maxattn/cli/registry.hpp"
#include "maxattn/cli/runner.hpp"
#include "maxattn/indicator.hpp"
#include "maxattn/oracle.hpp"
#include "maxattn/sphere_cover.hpp"
#include "maxattn/universal_cross.hpp"
#include "maxattn/universal_self.hpp"

namespace maxattn::cli {

namespace {

using Clock = std::chrono::steady_clock;

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double range) {
  return uniform_sequence(rng, rows, cols, range);
}

double column_sum_error(const Matrix& s) {
  double worst = 0.0;
  for (std::size_t c = 0; c < s.cols(); ++c) {
    double total = 0.0;
    for (std::size_t r = 0; r < s.rows(); ++r) total += s(r, c);
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return worst;
}

double rel(const Matrix& a, const Matrix& b) {
  return max_abs_diff(a, b) / std::max(1.0, b.max_abs());
}

// Worst value of a deviation, compared against `tolerance` (pass when worst <= tolerance).
struct Property {
  std::string name;
  double tolerance;
  std::function<double(Rng&)> worst;
};

TargetFunction smooth_target(std::uint64_t seed, std::size_t d, std::size_t n) {
  const ResolvedTarget t = resolve_target("randlip", {std::nullopt, d, n, 1.0, seed});
  const GridSpec probe{1.0, 2, d, n};
  return TargetFunction(t.name, seed, t.single,
                        estimate_bound(t.single, grid_centers(probe), probe, 256, seed) + 1.0);
}

std::vector<Property> properties() {
  std::vector<Property> props;

  props.push_back({"linalg.softmax_columns_sum_to_one", 1e-12, [](Rng& rng) {
                     double worst = 0.0;
                     for (int i = 0; i < 1000; ++i)
                       worst = std::max(worst, column_sum_error(softmax_columns(
                                                   random_matrix(rng, 1 + i % 7, 1 + i % 3, 1e4))));
                     return worst;
                   }});
  props.push_back({"linalg.softmax_shift_invariance", 1e-12, [](Rng& rng) {
                     double worst = 0.0;
                     std::uniform_real_distribution<double> shift(-100.0, 100.0);
                     for (int i = 0; i < 200; ++i) {
                       const Matrix m = random_matrix(rng, 6, 3, 30.0);
                       Matrix shifted = m;
                       for (std::size_t c = 0; c < 3; ++c) {
                         const double s = shift(rng);
                         for (std::size_t r = 0; r < 6; ++r) shifted(r, c) += s;
                       }
                       worst = std::max(worst,
                                        max_abs_diff(softmax_columns(m), softmax_columns(shifted)));
                     }
                     return worst;
                   }});
  props.push_back({"linalg.matmul_associativity", 1e-9, [](Rng& rng) {
                     double worst = 0.0;
                     for (int i = 0; i < 200; ++i) {
                       const Matrix a = random_matrix(rng, 1 + i % 5, 2 + i % 3, 1.0);
                       const Matrix b = random_matrix(rng, a.cols(), 1 + i % 4, 1.0);
                       const Matrix c = random_matrix(rng, b.cols(), 3, 1.0);
                       worst =
                           std::max(worst, rel(matmul(matmul(a, b), c), matmul(a, matmul(b, c))));
                     }
                     return worst;
                   }});
  props.push_back(
      {"linalg.flatten_roundtrip", 0.0, [](Rng& rng) {
         double worst = 0.0;
         for (int i = 0; i < 100; ++i) {
           const Matrix z = random_matrix(rng, 1 + i % 3, 1 + i % 4, 1.0);
           worst = std::max(
               worst, max_abs_diff(
                          unflatten_sequence(flatten_sequence(z).values(), z.rows(), z.cols()), z));
         }
         return worst;
       }});

  props.push_back(
      {"maxaffine.partition_indicator_margin_scaling", 1e-12, [](Rng& rng) {
         double worst = 0.0;
         std::uniform_real_distribution<double> u(-3.0, 3.0);
         for (int i = 0; i < 10000; ++i) {
           const MaxAffine ma = random_maxaffine(rng(), 1 + i % 8, 1 + i % 4, 2.0);
           Vector x(ma.dim());
           for (double& xi : x) xi = u(rng);
           const auto rep = evaluate(ma, x);
           std::vector<double> vals;
           for (const auto& comp : ma.components()) vals.push_back(comp(x));
           if (vals[rep.cell_index] != rep.value) return 1.0;
           const Vector ind = indicator(ma, x);
           if (std::count(ind.begin(), ind.end(), 1.0) != 1 || ind[rep.cell_index] != 1.0)
             return 1.0;
           std::sort(vals.begin(), vals.end());
           const double margin = vals.size() > 1 ? vals.back() - vals[vals.size() - 2] : 0.0;
           worst = std::max(worst, std::abs(margin - rep.margin));
           if (rep.margin > 1e-9) {
             auto comps = ma.components();
             for (auto& comp : comps) {
               for (double& a : comp.slope) a *= 3.5;
               comp.offset *= 3.5;
             }
             if (evaluate(MaxAffine(ma.dim(), comps), x).cell_index != rep.cell_index) return 1.0;
           }
         }
         return worst;
       }});

  props.push_back(
      {"attention.scores_stochastic_and_consistent", 1e-12, [](Rng& rng) {
         double worst = 0.0;
         for (int i = 0; i < 100; ++i) {
           const std::size_t rows = 2, tokens = 4;
           AttentionWeights w{random_matrix(rng, 3, rows, 1.0), random_matrix(rng, 3, rows, 1.0),
                              random_matrix(rng, 2, rows, 1.0), random_matrix(rng, tokens, 2, 1.0)};
           const Matrix z = random_matrix(rng, rows, tokens, 2.0);
           worst = std::max(worst, column_sum_error(self_attention_scores(w, z)));
           worst = std::max(worst, max_abs_diff(cross_attention(w, z, z), self_attention(w, z)));
           std::vector<std::size_t> perm(tokens);
           std::iota(perm.begin(), perm.end(), 0);
           std::shuffle(perm.begin(), perm.end(), rng);
           Matrix pi(tokens, tokens);
           for (std::size_t k = 0; k < tokens; ++k) pi(perm[k], k) = 1.0;
           worst = std::max(
               worst,
               max_abs_diff(self_attention_scores(w, matmul(z, pi)),
                            matmul(matmul(pi.transpose(), self_attention_scores(w, z)), pi)));
         }
         return worst;
       }});

  props.push_back({"self.pipeline_matches_closed_form", 1e-8, [](Rng& rng) {
                     double worst = 0.0;
                     for (std::size_t d = 1; d <= 2; ++d)
                       for (std::size_t n = 1; n <= 2; ++n)
                         for (std::size_t P : {2, 3}) {
                           const TargetFunction f = smooth_target(rng(), d, n);
                           const auto approx = build_universal_self(f, {1.0, P, d, n}, 50.0);
                           for (int i = 0; i < 10; ++i) {
                             const Matrix z = uniform_sequence(rng, d, n, 1.0);
                             worst =
                                 std::max(worst, rel(evaluate_approximator(approx, z),
                                                     closed_form_self(f, approx.centers, 50.0, z)));
                           }
                         }
                     return worst;
                   }});
  props.push_back({"self.partition_of_unity", 1e-10, [](Rng& rng) {
                     double worst = 0.0;
                     const auto approx =
                         build_universal_self(smooth_target(rng(), 2, 1), {1.0, 3, 2, 1}, 20.0);
                     for (int i = 0; i < 50; ++i)
                       worst = std::max(worst, column_sum_error(center_weights_from_scores(
                                                   approx, uniform_sequence(rng, 2, 1, 1.0))));
                     return worst;
                   }});
  props.push_back(
      {"self.constant_exactness", 1e-12, [](Rng& rng) {
         const TargetFunction f(
             "const", 0, [](const Matrix& z) { return Matrix(z.rows(), z.cols(), 0.7); }, 0.7007);
         const auto approx = build_universal_self(f, {1.0, 3, 1, 2}, 30.0);
         double worst = 0.0;
         for (int i = 0; i < 200; ++i)
           worst = std::max(
               worst, max_abs_diff(evaluate_approximator(approx, uniform_sequence(rng, 1, 2, 1.0)),
                                   Matrix(1, 2, 0.7)));
         return worst;
       }});
  props.push_back({"self.approximation_bound_sinprod", 0.1, [](Rng&) {
                     const ResolvedTarget t =
                         resolve_target("sinprod", {std::nullopt, 1, 2, 1.0, 0});
                     const double eps = 0.1;
                     const double delta = eps / (3.0 * *t.lipschitz);
                     bool clamped = false;
                     const std::size_t P = auto_grid_points(delta, 1.0, 2, kAutoGridCap, clamped);
                     const GridSpec spec{1.0, P, 1, 2};
                     const auto centers = grid_centers(spec);
                     const double b0 = estimate_bound(t.single, centers, spec);
                     const double temp =
                         choose_temperature(delta, b0, static_cast<double>(centers.size()), eps);
                     const SelfOracle oracle(t.single, centers, 1, 2, temp);
                     return estimate_errors(t.single, [&](const Matrix& z) { return oracle(z); },
                                            box_sampler(1, 2, 1.0), {2000, 2.0, 1, {}})
                         .sup_error;
                   }});
  props.push_back({"self.indicator_bound", 1e-3, [](Rng& rng) {
                     double worst = 0.0;
                     std::uniform_real_distribution<double> u(-2.0, 2.0);
                     for (int i = 0; i < 100; ++i) {
                       const std::size_t dim = 1 + i % 3, comps = 2 + i % 7;
                       const MaxAffine ma = random_maxaffine(rng(), comps, dim, 1.0);
                       const auto pa = build_indicator_attention(ma, 1, 1e-3, 0.2);
                       Vector x(dim);
                       do {
                         for (double& v : x) v = u(rng);
                       } while (evaluate(ma, x).margin < 0.2);
                       const Matrix s = partition_scores(pa, Matrix::column(x));
                       const Vector ind = indicator(ma, x);
                       for (std::size_t j = 0; j < comps; ++j)
                         worst = std::max(worst, std::abs(s(j, 0) - ind[j]));
                     }
                     return worst;
                   }});

  props.push_back(
      {"cross.pair_partition_of_unity_and_concentration", 1e-10, [](Rng& rng) {
         const PairTargetFunction f(
             "addpair", 0, [](const Matrix& a, const Matrix& b) { return a + b; }, 2.002);
         const auto approx = build_universal_cross(f, {1.0, 3, 1, 1}, 40.0);
         double worst = 0.0;
         for (int i = 0; i < 50; ++i) {
           const Matrix zk = uniform_sequence(rng, 1, 1, 1.0),
                        zq = uniform_sequence(rng, 1, 1, 1.0);
           const Matrix w = pair_weights_from_scores(approx, zk, zq);
           worst = std::max(worst, column_sum_error(w));
           std::size_t top = 0;
           for (std::size_t e = 0; e < w.rows(); ++e)
             if (w(e, 0) > w(top, 0)) top = e;
           const std::size_t G = approx.centers.size();
           if (top % G != nearest_center(approx.centers, zk.values()) ||
               top / G != nearest_center(approx.centers, zq.values()))
             return 1.0;
           worst = std::max(worst, rel(evaluate_approximator_cross(approx, zk, zq),
                                       closed_form_cross(f, approx.centers, 40.0, zk, zq)));
         }
         return worst;
       }});
  props.push_back({"cross.approximation_bound_addpair", 0.3, [](Rng&) {
                     const double eps = 0.3, lip = std::sqrt(2.0);
                     bool clamped = false;
                     const std::size_t P =
                         auto_grid_points(eps / (3.0 * lip), 1.0, 1, kMaxCrossCenters, clamped);
                     const GridSpec spec{1.0, P, 1, 1};
                     const auto centers = grid_centers(spec, kMaxCrossCenters);
                     PairMap add = [](const Matrix& a, const Matrix& b) { return a + b; };
                     const double b0 = estimate_pair_bound(add, centers, spec);
                     const double temp = choose_temperature(
                         eps / (3.0 * lip), b0,
                         static_cast<double>(centers.size() * centers.size()), eps);
                     const CrossOracle oracle(add, centers, 1, 1, temp);
                     return estimate_errors(packed(add),
                                            [&](const Matrix& z) {
                                              auto [zk, zq] = unpack_pair(z);
                                              return oracle(zk, zq);
                                            },
                                            box_sampler(1, 2, 1.0), {2000, 2.0, 2, {}})
                         .sup_error;
                   }});

  props.push_back(
      {"cover.param_count_formula", 0.0, [](Rng& rng) {
         double worst = 0.0;
         std::uniform_int_distribution<std::size_t> small(1, 3), nx(1, 6);
         for (int i = 0; i < 20; ++i) {
           const std::size_t d = small(rng), n = small(rng), count = nx(rng);
           if (2 * d * count < n) continue;
           const SphereCover cover = random_cover(rng(), count, d * n, 1.0, 0.1);
           const auto approx = build_small_region(smooth_target(rng(), d, n), cover, d, n, 5.0);
           const double expected = static_cast<double>(4 * d * n * count + 2 * d * count + n);
           worst = std::max(
               worst, std::abs(static_cast<double>(count_trainable_params(approx)) - expected));
         }
         return worst;
       }});
  props.push_back({"cover.approximation_bound", 0.2, [](Rng&) {
                     const ResolvedTarget t =
                         resolve_target("randlip", {std::nullopt, 1, 2, 1.0, 3});
                     const double eps = 0.2;
                     const SphereCover cover =
                         random_cover(4, 64, 2, 1.0, eps / (3.0 * *t.lipschitz));
                     const GridSpec probe{1.0, 1, 1, 2};
                     const double b0 = estimate_bound(t.single, cover.centers, probe);
                     const double temp = choose_temperature(cover.radius, b0, 64.0, eps);
                     const TargetFunction f(t.name, 3, t.single, b0);
                     const auto approx = build_small_region(f, cover, 1, 2, temp);
                     const SelfOracle oracle(t.single, cover.centers, 1, 2, temp);
                     EstimateOptions opt{
                         2000, 2.0, 5, [&](const Matrix& z) { return cover.contains(z.values()); }};
                     return estimate_errors(
                                t.single, [&](const Matrix& z) { return oracle(z); },
                                ball_union_sampler(cover.centers, cover.radius, 1, 2), opt)
                         .sup_error;
                   }});

  props.push_back({"oracle.weights_convex", 1e-12, [](Rng& rng) {
                     double worst = 0.0;
                     for (int i = 0; i < 200; ++i) {
                       std::vector<Vector> centers(1 + i % 9);
                       for (auto& c : centers) c = uniform_sequence(rng, 3, 1, 1.0).values();
                       const Vector w = closed_form_weights(
                           centers, i % 2 ? 1e6 : 2.0, uniform_sequence(rng, 3, 1, 1.0).values());
                       double total = 0.0;
                       for (double x : w) {
                         if (x < 0.0 || x > 1.0) return 1.0;
                         total += x;
                       }
                       worst = std::max(worst, std::abs(total - 1.0));
                     }
                     return worst;
                   }});
  props.push_back(
      {"oracle.temperature_limit", 1e-6, [](Rng& rng) {
         const std::vector<Vector> grid{{-1.0}, {-0.5}, {0.0}, {0.5}};
         SequenceMap f = [](const Matrix& z) { return Matrix(1, 1, std::cos(2.0 * z(0, 0))); };
         std::uniform_real_distribution<double> u(-1.0, 1.0);
         double worst = 0.0;
         for (int i = 0; i < 500;) {
           const double z = u(rng);
           std::vector<double> dist;
           for (const auto& c : grid) dist.push_back(std::abs(z - c[0]));
           std::sort(dist.begin(), dist.end());
           if (dist[1] - dist[0] < 0.01) continue;
           ++i;
           const std::size_t j = nearest_center(grid, Vector{z});
           worst = std::max(worst, std::abs(closed_form_self(f, grid, 1e4, Matrix{{z}})(0, 0) -
                                            std::cos(2.0 * grid[j][0])));
         }
         return worst;
       }});
  props.push_back({"oracle.nearest_center_is_affine_argmax", 0.0, [](Rng& rng) {
                     for (int i = 0; i < 10000; ++i) {
                       std::vector<Vector> centers(1 + i % 10);
                       for (auto& c : centers)
                         c = uniform_sequence(rng, 1 + i % 3, 1, 1.0).values();
                       const Vector z = uniform_sequence(rng, centers[0].size(), 1, 1.0).values();
                       if (nearest_center(centers, z) != affine_argmax_center(centers, z))
                         return 1.0;
                     }
                     return 0.0;
                   }});
  props.push_back({"oracle.cross_weights_factor", 1e-14, [](Rng& rng) {
                     double worst = 0.0;
                     std::vector<Vector> centers(4);
                     for (auto& c : centers) c = uniform_sequence(rng, 2, 1, 1.0).values();
                     for (int i = 0; i < 100; ++i) {
                       const Vector zk = uniform_sequence(rng, 2, 1, 1.0).values(),
                                    zq = uniform_sequence(rng, 2, 1, 1.0).values();
                       const Vector w = closed_form_pair_weights(centers, 6.0, zk, zq);
                       const Vector wk = closed_form_weights(centers, 6.0, zk),
                                    wq = closed_form_weights(centers, 6.0, zq);
                       for (std::size_t j = 0; j < 4; ++j)
                         for (std::size_t k = 0; k < 4; ++k)
                           worst = std::max(worst, std::abs(w[k + 4 * j] - wk[k] * wq[j]));
                     }
                     return worst;
                   }});
  props.push_back(
      {"oracle.estimators_deterministic_and_lp_bounded", 0.0, [](Rng& rng) {
         const TargetFunction f = smooth_target(rng(), 1, 2);
         const auto approx = build_universal_self(f, {1.0, 4, 1, 2}, 30.0);
         SequenceMap eval = [&](const Matrix& z) { return evaluate_approximator(approx, z); };
         const Sampler box = box_sampler(1, 2, 1.0);
         const auto a = estimate_errors(f, eval, box, {300, 2.0, 17, {}});
         const auto b = estimate_errors(f, eval, box, {300, 2.0, 17, {}});
         if (a.sup_error != b.sup_error || a.lp_error != b.lp_error) return 1.0;
         const double bound = a.sup_error * std::sqrt(2.0 * box.volume) + 3.0 * a.lp_stderr;
         return std::max(0.0, a.lp_error - bound);
       }});

  props.push_back({"cli.seeded_runs_are_deterministic", 0.0, [](Rng&) {
                     auto render = [] {
                       RunConfig c;
                       c.command = "approximate";
                       c.function = "randlip";
                       c.d = 1;
                       c.n = 2;
                       c.P = {4};
                       c.temperature = {25.0};
                       c.samples = 300;
                       c.seed = 11;
                       std::ostringstream log, out;
                       auto rows = compute_rows(c, log);
                       for (auto& r : rows) r.runtime_ms = 0.0;
                       write_csv(rows, out);
                       return out.str();
                     };
                     return render() == render() ? 0.0 : 1.0;
                   }});
  return props;
}

}  // namespace

std::vector<PropertyResult> run_verify_suite(std::uint64_t seed, std::ostream& log) {
  std::vector<PropertyResult> results;
  std::size_t index = 0;
  for (const auto& prop : properties()) {
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * ++index);
    const auto start = Clock::now();
    PropertyResult r;
    r.name = prop.name;
    r.tolerance = prop.tolerance;
    try {
      r.worst = prop.worst(rng);
      r.passed = std::isfinite(r.worst) && r.worst <= prop.tolerance;
    } catch (const std::exception& e) {
      log << fmt::format("{} threw: {}\n", prop.name, e.what());
      r.worst = INFINITY;
      r.passed = false;
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    results.push_back(r);
  }
  return results;
}

}  // namespace maxattn::cli
