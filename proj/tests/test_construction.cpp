#include <cmath>

#include "doctest.h"
#include "maxattn/construction.hpp"
#include "maxattn/errors.hpp"

using namespace maxattn;

TEST_CASE("grid centers follow the base-P labelling") {
  auto c = grid_centers({1.0, 2, 1, 1});
  REQUIRE(c.size() == 2);
  CHECK(c[0] == Vector{-1.0});
  CHECK(c[1] == Vector{0.0});

  c = grid_centers({1.0, 2, 1, 2});
  REQUIRE(c.size() == 4);
  CHECK(c[0] == Vector{-1, -1});
  CHECK(c[1] == Vector{0, -1});
  CHECK(c[2] == Vector{-1, 0});
  CHECK(c[3] == Vector{0, 0});

  c = grid_centers({2.5, 1, 2, 2});
  REQUIRE(c.size() == 1);
  CHECK(c[0] == Vector{-2.5, -2.5, -2.5, -2.5});

  c = grid_centers({1.0, 4, 1, 1});
  CHECK(c == std::vector<Vector>{{-1.0}, {-0.5}, {0.0}, {0.5}});
}

TEST_CASE("grid cap reports the limiting count") {
  const GridSpec spec{1.0, 4, 2, 5};
  try {
    spec.center_count();
    FAIL("expected CapExceeded");
  } catch (const CapExceeded& e) {
    CHECK(e.limiting_size() > kMaxGridCenters);
  }
  CHECK(GridSpec{1.0, 16, 1, 4}.center_count() == 65536);
  CHECK_THROWS_AS(GridSpec({1.0, 0, 1, 1}).center_count(), ArgumentError);
  CHECK_THROWS_AS(GridSpec({-1.0, 2, 1, 1}).center_count(), ArgumentError);
}

TEST_CASE("E and T") {
  auto et = compute_et_values(Matrix{{0.0, 0.0}}, 1.0);
  CHECK(et.e == Matrix{{1.0, 1.0}});
  CHECK(et.t == Matrix{{1.0, 1.0}});
  et = compute_et_values(Matrix{{0.5}}, 1.0);
  CHECK(et.e(0, 0) == 0.5);
  CHECK(et.t(0, 0) == 1.5);
  const Matrix f{{0.3, -0.71}, {0.123456789, 0.0}};
  et = compute_et_values(f, 0.75);
  const Matrix sum = et.e + et.t;
  for (double v : sum.values()) CHECK(v == 2.0);
  CHECK_THROWS_AS(compute_et_values(Matrix{{1.0}}, 1.0), BoundViolation);
}

TEST_CASE("target functions enforce their bound") {
  TargetFunction f("double", 0, [](const Matrix& z) { return 2.0 * z; }, 1.0);
  CHECK(f(Matrix{{0.25}})(0, 0) == 0.5);
  CHECK_THROWS_AS(f(Matrix{{0.5}}), BoundViolation);
  CHECK(f.with_bound(10.0)(Matrix{{0.5}})(0, 0) == 1.0);
  CHECK_THROWS_AS(TargetFunction("bad", 0, SequenceMap{}, 0.0), ArgumentError);
}

TEST_CASE("bound estimation inflates the sup") {
  const GridSpec spec{1.0, 4, 1, 1};
  const auto centers = grid_centers(spec);
  const double b0 = estimate_bound([](const Matrix& z) { return z; }, centers, spec);
  CHECK(b0 > 1.0 - 1e-2);
  CHECK(b0 <= 1.001);
  CHECK(estimate_bound([](const Matrix& z) { return 0.0 * z; }, centers, spec) == kBoundFloor);
  CHECK(inflated_bound(Vector{-2.0, 1.0}) == doctest::Approx(2.002));
}

TEST_CASE("temperature from the corrected bound") {
  CHECK(choose_temperature(0.1, 1.0, 256, 0.1) == doctest::Approx(2570.5392017871104));
  const double r1 = choose_temperature(0.05, 2.0, 100, 0.01);
  const double r2 = choose_temperature(0.05, 2.0, 200, 0.01);
  CHECK(r2 - r1 == doctest::Approx(8.0 / (3.0 * 0.0025) * std::log(2.0)));
  CHECK(choose_temperature(0.1, 1.0, 256, 0.2) < choose_temperature(0.1, 1.0, 256, 0.1));
  // The defining inequality holds at the returned R.
  const double r = choose_temperature(0.2, 1.5, 64, 0.05);
  CHECK(2.0 * 1.5 * 64 * std::exp(-3.0 * r * 0.04 / 8.0) <= 0.05 / 3.0 * (1 + 1e-12));
  CHECK_THROWS_AS(choose_temperature(0.0, 1.0, 1, 0.1), ArgumentError);
  CHECK_THROWS_AS(choose_temperature(0.1, 1.0, 1, 1.5), ArgumentError);
}
