#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nsplab/measures.hpp"

using namespace nsplab;

TEST_CASE("builtin measures match their closed forms") {
  CHECK(builtin_measure("l1")(2.5) == 2.5);
  CHECK(builtin_measure("lp", {{"p", 0.5}})(4.0) == doctest::Approx(2.0).epsilon(1e-15));
  const SparsenessMeasure l0 = builtin_measure("l0");
  CHECK(l0(0.0) == 0.0);
  CHECK(l0(1e-300) == 1.0);
  // 1 + 1 - e^{-1}, evaluated without expm1.
  CHECK(builtin_measure("exp_ce1")(1.0) == doctest::Approx(2.0 - std::exp(-1.0)).epsilon(1e-15));
  // Small-t branch keeps relative precision: F(t) = 2t - t^2/2 + O(t^3).
  CHECK(builtin_measure("exp_ce1")(1e-10) == doctest::Approx(2e-10).epsilon(1e-9));
  const SparsenessMeasure mcp = builtin_measure("mcp_zap", {{"alpha", 2.0}});
  CHECK(mcp(0.25) == doctest::Approx(0.75));
  CHECK(mcp(0.5) == 1.0);
  CHECK(mcp(7.0) == 1.0);
  const SparsenessMeasure scad = builtin_measure("scad", {{"lambda", 1.0}, {"a", 3.7}});
  CHECK(scad(0.5) == doctest::Approx(0.5));
  CHECK(scad(2.0) == doctest::Approx((2 * 3.7 * 2 - 4 - 1) / (2 * 2.7)));
  CHECK(scad(5.0) == doctest::Approx(4.7 / 2));
}

TEST_CASE("measure specs round-trip and reject bad input") {
  for (const char* s : {"l0", "l1", "lp(p=0.5)", "exp_ce1", "mcp_zap(alpha=2)", "scad(a=3.7,lambda=1)"}) {
    const SparsenessMeasure F = parse_measure(s);
    CHECK(parse_measure(F.spec()).spec() == F.spec());
  }
  CHECK_THROWS_AS(parse_measure("l2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("lp(p=1.5)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("lp(q=0.5)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("mcp_zap(alpha=-1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_measure("scad(a=2)"), std::invalid_argument);
  CHECK_THROWS_AS(SparsenessMeasure::custom("shifted", [](double x) { return x + 1; }, {}), std::invalid_argument);
}

TEST_CASE("derivatives") {
  CHECK(builtin_measure("l1").derivative(3.0) == 1.0);
  CHECK(builtin_measure("exp_ce1").derivative(0.5) == doctest::Approx(1.0 + std::exp(-0.5)));
  CHECK(builtin_measure("lp", {{"p", 0.5}}).derivative(4.0) == doctest::Approx(0.25));
}

TEST_CASE("cost function sums coordinatewise and on supports") {
  const CostFunction J(builtin_measure("lp", {{"p", 0.5}}), 3);
  const Eigen::Vector3d x(4.0, -9.0, 0.0);
  CHECK(J(x) == doctest::Approx(5.0));
  const int T[] = {1};
  CHECK(J.restricted(x, T) == doctest::Approx(3.0));
  CHECK_THROWS_AS(J(Eigen::Vector2d(1, 1)), std::invalid_argument);
}

TEST_CASE("sampled properties of the builtin measures") {
  for (const char* s : {"l0", "lp(p=0.5)", "l1", "exp_ce1", "mcp_zap(alpha=2)", "scad"}) {
    const PropertyReport r = check_measure_properties(parse_measure(s), 20000);
    INFO(s);
    CHECK(r.positive.holds());
    CHECK(r.subadditive.holds());
    CHECK(r.non_decreasing.holds());
  }
  // F(t)/t non-increasing holds for the concave measures.
  CHECK(check_measure_properties(parse_measure("exp_ce1"), 20000).linear_ratio.holds());
  // x^2 is superadditive: the sampler must find violations.
  MeasureFlags flags;
  const SparsenessMeasure sq = SparsenessMeasure::custom("square", [](double x) { return x * x; }, flags);
  const PropertyReport r = check_measure_properties(sq, 20000);
  CHECK(r.subadditive.violations > 0);
  REQUIRE(r.subadditive.worst.has_value());
  CHECK(r.subadditive.worst->excess > 0.0);
}

TEST_CASE("comparison rules") {
  const ComparisonReport mcp = compare_measures(parse_measure("mcp_zap(alpha=2)"), parse_measure("l1"), 20000);
  CHECK(mcp.ratio_rule);
  CHECK(mcp.limit_rule);
  CHECK(mcp.limit_at_zero.kind == LimitKind::finite_positive);
  CHECK(mcp.limit_at_zero.value == doctest::Approx(4.0).epsilon(1e-9));

  const ComparisonReport half = compare_measures(parse_measure("lp(p=0.5)"), parse_measure("l1"), 20000);
  CHECK(half.ratio_rule);  // x^{1/2}/x is decreasing

  // exp_ce1(x)/x -> 2 at zero and -> 1 at infinity.
  const LimitEstimate z = power_limit(parse_measure("exp_ce1"), 1.0, true);
  CHECK(z.kind == LimitKind::finite_positive);
  CHECK(z.value == doctest::Approx(2.0).epsilon(1e-6));
  const LimitEstimate inf = power_limit(parse_measure("exp_ce1"), 1.0, false);
  CHECK(inf.kind == LimitKind::finite_positive);
  CHECK(inf.value == doctest::Approx(1.0).epsilon(1e-6));
  // Bounded measures vanish against x at infinity.
  CHECK(power_limit(parse_measure("scad"), 1.0, false).kind == LimitKind::zero);
}
