#include <doctest.h>

#include <cmath>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "nsplab/random.hpp"
#include "nsplab/width.hpp"

using namespace nsplab;
using hp = boost::multiprecision::cpp_dec_float_50;

// Reference values from a 50-digit evaluation of the closed forms.
TEST_CASE("frozen closed-form values") {
  CHECK(zeta(1000, 10) == doctest::Approx(1.1181554030082492778).epsilon(1e-14));
  CHECK(rv_bound(1000, 10) == doctest::Approx(24.711325854198575327).epsilon(1e-14));
  CHECK(delta_threshold(100) == doctest::Approx(61.055884555935468106).epsilon(1e-12));
  CHECK(gordon_bound(0.0, 100) == doctest::Approx(0.98978868973121878646).epsilon(1e-14));
  CHECK(tradeoff_delta(100, 80) == doctest::Approx(0.11304454110336571774).epsilon(1e-12));
  CHECK(chi_mean(8) == doctest::Approx(2.7416246753776567995).epsilon(1e-14));
  CHECK(chi_mean(1) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-15));
  CHECK(chi_mean(2) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-15));
}

TEST_CASE("zeta against a 50-digit evaluation across (n, k)") {
  for (double n : {10.0, 100.0, 1000.0, 1e5}) {
    for (double k : {1.0, 3.0, 10.0}) {
      if (k > n) continue;
      const hp L = log(hp(boost::multiprecision::exp(hp(1))) * hp(n) / hp(k));
      const hp z = exp(log(1 + 2 * L) / (4 * L) + 1 / (24 * hp(k) * hp(k) * L));
      CHECK(zeta(n, k) == doctest::Approx(static_cast<double>(z)).epsilon(1e-14));
    }
  }
}

TEST_CASE("tradeoff point at beta = 100, gamma = 80") {
  const TradeoffPoint t = tradeoff(100, 80, true);
  CHECK(t.delta == doctest::Approx(0.11304454110336571774).epsilon(1e-12));
  REQUIRE(t.C.has_value());
  CHECK(*t.C == doctest::Approx(186.52664010836166987).epsilon(1e-11));
  REQUIRE(t.oracle_C.has_value());
  CHECK(*t.oracle_C == doctest::Approx(1.1258768596202425163).epsilon(1e-14));
  // Below the positivity threshold there is no robust constant.
  const TradeoffPoint low = tradeoff(100, 50, true);
  CHECK(low.delta < 0);
  CHECK(!low.C.has_value());
  CHECK_THROWS_AS(tradeoff(10, 20, true), std::invalid_argument);
}

TEST_CASE("escape bounds") {
  CHECK(gordon_bound(10.0, 100) == 0.0);  // w >= sqrt(m)
  const OmegaHatBound b = omega_hat_bound_l1(1000, 900, 10, 0.05);
  CHECK(!b.vacuous);
  CHECK(b.effective_width == doctest::Approx(24.711325854198575 + 0.05 * std::sqrt(1000.0)).epsilon(1e-12));
  CHECK(b.probability == 0.0);  // the raw bound is negative and clamps
  const OmegaHatBound far = omega_hat_bound_l1(100000, 90000, 10, 0.0);
  CHECK(far.probability > 0.99);
}

TEST_CASE("extended supremum") {
  CHECK(extended_sup(0.3, 1.0, 0.0) == doctest::Approx(0.3));
  CHECK(extended_sup(0.3, 1.0, 0.1) > 0.3);
  CHECK(extended_sup(0.3, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(extended_sup(0.999, 1.0, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("l1 inner supremum against a direct sphere scan at n = 3") {
  const CostFunction J(builtin_measure("l1"), 3);
  for (int t = 0; t < 20; ++t) {
    Rng rng = make_rng(61, static_cast<std::uint64_t>(t));
    const Eigen::VectorXd g = gaussian_vector(3, rng);
    InnerSearch how;
    const double s = width_inner_sup(J, 1, g, &how);
    CHECK(how == InnerSearch::closed_form);
    // Independent scan: K = {x : max|x_i| >= sum of the other two}.
    double scan = -INFINITY;
    const int N = 400;
    for (int i = 0; i <= N; ++i) {
      const double th = M_PI * i / N;
      for (int j = 0; j < 2 * N; ++j) {
        const double ph = M_PI * j / N;
        const Eigen::Vector3d x(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
        const Eigen::Vector3d a = x.cwiseAbs();
        if (2 * a.maxCoeff() >= a.sum()) scan = std::max(scan, g.dot(x));
      }
    }
    CHECK(scan <= s + 1e-12);
    CHECK(scan >= s - 0.02 * g.norm());
  }
}

TEST_CASE("whole-sphere width is the chi mean") {
  for (int n : {2, 4}) {
    const WidthEstimate w = width_mc(CostFunction(builtin_measure("l1"), n), n, 4000, 9);
    CHECK(std::abs(w.mean - w.chi_mean) < 4 * w.std_error + 1e-12);
    CHECK(w.inner_search == InnerSearch::closed_form);
  }
}

TEST_CASE("extension adds at most d sqrt(n)") {
  const CostFunction J(builtin_measure("l1"), 6);
  const WidthEstimate a = width_mc(J, 1, 2000, 4);
  const WidthEstimate b = width_extended(J, 1, 0.1, 2000, 4);
  CHECK(b.bound_violations == 0);
  CHECK(b.mean >= a.mean);
  CHECK(b.mean - a.mean <= 0.1 * std::sqrt(6.0) + 3 * std::hypot(a.std_error, b.std_error));
  // Thread count does not change results.
  CHECK(width_mc(J, 1, 2000, 4, 3).mean == a.mean);
}

TEST_CASE("non-l1 inner searches") {
  InnerSearch how;
  Rng rng = make_rng(1, 1);
  const Eigen::VectorXd g3 = gaussian_vector(3, rng);
  const double s3 = width_inner_sup(CostFunction(parse_measure("lp(p=0.5)"), 3), 1, g3, &how);
  CHECK(how == InnerSearch::discretization);
  CHECK(s3 <= g3.norm() + 1e-12);
  const Eigen::VectorXd g5 = gaussian_vector(5, rng);
  width_inner_sup(CostFunction(parse_measure("exp_ce1"), 5), 1, g5, &how);
  CHECK(how == InnerSearch::multistart);
  CHECK(width_mc(CostFunction(parse_measure("exp_ce1"), 5), 1, 20, 1).is_lower_bound);
}
