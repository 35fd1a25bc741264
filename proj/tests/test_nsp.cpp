#include <doctest.h>

#include <cmath>
#include <vector>

#include "nsplab/combinatorics.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/random.hpp"

using namespace nsplab;

namespace {

Subspace line(double a, double b, double c) { return Subspace::from_generator(Eigen::Vector3d(a, b, c)); }

// max over every support |T| <= k of J(z_T) - J(z_{T^c}), by enumeration.
double brute_deficit(const SparsenessMeasure& F, const Eigen::VectorXd& z, int k) {
  const int n = static_cast<int>(z.size());
  double best = -INFINITY;
  for (int r = 0; r <= k; ++r)
    for_each_combination(n, r, [&](const std::vector<int>& T) {
      double on = 0, off = 0;
      std::vector<char> in(n, 0);
      for (int t : T) in[t] = 1;
      for (int i = 0; i < n; ++i) (in[i] ? on : off) += F(std::abs(z[i]));
      best = std::max(best, on - off);
      return true;
    });
  return best;
}

}  // namespace

TEST_CASE("top-k support equals enumeration over all supports") {
  Rng rng = make_rng(4, 0);
  for (const char* s : {"l0", "lp(p=0.5)", "l1", "exp_ce1", "mcp_zap(alpha=2)", "scad"}) {
    const SparsenessMeasure F = parse_measure(s);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd z = gaussian_vector(7, rng);
      if (trial % 5 == 0) z[2] = 0.0;
      for (int k = 0; k <= 3; ++k) {
        const SupportSplit sp = best_support(F, z, k);
        CHECK(sp.deficit() == doctest::Approx(brute_deficit(F, z, k)).epsilon(1e-12));
        CHECK(static_cast<int>(sp.support.size()) == k);
      }
    }
  }
}

TEST_CASE("l1 null space constant of lines is a rational number") {
  const CostFunction J(builtin_measure("l1"), 3);
  // theta = max|x_i| / (sum - max) for a line spanned by x.
  const NscReport a = nsc(line(1, 1, 1), J, 1);
  CHECK(a.theta == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(a.method == NscMethod::exact_1d);
  const NscReport b = nsc(line(1, 1, 2), J, 1);
  CHECK(std::abs(b.theta - 1.0) <= 1e-12);
  CHECK(b.witness_T == IndexSet{2});
  const NscReport c = nsc(line(1, 2, 4), J, 1);
  CHECK(std::abs(c.theta - 4.0 / 3.0) <= 1e-12);
  CHECK(c.witness_T == IndexSet{2});
  CHECK(!c.is_lower_bound);
  // k = 2 on (1,2,4): (2 + 4) / 1.
  CHECK(nsc(line(1, 2, 4), J, 2).theta == doctest::Approx(6.0));
}

TEST_CASE("l1 vertex enumeration against a dense circle scan") {
  const CostFunction J(builtin_measure("l1"), 5);
  for (int i = 0; i < 10; ++i) {
    Rng rng = make_rng(21, static_cast<std::uint64_t>(i));
    const Subspace nu = sample_haar(5, 2, rng);
    const NscReport r = nsc(nu, J, 1);
    CHECK(r.method == NscMethod::vertex_enum);
    const auto ratio_at = [&](double a) {
      const Eigen::VectorXd z = nu.basis() * Eigen::Vector2d(std::cos(a), std::sin(a));
      return best_support(J.measure(), z, 1).ratio();
    };
    // Coarse scan, then a fine rescan of the best cell: the maximum sits on a kink.
    const int N = 200000;
    const double h = M_PI / N;
    double scan = 0.0, best_a = 0.0;
    for (int s = 0; s < N; ++s)
      if (const double v = ratio_at(h * s); v > scan) scan = v, best_a = h * s;
    for (int s = -20000; s <= 20000; ++s) scan = std::max(scan, ratio_at(best_a + h * s / 10000.0));
    CHECK(r.theta >= scan - 1e-12);
    CHECK(r.theta <= scan * (1 + 1e-6));
  }
}

TEST_CASE("NSP verdicts") {
  const CostFunction L1(builtin_measure("l1"), 3), FE(builtin_measure("exp_ce1"), 3);
  CHECK(nsp_check(line(1, 1, 1), L1, 1).verdict == NspVerdict::holds_strict);
  CHECK(nsp_check(line(1, 1, 2), L1, 1).verdict == NspVerdict::boundary);
  CHECK(nsp_check(line(1, 2, 4), L1, 1).verdict == NspVerdict::fails);
  // The exponential measure is strictly better than l1 on the boundary line.
  CHECK(nsp_check(line(1, 1, 2), FE, 1).verdict == NspVerdict::holds_strict);
  CHECK(nsp_check(line(1, 2, 4), FE, 1).verdict == NspVerdict::fails);
  const ErcResult e = erc_member(line(1, 1, 1), L1, 1);
  CHECK(e.member);
  CHECK(e.margin == doctest::Approx(0.5));
  // k = 0 always holds.
  CHECK(nsp_check(line(1, 2, 4), L1, 0).verdict == NspVerdict::holds_strict);
  CHECK_THROWS_AS(nsp_check(line(1, 2, 4), L1, 3), std::invalid_argument);
}

TEST_CASE("closed-form classifier for the exponential measure") {
  const CostFunction FE(builtin_measure("exp_ce1"), 3);
  for (int i = 0; i < 300; ++i) {
    Rng rng = make_rng(13, static_cast<std::uint64_t>(i));
    const Subspace nu = sample_haar(3, 1, rng);
    const Ce1Class c = ce1_membership(nu, 1e-6);
    if (c == Ce1Class::boundary) continue;
    CHECK((nsp_check(nu, FE, 1).verdict == NspVerdict::holds_strict) == (c == Ce1Class::interior));
  }
  CHECK(ce1_margin(Eigen::Vector3d(1, 1, 2)) == 0.0);
  CHECK(ce1_membership(line(1, 1, 2)) == Ce1Class::boundary);
  CHECK(ce1_membership(line(1, 1, 1)) == Ce1Class::interior);
  CHECK(ce1_membership(line(1, 1, 3)) == Ce1Class::outside);
}

TEST_CASE("perturbed NSP on the all-ones line: critical radius 1/3") {
  // For z = (1,1,1) the nearest NSP-breaking point under l1 with k = 1 is
  // (4/3, 2/3, 2/3), at relative distance exactly 1/3.
  const CostFunction J(builtin_measure("l1"), 3);
  const Subspace nu = line(1, 1, 1);
  CHECK(rrc_probe(nu, J, 1, 0.30, 50000).outcome == ProbeOutcome::passed_at_resolution);
  const RobustnessProbe p = rrc_probe(nu, J, 1, 0.36, 50000);
  REQUIRE(p.outcome == ProbeOutcome::violated);
  REQUIRE(p.violation.has_value());
  CHECK(verify_violation(nu, J, 1, 0.36, *p.violation));
}

TEST_CASE("probe violations are sound certificates") {
  for (const char* s : {"l1", "exp_ce1", "lp(p=0.5)", "mcp_zap(alpha=2)"}) {
    for (int i = 0; i < 20; ++i) {
      Rng rng = make_rng(17, static_cast<std::uint64_t>(i));
      const Subspace nu = sample_haar(5, 2, rng);
      const CostFunction J(parse_measure(s), 5);
      const double d = 0.05 * (1 + i % 4);
      const RobustnessProbe p = rrc_probe(nu, J, 1, d, 4000);
      if (p.outcome != ProbeOutcome::violated) continue;
      const Violation& v = *p.violation;
      // Direct re-evaluation, independent of the probe internals.
      CHECK(nu.membership_residual(v.z) <= 1e-10 * v.z.norm());
      CHECK(v.n_vec.norm() < d * v.z.norm());
      const Eigen::VectorXd u = v.z + v.n_vec;
      double on = 0, off = 0;
      for (int k = 0; k < 5; ++k)
        (std::find(v.T.begin(), v.T.end(), k) != v.T.end() ? on : off) += J.measure()(std::abs(u[k]));
      CHECK(on >= off);
    }
  }
}

TEST_CASE("exponential measure: ERC without RRC on (1,1,2)") {
  const CostFunction FE(builtin_measure("exp_ce1"), 3);
  for (double d : {0.5, 0.1, 0.01, 0.001}) {
    const RobustnessProbe p = rrc_probe(line(1, 1, 2), FE, 1, d, 100000);
    CHECK(p.outcome == ProbeOutcome::violated);
  }
  const RobustnessProbe q = rrc_probe(line(1, 1, 2), FE, 1, 0.1, 1000, {}, RobustSetConvention::interior_lower);
  CHECK(q.reported_radius == doctest::Approx(0.1 / 1.1));
}

TEST_CASE("robustness constants") {
  CHECK(robustness_constant(0.2, 0.5) == doctest::Approx(2 * 1.2 / (0.2 * 0.5)));
  CHECK(converse_constant(0.1, 2.0) == doctest::Approx(2 * 0.8 / (0.1 * 2.0)));
  CHECK_THROWS_AS(converse_constant(0.6, 1.0), std::invalid_argument);
}

TEST_CASE("region map") {
  const RegionMap m = region_boundary_map(builtin_measure("l1"), 21, 21, 2.0, 2.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      CHECK((m.at(i, j) == Region::A) == (m.a(j) >= 1.0 || m.b(i) >= 1.0));
  CHECK(m.upward_closure_violations == 0);
  // Bounded measures: any positive a suffices with y = 0, x large.
  CHECK(classify_region_point(builtin_measure("mcp_zap", {{"alpha", 2.0}}), 0.3, 0.0) == Region::A);
  CHECK(classify_region_point(builtin_measure("l1"), 0.3, 0.5) == Region::B);
  CHECK(classify_region_point(builtin_measure("exp_ce1"), 0.9, 0.0) == Region::B);
}
