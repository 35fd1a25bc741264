#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nsplab/combinatorics.hpp"
#include "nsplab/random.hpp"
#include "nsplab/solver.hpp"

using namespace nsplab;

namespace {

// min ||x||_1 s.t. Ax = y is attained at a basic feasible solution, so the
// minimum over all m-column supports is exact.
double basis_pursuit_oracle(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  double best = INFINITY;
  for_each_combination(n, m, [&](const std::vector<int>& S) {
    Eigen::MatrixXd B(m, m);
    for (int j = 0; j < m; ++j) B.col(j) = A.col(S[j]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.rank() == m) best = std::min(best, lu.solve(y).lpNorm<1>());
    return true;
  });
  return best;
}

Eigen::VectorXd sparse_vector(int n, int k, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::normal_distribution<double> normal;
  for (int i = 0; i < k; ++i) x[perm[i]] = normal(rng);
  return x;
}

}  // namespace

TEST_CASE("l1 descent reaches the basis pursuit optimum") {
  for (int t = 0; t < 8; ++t) {
    Rng rng = make_rng(31, static_cast<std::uint64_t>(t));
    const MeasurementMatrix A = MeasurementMatrix::gaussian(4, 8, rng);
    const Eigen::VectorXd y = A.entries() * gaussian_vector(8, rng);
    const RecoveryProblem P(A, y, 0.0, CostFunction(builtin_measure("l1"), 8), 3);
    const SolveResult r = solve(P);
    CHECK(r.residual < 1e-8);
    CHECK(r.cost == doctest::Approx(basis_pursuit_oracle(A.entries(), y)).epsilon(1e-7));
  }
}

TEST_CASE("every method recovers a 1-sparse vector") {
  Rng rng = make_rng(2, 0);
  const MeasurementMatrix A = MeasurementMatrix::gaussian(4, 6, rng);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
  x[0] = 5.0;
  const Eigen::VectorXd y = A.entries() * x;
  struct Case {
    const char* measure;
    SolverMethod method;
  };
  for (const Case c : {Case{"l1", SolverMethod::descent}, Case{"lp(p=0.5)", SolverMethod::irls},
                       Case{"lp(p=0.5)", SolverMethod::descent}, Case{"l0", SolverMethod::enumerate},
                       Case{"exp_ce1", SolverMethod::enumerate}}) {
    SolverOptions o;
    o.method = c.method;
    const SolveResult r = solve(RecoveryProblem(A, y, 0.0, CostFunction(parse_measure(c.measure), 6), 1), o);
    INFO(c.measure, " ", to_string(c.method));
    CHECK((r.x_hat - x).norm() < 1e-6);
  }
}

TEST_CASE("solver input validation") {
  Rng rng = make_rng(2, 0);
  const MeasurementMatrix A = MeasurementMatrix::gaussian(3, 5, rng);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
  SolverOptions o;
  o.method = SolverMethod::descent;
  CHECK_THROWS_AS(solve(RecoveryProblem(A, y, 0.0, CostFunction(builtin_measure("l0"), 5), 1), o),
                  std::invalid_argument);
  o.method = SolverMethod::irls;
  CHECK_THROWS_AS(solve(RecoveryProblem(A, y, 0.0, CostFunction(builtin_measure("scad"), 5), 1), o),
                  std::invalid_argument);
  CHECK_THROWS_AS(RecoveryProblem(A, Eigen::VectorXd::Ones(4), 0.0, CostFunction(builtin_measure("l1"), 5), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(RecoveryProblem(A, y, -1.0, CostFunction(builtin_measure("l1"), 5), 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_solver_method("simplex"), std::invalid_argument);
}

TEST_CASE("noisy recovery stays feasible and no costlier than the truth") {
  for (int t = 0; t < 5; ++t) {
    Rng rng = make_rng(41, static_cast<std::uint64_t>(t));
    const MeasurementMatrix A = MeasurementMatrix::gaussian(5, 8, rng);
    const Eigen::VectorXd x = sparse_vector(8, 1, rng);
    const double eps = 0.05;
    const Eigen::VectorXd y = A.entries() * x + 0.9 * eps * random_unit_vector(5, rng);
    const CostFunction J(builtin_measure("l1"), 8);
    const RecoveryProblem P(A, y, eps, J, 1);
    const SolveResult r = solve(P);
    CHECK(r.residual < eps);
    CHECK(r.cost <= J(x) + 1e-7);
  }
}

TEST_CASE("adversarial pair from a perturbed-NSP violation") {
  const Subspace nu = Subspace::from_generator(Eigen::Vector3d(1, 1, 2));
  const MeasurementMatrix A = MeasurementMatrix::with_null_space(nu);
  const CostFunction J(builtin_measure("exp_ce1"), 3);
  for (double d : {0.1, 0.01}) {
    const AdversarialPair p = adversarial_pair(A, J, 1, d, 100000);
    CHECK((A.entries() * p.x_bar - p.y).norm() <= p.epsilon * (1 + 1e-12));
    CHECK((A.entries() * p.x_hat - p.y).norm() <= p.epsilon * (1 + 1e-12));
    CHECK(p.cost_hat <= p.cost_bar);
    CHECK(p.ratio > 2 * (1 - d) / (d * A.sigma_max()));
    CHECK(p.converse_ratio == doctest::Approx(2 * (1 - d) / (d * A.sigma_max())));
  }
  // l1 on (1,1,1) passes at d = 0.3: no witness to build from.
  const Subspace ones = Subspace::from_generator(Eigen::Vector3d(1, 1, 1));
  CHECK_THROWS_AS(adversarial_pair(MeasurementMatrix::with_null_space(ones), CostFunction(builtin_measure("l1"), 3), 1,
                                   0.3, 20000),
                  std::runtime_error);
}

TEST_CASE("empirical robustness respects the constant of a robust null space") {
  // A wide Gaussian matrix with a 2-dimensional null space in R^8; this draw has theta near 0.56.
  Rng rng = make_rng(7, 4);
  const MeasurementMatrix A = MeasurementMatrix::gaussian(6, 8, rng);
  const CostFunction J(builtin_measure("l1"), 8);
  const RobustnessProbe p = rrc_probe(A.null_space(), J, 1, 0.2, 20000);
  REQUIRE(p.outcome == ProbeOutcome::passed_at_resolution);
  SolverOptions o;
  o.starts = 8;
  const RobustnessSweep s = empirical_robustness(A, J, 1, 6, {1e-1, 1e-2, 1e-3}, 5, o);
  const double bound = robustness_constant(0.2, A.sigma_min());
  for (std::size_t e = 0; e < s.epsilon.size(); ++e) CHECK(s.max_ratio[e] <= bound);
}
