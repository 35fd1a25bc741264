#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nsplab/measures.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/subspaces.hpp"

namespace nsplab {

// min J(x) s.t. Ax = y (epsilon = 0) or ||Ax - y|| < epsilon.
struct RecoveryProblem {
  MeasurementMatrix A;
  Eigen::VectorXd y;
  double epsilon = 0.0;
  CostFunction J;
  int k = 0;

  RecoveryProblem(MeasurementMatrix a, Eigen::VectorXd y_, double eps, CostFunction j, int k_);
};

enum class SolverMethod { descent, irls, enumerate };

struct SolverOptions {
  SolverMethod method = SolverMethod::descent;
  int starts = 32;
  std::uint64_t seed = 1;
  // Gradient iterations per smoothing level.
  int iterations_per_level = 300;
  // Cap on the number of supports visited by `enumerate`.
  std::size_t max_supports = 100000;
};

struct SolveResult {
  Eigen::VectorXd x_hat;
  double cost = 0.0;
  // ||A x_hat - y||.
  double residual = 0.0;
  SolverMethod method = SolverMethod::descent;
  int iterations = 0;
  bool converged = true;
  // Only `enumerate` is exact, and only among k-sparse candidates; local
  // methods on non-convex J carry no global guarantee.
  bool globally_optimal = false;
};

// Feasible set x0 + N w with x0 = A^+ y. `descent`: multistart smoothed
// gradient descent over w followed by a vertex snap; `irls`: reweighted least
// squares for lp; `enumerate`: least squares on every support of size <= k.
SolveResult solve_noiseless(const RecoveryProblem& P, const SolverOptions& opts = {});

// Projected multistart descent over x = A^+(y + r) + N w, ||r|| <= eps (1 - 1e-9).
// Only `descent` is supported.
SolveResult solve_noisy(const RecoveryProblem& P, const SolverOptions& opts = {});

// Dispatches on P.epsilon.
SolveResult solve(const RecoveryProblem& P, const SolverOptions& opts = {});

struct TrialRecord {
  Eigen::VectorXd x_true;
  Eigen::VectorXd x_hat;
  double error = 0.0;  // ||x_hat - x_true||
  double epsilon = 0.0;
  double cost_gap = 0.0;  // J(x_hat) - J(x_true)
  double residual = 0.0;
  SolverMethod method = SolverMethod::descent;
  int iterations = 0;
  bool converged = true;
};

TrialRecord make_trial_record(const RecoveryProblem& P, const Eigen::VectorXd& x_true, const SolveResult& r);

// Converse construction from a perturbed-NSP violation (z, n, T): with
// u = z + n, x_bar = u_T, x_hat = -u_{T^c}, v = A(x_hat - x_bar)/2, both points
// are feasible for y = A x_bar + v at noise level eps = ||v||, J(x_hat) <= J(x_bar),
// and ||x_hat - x_bar|| / eps > 2(1 - d)/(d sigma_max).
struct AdversarialPair {
  Eigen::VectorXd x_bar;
  Eigen::VectorXd x_hat;
  Eigen::VectorXd v;
  Eigen::VectorXd y;
  double epsilon = 0.0;
  double error = 0.0;  // ||x_hat - x_bar||
  double ratio = 0.0;  // error / epsilon
  double converse_ratio = 0.0;
  double cost_bar = 0.0;
  double cost_hat = 0.0;
};

AdversarialPair adversarial_pair(const MeasurementMatrix& A, const CostFunction& J, int k, double d,
                                 const Violation& w);
// Runs rrc_probe on N(A) first; throws std::runtime_error if no violation is found.
AdversarialPair adversarial_pair(const MeasurementMatrix& A, const CostFunction& J, int k, double d,
                                 std::size_t probe_budget, const SearchOptions& opts = {});

struct RobustnessSweep {
  std::vector<double> epsilon;
  std::vector<double> max_ratio;        // max over converged trials of error / eps
  std::vector<std::size_t> excluded;    // non-converged trials per eps
  std::vector<TrialRecord> worst;       // trial attaining max_ratio per eps
  int trials = 0;
};

// Random k-sparse x_bar (standard normal entries on a uniform support) and a
// noise direction per trial; each eps rescales the noise to ||v|| = eps.
RobustnessSweep empirical_robustness(const MeasurementMatrix& A, const CostFunction& J, int k, int trials,
                                     const std::vector<double>& epsilon_grid, std::uint64_t seed,
                                     const SolverOptions& opts = {}, unsigned threads = 1);

SolverMethod parse_solver_method(const std::string& s);
const char* to_string(SolverMethod m);

}  // namespace nsplab
