#include "nsplab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "nsplab/combinatorics.hpp"
#include "nsplab/parallel.hpp"
#include "nsplab/random.hpp"
#include "nsplab/tolerances.hpp"

namespace nsplab {

RecoveryProblem::RecoveryProblem(MeasurementMatrix a, Eigen::VectorXd y_, double eps, CostFunction j, int k_)
    : A(std::move(a)), y(std::move(y_)), epsilon(eps), J(std::move(j)), k(k_) {
  if (y.size() != A.rows()) throw std::invalid_argument("measurement vector length must equal m");
  if (J.dimension() != A.cols()) throw std::invalid_argument("cost function dimension must equal n");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be finite and >= 0");
  if (k < 0 || k >= A.cols()) throw std::invalid_argument("sparsity must satisfy 0 <= k < n");
  if (!y.allFinite()) throw std::invalid_argument("measurement vector has non-finite entries");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_continuous(const SparsenessMeasure& F, SolverMethod m) {
  if (!F.flags().continuous)
    throw std::invalid_argument(std::string("method '") + to_string(m) + "' needs a continuous measure; use enumerate");
}

// x = x0 + M v, where the trailing r_len entries of v are confined to a ball.
struct Parametrization {
  Eigen::VectorXd x0;
  Eigen::MatrixXd M;
  Eigen::Index r_len = 0;
  double r_radius = 0.0;

  Eigen::VectorXd x(const Eigen::VectorXd& v) const { return x0 + M * v; }
  void project(Eigen::VectorXd& v) const {
    if (r_len == 0) return;
    auto r = v.tail(r_len);
    const double nr = r.norm();
    if (nr > r_radius) r *= r_radius / nr;
  }
};

// J_mu(x) = sum F(sqrt(x_i^2 + mu^2)) and its gradient.
double smoothed(const SparsenessMeasure& F, const Eigen::VectorXd& x, double mu, Eigen::VectorXd* grad) {
  double total = 0.0;
  if (grad) grad->resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = std::hypot(x[i], mu);
    total += F(s);
    if (grad) {
      double d = F.derivative(s);
      if (!std::isfinite(d)) d = 0.0;
      (*grad)[i] = s > 0.0 ? d * x[i] / s : 0.0;
    }
  }
  return total;
}

struct DescentOutcome {
  Eigen::VectorXd v;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient with Barzilai-Borwein steps and backtracking, under a
// decreasing smoothing schedule.
DescentOutcome smoothed_descent(const SparsenessMeasure& F, const Parametrization& par, Eigen::VectorXd v,
                                double scale, int per_level) {
  DescentOutcome out;
  par.project(v);
  double prev_true = kInf;
  for (double mu = 0.1 * scale; mu >= 1e-10 * scale * 0.999; mu *= 0.1) {
    Eigen::VectorXd gx, g;
    double f = smoothed(F, par.x(v), mu, &gx);
    g = par.M.transpose() * gx;
    double step = 1.0 / std::max(1e-300, g.norm() / std::max(scale, 1e-300));
    bool level_done = false;
    for (int it = 0; it < per_level; ++it) {
      ++out.iterations;
      Eigen::VectorXd v2;
      double f2 = kInf;
      bool accepted = false;
      for (int bt = 0; bt < 40; ++bt) {
        v2 = v - step * g;
        par.project(v2);
        f2 = smoothed(F, par.x(v2), mu, nullptr);
        const double decrease = g.dot(v - v2);
        if (f2 <= f - 1e-4 * decrease) {
          accepted = true;
          break;
        }
        step *= 0.25;
      }
      if (!accepted) {
        level_done = true;
        break;
      }
      Eigen::VectorXd gx2;
      smoothed(F, par.x(v2), mu, &gx2);
      Eigen::VectorXd g2 = par.M.transpose() * gx2;
      const Eigen::VectorXd s = v2 - v, yv = g2 - g;
      const double sy = s.dot(yv);
      const double sn = s.norm();
      v = std::move(v2);
      g = std::move(g2);
      f = f2;
      if (sn <= 1e-13 * (scale + v.norm())) {
        level_done = true;
        break;
      }
      step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-16, 1e16) : step * 4.0;
    }
    double J_now = 0.0;
    const Eigen::VectorXd x = par.x(v);
    for (Eigen::Index i = 0; i < x.size(); ++i) J_now += F(std::abs(x[i]));
    out.converged = level_done || std::abs(J_now - prev_true) <= 1e-8 * std::max(1.0, std::abs(J_now));
    prev_true = J_now;
  }
  out.v = std::move(v);
  return out;
}

double cost(const SparsenessMeasure& F, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += F(std::abs(x[i]));
  return s;
}

// Moves x inside x + N w onto a point with its l smallest entries zeroed and
// keeps it if J does not increase. Exact for concave F, whose minimum over
// the feasible affine set is attained at such a point.
Eigen::VectorXd vertex_snap(const SparsenessMeasure& F, const Eigen::MatrixXd& N, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size(), l = N.cols();
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(x[a]) < std::abs(x[b]); });
  Eigen::MatrixXd NS(l, l);
  Eigen::VectorXd rhs(l);
  for (Eigen::Index r = 0; r < l; ++r) {
    NS.row(r) = N.row(idx[r]);
    rhs[r] = -x[idx[r]];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(NS);
  if (lu.rank() < l) return x;
  Eigen::VectorXd snapped = x + N * lu.solve(rhs);
  for (Eigen::Index r = 0; r < l; ++r) snapped[idx[r]] = 0.0;
  return cost(F, snapped) <= cost(F, x) ? snapped : x;
}

SolveResult finish(const RecoveryProblem& P, Eigen::VectorXd x, SolverMethod m, int iterations, bool converged) {
  SolveResult r;
  r.residual = (P.A.entries() * x - P.y).norm();
  r.cost = P.J(x);
  r.x_hat = std::move(x);
  r.method = m;
  r.iterations = iterations;
  r.converged = converged;
  return r;
}

SolveResult enumerate_supports(const RecoveryProblem& P, const SolverOptions& opts) {
  const Eigen::Index n = P.A.cols();
  std::size_t total = 0;
  for (int s = 0; s <= P.k; ++s) total += binomial(static_cast<std::size_t>(n), static_cast<std::size_t>(s));
  if (total > opts.max_supports)
    throw std::invalid_argument("enumerate: " + std::to_string(total) + " supports exceed the cap of " +
                                std::to_string(opts.max_supports));
  const double tol = 1e-9 * std::max(1.0, P.y.norm());
  Eigen::VectorXd best;
  double best_cost = kInf;
  int visited = 0;
  for (int s = 0; s <= P.k && s <= P.A.rows(); ++s) {
    for_each_combination(static_cast<int>(n), s, [&](const std::vector<int>& S) {
      ++visited;
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      if (s > 0) {
        Eigen::MatrixXd AS(P.A.rows(), s);
        for (int j = 0; j < s; ++j) AS.col(j) = P.A.entries().col(S[j]);
        const Eigen::VectorXd xs = AS.colPivHouseholderQr().solve(P.y);
        for (int j = 0; j < s; ++j) x[S[j]] = xs[j];
      }
      if ((P.A.entries() * x - P.y).norm() > tol) return true;
      const double c = P.J(x);
      if (c < best_cost) {
        best_cost = c;
        best = std::move(x);
      }
      return true;
    });
  }
  if (best.size() == 0) throw std::runtime_error("enumerate: no feasible point with at most k nonzeros");
  SolveResult r = finish(P, std::move(best), SolverMethod::enumerate, visited, true);
  r.globally_optimal = true;
  return r;
}

SolveResult irls(const RecoveryProblem& P) {
  const SparsenessMeasure& F = P.J.measure();
  double p = 1.0;
  if (F.kind() == MeasureKind::lp)
    p = F.params().at("p");
  else if (F.kind() != MeasureKind::l1)
    throw std::invalid_argument("irls needs an lp measure (got " + F.spec() + ")");
  const Eigen::MatrixXd& A = P.A.entries();
  Eigen::VectorXd x = P.A.pseudo_inverse() * P.y;
  int it = 0;
  for (double mu = 1.0; mu >= 1e-10; mu *= 0.5) {
    for (int j = 0; j < 10; ++j, ++it) {
      // W^{-1} = diag((|x_i| + mu)^{2 - p})
      const Eigen::VectorXd winv = (x.cwiseAbs().array() + mu).pow(2.0 - p).matrix();
      const Eigen::MatrixXd AW = A * winv.asDiagonal();
      const Eigen::MatrixXd G = AW * A.transpose();
      x = winv.asDiagonal() * (A.transpose() * G.ldlt().solve(P.y));
    }
  }
  x = vertex_snap(F, P.A.null_space().basis(), x);
  return finish(P, std::move(x), SolverMethod::irls, it, true);
}

}  // namespace

SolveResult solve_noiseless(const RecoveryProblem& P, const SolverOptions& opts) {
  if (P.epsilon != 0.0) throw std::invalid_argument("solve_noiseless needs epsilon = 0");
  switch (opts.method) {
    case SolverMethod::enumerate:
      return enumerate_supports(P, opts);
    case SolverMethod::irls:
      require_continuous(P.J.measure(), opts.method);
      return irls(P);
    case SolverMethod::descent:
      break;
  }
  const SparsenessMeasure& F = P.J.measure();
  require_continuous(F, opts.method);
  Parametrization par;
  par.x0 = P.A.pseudo_inverse() * P.y;
  par.M = P.A.null_space().basis();
  const double scale = std::max(1.0, par.x0.cwiseAbs().maxCoeff());
  Rng rng = make_rng(opts.seed, 0xde5c);
  Eigen::VectorXd best;
  double best_cost = kInf;
  int iterations = 0;
  bool converged = false;
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Eigen::VectorXd v0 = s == 0 ? Eigen::VectorXd::Zero(par.M.cols()) : Eigen::VectorXd(scale * gaussian_vector(par.M.cols(), rng));
    DescentOutcome d = smoothed_descent(F, par, v0, scale, opts.iterations_per_level);
    iterations += d.iterations;
    Eigen::VectorXd x = vertex_snap(F, par.M, par.x(d.v));
    const double c = cost(F, x);
    if (c < best_cost) {
      best_cost = c;
      best = std::move(x);
      converged = d.converged;
    }
  }
  return finish(P, std::move(best), SolverMethod::descent, iterations, converged);
}

SolveResult solve_noisy(const RecoveryProblem& P, const SolverOptions& opts) {
  if (!(P.epsilon > 0.0)) throw std::invalid_argument("solve_noisy needs epsilon > 0");
  if (opts.method != SolverMethod::descent)
    throw std::invalid_argument("solve_noisy supports only the descent method");
  const SparsenessMeasure& F = P.J.measure();
  require_continuous(F, opts.method);
  const Eigen::Index m = P.A.rows(), l = P.A.cols() - P.A.rows();
  Parametrization par;
  par.x0 = P.A.pseudo_inverse() * P.y;
  par.M.resize(P.A.cols(), l + m);
  par.M << P.A.null_space().basis(), P.A.pseudo_inverse();
  par.r_len = m;
  par.r_radius = P.epsilon * (1.0 - kTol.noisy_shrink);
  const double scale = std::max(1.0, par.x0.cwiseAbs().maxCoeff());
  Rng rng = make_rng(opts.seed, 0x4015);
  Eigen::VectorXd best;
  double best_cost = kInf;
  int iterations = 0;
  bool converged = false;
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(l + m);
    if (s > 0) v0.head(l) = scale * gaussian_vector(l, rng);
    DescentOutcome d = smoothed_descent(F, par, v0, scale, opts.iterations_per_level);
    iterations += d.iterations;
    Eigen::VectorXd x = par.x(d.v);
    const double c = cost(F, x);
    if (c < best_cost) {
      best_cost = c;
      best = std::move(x);
      converged = d.converged;
    }
  }
  SolveResult r = finish(P, std::move(best), SolverMethod::descent, iterations, converged);
  if (!(r.residual <= P.epsilon + kTol.feasibility))
    throw std::runtime_error("solve_noisy: output violates the noise constraint");
  return r;
}

SolveResult solve(const RecoveryProblem& P, const SolverOptions& opts) {
  return P.epsilon > 0.0 ? solve_noisy(P, opts) : solve_noiseless(P, opts);
}

TrialRecord make_trial_record(const RecoveryProblem& P, const Eigen::VectorXd& x_true, const SolveResult& r) {
  TrialRecord t;
  t.x_true = x_true;
  t.x_hat = r.x_hat;
  t.error = (r.x_hat - x_true).norm();
  t.epsilon = P.epsilon;
  t.cost_gap = r.cost - P.J(x_true);
  t.residual = r.residual;
  t.method = r.method;
  t.iterations = r.iterations;
  t.converged = r.converged;
  return t;
}

AdversarialPair adversarial_pair(const MeasurementMatrix& A, const CostFunction& J, int k, double d,
                                 const Violation& w) {
  const Subspace& nu = A.null_space();
  if (!verify_violation(nu, J, k, d, w)) throw std::invalid_argument("adversarial_pair: witness is not a violation");
  const Eigen::Index n = A.cols();
  const Eigen::VectorXd u = w.z + w.n_vec;
  std::vector<char> in_T(static_cast<std::size_t>(n), 0);
  for (int i : w.T) in_T[i] = 1;
  AdversarialPair p;
  p.x_bar = Eigen::VectorXd::Zero(n);
  p.x_hat = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (in_T[i])
      p.x_bar[i] = u[i];
    else
      p.x_hat[i] = -u[i];
  }
  p.v = A.entries() * (p.x_hat - p.x_bar) / 2.0;
  p.epsilon = p.v.norm();
  if (!(p.epsilon > 0.0)) throw std::invalid_argument("adversarial_pair: degenerate witness (A n = 0 gives eps = 0)");
  p.y = A.entries() * p.x_bar + p.v;
  p.error = (p.x_hat - p.x_bar).norm();
  p.ratio = p.error / p.epsilon;
  p.converse_ratio = 2.0 * (1.0 - d) / (d * A.sigma_max());
  p.cost_bar = J(p.x_bar);
  p.cost_hat = J(p.x_hat);
  return p;
}

AdversarialPair adversarial_pair(const MeasurementMatrix& A, const CostFunction& J, int k, double d,
                                 std::size_t probe_budget, const SearchOptions& opts) {
  const RobustnessProbe probe = rrc_probe(A.null_space(), J, k, d, probe_budget, opts);
  if (!probe.violation) throw std::runtime_error("adversarial_pair: no perturbed-NSP violation found");
  return adversarial_pair(A, J, k, d, *probe.violation);
}

RobustnessSweep empirical_robustness(const MeasurementMatrix& A, const CostFunction& J, int k, int trials,
                                     const std::vector<double>& epsilon_grid, std::uint64_t seed,
                                     const SolverOptions& opts, unsigned threads) {
  if (trials < 1) throw std::invalid_argument("empirical_robustness needs trials >= 1");
  if (epsilon_grid.empty()) throw std::invalid_argument("empirical_robustness needs a nonempty epsilon grid");
  for (double e : epsilon_grid)
    if (!(e > 0.0)) throw std::invalid_argument("epsilon grid entries must be positive");
  const Eigen::Index n = A.cols(), m = A.rows();
  const std::size_t E = epsilon_grid.size();
  std::vector<std::vector<TrialRecord>> records(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    Rng rng = make_rng(seed, t);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::VectorXd x_bar = Eigen::VectorXd::Zero(n);
    std::normal_distribution<double> normal;
    for (int i = 0; i < k; ++i) x_bar[perm[i]] = normal(rng);
    const Eigen::VectorXd dir = random_unit_vector(m, rng);
    SolverOptions o = opts;
    o.seed = derive_seed(seed, t + 0x100000);
    for (std::size_t e = 0; e < E; ++e) {
      const double eps = epsilon_grid[e];
      RecoveryProblem P(A, A.entries() * x_bar + eps * dir, eps, J, k);
      records[t].push_back(make_trial_record(P, x_bar, solve_noisy(P, o)));
    }
  });
  RobustnessSweep out;
  out.trials = trials;
  out.epsilon = epsilon_grid;
  out.max_ratio.assign(E, 0.0);
  out.excluded.assign(E, 0);
  out.worst.resize(E);
  for (std::size_t e = 0; e < E; ++e) {
    for (const auto& rec : records) {
      const TrialRecord& r = rec[e];
      if (!r.converged) {
        ++out.excluded[e];
        continue;
      }
      const double ratio = r.error / r.epsilon;
      if (ratio >= out.max_ratio[e]) {
        out.max_ratio[e] = ratio;
        out.worst[e] = r;
      }
    }
  }
  return out;
}

SolverMethod parse_solver_method(const std::string& s) {
  if (s == "descent") return SolverMethod::descent;
  if (s == "irls") return SolverMethod::irls;
  if (s == "enumerate") return SolverMethod::enumerate;
  throw std::invalid_argument("unknown solver method '" + s + "' (expected descent, irls or enumerate)");
}

const char* to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::descent: return "descent";
    case SolverMethod::irls: return "irls";
    case SolverMethod::enumerate: return "enumerate";
  }
  return "?";
}

}  // namespace nsplab
