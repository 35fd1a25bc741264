#include "nsplab/nsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "nsplab/combinatorics.hpp"
#include "nsplab/parallel.hpp"
#include "nsplab/random.hpp"

namespace nsplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGradCap = 1e12;

void check_problem(const Subspace& nu, const CostFunction& J, int k) {
  if (J.dimension() != nu.ambient_dim())
    throw std::invalid_argument("cost function dimension does not match the subspace");
  if (k < 0 || k >= nu.ambient_dim())
    throw std::invalid_argument("sparsity must satisfy 0 <= k < n (got k=" + std::to_string(k) + ")");
}

// Scale-free measures: the NSC ratio is invariant under z -> t z.
bool scale_free(const SparsenessMeasure& F) { return F.homogeneous(); }

bool vertex_exact(const SparsenessMeasure& F) {
  if (F.kind() == MeasureKind::l1) return true;
  return F.kind() == MeasureKind::lp && F.params().at("p") == 1.0;
}

std::vector<double> scale_grid(const SearchOptions& o) {
  if (!(o.scale_min > 0.0) || !(o.scale_max >= o.scale_min) || o.scale_points < 1)
    throw std::invalid_argument("invalid scale grid");
  std::vector<double> out;
  if (o.scale_points == 1) return {o.scale_min};
  const double lo = std::log(o.scale_min), hi = std::log(o.scale_max);
  for (int i = 0; i < o.scale_points; ++i) out.push_back(std::exp(lo + (hi - lo) * i / (o.scale_points - 1)));
  return out;
}

// Unit vectors of nu with l - 1 prescribed zero coordinates. For l1 the
// maximizers of the NSC ratio are among them: the ratio is increasing in the
// convex J(z_T) on the polytope {z in nu : ||z||_1 = 1}, whose vertices have
// at least l - 1 zeros.
std::vector<Eigen::VectorXd> vertex_directions(const Subspace& nu, std::size_t cap, bool* complete) {
  const Eigen::Index n = nu.ambient_dim(), l = nu.dim();
  std::vector<Eigen::VectorXd> out;
  *complete = false;
  if (l < 2) return out;
  if (binomial(n, l - 1) > cap) return out;
  const Eigen::MatrixXd& B = nu.basis();
  for_each_combination(static_cast<int>(n), static_cast<int>(l - 1), [&](const std::vector<int>& rows) {
    Eigen::MatrixXd M(l - 1, l);
    for (Eigen::Index r = 0; r < l - 1; ++r) M.row(r) = B.row(rows[r]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    if (lu.rank() != l - 1) return true;
    Eigen::VectorXd c = lu.kernel().col(0);
    c.normalize();
    Eigen::VectorXd z = B * c;
    for (int r : rows) z[r] = 0.0;
    z.normalize();
    out.push_back(std::move(z));
    return true;
  });
  *complete = true;
  return out;
}

// Search for the largest NSC ratio over directions (and scales when F is not
// homogeneous). Evaluations are counted against the budget.
class RatioSearch {
 public:
  RatioSearch(const Subspace& nu, const SparsenessMeasure& F, int k, const SearchOptions& o)
      : nu_(nu), F_(F), k_(k), o_(o), free_(scale_free(F)), scales_(free_ ? std::vector<double>{1.0} : scale_grid(o)) {}

  bool exhausted() const { return evals_ >= o_.budget; }
  std::size_t evaluations() const { return evals_; }
  double best() const { return best_; }
  const Eigen::VectorXd& best_z() const { return best_z_; }
  const IndexSet& best_T() const { return best_T_; }
  const std::vector<double>& scales() const { return scales_; }
  bool scale_free_measure() const { return free_; }

  double ratio_at(const Eigen::VectorXd& z) {
    ++evals_;
    SupportSplit s = best_support(F_, z, k_);
    const double r = s.ratio();
    if (r > best_ || best_z_.size() == 0) {
      best_ = r;
      best_z_ = z;
      best_T_ = std::move(s.support);
    }
    return r;
  }

  // Best ratio along the ray through unit u; *log_t receives the best scale.
  double along_ray(const Eigen::VectorXd& u, double* log_t) {
    if (free_) {
      if (log_t) *log_t = 0.0;
      return ratio_at(u);
    }
    std::size_t best_i = 0;
    double best = -kInf;
    for (std::size_t i = 0; i < scales_.size() && !exhausted(); ++i) {
      const double r = ratio_at(scales_[i] * u);
      if (r > best) {
        best = r;
        best_i = i;
      }
    }
    double lo = std::log(scales_[best_i == 0 ? 0 : best_i - 1]);
    double hi = std::log(scales_[std::min(best_i + 1, scales_.size() - 1)]);
    double arg = std::log(scales_[best_i]);
    // Golden-section refinement in log t around the best grid point.
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    double fa = a > lo ? ratio_at(std::exp(a) * u) : -kInf;
    double fb = b < hi ? ratio_at(std::exp(b) * u) : -kInf;
    for (int it = 0; it < 30 && hi - lo > 1e-9 && !exhausted(); ++it) {
      if (fa >= fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - g * (hi - lo);
        fa = ratio_at(std::exp(a) * u);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + g * (hi - lo);
        fb = ratio_at(std::exp(b) * u);
      }
    }
    if (fa > best) {
      best = fa;
      arg = a;
    }
    if (fb > best) {
      best = fb;
      arg = b;
    }
    if (log_t) *log_t = arg;
    return best;
  }

  double at(const Eigen::VectorXd& c, double log_t) {
    const Eigen::VectorXd u = nu_.basis() * c;
    return ratio_at((free_ ? 1.0 : std::exp(log_t)) * u);
  }

  // Random-step hill climbing in (c, log t).
  void climb(Eigen::VectorXd c, double log_t, std::size_t cap, Rng& rng) {
    const Eigen::Index l = nu_.dim();
    const std::size_t stop = std::min(o_.budget, evals_ + cap);
    const double lo = std::log(scales_.front()), hi = std::log(scales_.back());
    c.normalize();
    double v = at(c, log_t);
    double sigma = 0.3;
    int fails = 0;
    std::normal_distribution<double> normal;
    while (sigma > 1e-9 && evals_ < stop && v < kInf) {
      Eigen::VectorXd c2 = c;
      for (Eigen::Index i = 0; i < l; ++i) c2[i] += sigma * normal(rng);
      const double nrm = c2.norm();
      if (nrm == 0.0) continue;
      c2 /= nrm;
      double t2 = log_t;
      if (!free_) t2 = std::clamp(log_t + 3.0 * sigma * normal(rng), lo, hi);
      const double v2 = at(c2, t2);
      if (v2 > v) {
        c = c2;
        log_t = t2;
        v = v2;
        fails = 0;
      } else if (++fails >= 4 * static_cast<int>(l) + 4) {
        sigma *= 0.5;
        fails = 0;
      }
    }
  }

 private:
  const Subspace& nu_;
  const SparsenessMeasure& F_;
  int k_;
  const SearchOptions& o_;
  bool free_;
  std::vector<double> scales_;
  std::size_t evals_ = 0;
  double best_ = -kInf;
  Eigen::VectorXd best_z_;
  IndexSet best_T_;
};

}  // namespace

// ---------------------------------------------------------------------------

double SupportSplit::relative_deficit() const {
  const double total = on + off;
  return total > 0.0 ? (on - off) / total : 0.0;
}

double SupportSplit::ratio() const {
  if (off > 0.0) return on / off;
  return on > 0.0 ? kInf : 0.0;
}

SupportSplit best_support(const SparsenessMeasure& F, const Eigen::Ref<const Eigen::VectorXd>& z, int k) {
  const int n = static_cast<int>(z.size());
  if (k < 0) throw std::invalid_argument("sparsity must be non-negative");
  k = std::min(k, n);
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) f[i] = F(std::abs(z[i]));
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
    return f[a] > f[b] || (f[a] == f[b] && a < b);
  });
  SupportSplit s;
  s.support.assign(idx.begin(), idx.begin() + k);
  std::sort(s.support.begin(), s.support.end());
  for (int i = 0; i < k; ++i) s.on += f[idx[i]];
  for (int i = k; i < n; ++i) s.off += f[idx[i]];
  return s;
}

NscReport nsc(const Subspace& nu, const CostFunction& J, int k, const SearchOptions& opts) {
  check_problem(nu, J, k);
  if (opts.budget == 0) throw std::invalid_argument("search budget must be at least 1");
  const SparsenessMeasure& F = J.measure();
  const Eigen::Index l = nu.dim();
  RatioSearch search(nu, F, k, opts);
  NscReport rep;

  if (l == 1) {
    search.along_ray(nu.basis().col(0), nullptr);
    rep.method = NscMethod::exact_1d;
    rep.is_lower_bound = !search.scale_free_measure();
  } else {
    bool complete = false;
    const auto verts = vertex_directions(nu, opts.max_vertex_sets, &complete);
    struct Scored {
      double r;
      Eigen::VectorXd c;
      double log_t;
    };
    std::vector<Scored> seeds;
    for (const auto& z : verts) {
      if (search.exhausted()) break;
      double lt = 0.0;
      const double r = search.along_ray(z, &lt);
      seeds.push_back({r, nu.basis().transpose() * z, lt});
    }
    const bool exact = complete && vertex_exact(F) && !search.exhausted();
    if (exact) {
      rep.method = NscMethod::vertex_enum;
      rep.is_lower_bound = false;
    } else {
      if (l == 2) {
        for (int i = 0; i < opts.circle_points && !search.exhausted(); ++i) {
          const double phi = std::numbers::pi * i / opts.circle_points;
          Eigen::VectorXd c(2);
          c << std::cos(phi), std::sin(phi);
          double lt = 0.0;
          const double r = search.along_ray(nu.basis() * c, &lt);
          seeds.push_back({r, c, lt});
        }
      }
      std::sort(seeds.begin(), seeds.end(), [](const Scored& a, const Scored& b) { return a.r > b.r; });
      Rng rng = make_rng(opts.seed, 0x25c);
      const int starts = std::max(1, opts.starts);
      const std::size_t remaining = opts.budget > search.evaluations() ? opts.budget - search.evaluations() : 0;
      const std::size_t per_start = std::max<std::size_t>(1, remaining / static_cast<std::size_t>(starts));
      const double mid_t = 0.5 * (std::log(search.scales().front()) + std::log(search.scales().back()));
      for (int s = 0; s < starts && !search.exhausted() && search.best() < kInf; ++s) {
        if (s < starts / 2 && static_cast<std::size_t>(s) < seeds.size()) {
          search.climb(seeds[s].c, seeds[s].log_t, per_start, rng);
        } else {
          const double lt = search.scale_free_measure()
                                ? 0.0
                                : std::uniform_real_distribution<double>(std::log(search.scales().front()),
                                                                         std::log(search.scales().back()))(rng);
          search.climb(random_unit_vector(l, rng), s == starts - 1 ? mid_t : lt, per_start, rng);
        }
      }
      rep.method = l == 2 ? NscMethod::sphere_enum : NscMethod::multistart;
      rep.is_lower_bound = true;
    }
  }
  rep.theta = search.best();
  rep.witness_z = search.best_z();
  rep.witness_T = search.best_T();
  rep.evaluations = search.evaluations();
  return rep;
}

NspResult nsp_check(const Subspace& nu, const CostFunction& J, int k, const SearchOptions& opts) {
  NspResult res;
  res.nsc = nsc(nu, J, k, opts);
  const double theta = res.nsc.theta;
  // (theta - 1) / (theta + 1) equals (J_T - J_Tc) / J at the maximizer.
  res.worst_relative_deficit = std::isinf(theta) ? 1.0 : (theta - 1.0) / (theta + 1.0);
  const double tol = kTol.nsp_boundary;
  if (res.worst_relative_deficit > tol)
    res.verdict = NspVerdict::fails;
  else if (res.worst_relative_deficit >= -tol)
    res.verdict = NspVerdict::boundary;
  else
    res.verdict = NspVerdict::holds_strict;
  res.witness_z = res.nsc.witness_z;
  res.witness_T = res.nsc.witness_T;
  res.evaluations = res.nsc.evaluations;
  res.is_lower_bound = res.nsc.is_lower_bound;
  return res;
}

ErcResult erc_member(const Subspace& nu, const CostFunction& J, int k, const SearchOptions& opts) {
  ErcResult out;
  out.detail = nsp_check(nu, J, k, opts);
  out.verdict = out.detail.verdict;
  out.member = out.verdict == NspVerdict::holds_strict;
  out.margin = J.measure().homogeneous() ? 1.0 - out.detail.nsc.theta : -out.detail.worst_relative_deficit;
  return out;
}

// ---------------------------------------------------------------------------
// Perturbed NSP probe.

namespace {

// Gradient of J(u_T) - J(u_{T^c}) with respect to u at fixed T.
Eigen::VectorXd deficit_gradient(const SparsenessMeasure& F, const Eigen::VectorXd& u, const IndexSet& T,
                                 const Eigen::VectorXd& z) {
  const Eigen::Index n = u.size();
  std::vector<char> in_T(static_cast<std::size_t>(n), 0);
  for (int i : T) in_T[i] = 1;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(u[i]);
    double dF = F.derivative(a);
    if (!std::isfinite(dF)) dF = kGradCap;
    dF = std::min(dF, kGradCap);
    if (a > 0.0) {
      const double s = u[i] > 0.0 ? 1.0 : -1.0;
      g[i] = in_T[i] ? s * dF : -s * dF;
    } else if (in_T[i]) {
      g[i] = z[i] < 0.0 ? -dF : dF;
    }
  }
  return g;
}

class Prober {
 public:
  Prober(const Subspace& nu, const CostFunction& J, int k, double d, std::size_t budget)
      : nu_(nu), J_(J), F_(J.measure()), k_(k), d_(d), budget_(budget) {}

  bool done() const { return found_.has_value() || evals_ >= budget_; }
  std::size_t evaluations() const { return evals_; }
  double best_rel() const { return best_rel_; }
  std::optional<Violation>& found() { return found_; }

  // Tries perturbations of z; returns once a violation is found or the local
  // search stalls.
  void probe(const Eigen::VectorXd& z) {
    const double rho = d_ * z.norm() * (1.0 - 1e-9);
    if (!(rho > 0.0)) return;
    const Eigen::Index n = z.size();
    SupportSplit base = best_support(F_, z, k_);
    std::vector<Eigen::VectorXd> cands;

    Eigen::VectorXd g = deficit_gradient(F_, z, base.support, z);
    if (g.norm() > 0.0) cands.push_back(rho * g / g.norm());

    // Erase the smallest off-support entries first, spend what is left on
    // the largest on-support entry.
    {
      std::vector<char> in_T(static_cast<std::size_t>(n), 0);
      for (int i : base.support) in_T[i] = 1;
      std::vector<int> off;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!in_T[i] && z[i] != 0.0) off.push_back(static_cast<int>(i));
      std::sort(off.begin(), off.end(), [&](int a, int b) { return std::abs(z[a]) < std::abs(z[b]); });
      Eigen::VectorXd nv = Eigen::VectorXd::Zero(n);
      double left = rho * rho;
      for (int i : off) {
        const double zi2 = z[i] * z[i];
        if (zi2 <= left) {
          nv[i] = -z[i];
          left -= zi2;
        } else {
          nv[i] = -(z[i] > 0.0 ? 1.0 : -1.0) * std::sqrt(left);
          left = 0.0;
          break;
        }
      }
      if (left > 0.0 && !base.support.empty()) {
        int top = base.support.front();
        for (int i : base.support)
          if (std::abs(z[i]) > std::abs(z[top])) top = i;
        nv[top] += (z[top] < 0.0 ? -1.0 : 1.0) * std::sqrt(left);
      }
      cands.push_back(std::move(nv));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = z[i] < 0.0 ? -1.0 : 1.0;
      Eigen::VectorXd shrink = Eigen::VectorXd::Zero(n), grow = Eigen::VectorXd::Zero(n);
      shrink[i] = -s * std::min(rho, std::abs(z[i]));
      grow[i] = s * rho;
      if (shrink[i] != 0.0) cands.push_back(std::move(shrink));
      cands.push_back(std::move(grow));
    }

    Eigen::VectorXd best_n;
    double best = -kInf;
    for (auto& nv : cands) {
      if (done()) return;
      const double v = eval(z, nv);
      if (found_) return;
      if (v > best) {
        best = v;
        best_n = nv;
      }
    }
    ascend(z, best_n, best, rho);
  }

  void random_start(const Eigen::VectorXd& z, Rng& rng) {
    const double rho = d_ * z.norm() * (1.0 - 1e-9);
    const double radius = rho * std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 1.0 / z.size());
    Eigen::VectorXd nv = radius * random_unit_vector(z.size(), rng);
    const double v = eval(z, nv);
    if (!found_) ascend(z, std::move(nv), v, rho);
  }

  // Projected gradient ascent on the deficit over the ball ||n|| <= rho.
  void ascend(const Eigen::VectorXd& z, Eigen::VectorXd nv, double value, double rho) {
    for (int it = 0; it < 40 && !done(); ++it) {
      const Eigen::VectorXd u = z + nv;
      const SupportSplit s = best_support(F_, u, k_);
      Eigen::VectorXd g = deficit_gradient(F_, u, s.support, z);
      const double gn = g.norm();
      if (!(gn > 0.0)) return;
      bool improved = false;
      for (double eta = 1.0; eta > 1e-3 && !done(); eta *= 0.25) {
        Eigen::VectorXd trial = nv + eta * rho * g / gn;
        const double tn = trial.norm();
        if (tn > rho) trial *= rho / tn;
        const double v = eval(z, trial);
        if (found_) return;
        if (v > value) {
          value = v;
          nv = std::move(trial);
          improved = true;
          break;
        }
      }
      if (!improved) return;
    }
  }

 private:
  double eval(const Eigen::VectorXd& z, const Eigen::VectorXd& nv) {
    ++evals_;
    const Eigen::VectorXd u = z + nv;
    SupportSplit s = best_support(F_, u, k_);
    best_rel_ = std::max(best_rel_, s.relative_deficit());
    if (s.deficit() >= 0.0 && nv.norm() > 0.0) {
      Violation v{z, nv, s.support, s.deficit()};
      if (verify_violation(nu_, J_, k_, d_, v)) found_ = std::move(v);
    }
    return s.deficit();
  }

  const Subspace& nu_;
  const CostFunction& J_;
  const SparsenessMeasure& F_;
  int k_;
  double d_;
  std::size_t budget_;
  std::size_t evals_ = 0;
  double best_rel_ = -1.0;
  std::optional<Violation> found_;
};

}  // namespace

bool verify_violation(const Subspace& nu, const CostFunction& J, int k, double d, const Violation& v) {
  const Eigen::Index n = nu.ambient_dim();
  if (v.z.size() != n || v.n_vec.size() != n) return false;
  const double zn = v.z.norm();
  if (!(zn > 0.0)) return false;
  if (!(nu.membership_residual(v.z) < kTol.basis * std::max(1.0, zn))) return false;
  if (!(v.n_vec.norm() < d * zn)) return false;
  if (static_cast<int>(v.T.size()) > k) return false;
  std::vector<char> in_T(static_cast<std::size_t>(n), 0);
  for (int i : v.T) {
    if (i < 0 || i >= n || in_T[i]) return false;
    in_T[i] = 1;
  }
  IndexSet comp;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!in_T[i]) comp.push_back(static_cast<int>(i));
  const Eigen::VectorXd u = v.z + v.n_vec;
  return J.restricted(u, v.T) - J.restricted(u, comp) >= 0.0;
}

RobustnessProbe rrc_probe(const Subspace& nu, const CostFunction& J, int k, double d, std::size_t budget,
                          const SearchOptions& opts, RobustSetConvention convention) {
  check_problem(nu, J, k);
  if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("probe radius d must be positive");
  if (budget == 0) throw std::invalid_argument("probe budget must be at least 1");
  const SparsenessMeasure& F = J.measure();
  const Eigen::Index l = nu.dim();
  RobustnessProbe out;
  out.d = d;
  out.search_budget = budget;
  out.convention = convention;
  out.reported_radius = convention == RobustSetConvention::omega_hat ? d : d / (1.0 + d);

  // A quarter of the budget locates the extremal NSC direction and scale.
  SearchOptions sub = opts;
  sub.budget = std::max<std::size_t>(1, budget / 4);
  const NscReport witness = nsc(nu, J, k, sub);
  Prober prober(nu, J, k, d, budget - std::min(budget - 1, witness.evaluations));

  const bool free = scale_free(F);
  const std::vector<double> scales = free ? std::vector<double>{1.0} : scale_grid(opts);
  auto sweep = [&](const Eigen::VectorXd& u) {
    for (double t : scales) {
      if (prober.done()) return;
      prober.probe(t * u);
    }
  };

  if (witness.witness_z.size() == nu.ambient_dim() && witness.witness_z.norm() > 0.0) {
    prober.probe(witness.witness_z);
    if (!free) sweep(witness.witness_z.normalized());
  }
  if (l == 1) {
    sweep(nu.basis().col(0));
    Rng rng = make_rng(opts.seed, 0x9b0be);
    std::uniform_int_distribution<std::size_t> pick(0, scales.size() - 1);
    while (!prober.done()) prober.random_start(scales[pick(rng)] * nu.basis().col(0), rng);
  } else {
    bool complete = false;
    auto verts = vertex_directions(nu, opts.max_vertex_sets, &complete);
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < verts.size(); ++i) order.emplace_back(best_support(F, verts[i], k).ratio(), i);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [r, i] : order) {
      if (prober.done()) break;
      sweep(verts[i]);
    }
    Rng rng = make_rng(opts.seed, 0x9b0be);
    while (!prober.done()) sweep(nu.basis() * random_unit_vector(l, rng));
  }

  out.evaluations = witness.evaluations + prober.evaluations();
  out.best_relative_deficit = prober.best_rel();
  if (prober.found()) {
    out.outcome = ProbeOutcome::violated;
    out.violation = std::move(prober.found());
    out.best_relative_deficit = std::max(out.best_relative_deficit, 0.0);
  }
  return out;
}

double robustness_constant(double d, double sigma_min) {
  if (!(d > 0.0)) throw std::invalid_argument("robustness_constant: d must be positive");
  if (!(sigma_min > 0.0)) throw std::invalid_argument("robustness_constant: sigma_min must be positive");
  return 2.0 * (1.0 + d) / (d * sigma_min);
}

double converse_constant(double d, double sigma_max) {
  if (!(d > 0.0 && d < 0.5)) throw std::invalid_argument("converse_constant: d must lie in (0, 1/2)");
  if (!(sigma_max > 0.0)) throw std::invalid_argument("converse_constant: sigma_max must be positive");
  return 2.0 * (1.0 - 2.0 * d) / (d * sigma_max);
}

// ---------------------------------------------------------------------------

double ce1_margin(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double sum = x.cwiseAbs().sum();
  if (!(sum > 0.0)) throw std::invalid_argument("ce1_margin: zero generator");
  return (sum - 2.0 * x.cwiseAbs().maxCoeff()) / sum;
}

Ce1Class ce1_membership(const Subspace& nu, double band) {
  if (nu.ambient_dim() != 3 || nu.dim() != 1)
    throw std::invalid_argument("ce1_membership needs a line in R^3");
  const double m = ce1_margin(nu.basis().col(0));
  if (m > band) return Ce1Class::interior;
  if (m >= -band) return Ce1Class::boundary;
  return Ce1Class::outside;
}

// ---------------------------------------------------------------------------

Region classify_region_point(const SparsenessMeasure& F, double a, double b, const RegionMapOptions& opts) {
  if (opts.angles < 2 || opts.radii < 1) throw std::invalid_argument("region search grid too small");
  const double lo = std::log(opts.radius_min), hi = std::log(opts.radius_max);
  std::vector<double> radii;
  for (int r = 0; r < opts.radii; ++r)
    radii.push_back(std::exp(opts.radii == 1 ? lo : lo + (hi - lo) * r / (opts.radii - 1)));
  // Axis directions first: they settle every point with a >= 1 or b >= 1 for
  // non-decreasing subadditive F.
  std::vector<int> order{0, opts.angles - 1};
  for (int i = 1; i < opts.angles - 1; ++i) order.push_back(i);
  double closest = kInf;
  for (int i : order) {
    const double phi = 0.5 * std::numbers::pi * i / (opts.angles - 1);
    const double cx = i == opts.angles - 1 ? 0.0 : std::cos(phi);
    const double cy = i == 0 ? 0.0 : std::sin(phi);
    for (double r : radii) {
      const double x = r * cx, y = r * cy;
      const double lhs = F(x) + F(y);
      const double gap = lhs - F(a * x + b * y);
      if (gap <= 1e-12 * lhs) return Region::A;
      closest = std::min(closest, gap / lhs);
    }
  }
  return closest < kTol.property ? Region::inconclusive : Region::B;
}

RegionMap region_boundary_map(const SparsenessMeasure& F, int rows, int cols, double a_max, double b_max,
                              const RegionMapOptions& opts, unsigned threads) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("region map grid must be at least 2x2");
  if (!(a_max > 0.0) || !(b_max > 0.0)) throw std::invalid_argument("region map domain must be positive");
  RegionMap map;
  map.measure = F.spec();
  map.rows = rows;
  map.cols = cols;
  map.a_max = a_max;
  map.b_max = b_max;
  map.cells.assign(static_cast<std::size_t>(rows) * cols, Region::B);
  parallel_for(static_cast<std::size_t>(rows), threads, [&](std::size_t i) {
    for (int j = 0; j < cols; ++j)
      map.cells[i * cols + j] = classify_region_point(F, map.a(j), map.b(static_cast<int>(i)), opts);
  });
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const Region c = map.at(i, j);
      if (c == Region::inconclusive) {
        ++map.inconclusive;
        continue;
      }
      if (c == Region::A) {
        const bool right_bad = j + 1 < cols && map.at(i, j + 1) == Region::B;
        const bool up_bad = i + 1 < rows && map.at(i + 1, j) == Region::B;
        if (right_bad || up_bad) ++map.upward_closure_violations;
      }
      if (i + 1 < rows && j + 1 < cols && c == Region::B && map.at(i + 1, j + 1) == Region::A) ++map.boundary_cells;
    }
  }
  return map;
}

// ---------------------------------------------------------------------------

const char* to_string(NscMethod m) {
  switch (m) {
    case NscMethod::exact_1d: return "exact_1d";
    case NscMethod::vertex_enum: return "vertex_enum";
    case NscMethod::sphere_enum: return "sphere_enum";
    case NscMethod::multistart: return "multistart";
  }
  return "?";
}

const char* to_string(NspVerdict v) {
  switch (v) {
    case NspVerdict::holds_strict: return "holds_strict";
    case NspVerdict::fails: return "fails";
    case NspVerdict::boundary: return "boundary";
  }
  return "?";
}

const char* to_string(ProbeOutcome o) {
  return o == ProbeOutcome::violated ? "violated" : "passed_at_resolution";
}

const char* to_string(Ce1Class c) {
  switch (c) {
    case Ce1Class::interior: return "interior";
    case Ce1Class::boundary: return "boundary";
    case Ce1Class::outside: return "outside";
  }
  return "?";
}

const char* to_string(Region r) {
  switch (r) {
    case Region::A: return "A";
    case Region::B: return "B";
    case Region::inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace nsplab
