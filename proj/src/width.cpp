#include "nsplab/width.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nsplab/nsp.hpp"
#include "nsplab/parallel.hpp"
#include "nsplab/random.hpp"

namespace nsplab {

namespace {

constexpr int kGridPoints = 100000;

bool is_l1(const SparsenessMeasure& F) {
  return F.kind() == MeasureKind::l1 || (F.kind() == MeasureKind::lp && F.params().at("p") == 1.0);
}

// Exact sup of g'x over the l1 cone section. With a = |g| and T the k largest
// entries, either a itself is in the cone (value ||g||) or the optimum is
// x = (a_T + lambda, (a_{T^c} - lambda)_+) with lambda >= 0 making the l1
// masses on T and T^c equal.
double l1_sup(const Eigen::Ref<const Eigen::VectorXd>& g, int k) {
  const Eigen::Index n = g.size();
  std::vector<double> a(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) a[i] = std::abs(g[i]);
  std::sort(a.begin(), a.end(), std::greater<>());
  const double on = std::accumulate(a.begin(), a.begin() + k, 0.0);
  const double off = std::accumulate(a.begin() + k, a.end(), 0.0);
  if (on >= off) return g.norm();
  const int rest = static_cast<int>(n) - k;
  double lambda = 0.0, prefix = 0.0;
  for (int j = 1; j <= rest; ++j) {
    prefix += a[k + j - 1];
    lambda = (prefix - on) / (k + j);
    const double next = j < rest ? a[k + j] : 0.0;
    if (lambda <= a[k + j - 1] && lambda >= next) break;
  }
  double dot = 0.0, nrm2 = 0.0;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    const double x = i < k ? a[i] + lambda : std::max(0.0, a[i] - lambda);
    dot += a[i] * x;
    nrm2 += x * x;
  }
  return dot / std::sqrt(nrm2);
}

// Per-draw inner solver; precomputes what does not depend on g.
class InnerSolver {
 public:
  InnerSolver(const CostFunction& J, int k) : F_(J.measure()), n_(static_cast<int>(J.dimension())), k_(k) {
    if (k < 1 || k > n_) throw std::invalid_argument("width needs 1 <= k <= n");
    if (!F_.homogeneous()) {
      for (int i = 0; i < 61; ++i) scales_.push_back(std::pow(10.0, -6.0 + 0.2 * i));
    } else {
      scales_.push_back(1.0);
    }
    if (k_ == n_ || is_l1(F_)) {
      how_ = InnerSearch::closed_form;
    } else if (n_ <= 3) {
      how_ = InnerSearch::discretization;
      build_grid();
    } else {
      how_ = InnerSearch::multistart;
    }
  }

  InnerSearch how() const { return how_; }

  double sup(const Eigen::Ref<const Eigen::VectorXd>& g) const {
    if (k_ == n_) return g.norm();
    switch (how_) {
      case InnerSearch::closed_form:
        return l1_sup(g, k_);
      case InnerSearch::discretization:
        return grid_.rows() ? (grid_ * g).maxCoeff() : 0.0;
      case InnerSearch::multistart:
        return search(g);
    }
    return 0.0;
  }

 private:
  bool member(const Eigen::VectorXd& x) const {
    for (double t : scales_)
      if (best_support(F_, t * x, k_).deficit() >= 0.0) return true;
    return false;
  }

  // Rows are the grid points of the sphere that lie in K.
  void build_grid() {
    std::vector<Eigen::VectorXd> pts;
    if (n_ == 2) {
      for (int i = 0; i < kGridPoints; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / kGridPoints;
        pts.push_back(Eigen::Vector2d(std::cos(phi), std::sin(phi)));
      }
    } else if (n_ == 3) {
      // Fibonacci lattice.
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < kGridPoints; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / kGridPoints;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        pts.push_back(Eigen::Vector3d(r * std::cos(golden * i), r * std::sin(golden * i), z));
      }
    } else {
      pts.push_back(Eigen::VectorXd::Ones(1));
    }
    std::vector<Eigen::VectorXd> in;
    for (auto& p : pts)
      if (member(p)) in.push_back(std::move(p));
    grid_.resize(static_cast<Eigen::Index>(in.size()), n_);
    for (std::size_t i = 0; i < in.size(); ++i) grid_.row(static_cast<Eigen::Index>(i)) = in[i].transpose();
  }

  // Feasible-point search: bisection along x(lambda) = sign(g)(|g| + lambda s)_+,
  // s = +1 on the top-k support and -1 off it, then random local moves.
  double search(const Eigen::Ref<const Eigen::VectorXd>& g) const {
    const Eigen::VectorXd gv = g;
    if (member(gv)) return g.norm();
    std::vector<int> idx(static_cast<std::size_t>(n_));
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + k_, idx.end(),
                      [&](int a, int b) { return std::abs(g[a]) > std::abs(g[b]); });
    std::vector<double> s(static_cast<std::size_t>(n_), -1.0);
    for (int i = 0; i < k_; ++i) s[idx[i]] = 1.0;
    auto x_of = [&](double lam) {
      Eigen::VectorXd x(n_);
      for (int i = 0; i < n_; ++i) {
        const double mag = std::max(0.0, std::abs(g[i]) + lam * s[i]);
        x[i] = (g[i] < 0.0 ? -1.0 : 1.0) * mag;
      }
      return Eigen::VectorXd(x / x.norm());
    };
    double lo = 0.0, hi = g.cwiseAbs().maxCoeff();
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (member(x_of(mid)))
        hi = mid;
      else
        lo = mid;
    }
    Eigen::VectorXd x = x_of(hi);
    double best = g.dot(x);
    Rng rng(0x51ed);
    double step = 0.1;
    for (int it = 0; it < 400 && step > 1e-6; ++it) {
      Eigen::VectorXd y = x + step * random_unit_vector(n_, rng);
      y.normalize();
      if (g.dot(y) > best && member(y)) {
        best = g.dot(y);
        x = y;
      } else if (it % 20 == 19) {
        step *= 0.5;
      }
    }
    return best;
  }

  const SparsenessMeasure& F_;
  int n_;
  int k_;
  std::vector<double> scales_;
  InnerSearch how_ = InnerSearch::closed_form;
  Eigen::MatrixXd grid_;
};

WidthEstimate run(const CostFunction& J, int k, double d, std::size_t draws, std::uint64_t seed, unsigned threads) {
  if (draws == 0) throw std::invalid_argument("width estimation needs draws >= 1");
  if (!(d >= 0.0)) throw std::invalid_argument("d must be non-negative");
  const int n = static_cast<int>(J.dimension());
  const InnerSolver inner(J, k);
  std::vector<double> value(draws), norm(draws);
  std::vector<char> violated(draws, 0);
  parallel_for(draws, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    const Eigen::VectorXd g = gaussian_vector(n, rng);
    const double s = inner.sup(g);
    norm[i] = g.norm();
    if (d > 0.0) {
      value[i] = extended_sup(s, norm[i], d);
      violated[i] = value[i] > s + d * norm[i] + 1e-12 * (1.0 + norm[i]);
    } else {
      value[i] = s;
    }
  });
  WidthEstimate w;
  w.samples = draws;
  w.inner_search = inner.how();
  w.is_lower_bound = inner.how() == InnerSearch::multistart;
  w.d = d;
  // Welford accumulation in draw order keeps the result thread-count independent.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double delta = value[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (value[i] - mean);
    w.mean_norm += norm[i];
    w.bound_violations += violated[i];
  }
  w.mean = mean;
  w.std_error = draws > 1 ? std::sqrt(m2 / static_cast<double>(draws - 1) / static_cast<double>(draws)) : 0.0;
  w.mean_norm /= static_cast<double>(draws);
  w.chi_mean = chi_mean(n);
  return w;
}

}  // namespace

double width_inner_sup(const CostFunction& J, int k, const Eigen::Ref<const Eigen::VectorXd>& g, InnerSearch* how) {
  if (g.size() != J.dimension()) throw std::invalid_argument("draw dimension does not match the cost function");
  const InnerSolver inner(J, k);
  if (how) *how = inner.how();
  return inner.sup(g);
}

double extended_sup(double sup_K, double g_norm, double d) {
  if (!(g_norm > 0.0)) return 0.0;
  if (d >= 1.0) return g_norm;
  const double alpha = std::acos(std::clamp(sup_K / g_norm, -1.0, 1.0));
  return g_norm * std::cos(std::max(0.0, alpha - std::asin(d)));
}

WidthEstimate width_mc(const CostFunction& J, int k, std::size_t draws, std::uint64_t seed, unsigned threads) {
  return run(J, k, 0.0, draws, seed, threads);
}

WidthEstimate width_extended(const CostFunction& J, int k, double d, std::size_t draws, std::uint64_t seed,
                             unsigned threads) {
  return run(J, k, d, draws, seed, threads);
}

double chi_mean(int n) {
  if (n < 1) throw std::invalid_argument("chi_mean needs n >= 1");
  return std::sqrt(2.0) * std::exp(std::lgamma((n + 1) / 2.0) - std::lgamma(n / 2.0));
}

double zeta(double n, double k) {
  if (!(k >= 1.0) || !(k <= n)) throw std::invalid_argument("zeta needs 1 <= k <= n");
  const double L = std::log(std::numbers::e * n / k);
  return std::exp(std::log(1.0 + 2.0 * L) / (4.0 * L) + 1.0 / (24.0 * k * k * L));
}

double rv_bound(double n, double k) {
  if (!(k >= 1.0) || !(k <= n)) throw std::invalid_argument("rv_bound needs 1 <= k <= n");
  return 2.0 * std::sqrt(k * (3.0 + 2.0 * std::log(n / k))) * zeta(n, k);
}

double gordon_bound(double w, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("gordon_bound needs m > 0");
  if (!(w < std::sqrt(m))) return 0.0;
  const double gap = m / std::sqrt(m + 1.0) - w;
  return std::clamp(1.0 - 2.5 * std::exp(-gap * gap / 18.0), 0.0, 1.0);
}

OmegaHatBound omega_hat_bound(double width, const std::string& width_source, int n, int m, double d) {
  if (n < 1 || m < 1 || m >= n) throw std::invalid_argument("omega_hat_bound needs 1 <= m < n");
  if (!(d >= 0.0)) throw std::invalid_argument("omega_hat_bound needs d >= 0");
  OmegaHatBound b;
  b.width = width;
  b.width_source = width_source;
  b.effective_width = width + d * std::sqrt(static_cast<double>(n));
  b.vacuous = !(b.effective_width < std::sqrt(static_cast<double>(m)));
  b.probability = b.vacuous ? 0.0 : gordon_bound(b.effective_width, m);
  return b;
}

OmegaHatBound omega_hat_bound_l1(int n, int m, int k, double d) {
  return omega_hat_bound(rv_bound(n, k), "rv_bound", n, m, d);
}

namespace {

double delta_term(double beta) {
  const double L = std::log(std::numbers::e * beta);
  return 2.0 * std::sqrt(3.0 + 2.0 * std::log(beta)) * std::exp(std::log(1.0 + 2.0 * L) / (4.0 * L));
}

void check_beta_gamma(double beta, double gamma) {
  if (!(gamma >= 1.0) || !(beta > gamma))
    throw std::invalid_argument("tradeoff needs beta > gamma >= 1");
}

}  // namespace

double tradeoff_delta(double beta, double gamma) {
  check_beta_gamma(beta, gamma);
  const double sg = std::sqrt(gamma), term = delta_term(beta);
  const double bracket = sg - term;
  if (std::abs(bracket) <= 1e-14 * sg) return 0.0;
  return bracket / std::sqrt(beta);
}

double delta_threshold(double beta) {
  if (!(beta > 1.0)) throw std::invalid_argument("delta_threshold needs beta > 1");
  const double t = delta_term(beta);
  return t * t;
}

TradeoffPoint tradeoff(double beta, double gamma, bool use_oracle_comparison, int k, double d_fraction) {
  check_beta_gamma(beta, gamma);
  if (k < 1) throw std::invalid_argument("tradeoff needs k >= 1");
  TradeoffPoint p;
  p.beta = beta;
  p.gamma = gamma;
  p.delta = tradeoff_delta(beta, gamma);
  if (p.delta > 0.0) p.C = 2.0 * (1.0 + p.delta) / (p.delta * (1.0 - std::sqrt(gamma / beta)));
  if (use_oracle_comparison) p.oracle_C = 1.0 / (1.0 - std::sqrt(1.0 / gamma));
  p.k = k;
  p.d = d_fraction * std::max(p.delta, 0.0);
  const int n = static_cast<int>(std::floor(beta * k));
  const int m = static_cast<int>(std::ceil(gamma * k));
  if (m < n) p.gordon_bound = omega_hat_bound_l1(n, m, k, p.d).probability;
  return p;
}

const char* to_string(InnerSearch s) {
  switch (s) {
    case InnerSearch::closed_form: return "closed_form";
    case InnerSearch::discretization: return "discretization";
    case InnerSearch::multistart: return "multistart";
  }
  return "?";
}

}  // namespace nsplab
