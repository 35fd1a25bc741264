#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "nsplab/measures.hpp"

namespace nsplab {

// How the per-draw supremum over K was computed.
//   closed_form:     l1, exact (top-k support plus a one-parameter KKT solve)
//   discretization:  n <= 3, maximum over a fixed grid of ~1e5 sphere points
//   multistart:      general F, n > 3; a feasible point, so a lower bound
enum class InnerSearch { closed_form, discretization, multistart };

struct WidthEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  InnerSearch inner_search = InnerSearch::closed_form;
  bool is_lower_bound = false;
  // Sample mean of ||g|| over the same draws, and its exact value.
  double mean_norm = 0.0;
  double chi_mean = 0.0;
  // Draws where sup_{K_d} g'x > d||g|| + sup_K g'x + 1e-12 (width_extended only).
  std::size_t bound_violations = 0;
  double d = 0.0;
};

// sup over K(n, k) = {x in S^{n-1} : J(t x_T) >= J(t x_{T^c}) for some t, |T| <= k}
// of g'x for one draw g.
double width_inner_sup(const CostFunction& J, int k, const Eigen::Ref<const Eigen::VectorXd>& g,
                       InnerSearch* how = nullptr);

// sup over K_d given s = sup over K: the points of the sphere within angle
// arcsin(d) of K, so the value is ||g|| cos(max(0, acos(s/||g||) - arcsin d)).
double extended_sup(double sup_K, double g_norm, double d);

WidthEstimate width_mc(const CostFunction& J, int k, std::size_t draws, std::uint64_t seed, unsigned threads = 1);
WidthEstimate width_extended(const CostFunction& J, int k, double d, std::size_t draws, std::uint64_t seed,
                             unsigned threads = 1);

// E||g|| for g ~ N(0, I_n).
double chi_mean(int n);

// zeta(n,k) = exp(ln(1 + 2 ln(en/k)) / (4 ln(en/k)) + 1 / (24 k^2 ln(en/k))).
double zeta(double n, double k);
// 2 sqrt(k (3 + 2 ln(n/k))) zeta(n, k); upper bound on the l1 width of K(n, k).
double rv_bound(double n, double k);

// max(0, 1 - 2.5 exp(-(m/sqrt(m+1) - w)^2 / 18)), and 0 when w >= sqrt(m).
double gordon_bound(double w, double m);

struct OmegaHatBound {
  double probability = 0.0;
  double width = 0.0;
  double effective_width = 0.0;  // width + d sqrt(n)
  std::string width_source;
  bool vacuous = false;  // effective_width >= sqrt(m)
};

// Lower bound on the Haar measure of the subspaces avoiding K_d.
OmegaHatBound omega_hat_bound(double width, const std::string& width_source, int n, int m, double d);
// l1 with the width taken from rv_bound.
OmegaHatBound omega_hat_bound_l1(int n, int m, int k, double d);

// delta(beta, gamma) = (sqrt(gamma) - 2 sqrt(3 + 2 ln beta) exp(ln(1 + 2 ln(e beta)) / (4 ln(e beta)))) / sqrt(beta).
// Snapped to 0 when the bracket vanishes to 1e-14 relative.
double tradeoff_delta(double beta, double gamma);
// The gamma at which delta(beta, .) changes sign.
double delta_threshold(double beta);

struct TradeoffPoint {
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::optional<double> C;         // 2(1 + delta) / (delta (1 - sqrt(gamma / beta))), iff delta > 0
  std::optional<double> oracle_C;  // 1 / (1 - sqrt(1 / gamma))
  // Escape probability at sparsity k, n = floor(beta k), m = ceil(gamma k),
  // width rv_bound(n, k) + d sqrt(n) with d = d_fraction * max(delta, 0).
  double gordon_bound = 0.0;
  int k = 0;
  double d = 0.0;
};

TradeoffPoint tradeoff(double beta, double gamma, bool use_oracle_comparison, int k = 1000, double d_fraction = 0.5);

const char* to_string(InnerSearch s);

}  // namespace nsplab
