#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nsplab/measures.hpp"
#include "nsplab/subspaces.hpp"
#include "nsplab/tolerances.hpp"

namespace nsplab {

// Search controls shared by the certificate searches. Every search is a pure
// function of (inputs, options), including the seed.
struct SearchOptions {
  std::size_t budget = 200000;  // objective evaluations
  int starts = 32;              // random restarts for local ascent
  std::uint64_t seed = 1;
  // Cap on C(n, l-1) candidate vertex directions.
  std::size_t max_vertex_sets = 100000;
  // Log-spaced scale grid used for measures that are not homogeneous.
  double scale_min = 1e-6;
  double scale_max = 1e6;
  int scale_points = 61;
  // Angular grid on the unit circle of a 2-dimensional subspace.
  int circle_points = 720;
};

// J(z_T) and J(z_{T^c}) for the support T (|T| <= k) that maximizes
// J(z_T) - J(z_{T^c}). Since F >= 0 this is the k largest F(|z_i|), which
// covers every support of size <= k without enumerating them.
struct SupportSplit {
  double on = 0.0;
  double off = 0.0;
  IndexSet support;

  double deficit() const { return on - off; }
  // (J(z_T) - J(z_{T^c})) / J(z); sign matches the NSP deficit.
  double relative_deficit() const;
  // J(z_T) / J(z_{T^c}); +inf when z is supported inside T.
  double ratio() const;
};

SupportSplit best_support(const SparsenessMeasure& F, const Eigen::Ref<const Eigen::VectorXd>& z, int k);

enum class NscMethod { exact_1d, vertex_enum, sphere_enum, multistart };

struct NscReport {
  double theta = 0.0;  // may be +inf
  Eigen::VectorXd witness_z;
  IndexSet witness_T;
  NscMethod method = NscMethod::exact_1d;
  std::size_t evaluations = 0;
  bool is_lower_bound = false;
};

// Null space constant sup_{z in nu \ 0} max_{|T|<=k} J(z_T)/J(z_{T^c}).
// Exact for l = 1 with scale-free measures and for l1/l0 through vertex
// enumeration; otherwise a certified lower bound from multistart search (and
// over a scale grid when F is not homogeneous).
NscReport nsc(const Subspace& nu, const CostFunction& J, int k, const SearchOptions& opts = {});

enum class NspVerdict { holds_strict, fails, boundary };

struct NspResult {
  NspVerdict verdict = NspVerdict::holds_strict;
  // Largest relative deficit found; negative values are slack.
  double worst_relative_deficit = 0.0;
  Eigen::VectorXd witness_z;
  IndexSet witness_T;
  std::size_t evaluations = 0;
  bool is_lower_bound = false;
  NscReport nsc;
};

// Decides J(z_T) < J(z_{T^c}) for all z in nu \ 0, |T| <= k. `fails` when a
// deficit above the boundary band is found, `boundary` when the extremal
// relative deficit lies inside (-tol, tol).
NspResult nsp_check(const Subspace& nu, const CostFunction& J, int k, const SearchOptions& opts = {});

struct ErcResult {
  bool member = false;
  // 1 - theta for homogeneous measures, minus the worst relative deficit otherwise.
  double margin = 0.0;
  NspVerdict verdict = NspVerdict::holds_strict;
  NspResult detail;
};

ErcResult erc_member(const Subspace& nu, const CostFunction& J, int k, const SearchOptions& opts = {});

// ---------------------------------------------------------------------------
// Perturbed NSP probe.

enum class ProbeOutcome { violated, passed_at_resolution };

// Which robust set a pass at radius d is reported against. A pass means no
// z, n with ||n|| < d||z|| breaking the NSP was found, i.e. nu avoids K_d
// (the Omega-hat set). That set sits between the d-interior and the
// d/(1+d)-interior of Omega_J.
enum class RobustSetConvention { omega_hat, interior_lower };

struct Violation {
  Eigen::VectorXd z;
  Eigen::VectorXd n_vec;
  IndexSet T;
  double deficit = 0.0;  // J((z+n)_T) - J((z+n)_{T^c}) >= 0
};

struct RobustnessProbe {
  double d = 0.0;
  ProbeOutcome outcome = ProbeOutcome::passed_at_resolution;
  std::optional<Violation> violation;
  std::size_t search_budget = 0;
  std::size_t evaluations = 0;
  // Largest relative deficit of z + n seen during the search.
  double best_relative_deficit = -1.0;
  RobustSetConvention convention = RobustSetConvention::omega_hat;
  // d for omega_hat, d / (1 + d) for interior_lower.
  double reported_radius = 0.0;
};

// Searches for z in nu, ||n|| < d||z||, |T| <= k with
// J(z_T + n_T) >= J(z_{T^c} + n_{T^c}). A `violated` outcome is checked by
// direct evaluation and is a sound certificate; `passed_at_resolution` only
// says that nothing was found within the budget.
RobustnessProbe rrc_probe(const Subspace& nu, const CostFunction& J, int k, double d, std::size_t budget,
                          const SearchOptions& opts = {},
                          RobustSetConvention convention = RobustSetConvention::omega_hat);

// Re-checks a violation witness against nu, J, k, d by direct evaluation.
bool verify_violation(const Subspace& nu, const CostFunction& J, int k, double d, const Violation& v);

// C = 2(1 + d) / (d sigma_min); requires d > 0.
double robustness_constant(double d, double sigma_min);
// C = 2(1 - 2d) / (d sigma_max); requires 0 < d < 1/2.
double converse_constant(double d, double sigma_max);

// ---------------------------------------------------------------------------
// Closed form for the n = 3, l = 1, k = 1 example with F(t) = t + 1 - e^{-t}:
// the line spanned by x is in Omega iff 2 max|x_i| <= sum|x_i|, in the
// interior iff the inequality is strict.

enum class Ce1Class { interior, boundary, outside };

// (sum|x_i| - 2 max|x_i|) / sum|x_i|.
double ce1_margin(const Eigen::Ref<const Eigen::VectorXd>& x);
Ce1Class ce1_membership(const Subspace& nu, double band = kTol.ce1_band);
inline bool in_erc_set(Ce1Class c) { return c != Ce1Class::outside; }
inline bool in_rrc_set(Ce1Class c) { return c == Ce1Class::interior; }

// ---------------------------------------------------------------------------
// Region map for the planar family span{(1,0,a),(0,1,b)}: region A holds the
// (a, b) for which some x, y >= 0, (x, y) != 0 has F(x) + F(y) <= F(ax + by).

enum class Region : signed char { B = 0, A = 1, inconclusive = -1 };

struct RegionMapOptions {
  int angles = 64;
  int radii = 61;
  double radius_min = 1e-6;
  double radius_max = 1e6;
};

struct RegionMap {
  std::string measure;
  int rows = 0;  // b axis
  int cols = 0;  // a axis
  double a_max = 0.0;
  double b_max = 0.0;
  std::vector<Region> cells;  // row-major, cells[i * cols + j] at (a_j, b_i)
  // Grid points where A is not upward closed: (a, b) in A but a point above
  // or to the right of it is not.
  std::size_t upward_closure_violations = 0;
  std::size_t inconclusive = 0;
  // Grid rectangles whose upper-right corner is in A and lower-left in B.
  std::size_t boundary_cells = 0;

  double a(int j) const { return cols > 1 ? a_max * j / (cols - 1) : 0.0; }
  double b(int i) const { return rows > 1 ? b_max * i / (rows - 1) : 0.0; }
  Region at(int i, int j) const { return cells[static_cast<std::size_t>(i) * cols + j]; }
};

Region classify_region_point(const SparsenessMeasure& F, double a, double b, const RegionMapOptions& opts = {});

RegionMap region_boundary_map(const SparsenessMeasure& F, int rows, int cols, double a_max, double b_max,
                              const RegionMapOptions& opts = {}, unsigned threads = 1);

const char* to_string(NscMethod m);
const char* to_string(NspVerdict v);
const char* to_string(ProbeOutcome o);
const char* to_string(Ce1Class c);
const char* to_string(Region r);

}  // namespace nsplab
