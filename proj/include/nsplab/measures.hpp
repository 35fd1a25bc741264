#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nsplab {

using IndexSet = std::vector<int>;

enum class TriState { unknown, yes, no };

enum class MeasureKind { l0, lp, l1, exp_ce1, mcp_zap, scad, custom };

struct MeasureFlags {
  TriState non_decreasing = TriState::unknown;
  TriState subadditive = TriState::unknown;
  // Declared p with F(t x) = t^p F(x).
  std::optional<double> homogeneity_degree;
  // False for measures with jumps (l0); those are rejected by operations
  // that need continuity.
  bool continuous = true;
};

// A scalar penalty F : [0, inf) -> [0, inf) with F(0) = 0. Immutable after
// construction; safe to share between threads.
class SparsenessMeasure {
 public:
  using Fn = std::function<double(double)>;

  // A user-supplied measure. F(0) must be exactly 0. If no derivative is
  // given a central difference is used.
  static SparsenessMeasure custom(std::string name, Fn eval, MeasureFlags flags, Fn derivative = {});

  double operator()(double x) const {
    switch (kind_) {
      case MeasureKind::l0:
        return x > 0.0 ? 1.0 : 0.0;
      case MeasureKind::lp:
        return x > 0.0 ? std::pow(x, p_) : 0.0;
      case MeasureKind::l1:
        return x;
      case MeasureKind::exp_ce1:
        // t + 1 - exp(-t), written with expm1 so small t keeps full precision.
        return x - std::expm1(-x);
      case MeasureKind::mcp_zap:
        return x < 1.0 / alpha_ ? 2.0 * alpha_ * x - alpha_ * alpha_ * x * x : 1.0;
      case MeasureKind::scad:
        return scad(x);
      case MeasureKind::custom:
        return fn_(x);
    }
    return 0.0;
  }

  // Right derivative F'(x) for x >= 0 (may be +inf at 0 for lp, p < 1).
  double derivative(double x) const;

  MeasureKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  // Canonical `name(param=value,...)` string; round-trips through parse_measure.
  std::string spec() const;
  const MeasureFlags& flags() const { return flags_; }
  const std::map<std::string, double>& params() const { return params_; }

  bool homogeneous() const { return flags_.homogeneity_degree.has_value(); }

 private:
  friend SparsenessMeasure builtin_measure(std::string_view, const std::map<std::string, double>&);
  SparsenessMeasure() = default;

  double scad(double x) const {
    const double lam = lambda_, a = a_;
    if (x <= lam) return lam * x;
    if (x <= a * lam) return (2.0 * a * lam * x - x * x - lam * lam) / (2.0 * (a - 1.0));
    return lam * lam * (a + 1.0) / 2.0;
  }

  MeasureKind kind_ = MeasureKind::l1;
  std::string name_;
  MeasureFlags flags_;
  std::map<std::string, double> params_;
  double p_ = 1.0;
  double alpha_ = 1.0;
  double lambda_ = 1.0;
  double a_ = 3.7;
  Fn fn_;
  Fn dfn_;
};

// Builtins: l0, lp(p), l1, exp_ce1, mcp_zap(alpha), scad(lambda, a).
// Throws std::invalid_argument on unknown names or out-of-range parameters.
SparsenessMeasure builtin_measure(std::string_view name, const std::map<std::string, double>& params = {});

// Parses `lp(p=0.5)`, `mcp_zap(alpha=2)`, `l1`, ...
SparsenessMeasure parse_measure(std::string_view spec);

// J(x) = sum_k F(|x_k|) on R^n.
class CostFunction {
 public:
  CostFunction(SparsenessMeasure measure, Eigen::Index dimension);

  const SparsenessMeasure& measure() const { return measure_; }
  Eigen::Index dimension() const { return n_; }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // Sum over `support` only. Indices are zero-based.
  double restricted(const Eigen::Ref<const Eigen::VectorXd>& x, std::span<const int> support) const;

 private:
  void check_dim(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  SparsenessMeasure measure_;
  Eigen::Index n_;
};

double eval_cost(const CostFunction& J, const Eigen::Ref<const Eigen::VectorXd>& x,
                 std::optional<std::span<const int>> support = std::nullopt);

// ---------------------------------------------------------------------------
// Sampled property checks.

struct PairWitness {
  double x = 0.0;
  double y = 0.0;
  // Amount by which the property fails at (x, y); positive means violated.
  double excess = 0.0;
};

struct PropertyCheck {
  std::size_t tested = 0;
  std::size_t violations = 0;
  std::optional<PairWitness> worst;

  bool holds() const { return tested > 0 && violations == 0; }
};

struct PowerRatioCheck {
  double p = 1.0;
  PropertyCheck check;  // F(t)/t^p non-increasing
};

struct PropertyReport {
  std::string measure;
  std::size_t budget = 0;
  double domain_cap = 0.0;
  std::uint64_t seed = 0;
  bool inconclusive = false;
  PropertyCheck positive;        // F(x) > 0 for x > 0
  PropertyCheck subadditive;     // F(x + y) <= F(x) + F(y)
  PropertyCheck non_decreasing;  // x < y  =>  F(x) <= F(y)
  PropertyCheck linear_ratio;    // F(t)/t non-increasing
  std::vector<PowerRatioCheck> power_ratios;
  std::optional<PropertyCheck> homogeneity;  // only if a degree is declared
};

// Samples pairs in [0, domain_cap]^2 (half uniform, half log-uniform down to
// 1e-8) and counts violations at relative tolerance kTol.property. Zero
// violations are evidence only; the budget is recorded in the report.
PropertyReport check_measure_properties(const SparsenessMeasure& F, std::size_t sample_budget,
                                        double domain_cap = 1e3, const std::vector<double>& powers = {},
                                        std::uint64_t seed = 0x5eed);

// ---------------------------------------------------------------------------
// Comparison rules between two measures.

enum class LimitKind { finite_positive, zero, infinite, inconclusive };

struct LimitEstimate {
  LimitKind kind = LimitKind::inconclusive;
  double value = 0.0;      // extrapolated limit (meaningful for finite_positive)
  double log_slope = 0.0;  // d log(F(x)/x^p) / d log x at the extreme grid point
  bool overflow = false;
};

struct ComparisonReport {
  std::string f;
  std::string g;
  double p = 1.0;
  bool both_non_decreasing = false;
  PropertyCheck ratio_non_increasing;  // F/G non-increasing
  LimitEstimate limit_at_zero;         // lim_{x->0+} F(x)/x^p
  LimitEstimate limit_at_infinity;     // lim_{x->inf} F(x)/x^p
  // F, G non-decreasing and F/G non-increasing: Omega_G inside Omega_F.
  bool ratio_rule = false;
  // Same with G a power law x^p: Omega_lp inside Omega_F.
  bool power_rule = false;
  // A finite positive power limit at 0 or infinity: Omega_F inside the
  // closure of Omega_lp, so mu(Omega_F) <= mu(Omega_lp).
  bool limit_rule = false;
};

// p defaults to G's homogeneity degree when declared in (0, 1], otherwise 1.
ComparisonReport compare_measures(const SparsenessMeasure& F, const SparsenessMeasure& G, std::size_t sample_budget,
                                  double domain_cap = 1e3, std::optional<double> p = std::nullopt,
                                  std::uint64_t seed = 0x5eed);

// Extrapolated lim F(x)/x^p along x = 2^{-j} (toward 0) or x = 2^{j} (toward inf).
LimitEstimate power_limit(const SparsenessMeasure& F, double p, bool toward_zero);

const char* to_string(TriState s);
const char* to_string(LimitKind k);

}  // namespace nsplab
