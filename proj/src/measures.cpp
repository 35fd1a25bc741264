#include "nsplab/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nsplab/matrix_io.hpp"
#include "nsplab/random.hpp"
#include "nsplab/tolerances.hpp"

namespace nsplab {

namespace {

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params, std::initializer_list<const char*> allowed,
                    std::string_view name) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw std::invalid_argument("measure '" + std::string(name) + "' has no parameter '" + key + "'");
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

SparsenessMeasure SparsenessMeasure::custom(std::string name, Fn eval, MeasureFlags flags, Fn derivative) {
  if (!eval) throw std::invalid_argument("custom measure needs an evaluation function");
  if (eval(0.0) != 0.0) throw std::invalid_argument("custom measure '" + name + "' must satisfy F(0) = 0");
  SparsenessMeasure m;
  m.kind_ = MeasureKind::custom;
  m.name_ = std::move(name);
  m.flags_ = flags;
  m.fn_ = std::move(eval);
  m.dfn_ = std::move(derivative);
  return m;
}

double SparsenessMeasure::derivative(double x) const {
  switch (kind_) {
    case MeasureKind::l0:
      return 0.0;
    case MeasureKind::lp:
      if (x <= 0.0) return p_ < 1.0 ? std::numeric_limits<double>::infinity() : 1.0;
      return p_ * std::pow(x, p_ - 1.0);
    case MeasureKind::l1:
      return 1.0;
    case MeasureKind::exp_ce1:
      return 1.0 + std::exp(-x);
    case MeasureKind::mcp_zap:
      return x < 1.0 / alpha_ ? 2.0 * alpha_ - 2.0 * alpha_ * alpha_ * x : 0.0;
    case MeasureKind::scad:
      if (x <= lambda_) return lambda_;
      if (x <= a_ * lambda_) return (a_ * lambda_ - x) / (a_ - 1.0);
      return 0.0;
    case MeasureKind::custom: {
      if (dfn_) return dfn_(x);
      const double h = 1e-6 * std::max(1.0, x);
      if (x < h) return (fn_(x + h) - fn_(x)) / h;
      return (fn_(x + h) - fn_(x - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

std::string SparsenessMeasure::spec() const {
  if (params_.empty()) return name_;
  std::string out = name_ + "(";
  bool first = true;
  for (const auto& [key, value] : params_) {
    if (!first) out += ",";
    first = false;
    out += key + "=" + format_double(value);
  }
  return out + ")";
}

SparsenessMeasure builtin_measure(std::string_view name, const std::map<std::string, double>& params) {
  SparsenessMeasure m;
  m.name_ = std::string(name);
  m.flags_.non_decreasing = TriState::yes;
  m.flags_.subadditive = TriState::yes;
  if (name == "l0") {
    reject_unknown(params, {}, name);
    m.kind_ = MeasureKind::l0;
    m.flags_.homogeneity_degree = 0.0;
    m.flags_.continuous = false;
  } else if (name == "lp") {
    reject_unknown(params, {"p"}, name);
    const double p = param_or(params, "p", 1.0);
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("lp requires 0 < p <= 1");
    m.kind_ = MeasureKind::lp;
    m.p_ = p;
    m.params_["p"] = p;
    m.flags_.homogeneity_degree = p;
  } else if (name == "l1") {
    reject_unknown(params, {}, name);
    m.kind_ = MeasureKind::l1;
    m.flags_.homogeneity_degree = 1.0;
  } else if (name == "exp_ce1") {
    reject_unknown(params, {}, name);
    m.kind_ = MeasureKind::exp_ce1;
  } else if (name == "mcp_zap") {
    reject_unknown(params, {"alpha"}, name);
    const double alpha = param_or(params, "alpha", 1.0);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("mcp_zap requires alpha > 0");
    m.kind_ = MeasureKind::mcp_zap;
    m.alpha_ = alpha;
    m.params_["alpha"] = alpha;
  } else if (name == "scad") {
    reject_unknown(params, {"lambda", "a"}, name);
    const double lambda = param_or(params, "lambda", 1.0);
    const double a = param_or(params, "a", 3.7);
    if (!(lambda > 0.0) || !(a > 2.0)) throw std::invalid_argument("scad requires lambda > 0 and a > 2");
    m.kind_ = MeasureKind::scad;
    m.lambda_ = lambda;
    m.a_ = a;
    m.params_["lambda"] = lambda;
    m.params_["a"] = a;
  } else {
    throw std::invalid_argument("unknown measure '" + std::string(name) + "'");
  }
  return m;
}

SparsenessMeasure parse_measure(std::string_view spec) {
  const std::string s = trim(spec);
  const auto open = s.find('(');
  if (open == std::string::npos) return builtin_measure(s);
  if (s.back() != ')') throw std::invalid_argument("malformed measure spec '" + s + "'");
  const std::string name = trim(std::string_view(s).substr(0, open));
  const std::string body = s.substr(open + 1, s.size() - open - 2);
  std::map<std::string, double> params;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + item + "'");
    const std::string key = trim(std::string_view(item).substr(0, eq));
    const std::string value = trim(std::string_view(item).substr(eq + 1));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty())
      throw std::invalid_argument("bad numeric value '" + value + "' for parameter '" + key + "'");
    params[key] = v;
  }
  return builtin_measure(name, params);
}

CostFunction::CostFunction(SparsenessMeasure measure, Eigen::Index dimension)
    : measure_(std::move(measure)), n_(dimension) {
  if (dimension < 1) throw std::invalid_argument("cost function dimension must be positive");
}

void CostFunction::check_dim(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != n_)
    throw std::invalid_argument("dimension mismatch: cost function on R^" + std::to_string(n_) + ", vector of size " +
                                std::to_string(x.size()));
}

double CostFunction::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_dim(x);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n_; ++i) sum += measure_(std::abs(x[i]));
  return sum;
}

double CostFunction::restricted(const Eigen::Ref<const Eigen::VectorXd>& x, std::span<const int> support) const {
  check_dim(x);
  double sum = 0.0;
  for (int i : support) {
    if (i < 0 || i >= n_) throw std::out_of_range("support index " + std::to_string(i) + " out of range");
    sum += measure_(std::abs(x[i]));
  }
  return sum;
}

double eval_cost(const CostFunction& J, const Eigen::Ref<const Eigen::VectorXd>& x,
                 std::optional<std::span<const int>> support) {
  return support ? J.restricted(x, *support) : J(x);
}

// ---------------------------------------------------------------------------

namespace {

void record(PropertyCheck& check, double a, double b, double excess, double scale) {
  ++check.tested;
  if (excess > kTol.property * scale + 1e-300) {
    ++check.violations;
    if (!check.worst || excess > check.worst->excess) check.worst = PairWitness{a, b, excess};
  }
}

}  // namespace

PropertyReport check_measure_properties(const SparsenessMeasure& F, std::size_t sample_budget, double domain_cap,
                                        const std::vector<double>& powers, std::uint64_t seed) {
  PropertyReport report;
  report.measure = F.spec();
  report.budget = sample_budget;
  report.domain_cap = domain_cap;
  report.seed = seed;
  for (double p : powers) report.power_ratios.push_back({p, {}});
  if (F.homogeneous()) report.homogeneity = PropertyCheck{};
  if (sample_budget == 0 || !(domain_cap > 0.0)) {
    report.inconclusive = true;
    return report;
  }

  Rng rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(1e-8), log_hi = std::log(domain_cap);
  auto draw = [&](bool log_scale) {
    if (log_scale && domain_cap > 1e-8) return std::exp(log_lo + (log_hi - log_lo) * unit(rng));
    return domain_cap * unit(rng);
  };

  for (std::size_t i = 0; i < sample_budget; ++i) {
    const bool log_scale = (i % 2) == 1;
    const double x = draw(log_scale), y = draw(log_scale);
    const double fx = F(x), fy = F(y);

    if (x > 0.0) record(report.positive, x, x, fx > 0.0 ? -1.0 : 1.0, 0.0);

    record(report.subadditive, x, y, F(x + y) - fx - fy, fx + fy);

    const double lo = std::min(x, y), hi = std::max(x, y);
    const double flo = F(lo), fhi = F(hi);
    if (lo < hi) {
      record(report.non_decreasing, lo, hi, flo - fhi, std::abs(fhi));
      if (lo > 0.0) {
        const double rlo = flo / lo, rhi = fhi / hi;
        record(report.linear_ratio, lo, hi, rhi - rlo, std::abs(rlo));
        for (auto& pr : report.power_ratios) {
          const double qlo = flo / std::pow(lo, pr.p), qhi = fhi / std::pow(hi, pr.p);
          record(pr.check, lo, hi, qhi - qlo, std::abs(qlo));
        }
      }
    }

    if (report.homogeneity && x > 0.0) {
      const double t = std::exp(std::log(1e-2) + std::log(1e4) * unit(rng));
      const double deg = *F.flags().homogeneity_degree;
      const double lhs = F(t * x), rhs = std::pow(t, deg) * fx;
      // Homogeneity uses its own, tighter relative tolerance.
      ++report.homogeneity->tested;
      const double excess = std::abs(lhs - rhs) - 1e-12 * std::abs(lhs);
      if (excess > 0.0) {
        ++report.homogeneity->violations;
        if (!report.homogeneity->worst || excess > report.homogeneity->worst->excess)
          report.homogeneity->worst = PairWitness{t, x, excess};
      }
    }
  }
  return report;
}

LimitEstimate power_limit(const SparsenessMeasure& F, double p, bool toward_zero) {
  // x_j = 2^{-j} (or 2^{j}) for j = 0..26; 2^{-26} ~ 1.5e-8.
  constexpr int kSteps = 26;
  std::vector<double> r;
  r.reserve(kSteps + 1);
  LimitEstimate est;
  for (int j = 0; j <= kSteps; ++j) {
    const double x = std::ldexp(1.0, toward_zero ? -j : j);
    const double v = F(x) / std::pow(x, p);
    if (!std::isfinite(v)) {
      est.overflow = true;
      est.kind = LimitKind::inconclusive;
      return est;
    }
    r.push_back(v);
  }
  const double last = r[kSteps], prev = r[kSteps - 1], prev2 = r[kSteps - 2];
  if (last <= 0.0 || prev <= 0.0) {
    est.kind = (last == 0.0 && prev == 0.0) ? LimitKind::zero : LimitKind::inconclusive;
    return est;
  }
  // Slope of log r against log x over the last two doublings.
  const double step = toward_zero ? -std::log(2.0) : std::log(2.0);
  const double s1 = (std::log(last) - std::log(prev)) / step;
  const double s0 = (std::log(prev) - std::log(prev2)) / step;
  est.log_slope = s1;
  if (std::abs(s1) <= 1e-5) {
    // Remainder is linear in x (toward 0) or in 1/x (toward inf); one
    // Richardson step cancels it in both cases.
    est.value = 2.0 * last - prev;
    est.kind = est.value > 0.0 ? LimitKind::finite_positive : LimitKind::zero;
    return est;
  }
  const bool consistent = (s0 > 0.0) == (s1 > 0.0) && std::abs(s1) >= 1e-2 && std::abs(s0) >= 1e-2;
  if (!consistent) return est;
  // r ~ x^s: toward 0, s > 0 sends r to 0; toward inf, s < 0 does.
  const bool vanishes = toward_zero ? s1 > 0.0 : s1 < 0.0;
  est.kind = vanishes ? LimitKind::zero : LimitKind::infinite;
  est.value = vanishes ? 0.0 : std::numeric_limits<double>::infinity();
  return est;
}

ComparisonReport compare_measures(const SparsenessMeasure& F, const SparsenessMeasure& G, std::size_t sample_budget,
                                  double domain_cap, std::optional<double> p, std::uint64_t seed) {
  ComparisonReport rep;
  rep.f = F.spec();
  rep.g = G.spec();
  if (p) {
    rep.p = *p;
  } else if (G.homogeneous() && *G.flags().homogeneity_degree > 0.0 && *G.flags().homogeneity_degree <= 1.0) {
    rep.p = *G.flags().homogeneity_degree;
  }

  const PropertyReport pf = check_measure_properties(F, sample_budget, domain_cap, {}, seed);
  const PropertyReport pg = check_measure_properties(G, sample_budget, domain_cap, {}, seed + 1);
  rep.both_non_decreasing = pf.non_decreasing.holds() && pg.non_decreasing.holds();

  Rng rng = make_rng(seed, 7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(1e-8), log_hi = std::log(domain_cap);
  for (std::size_t i = 0; i < sample_budget; ++i) {
    double x, y;
    if (i % 2 == 0) {
      x = domain_cap * unit(rng);
      y = domain_cap * unit(rng);
    } else {
      x = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
      y = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
    }
    const double lo = std::min(x, y), hi = std::max(x, y);
    if (!(lo > 0.0) || lo == hi) continue;
    const double glo = G(lo), ghi = G(hi);
    if (glo <= 0.0 || ghi <= 0.0) continue;
    const double rlo = F(lo) / glo, rhi = F(hi) / ghi;
    record(rep.ratio_non_increasing, lo, hi, rhi - rlo, std::abs(rlo));
  }

  rep.limit_at_zero = power_limit(F, rep.p, true);
  rep.limit_at_infinity = power_limit(F, rep.p, false);

  rep.ratio_rule = rep.both_non_decreasing && rep.ratio_non_increasing.holds();
  const bool g_is_power = G.kind() == MeasureKind::l1 || G.kind() == MeasureKind::lp;
  rep.power_rule = rep.ratio_rule && g_is_power && std::abs(*G.flags().homogeneity_degree - rep.p) < 1e-15;
  rep.limit_rule = rep.limit_at_zero.kind == LimitKind::finite_positive ||
                   rep.limit_at_infinity.kind == LimitKind::finite_positive;
  return rep;
}

const char* to_string(TriState s) {
  switch (s) {
    case TriState::yes:
      return "yes";
    case TriState::no:
      return "no";
    case TriState::unknown:
      break;
  }
  return "unknown";
}

const char* to_string(LimitKind k) {
  switch (k) {
    case LimitKind::finite_positive:
      return "finite_positive";
    case LimitKind::zero:
      return "zero";
    case LimitKind::infinite:
      return "infinite";
    case LimitKind::inconclusive:
      break;
  }
  return "inconclusive";
}

}  // namespace nsplab
