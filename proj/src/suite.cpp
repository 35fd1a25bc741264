#include "nsplab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "nsplab/experiment.hpp"
#include "nsplab/measures.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/random.hpp"
#include "nsplab/solver.hpp"
#include "nsplab/subspaces.hpp"
#include "nsplab/width.hpp"

namespace nsplab {

namespace {

using hp = boost::multiprecision::cpp_dec_float_50;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

// ---------------------------------------------------------------------------

Outcome counterexample(const SuiteOptions&) {
  const Ce1Report r = verify_counterexample1({0.5, 0.1, 0.01, 0.001});
  bool ratios_ok = true;
  double min_deficit = INFINITY;
  for (const auto& row : r.rows) {
    min_deficit = std::min(min_deficit, row.deficit);
    ratios_ok = ratios_ok && row.adversarial_ratio > row.converse_ratio;
  }
  Outcome o;
  o.passed = r.erc_margin_ok && r.verdict == NspVerdict::holds_strict && r.all_found && min_deficit > 1e-12 &&
             ratios_ok;
  o.detail = fmt("min ERC margin %.3e on %d-point grid, margin(1)=%.10f, NSP %s, min violation deficit %.3e",
                 r.min_margin, r.grid_points, r.margin_at_1, to_string(r.verdict), min_deficit);
  return o;
}

Outcome closed_form_agreement(const SuiteOptions& opts) {
  const CostFunction J(builtin_measure("exp_ce1"), 3);
  std::size_t compared = 0, disagreements = 0, banded = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    Rng rng = make_rng(opts.seed ^ 0xce1ULL, i);
    const Subspace nu = sample_haar(3, 1, rng);
    const Ce1Class c = ce1_membership(nu, kTol.mc_boundary);
    if (c == Ce1Class::boundary) {
      ++banded;
      continue;
    }
    SearchOptions so;
    so.seed = derive_seed(opts.seed, i);
    const NspResult r = nsp_check(nu, J, 1, so);
    ++compared;
    const bool holds = r.verdict == NspVerdict::holds_strict;
    if (holds != (c == Ce1Class::interior)) ++disagreements;
  }
  return {disagreements == 0,
          fmt("%zu/%zu agree, %zu inside the boundary band", compared - disagreements, compared, banded)};
}

Outcome nsc_exactness(const SuiteOptions&) {
  const CostFunction J(builtin_measure("l1"), 3);
  const long gens[3][3] = {{1, 1, 1}, {1, 1, 2}, {1, 2, 4}};
  bool ok = true;
  std::string detail;
  for (const auto& g : gens) {
    // Exact ratio max_i |g_i| / (sum - max) as a reduced fraction.
    const long mx = *std::max_element(g, g + 3);
    const long num = mx, den = g[0] + g[1] + g[2] - mx;
    const long q = std::gcd(num, den);
    const Subspace nu = Subspace::from_generator(Eigen::Vector3d(g[0], g[1], g[2]));
    const NscReport r = nsc(nu, J, 1);
    const double exact = static_cast<double>(num) / static_cast<double>(den);
    const bool good = std::abs(r.theta - exact) <= 1e-12 && !r.is_lower_bound;
    ok = ok && good;
    detail += fmt("%s(%ld,%ld,%ld): %.17g vs %ld/%ld", detail.empty() ? "" : "; ", g[0], g[1], g[2], r.theta,
                  num / q, den / q);
  }
  return {ok, detail};
}

Outcome mc_equality(const SuiteOptions& opts) {
  ExperimentConfig cfg;
  cfg.n = 5;
  cfg.m = 3;
  cfg.k = 1;
  cfg.measure = "l1";
  cfg.trials = 2000;
  cfg.d_grid = {1e-3};
  cfg.seed = opts.seed;
  cfg.threads = opts.threads;
  const MonteCarloSummary s = mc_probability(cfg);
  const ProportionEstimate& r = s.p_rrc_at_d.front();
  const double gap = std::abs(s.p_erc.p - r.p);
  const double slack = s.p_erc.half_width() + r.half_width();
  Outcome o;
  o.passed = gap < slack && s.boundary_fraction < 0.01 && s.subset_violations == 0;
  o.detail = fmt("p_erc=%.4f [%.4f,%.4f], p_rrc(1e-3)=%.4f [%.4f,%.4f], |gap|=%.4f < %.4f, boundary %.4f, "
                 "subset violations %zu",
                 s.p_erc.p, s.p_erc.lo, s.p_erc.hi, r.p, r.lo, r.hi, gap, slack, s.boundary_fraction,
                 s.subset_violations);
  return o;
}

Outcome inclusion_rule(const SuiteOptions& opts) {
  const CostFunction J1(builtin_measure("l1"), 8);
  const CostFunction Jh(builtin_measure("lp", {{"p", 0.5}}), 8);
  std::size_t l1_pass = 0, violations = 0, inexact = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    Rng rng = make_rng(opts.seed ^ 0x1c1ULL, i);
    const Subspace nu = sample_haar(8, 1, rng);
    const NscReport a = nsc(nu, J1, 2);
    const NscReport b = nsc(nu, Jh, 2);
    inexact += a.is_lower_bound || b.is_lower_bound;
    if (a.theta < 1.0) {
      ++l1_pass;
      if (!(b.theta < 1.0)) ++violations;
    }
  }
  return {violations == 0 && inexact == 0,
          fmt("%zu samples with theta_l1 < 1, %zu without theta_l1/2 < 1", l1_pass, violations)};
}

// Independent re-evaluation with 50 significant digits.
hp hp_zeta(double n, double k) {
  const hp L = log(hp(boost::multiprecision::exp(hp(1))) * hp(n) / hp(k));
  return exp(log(1 + 2 * L) / (4 * L) + 1 / (24 * hp(k) * hp(k) * L));
}

hp hp_threshold(double beta) {
  const hp b(beta);
  const hp L = 1 + log(b);  // ln(e beta)
  return 4 * (3 + 2 * log(b)) * exp(log(1 + 2 * L) / (2 * L));
}

Outcome formula_fidelity(const SuiteOptions&) {
  const double z = zeta(1000, 10);
  const double z_hp = static_cast<double>(hp_zeta(1000, 10));
  const double t = delta_threshold(100);
  const hp t_hp = hp_threshold(100);
  const double t_hpd = static_cast<double>(t_hp);
  const bool sign_ok = tradeoff_delta(100, t_hpd * (1 - 1e-9)) < 0 && tradeoff_delta(100, t_hpd * (1 + 1e-9)) > 0;
  Outcome o;
  o.passed = std::abs(z - 1.1181) <= 1e-3 && std::abs(z - z_hp) <= 1e-12 && std::abs(t - 61.06) <= 0.1 &&
             std::abs(t - t_hpd) <= 1e-9 * t_hpd && sign_ok;
  o.detail = fmt("zeta(1000,10)=%.12f (high precision %.12f), threshold(100)=%.10f (high precision %.10f)", z, z_hp,
                 t, t_hpd);
  return o;
}

Outcome width_sanity(const SuiteOptions& opts) {
  bool ok = true;
  std::string detail;
  for (int n : {2, 4, 8}) {
    const WidthEstimate w = width_mc(CostFunction(builtin_measure("l1"), n), n, 10000, opts.seed, opts.threads);
    const double rel = std::abs(w.mean / w.chi_mean - 1.0);
    ok = ok && rel < 0.02;
    detail += fmt("n=%d w=%.4f chi=%.4f; ", n, w.mean, w.chi_mean);
  }
  struct Case {
    int n, k;
    double d;
  };
  const Case cases[] = {{6, 1, 0.1}, {6, 2, 0.05}, {8, 2, 0.2}, {4, 1, 0.5}, {3, 1, 0.1}};
  for (const Case& c : cases) {
    const CostFunction J(builtin_measure("l1"), c.n);
    const WidthEstimate a = width_mc(J, c.k, 2000, opts.seed, opts.threads);
    const WidthEstimate b = width_extended(J, c.k, c.d, 2000, opts.seed, opts.threads);
    const double diff = b.mean - a.mean;
    const double se = std::hypot(a.std_error, b.std_error);
    const bool good = diff >= -3 * se && diff <= c.d * std::sqrt(c.n) + 3 * se && b.bound_violations == 0;
    ok = ok && good;
    detail += fmt("(%d,%d,%.2g) diff=%.4f; ", c.n, c.k, c.d, diff);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome gordon_consistency(const SuiteOptions& opts) {
  const CostFunction J(builtin_measure("l1"), 6);
  std::size_t avoid = 0;
  const std::size_t N = 10000;
  for (std::size_t i = 0; i < N; ++i) {
    Rng rng = make_rng(opts.seed ^ 0x60d0ULL, i);
    const Subspace nu = sample_haar(6, 2, rng);
    avoid += nsp_check(nu, J, 1).verdict == NspVerdict::holds_strict;
  }
  const double frac = static_cast<double>(avoid) / N;
  const WidthEstimate w = width_mc(J, 1, 10000, opts.seed, opts.threads);
  const OmegaHatBound mc = omega_hat_bound(w.mean, "width_mc", 6, 4, 0.0);
  const OmegaHatBound rv = omega_hat_bound_l1(6, 4, 1, 0.0);
  const bool ok = (mc.vacuous || frac >= mc.probability) && (rv.vacuous || frac >= rv.probability);
  return {ok, fmt("Haar fraction %.4f; bound %.4f from width %.4f (%s); bound %.4f from rv width %.4f (%s)", frac,
                  mc.probability, mc.width, mc.vacuous ? "vacuous" : "active", rv.probability, rv.width,
                  rv.vacuous ? "vacuous" : "active")};
}

Outcome robustness_bound(const SuiteOptions& opts) {
  const double d = 0.2;
  int passing = 0, violated = 0, attempts = 0, excluded = 0;
  double worst_fraction = 0.0;     // max ratio / bound over passing instances
  double min_converse_gap = INFINITY;  // min ratio / converse over violated instances
  bool ok = true;
  for (; attempts < 2000 && (passing < 50 || violated < 50); ++attempts) {
    const int n = 6 + attempts % 3;
    const int m = n - 2;
    Rng rng = make_rng(opts.seed ^ 0x7b0ULL, static_cast<std::uint64_t>(attempts));
    const MeasurementMatrix A = MeasurementMatrix::gaussian(m, n, rng);
    const CostFunction J(builtin_measure("l1"), n);
    SearchOptions so;
    so.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(attempts));
    const RobustnessProbe p = rrc_probe(A.null_space(), J, 1, d, 20000, so);
    if (p.outcome == ProbeOutcome::passed_at_resolution) {
      if (passing >= 50) continue;
      ++passing;
      SolverOptions sol;
      sol.starts = 8;
      sol.seed = so.seed;
      const RobustnessSweep s = empirical_robustness(A, J, 1, 4, {1e-1, 1e-2, 1e-3}, so.seed, sol, opts.threads);
      const double bound = robustness_constant(d, A.sigma_min());
      for (std::size_t e = 0; e < s.epsilon.size(); ++e) {
        excluded += static_cast<int>(s.excluded[e]);
        worst_fraction = std::max(worst_fraction, s.max_ratio[e] / bound);
        ok = ok && s.max_ratio[e] <= bound;
      }
    } else {
      if (violated >= 50) continue;
      ++violated;
      const AdversarialPair pair = adversarial_pair(A, J, 1, d, *p.violation);
      min_converse_gap = std::min(min_converse_gap, pair.ratio / pair.converse_ratio);
      ok = ok && pair.ratio > pair.converse_ratio;
    }
  }
  ok = ok && passing == 50;
  return {ok, fmt("%d passing instances: max ratio/bound %.4f (%d non-converged excluded); %d violated "
                  "instances: min ratio/converse %.4f; %d instances drawn",
                  passing, worst_fraction, excluded, violated, min_converse_gap, attempts)};
}

Outcome perturbation_construction(const SuiteOptions& opts) {
  std::size_t failures = 0;
  double worst_residual = 0.0, worst_excess = -INFINITY;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < 10000; ++i) {
    Rng rng = make_rng(opts.seed ^ 0x9e7ULL, i);
    const Subspace nu = sample_haar(6, 3, rng);
    const Eigen::VectorXd z = nu.basis() * random_unit_vector(3, rng) * std::pow(10.0, 2.0 * u(rng) - 1.0);
    const Eigen::VectorXd n_vec = random_unit_vector(6, rng) * (u(rng) * 0.999 * z.norm());
    const Subspace nu2 = perturb_subspace(nu, z, n_vec);
    const double residual = nu2.membership_residual(z + n_vec);
    const double excess = grassmann_distance(nu, nu2) - n_vec.norm() / z.norm();
    worst_residual = std::max(worst_residual, residual);
    worst_excess = std::max(worst_excess, excess);
    failures += !(residual < 1e-10 && excess <= 1e-10);
  }
  return {failures == 0, fmt("%zu failures; max residual %.3e, max distance excess %.3e", failures, worst_residual,
                             worst_excess)};
}

Outcome region_map(const SuiteOptions& opts) {
  bool ok = true;
  std::string detail;
  {
    const RegionMap map = region_boundary_map(builtin_measure("l1"), 200, 200, 2.0, 2.0, {}, opts.threads);
    std::size_t mismatches = 0;
    for (int i = 0; i < map.rows; ++i)
      for (int j = 0; j < map.cols; ++j) {
        const Region expected = (map.a(j) >= 1.0 || map.b(i) >= 1.0) ? Region::A : Region::B;
        mismatches += map.at(i, j) != expected;
      }
    ok = ok && mismatches == 0;
    detail += fmt("l1: %zu cells off {a>=1 or b>=1}", mismatches);
  }
  for (const char* spec : {"l0", "lp(p=0.5)", "l1", "exp_ce1", "mcp_zap(alpha=2)", "scad"}) {
    const RegionMap map = region_boundary_map(parse_measure(spec), 200, 200, 2.0, 2.0, {}, opts.threads);
    ok = ok && map.upward_closure_violations == 0 && map.inconclusive == 0;
    detail += fmt("; %s: %zu closure violations, %zu inconclusive", spec, map.upward_closure_violations,
                  map.inconclusive);
  }
  return {ok, detail};
}

Outcome comparison_rule(const SuiteOptions& opts) {
  const double alpha = 2.0;
  SparsenessMeasure mcp = builtin_measure("mcp_zap", {{"alpha", alpha}});
  if (opts.corrupt_mcp) {
    const double a = -alpha;
    MeasureFlags flags;
    mcp = SparsenessMeasure::custom(
        "mcp_zap_corrupt", [a](double x) { return x < 1.0 / std::abs(a) ? 2.0 * a * x - a * a * x * x : 1.0; },
        flags);
  }
  const ComparisonReport r = compare_measures(mcp, builtin_measure("l1"), 20000);
  const bool limit_ok = r.limit_at_zero.kind == LimitKind::finite_positive &&
                        std::abs(r.limit_at_zero.value - 2.0 * alpha) <= 1e-6 * 2.0 * alpha;
  return {r.ratio_rule && r.limit_rule && limit_ok,
          fmt("%s vs l1: ratio rule %s, limit rule %s, limit at 0 = %.10g", r.f.c_str(), r.ratio_rule ? "yes" : "no",
              r.limit_rule ? "yes" : "no", r.limit_at_zero.value)};
}

struct Entry {
  const char* name;
  Outcome (*fn)(const SuiteOptions&);
  double time_limit;
};

const Entry kEntries[kCriterionCount] = {
    {"counterexample: ERC without RRC", counterexample, 1.0},
    {"closed-form Omega agreement", closed_form_agreement, 30.0},
    {"null space constant exactness", nsc_exactness, 0.0},
    {"ERC/RRC probability equality", mc_equality, 300.0},
    {"power-law inclusion rule", inclusion_rule, 0.0},
    {"formula fidelity", formula_fidelity, 0.0},
    {"width sanity", width_sanity, 0.0},
    {"escape-through-the-mesh consistency", gordon_consistency, 0.0},
    {"robustness bound and converse", robustness_bound, 600.0},
    {"perturbation construction", perturbation_construction, 0.0},
    {"region map", region_map, 0.0},
    {"MCP comparison rule", comparison_rule, 0.0},
};

}  // namespace

CriterionResult run_criterion(int id, const SuiteOptions& opts) {
  if (id < 1 || id > kCriterionCount) throw std::invalid_argument("unknown criterion " + std::to_string(id));
  const Entry& e = kEntries[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = e.name;
  r.time_limit = e.time_limit;
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = e.fn(opts);
  } catch (const std::exception& ex) {
    o.passed = false;
    o.detail = std::string("error: ") + ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = o.passed;
  r.detail = o.detail;
  if (r.time_limit > 0.0 && r.seconds > r.time_limit) {
    r.passed = false;
    r.detail += fmt(" [runtime %.2f s over the %.0f s limit]", r.seconds, r.time_limit);
  }
  return r;
}

std::vector<int> suite_criteria(const std::string& name) {
  if (name == "paper_checks") {
    std::vector<int> all(kCriterionCount);
    std::iota(all.begin(), all.end(), 1);
    return all;
  }
  if (name == "quick") return {1, 2, 3, 5, 6, 7, 10, 11, 12};
  throw std::invalid_argument("unknown suite '" + name + "' (paper_checks, quick)");
}

SuiteReport run_suite(const std::string& name, const SuiteOptions& opts,
                      void (*on_result)(const CriterionResult&)) {
  SuiteReport rep;
  rep.name = name;
  const std::vector<int> ids = suite_criteria(name);
  rep.passed = true;
  nlohmann::json list = nlohmann::json::array();
  for (int id : ids) {
    CriterionResult r = run_criterion(id, opts);
    if (on_result) on_result(r);
    rep.passed = rep.passed && r.passed;
    list.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    rep.results.push_back(std::move(r));
  }
  const std::string canon = "suite=" + name + "\nseed=" + std::to_string(opts.seed) +
                            "\ncorrupt_mcp=" + (opts.corrupt_mcp ? "1" : "0") + "\n";
  rep.bundle = {{"suite", name},
                {"seed", opts.seed},
                {"config_hash", hex64(fnv1a64(canon))},
                {"passed", rep.passed},
                {"criteria", list}};
  return rep;
}

}  // namespace nsplab
