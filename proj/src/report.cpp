#include "nsplab/report.hpp"

#include <cmath>

#include "nsplab/matrix_io.hpp"

namespace nsplab {

using nlohmann::json;

json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

namespace {

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_number(v[i]));
  return out;
}

json check(const PropertyCheck& c) {
  json j{{"tested", c.tested}, {"violations", c.violations}, {"holds", c.holds()}};
  if (c.worst) j["worst"] = {{"x", json_number(c.worst->x)}, {"y", json_number(c.worst->y)},
                             {"excess", json_number(c.worst->excess)}};
  return j;
}

json limit(const LimitEstimate& l) {
  return {{"kind", to_string(l.kind)}, {"value", json_number(l.value)}, {"log_slope", json_number(l.log_slope)},
          {"overflow", l.overflow}};
}

}  // namespace

json to_json(const PropertyReport& r) {
  json j{{"measure", r.measure},
         {"budget", r.budget},
         {"domain_cap", json_number(r.domain_cap)},
         {"seed", r.seed},
         {"inconclusive", r.inconclusive},
         {"positive", check(r.positive)},
         {"subadditive", check(r.subadditive)},
         {"non_decreasing", check(r.non_decreasing)},
         {"linear_ratio_non_increasing", check(r.linear_ratio)}};
  json pr = json::array();
  for (const auto& p : r.power_ratios) pr.push_back({{"p", json_number(p.p)}, {"check", check(p.check)}});
  j["power_ratios"] = pr;
  if (r.homogeneity) j["homogeneity"] = check(*r.homogeneity);
  return j;
}

json to_json(const ComparisonReport& r) {
  return {{"f", r.f},
          {"g", r.g},
          {"p", json_number(r.p)},
          {"both_non_decreasing", r.both_non_decreasing},
          {"ratio_non_increasing", check(r.ratio_non_increasing)},
          {"limit_at_zero", limit(r.limit_at_zero)},
          {"limit_at_infinity", limit(r.limit_at_infinity)},
          {"ratio_rule", r.ratio_rule},
          {"power_rule", r.power_rule},
          {"limit_rule", r.limit_rule}};
}

json to_json(const NscReport& r) {
  return {{"theta", json_number(r.theta)},
          {"witness_z", vec(r.witness_z)},
          {"witness_T", r.witness_T},
          {"method", to_string(r.method)},
          {"evaluations", r.evaluations},
          {"is_lower_bound", r.is_lower_bound}};
}

json to_json(const NspResult& r) {
  return {{"verdict", to_string(r.verdict)},
          {"worst_relative_deficit", json_number(r.worst_relative_deficit)},
          {"witness_z", vec(r.witness_z)},
          {"witness_T", r.witness_T},
          {"evaluations", r.evaluations},
          {"is_lower_bound", r.is_lower_bound},
          {"nsc", to_json(r.nsc)}};
}

json to_json(const ErcResult& r) {
  return {{"member", r.member}, {"margin", json_number(r.margin)}, {"verdict", to_string(r.verdict)},
          {"detail", to_json(r.detail)}};
}

json to_json(const RobustnessProbe& r) {
  json j{{"d", json_number(r.d)},
         {"outcome", to_string(r.outcome)},
         {"search_budget", r.search_budget},
         {"evaluations", r.evaluations},
         {"best_relative_deficit", json_number(r.best_relative_deficit)},
         {"convention", r.convention == RobustSetConvention::omega_hat ? "omega_hat" : "interior_lower"},
         {"reported_radius", json_number(r.reported_radius)}};
  if (r.violation) {
    j["violation"] = {{"z", vec(r.violation->z)},
                      {"n_vec", vec(r.violation->n_vec)},
                      {"T", r.violation->T},
                      {"deficit", json_number(r.violation->deficit)}};
  } else {
    j["violation"] = nullptr;
  }
  return j;
}

json to_json(const RegionMap& r) {
  json rows = json::array();
  for (int i = 0; i < r.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < r.cols; ++j) row.push_back(static_cast<int>(r.at(i, j)));
    rows.push_back(row);
  }
  return {{"measure", r.measure},
          {"rows", r.rows},
          {"cols", r.cols},
          {"a_max", json_number(r.a_max)},
          {"b_max", json_number(r.b_max)},
          {"upward_closure_violations", r.upward_closure_violations},
          {"inconclusive", r.inconclusive},
          {"boundary_cells", r.boundary_cells},
          {"cells", rows}};
}

json to_json(const SolveResult& r) {
  return {{"x_hat", vec(r.x_hat)},
          {"cost", json_number(r.cost)},
          {"residual", json_number(r.residual)},
          {"method", to_string(r.method)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"globally_optimal", r.globally_optimal}};
}

json to_json(const TrialRecord& r) {
  return {{"x_true", vec(r.x_true)},
          {"x_hat", vec(r.x_hat)},
          {"error", json_number(r.error)},
          {"epsilon", json_number(r.epsilon)},
          {"cost_gap", json_number(r.cost_gap)},
          {"residual", json_number(r.residual)},
          {"method", to_string(r.method)},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

json to_json(const AdversarialPair& r) {
  return {{"x_bar", vec(r.x_bar)},
          {"x_hat", vec(r.x_hat)},
          {"v", vec(r.v)},
          {"y", vec(r.y)},
          {"epsilon", json_number(r.epsilon)},
          {"error", json_number(r.error)},
          {"ratio", json_number(r.ratio)},
          {"converse_ratio", json_number(r.converse_ratio)},
          {"cost_bar", json_number(r.cost_bar)},
          {"cost_hat", json_number(r.cost_hat)}};
}

json to_json(const RobustnessSweep& r) {
  json rows = json::array();
  for (std::size_t i = 0; i < r.epsilon.size(); ++i)
    rows.push_back({{"epsilon", json_number(r.epsilon[i])},
                    {"max_ratio", json_number(r.max_ratio[i])},
                    {"excluded", r.excluded[i]},
                    {"worst", to_json(r.worst[i])}});
  return {{"trials", r.trials}, {"sweep", rows}};
}

json to_json(const WidthEstimate& r) {
  return {{"mean", json_number(r.mean)},
          {"std_error", json_number(r.std_error)},
          {"samples", r.samples},
          {"inner_search", to_string(r.inner_search)},
          {"is_lower_bound", r.is_lower_bound},
          {"mean_norm", json_number(r.mean_norm)},
          {"chi_mean", json_number(r.chi_mean)},
          {"bound_violations", r.bound_violations},
          {"d", json_number(r.d)}};
}

json to_json(const OmegaHatBound& r) {
  return {{"probability", json_number(r.probability)},
          {"width", json_number(r.width)},
          {"effective_width", json_number(r.effective_width)},
          {"width_source", r.width_source},
          {"vacuous", r.vacuous}};
}

json to_json(const TradeoffPoint& r) {
  return {{"beta", json_number(r.beta)},
          {"gamma", json_number(r.gamma)},
          {"delta", json_number(r.delta)},
          {"C", r.C ? json_number(*r.C) : json(nullptr)},
          {"oracle_C", r.oracle_C ? json_number(*r.oracle_C) : json(nullptr)},
          {"gordon_bound", json_number(r.gordon_bound)},
          {"k", r.k},
          {"d", json_number(r.d)}};
}

json to_json(const ProportionEstimate& r) {
  return {{"successes", r.successes}, {"trials", r.trials}, {"p", json_number(r.p)},
          {"ci_low", json_number(r.lo)}, {"ci_high", json_number(r.hi)}};
}

json to_json(const MonteCarloSummary& r) {
  json per_d = json::array();
  for (std::size_t i = 0; i < r.d_grid.size(); ++i)
    per_d.push_back({{"d", json_number(r.d_grid[i])}, {"p_rrc", to_json(r.p_rrc_at_d[i])}});
  json j{{"trials", r.trials},
         {"p_erc", to_json(r.p_erc)},
         {"p_rrc_at_d", per_d},
         {"boundary_count", r.boundary_count},
         {"boundary_fraction", json_number(r.boundary_fraction)},
         {"subset_violations", r.subset_violations},
         {"config_hash", r.config_hash}};
  if (r.ce1_disagreements) {
    j["ce1_disagreements"] = *r.ce1_disagreements;
    j["ce1_compared"] = r.ce1_compared;
  }
  return j;
}

json to_json(const Ce1Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"d", json_number(row.d)},
                    {"t", json_number(row.t)},
                    {"deficit", json_number(row.deficit)},
                    {"found", row.found},
                    {"epsilon", json_number(row.epsilon)},
                    {"adversarial_ratio", json_number(row.adversarial_ratio)},
                    {"converse_ratio", json_number(row.converse_ratio)}});
  return {{"grid_points", r.grid_points},
          {"min_margin", json_number(r.min_margin)},
          {"max_margin_error", json_number(r.max_margin_error)},
          {"margin_at_1", json_number(r.margin_at_1)},
          {"erc_margin_ok", r.erc_margin_ok},
          {"nsp_verdict", to_string(r.verdict)},
          {"violations", rows},
          {"all_found", r.all_found}};
}

}  // namespace nsplab
