#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "nsplab/experiment.hpp"
#include "nsplab/report.hpp"
#include "nsplab/suite.hpp"

using namespace nsplab;

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("Wilson interval") {
  const double z = 1.959963984540054;
  const ProportionEstimate e0 = wilson(0, 10);
  CHECK(e0.lo == 0.0);
  CHECK(e0.hi == doctest::Approx(z * z / (10 + z * z)).epsilon(1e-14));
  const ProportionEstimate e = wilson(30, 100);
  CHECK(e.p == 0.3);
  // Centre (p + z^2/2n)/(1 + z^2/n).
  CHECK(0.5 * (e.lo + e.hi) == doctest::Approx((0.3 + z * z / 200) / (1 + z * z / 100)).epsilon(1e-14));
  CHECK(e.lo < 0.3);
  CHECK(e.hi > 0.3);
}

TEST_CASE("configuration parsing, validation and hashing") {
  std::istringstream in("# comment\n n = 6\nm=4\n\nd_grid = 0.1, 0.01\nmeasure = lp(p=0.50)\nseed=9 # trailing\n");
  ExperimentConfig c;
  for (const auto& [k, v] : read_key_values(in)) c.set(k, v);
  CHECK(c.n == 6);
  CHECK(c.m == 4);
  CHECK(c.d_grid.size() == 2);
  CHECK(c.measure == "lp(p=0.5)");
  CHECK(c.seed == 9);
  c.validate();
  ExperimentConfig d = c;
  d.threads = 8;
  d.output = "elsewhere.csv";
  CHECK(d.hash() == c.hash());
  d.seed = 10;
  CHECK(d.hash() != c.hash());
  CHECK_THROWS_AS(c.set("bogus", "1"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("n", "6.5"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("matrix_source", "magic"), std::invalid_argument);
  ExperimentConfig bad;
  bad.m = bad.n;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ExperimentConfig{};
  bad.d_grid = {0.1, -1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ExperimentConfig{};
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("Monte Carlo: k = 0, subset relation, determinism") {
  ExperimentConfig c;
  c.k = 0;
  c.trials = 40;
  const MonteCarloSummary s0 = mc_probability(c);
  CHECK(s0.p_erc.p == 1.0);

  c.k = 1;
  c.trials = 300;
  c.d_grid = {1e-3, 0.05, 0.3};
  const MonteCarloSummary s = mc_probability(c);
  CHECK(s.subset_violations == 0);
  for (const auto& r : s.p_rrc_at_d) CHECK(r.successes <= s.p_erc.successes);
  // Larger radii can only lose passes.
  CHECK(s.p_rrc_at_d[2].successes <= s.p_rrc_at_d[1].successes);
  c.threads = 3;
  const MonteCarloSummary t = mc_probability(c);
  CHECK(to_json(t).dump() == to_json(s).dump());

  c.matrix_source = MatrixSource::haar_nullspace;
  CHECK(mc_probability(c).subset_violations == 0);
}

TEST_CASE("Monte Carlo with the exponential measure matches the closed form trial by trial") {
  ExperimentConfig c;
  c.n = 3;
  c.m = 2;
  c.k = 1;
  c.measure = "exp_ce1";
  c.trials = 400;
  const MonteCarloSummary s = mc_probability(c);
  REQUIRE(s.ce1_disagreements.has_value());
  CHECK(*s.ce1_disagreements == 0);
  CHECK(s.ce1_compared + s.boundary_count >= 400);
}

TEST_CASE("counterexample verification") {
  const Ce1Report r = verify_counterexample1({0.1, 0.01});
  CHECK(r.erc_margin_ok);
  CHECK(r.margin_at_1 == doctest::Approx(std::pow(1 - std::exp(-1.0), 2)).epsilon(1e-14));
  CHECK(r.margin_at_1 == doctest::Approx(0.39958).epsilon(1e-5));
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].found);
  CHECK(r.rows[0].t <= 1.0);
  CHECK(r.rows[1].t < r.rows[0].t);
  // Leading-order maximum d^2 / (1 + d) of 2dt - (1 + d) t^2.
  CHECK(r.rows[1].deficit == doctest::Approx(1e-4 / 1.01).epsilon(0.02));
  for (const auto& row : r.rows) CHECK(row.adversarial_ratio > row.converse_ratio);
  CHECK_THROWS_AS(verify_counterexample1({}), std::invalid_argument);
  CHECK_THROWS_AS(verify_counterexample1({1.5}), std::invalid_argument);
}

TEST_CASE("plot data") {
  ExperimentConfig c;
  std::ostringstream tr;
  c.gamma_min = 62;
  c.gamma_max = 100;
  emit_plot_data(PlotKind::tradeoff_curve, c, tr);
  std::istringstream in(tr.str());
  std::string line;
  std::vector<double> gammas, cs;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double gamma, delta, C;
    ls >> gamma >> delta >> C;
    gammas.push_back(gamma);
    cs.push_back(C);
  }
  // 62..99: the sweep stops below beta = 100.
  REQUIRE(gammas.size() == 38);
  // C falls until gamma* = 78.374 (mpmath root of dC/dgamma, C = 185.2316) and then
  // rises, since 1 - sqrt(gamma / beta) vanishes as gamma approaches beta.
  for (std::size_t i = 1; i < cs.size(); ++i) {
    if (gammas[i] <= 78) CHECK(cs[i] < cs[i - 1]);
    if (gammas[i - 1] >= 79) CHECK(cs[i] > cs[i - 1]);
  }
  CHECK(*std::min_element(cs.begin(), cs.end()) == doctest::Approx(185.30137814528709).epsilon(1e-12));
  CHECK(cs.front() == doctest::Approx(1572.5774659754690).epsilon(1e-12));
  CHECK(cs.back() == doctest::Approx(2266.9213885318810).epsilon(1e-12));
  CHECK(tr.str().find("config_hash=" + c.hash()) != std::string::npos);

  std::ostringstream bm;
  emit_plot_data(PlotKind::boundary_map, c, bm);
  std::istringstream bin(bm.str());
  int cells = 0;
  while (std::getline(bin, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double a, b;
    int region;
    ls >> a >> b >> region;
    CHECK(region == ((a >= 1 || b >= 1) ? 1 : 0));
    ++cells;
  }
  CHECK(cells == 100);

  c.grid_rows = 0;
  std::ostringstream sink;
  CHECK_THROWS_AS(emit_plot_data(PlotKind::boundary_map, c, sink), std::invalid_argument);
  CHECK_THROWS_AS(parse_plot_kind("histogram"), std::invalid_argument);
}

TEST_CASE("CSV writer") {
  std::ostringstream out;
  CsvWriter w(out);
  w.header({"a", "b"});
  w.cell(0.1).cell(std::string("x,y"));
  w.end_row();
  CHECK(out.str() == "a,b\n0.10000000000000001,\"x,y\"\n");
}

TEST_CASE("suite names") {
  CHECK(suite_criteria("paper_checks").size() == static_cast<std::size_t>(kCriterionCount));
  CHECK(!suite_criteria("quick").empty());
  CHECK_THROWS_AS(suite_criteria("everything"), std::invalid_argument);
  SuiteOptions o;
  o.corrupt_mcp = true;
  CHECK(!run_criterion(12, o).passed);
  CHECK(run_criterion(12).passed);
}
