// nsp-lab: command line front end. Exit codes: 0 success, 1 a checked
// criterion failed, 2 usage error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nsplab/experiment.hpp"
#include "nsplab/matrix_io.hpp"
#include "nsplab/measures.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/random.hpp"
#include "nsplab/report.hpp"
#include "nsplab/solver.hpp"
#include "nsplab/subspaces.hpp"
#include "nsplab/suite.hpp"
#include "nsplab/width.hpp"

using namespace nsplab;
using nlohmann::json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
  std::string format = "csv";
  std::string config;
};

// Where a subspace comes from: null space of a matrix file, a basis file, an
// inline generator, or a Gaussian matrix drawn from the seed.
struct SubspaceInput {
  std::string matrix;
  std::string basis;
  std::string generator;
  int n = 5;
  int m = 3;
};

void add_subspace_options(CLI::App* sub, SubspaceInput& in) {
  sub->add_option("--matrix", in.matrix, "m x n matrix CSV; its null space is used");
  sub->add_option("--basis", in.basis, "n x l CSV whose columns span the subspace");
  sub->add_option("--generator", in.generator, "inline generator, columns separated by ';' (e.g. 1,1,2)");
  sub->add_option("--n", in.n, "ambient dimension of a random Gaussian matrix")->capture_default_str();
  sub->add_option("--m", in.m, "rows of a random Gaussian matrix")->capture_default_str();
}

Subspace make_subspace(const SubspaceInput& in, std::uint64_t seed) {
  const int given = !in.matrix.empty() + !in.basis.empty() + !in.generator.empty();
  if (given > 1) throw std::invalid_argument("give at most one of --matrix, --basis, --generator");
  if (!in.matrix.empty()) return MeasurementMatrix(read_matrix_csv_file(in.matrix)).null_space();
  if (!in.basis.empty()) return Subspace::from_generator(read_matrix_csv_file(in.basis));
  if (!in.generator.empty()) {
    std::vector<std::vector<double>> cols;
    std::stringstream ss(in.generator);
    std::string col;
    while (std::getline(ss, col, ';')) cols.push_back(parse_real_list(col));
    if (cols.empty() || cols[0].empty()) throw std::invalid_argument("empty generator");
    Eigen::MatrixXd g(static_cast<Eigen::Index>(cols[0].size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != cols[0].size()) throw std::invalid_argument("generator columns differ in length");
      for (std::size_t i = 0; i < cols[j].size(); ++i) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cols[j][i];
    }
    return Subspace::from_generator(g);
  }
  if (in.n < 2 || in.m < 1 || in.m >= in.n) throw std::invalid_argument("random matrix needs 1 <= m < n");
  Rng rng = make_rng(seed, 0);
  return MeasurementMatrix::gaussian(in.m, in.n, rng).null_space();
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

std::string join(const IndexSet& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ";" : "") + std::to_string(t[i]);
  return s;
}

// Canonical text of the options that were set, for the provenance hash.
std::string canonical_options(const CLI::App& app, const CLI::App* sub) {
  std::map<std::string, std::string> kv;
  auto collect = [&](const CLI::App& a) {
    for (const CLI::Option* o : a.get_options()) {
      const std::string name = o->get_name(false, true);
      if (name == "--out" || name == "--threads" || name == "--config" || name == "--help") continue;
      if (o->count() == 0) continue;
      std::string v;
      for (const auto& r : o->results()) v += r + ",";
      kv[name] = v;
    }
  };
  collect(app);
  if (sub) collect(*sub);
  std::string s = sub ? sub->get_name() + "\n" : "\n";
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  return s;
}

// Fills options that were not given on the command line from a key=value file.
void apply_config(CLI::App& app, CLI::App* sub, const std::string& path) {
  for (const auto& [key, value] : read_key_value_file(path)) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
    if (!opt) opt = app.get_option_no_throw(flag);
    if (!opt) {
      bool known_elsewhere = false;
      for (CLI::App* other : app.get_subcommands({}))
        known_elsewhere = known_elsewhere || other->get_option_no_throw(flag) != nullptr;
      if (!known_elsewhere) throw std::invalid_argument("unknown config key '" + key + "'");
      continue;
    }
    if (opt->count() > 0) continue;  // flags override the file
    opt->add_result(value);
    opt->run_callback();
  }
}

class Output {
 public:
  Output(const Globals& g, std::string command, std::string hash)
      : g_(g), command_(std::move(command)), hash_(std::move(hash)) {
    if (g.format != "csv" && g.format != "json") throw std::invalid_argument("--format must be csv or json");
  }
  bool json_mode() const { return g_.format == "json"; }
  std::ostream& stream() { return buf_; }
  CsvWriter csv() {
    CsvWriter w(buf_);
    w.comment("nsp-lab " + command_ + " seed=" + std::to_string(g_.seed) + " config_hash=" + hash_);
    return w;
  }
  void put_json(json result) {
    json doc{{"command", command_}, {"seed", g_.seed}, {"config_hash", hash_}, {"result", std::move(result)}};
    buf_ << doc.dump(2) << "\n";
  }
  // Experiment commands report the hash of their resolved configuration.
  void set_hash(std::string h) { hash_ = std::move(h); }
  void flush() {
    if (g_.out.empty()) {
      std::cout << buf_.str();
      std::cout.flush();
      return;
    }
    std::ofstream f(g_.out, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + g_.out + "'");
    f << buf_.str();
  }

 private:
  const Globals& g_;
  std::string command_;
  std::string hash_;
  std::ostringstream buf_;
};

SearchOptions search_options(std::uint64_t seed, std::size_t budget) {
  SearchOptions o;
  o.seed = seed;
  o.budget = budget;
  return o;
}

// ---------------------------------------------------------------------------

struct NscArgs {
  SubspaceInput in;
  std::string measure = "l1";
  int k = 1;
  std::size_t budget = 200000;
};

int run_nsc(const NscArgs& a, const Globals& g, Output& out) {
  const Subspace nu = make_subspace(a.in, g.seed);
  const CostFunction J(parse_measure(a.measure), nu.ambient_dim());
  const SearchOptions so = search_options(g.seed, a.budget);
  const ErcResult erc = erc_member(nu, J, a.k, so);
  const NscReport& r = erc.detail.nsc;
  if (out.json_mode()) {
    out.put_json({{"measure", J.measure().spec()}, {"k", a.k}, {"n", nu.ambient_dim()}, {"l", nu.dim()},
                  {"nsc", to_json(r)}, {"erc", to_json(erc)}});
  } else {
    CsvWriter w = out.csv();
    w.header({"measure", "n", "l", "k", "theta", "method", "is_lower_bound", "evaluations", "verdict",
              "worst_relative_deficit", "erc_margin", "witness_T", "witness_z"});
    w.cell(J.measure().spec()).cell(static_cast<long long>(nu.ambient_dim())).cell(static_cast<long long>(nu.dim()))
        .cell(a.k).cell(r.theta).cell(std::string(to_string(r.method))).cell(r.is_lower_bound).cell(r.evaluations)
        .cell(std::string(to_string(erc.verdict))).cell(erc.detail.worst_relative_deficit).cell(erc.margin)
        .cell(join(r.witness_T)).cell(join(r.witness_z));
    w.end_row();
  }
  return 0;
}

struct ProbeArgs {
  SubspaceInput in;
  std::string measure = "l1";
  int k = 1;
  std::string d = "0.1";
  std::size_t budget = 100000;
  std::string convention = "omega_hat";
};

int run_probe(const ProbeArgs& a, const Globals& g, Output& out) {
  const Subspace nu = make_subspace(a.in, g.seed);
  const CostFunction J(parse_measure(a.measure), nu.ambient_dim());
  RobustSetConvention conv;
  if (a.convention == "omega_hat") conv = RobustSetConvention::omega_hat;
  else if (a.convention == "interior_lower") conv = RobustSetConvention::interior_lower;
  else throw std::invalid_argument("--convention must be omega_hat or interior_lower");
  const std::vector<double> ds = parse_real_list(a.d);
  if (ds.empty()) throw std::invalid_argument("--d needs at least one value");
  std::vector<RobustnessProbe> probes;
  for (double d : ds) probes.push_back(rrc_probe(nu, J, a.k, d, a.budget, search_options(g.seed, a.budget), conv));
  if (out.json_mode()) {
    json list = json::array();
    for (const auto& p : probes) list.push_back(to_json(p));
    out.put_json({{"measure", J.measure().spec()}, {"k", a.k}, {"probes", list}});
  } else {
    CsvWriter w = out.csv();
    w.header({"d", "outcome", "reported_radius", "best_relative_deficit", "evaluations", "search_budget",
              "violation_deficit", "violation_T", "violation_z", "violation_n"});
    for (const auto& p : probes) {
      w.cell(p.d).cell(std::string(to_string(p.outcome))).cell(p.reported_radius).cell(p.best_relative_deficit)
          .cell(p.evaluations).cell(p.search_budget);
      if (p.violation)
        w.cell(p.violation->deficit).cell(join(p.violation->T)).cell(join(p.violation->z)).cell(join(p.violation->n_vec));
      else
        w.cell(std::string()).cell(std::string()).cell(std::string()).cell(std::string());
      w.end_row();
    }
  }
  return 0;
}

struct RecoverArgs {
  std::string matrix;
  std::string y;
  std::string measure = "l1";
  double eps = 0.0;
  std::string method = "descent";
  int k = 1;
  int starts = 32;
  int trials = 0;
};

int run_recover(const RecoverArgs& a, const Globals& g, Output& out) {
  if (a.matrix.empty()) throw std::invalid_argument("recover needs --matrix");
  const MeasurementMatrix A(read_matrix_csv_file(a.matrix));
  const CostFunction J(parse_measure(a.measure), A.cols());
  SolverOptions so;
  so.method = parse_solver_method(a.method);
  so.starts = a.starts;
  so.seed = g.seed;
  if (a.trials > 0) {
    if (!a.y.empty()) throw std::invalid_argument("--y and --trials are exclusive");
    if (a.k < 1) throw std::invalid_argument("trial batches need --k >= 1");
    // Random k-sparse x with standard normal entries; noise of norm eps.
    std::vector<TrialRecord> recs(static_cast<std::size_t>(a.trials));
    for (int t = 0; t < a.trials; ++t) {
      Rng rng = make_rng(g.seed, static_cast<std::uint64_t>(t));
      std::vector<int> perm(static_cast<std::size_t>(A.cols()));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Eigen::VectorXd x = Eigen::VectorXd::Zero(A.cols());
      std::normal_distribution<double> normal;
      for (int i = 0; i < a.k; ++i) x[perm[i]] = normal(rng);
      Eigen::VectorXd y = A.entries() * x;
      if (a.eps > 0.0) y += a.eps * random_unit_vector(A.rows(), rng);
      const RecoveryProblem P(A, y, a.eps, J, a.k);
      SolverOptions o = so;
      o.seed = derive_seed(g.seed, static_cast<std::uint64_t>(t));
      recs[static_cast<std::size_t>(t)] = make_trial_record(P, x, solve(P, o));
    }
    if (out.json_mode()) {
      json list = json::array();
      for (const auto& r : recs) list.push_back(to_json(r));
      out.put_json({{"measure", J.measure().spec()}, {"trials", list}});
    } else {
      CsvWriter w = out.csv();
      w.header({"trial", "error", "epsilon", "cost_gap", "residual", "method", "iterations", "converged", "x_true",
                "x_hat"});
      for (std::size_t t = 0; t < recs.size(); ++t) {
        const auto& r = recs[t];
        w.cell(t).cell(r.error).cell(r.epsilon).cell(r.cost_gap).cell(r.residual)
            .cell(std::string(to_string(r.method))).cell(r.iterations).cell(r.converged).cell(join(r.x_true))
            .cell(join(r.x_hat));
        w.end_row();
      }
    }
    return 0;
  }
  if (a.y.empty()) throw std::invalid_argument("recover needs --y or --trials");
  const Eigen::MatrixXd ym = read_matrix_csv_file(a.y);
  if (ym.rows() != 1 && ym.cols() != 1) throw std::invalid_argument("--y must be a single row or column");
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ym.data(), ym.size());
  const RecoveryProblem P(A, y, a.eps, J, a.k);
  const SolveResult r = solve(P, so);
  if (out.json_mode()) {
    out.put_json({{"measure", J.measure().spec()}, {"epsilon", json_number(a.eps)}, {"solution", to_json(r)}});
  } else {
    CsvWriter w = out.csv();
    w.comment("cost=" + format_double(r.cost) + " residual=" + format_double(r.residual) + " method=" +
              to_string(r.method) + " converged=" + (r.converged ? "true" : "false") +
              " globally_optimal=" + (r.globally_optimal ? "true" : "false"));
    w.header({"index", "x_hat"});
    for (Eigen::Index i = 0; i < r.x_hat.size(); ++i) {
      w.cell(static_cast<long long>(i)).cell(r.x_hat[i]);
      w.end_row();
    }
  }
  return 0;
}

struct WidthArgs {
  std::string measure = "l1";
  int n = 8;
  int k = 2;
  std::size_t draws = 20000;
  double d = 0.0;
  int m = 0;
};

int run_width(const WidthArgs& a, const Globals& g, Output& out) {
  const CostFunction J(parse_measure(a.measure), a.n);
  const WidthEstimate w = a.d > 0.0 ? width_extended(J, a.k, a.d, a.draws, g.seed, g.threads)
                                    : width_mc(J, a.k, a.draws, g.seed, g.threads);
  std::optional<OmegaHatBound> bound;
  if (a.m > 0) bound = omega_hat_bound(w.mean, a.d > 0.0 ? "width_extended" : "width_mc", a.n, a.m, 0.0);
  if (out.json_mode()) {
    json j{{"measure", J.measure().spec()}, {"n", a.n}, {"k", a.k}, {"width", to_json(w)}};
    if (bound) j["omega_hat_bound"] = to_json(*bound);
    out.put_json(j);
  } else {
    CsvWriter w_ = out.csv();
    std::vector<std::string> cols{"measure", "n", "k", "d", "mean", "std_error", "samples", "inner_search",
                                  "is_lower_bound", "chi_mean", "bound_violations"};
    if (bound) {
      cols.push_back("m");
      cols.push_back("escape_probability");
      cols.push_back("vacuous");
    }
    w_.header(cols);
    w_.cell(J.measure().spec()).cell(a.n).cell(a.k).cell(a.d).cell(w.mean).cell(w.std_error).cell(w.samples)
        .cell(std::string(to_string(w.inner_search))).cell(w.is_lower_bound).cell(w.chi_mean).cell(w.bound_violations);
    if (bound) w_.cell(a.m).cell(bound->probability).cell(bound->vacuous);
    w_.end_row();
  }
  return 0;
}

struct TradeoffArgs {
  double beta = 100.0;
  std::vector<double> gamma;
  std::string sweep;
  bool oracle = true;
  int k = 1000;
  double d_fraction = 0.5;
};

int run_tradeoff(const TradeoffArgs& a, const Globals&, Output& out) {
  std::vector<double> gammas = a.gamma;
  if (!a.sweep.empty()) {
    std::vector<double> parts;
    std::stringstream ss(a.sweep);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(parse_real_list(p).at(0));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
      throw std::invalid_argument("--gamma-sweep must be MIN:MAX:STEP with STEP > 0");
    const int count = static_cast<int>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
    // Sweep points at or past beta are outside the formula's domain and are dropped.
    for (int i = 0; i < count; ++i)
      if (parts[0] + i * parts[2] < a.beta) gammas.push_back(parts[0] + i * parts[2]);
    if (gammas.empty()) throw std::invalid_argument("--gamma-sweep has no point below beta");
  }
  if (gammas.empty()) throw std::invalid_argument("tradeoff needs --gamma or --gamma-sweep");
  std::vector<TradeoffPoint> pts;
  for (double gm : gammas) pts.push_back(tradeoff(a.beta, gm, a.oracle, a.k, a.d_fraction));
  if (out.json_mode()) {
    json list = json::array();
    for (const auto& p : pts) list.push_back(to_json(p));
    out.put_json({{"beta", json_number(a.beta)}, {"points", list}});
  } else {
    CsvWriter w = out.csv();
    w.header({"gamma", "delta", "C", "oracle_C", "gordon_bound"});
    for (const auto& p : pts) {
      w.cell(p.gamma).cell(p.delta);
      if (p.C) w.cell(*p.C); else w.cell(std::string());
      if (p.oracle_C) w.cell(*p.oracle_C); else w.cell(std::string());
      w.cell(p.gordon_bound);
      w.end_row();
    }
  }
  return 0;
}

struct ExperimentArgs {
  ExperimentConfig cfg;
  std::string measure = "l1";
  std::string d = "0.001";
  std::string matrix_source = "gaussian_iid";
  std::string grid = "10x10";
  std::string kind;
};

// Moves the string-valued options into the config through its own parser.
ExperimentConfig finish_config(ExperimentArgs& a, const Globals& g) {
  ExperimentConfig c = a.cfg;
  c.set("measure", a.measure);
  c.set("d_grid", a.d);
  c.set("matrix_source", a.matrix_source);
  c.set("grid", a.grid);
  c.seed = g.seed;
  c.threads = g.threads;
  c.format = parse_output_format(g.format);
  return c;
}

int run_mc(ExperimentArgs& a, const Globals& g, Output& out) {
  const ExperimentConfig c = finish_config(a, g);
  out.set_hash(c.hash());
  const MonteCarloSummary s = mc_probability(c);
  if (out.json_mode()) {
    out.put_json(to_json(s));
  } else {
    CsvWriter w = out.csv();
    w.header({"d", "trials", "p_erc", "p_erc_lo", "p_erc_hi", "p_rrc", "p_rrc_lo", "p_rrc_hi", "boundary_fraction",
              "subset_violations"});
    for (std::size_t i = 0; i < s.d_grid.size(); ++i) {
      const auto& r = s.p_rrc_at_d[i];
      w.cell(s.d_grid[i]).cell(s.trials).cell(s.p_erc.p).cell(s.p_erc.lo).cell(s.p_erc.hi).cell(r.p).cell(r.lo)
          .cell(r.hi).cell(s.boundary_fraction).cell(s.subset_violations);
      w.end_row();
    }
  }
  if (s.subset_violations > 0) {
    std::cerr << "nsp-lab: " << s.subset_violations << " trials passed the probe while ERC failed\n";
    return kExitFailure;
  }
  return 0;
}

int run_plot(ExperimentArgs& a, const Globals& g, Output& out) {
  const ExperimentConfig c = finish_config(a, g);
  emit_plot_data(parse_plot_kind(a.kind), c, out.stream());
  return 0;
}

struct BoundaryArgs {
  std::string measure = "l1";
  std::string grid = "200x200";
  double a_max = 2.0;
  double b_max = 2.0;
};

int run_boundary(const BoundaryArgs& a, const Globals& g, Output& out) {
  const auto x = a.grid.find('x');
  if (x == std::string::npos) throw std::invalid_argument("--grid must look like ROWSxCOLS");
  const int rows = std::stoi(a.grid.substr(0, x)), cols = std::stoi(a.grid.substr(x + 1));
  if (rows < 1 || cols < 1) throw std::invalid_argument("--grid must be nonempty");
  const RegionMap map = region_boundary_map(parse_measure(a.measure), rows, cols, a.a_max, a.b_max, {}, g.threads);
  if (out.json_mode()) {
    out.put_json(to_json(map));
  } else {
    CsvWriter w = out.csv();
    w.comment("measure=" + map.measure + " upward_closure_violations=" + std::to_string(map.upward_closure_violations) +
              " inconclusive=" + std::to_string(map.inconclusive) +
              " boundary_cells=" + std::to_string(map.boundary_cells));
    w.header({"a", "b", "region"});
    for (int i = 0; i < map.rows; ++i)
      for (int j = 0; j < map.cols; ++j) {
        w.cell(map.a(j)).cell(map.b(i)).cell(std::string(to_string(map.at(i, j))));
        w.end_row();
      }
  }
  return 0;
}

int run_ce1(const std::string& d_list, const Globals&, Output& out) {
  const Ce1Report r = verify_counterexample1(parse_real_list(d_list));
  if (out.json_mode()) {
    out.put_json(to_json(r));
  } else {
    CsvWriter w = out.csv();
    w.comment("erc_margin_ok=" + std::string(r.erc_margin_ok ? "true" : "false") + " min_margin=" +
              format_double(r.min_margin) + " margin_at_1=" + format_double(r.margin_at_1) +
              " nsp_verdict=" + to_string(r.verdict));
    w.header({"d", "t", "deficit", "found", "epsilon", "adversarial_ratio", "converse_ratio"});
    for (const auto& row : r.rows) {
      w.cell(row.d).cell(row.t).cell(row.deficit).cell(row.found).cell(row.epsilon).cell(row.adversarial_ratio)
          .cell(row.converse_ratio);
      w.end_row();
    }
  }
  if (!r.all_found || !r.erc_margin_ok || r.verdict != NspVerdict::holds_strict) {
    std::cerr << "nsp-lab: counterexample check failed\n";
    return kExitFailure;
  }
  return 0;
}

void print_result(const CriterionResult& r) {
  std::fprintf(stderr, "[%s] %2d %s (%.2f s): %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
               r.detail.c_str());
}

int run_suite_cmd(const std::string& name, bool corrupt, const Globals& g, Output& out) {
  suite_criteria(name);  // unknown names are usage errors before any work
  SuiteOptions so;
  so.seed = g.seed;
  so.threads = g.threads;
  so.corrupt_mcp = corrupt;
  const SuiteReport rep = run_suite(name, so, print_result);
  out.stream() << rep.bundle.dump(2) << "\n";
  return rep.passed ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nsp-lab: null space property certificates, robustness probes and recovery experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("--seed", g.seed, "64-bit master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--config", g.config, "key=value file; command line flags take precedence");

  NscArgs nsc_a;
  CLI::App* nsc_c = app.add_subcommand("nsc", "null space constant and NSP verdict");
  add_subspace_options(nsc_c, nsc_a.in);
  nsc_c->add_option("--measure", nsc_a.measure)->capture_default_str();
  nsc_c->add_option("--k", nsc_a.k)->capture_default_str();
  nsc_c->add_option("--budget", nsc_a.budget)->capture_default_str();

  ProbeArgs probe_a;
  CLI::App* probe_c = app.add_subcommand("probe", "perturbed-NSP robustness probe");
  add_subspace_options(probe_c, probe_a.in);
  probe_c->add_option("--measure", probe_a.measure)->capture_default_str();
  probe_c->add_option("--k", probe_a.k)->capture_default_str();
  probe_c->add_option("--d", probe_a.d, "radius or comma-separated radii")->capture_default_str();
  probe_c->add_option("--budget", probe_a.budget)->capture_default_str();
  probe_c->add_option("--convention", probe_a.convention, "omega_hat or interior_lower")->capture_default_str();

  RecoverArgs rec_a;
  CLI::App* rec_c = app.add_subcommand("recover", "F-minimization recovery");
  rec_c->add_option("--matrix", rec_a.matrix, "m x n matrix CSV");
  rec_c->add_option("--y", rec_a.y, "measurement vector CSV");
  rec_c->add_option("--measure", rec_a.measure)->capture_default_str();
  rec_c->add_option("--eps", rec_a.eps, "noise level; 0 for equality constraints")->capture_default_str();
  rec_c->add_option("--method", rec_a.method, "descent, irls or enumerate")->capture_default_str();
  rec_c->add_option("--k", rec_a.k)->capture_default_str();
  rec_c->add_option("--starts", rec_a.starts)->capture_default_str();
  rec_c->add_option("--trials", rec_a.trials, "random k-sparse trial batch instead of --y");

  WidthArgs width_a;
  CLI::App* width_c = app.add_subcommand("width", "Monte Carlo Gaussian width of the NSP-violating set");
  width_c->add_option("--measure", width_a.measure)->capture_default_str();
  width_c->add_option("--n", width_a.n)->capture_default_str();
  width_c->add_option("--k", width_a.k)->capture_default_str();
  width_c->add_option("--draws", width_a.draws)->capture_default_str();
  width_c->add_option("--d", width_a.d, "width of the d-extension when > 0")->capture_default_str();
  width_c->add_option("--m", width_a.m, "also report the escape bound for m rows");

  TradeoffArgs trade_a;
  CLI::App* trade_c = app.add_subcommand("tradeoff", "rate and robustness tradeoff");
  trade_c->add_option("--beta", trade_a.beta)->capture_default_str();
  trade_c->add_option("--gamma", trade_a.gamma, "one or more gamma values");
  trade_c->add_option("--gamma-sweep", trade_a.sweep, "MIN:MAX:STEP");
  trade_c->add_option("--oracle", trade_a.oracle, "include the oracle constant")->capture_default_str();
  trade_c->add_option("--k", trade_a.k, "sparsity for the escape probability")->capture_default_str();
  trade_c->add_option("--d-fraction", trade_a.d_fraction, "d as a fraction of delta")->capture_default_str();

  ExperimentArgs mc_a;
  auto add_experiment_options = [](CLI::App* c, ExperimentArgs& a) {
    c->add_option("--n", a.cfg.n)->capture_default_str();
    c->add_option("--m", a.cfg.m)->capture_default_str();
    c->add_option("--k", a.cfg.k)->capture_default_str();
    c->add_option("--measure", a.measure)->capture_default_str();
    c->add_option("--trials", a.cfg.trials)->capture_default_str();
    c->add_option("--d,--d-grid", a.d, "comma-separated radii")->capture_default_str();
    c->add_option("--matrix-source", a.matrix_source, "gaussian_iid, haar_nullspace or file")->capture_default_str();
    c->add_option("--matrix", a.cfg.matrix_path, "matrix CSV for matrix_source=file");
    c->add_option("--budget,--probe-budget", a.cfg.probe_budget, "probe evaluations per d")->capture_default_str();
  };
  CLI::App* mc_c = app.add_subcommand("mc", "Monte Carlo ERC and RRC probabilities");
  add_experiment_options(mc_c, mc_a);

  BoundaryArgs bnd_a;
  CLI::App* bnd_c = app.add_subcommand("boundary", "region map for span{(1,0,a),(0,1,b)}");
  bnd_c->add_option("--measure", bnd_a.measure)->capture_default_str();
  bnd_c->add_option("--grid", bnd_a.grid, "ROWSxCOLS")->capture_default_str();
  bnd_c->add_option("--a-max", bnd_a.a_max)->capture_default_str();
  bnd_c->add_option("--b-max", bnd_a.b_max)->capture_default_str();

  std::string ce1_d = "0.5,0.1,0.01,0.001";
  CLI::App* ce1_c = app.add_subcommand("ce1", "ERC-without-RRC counterexample check");
  ce1_c->add_option("--d", ce1_d, "comma-separated radii in (0,1)")->capture_default_str();

  std::string suite_name;
  bool corrupt = false;
  CLI::App* suite_c = app.add_subcommand("suite", "acceptance checks (paper_checks or quick)");
  suite_c->add_option("name", suite_name, "paper_checks or quick")->required();
  suite_c->add_flag("--corrupt-mcp", corrupt, "mutation test: negate the MCP alpha");

  ExperimentArgs plot_a;
  CLI::App* plot_c = app.add_subcommand("plot", "gnuplot data: boundary_map, tradeoff_curve, probability_vs_k");
  add_experiment_options(plot_c, plot_a);
  plot_c->add_option("--kind", plot_a.kind)->required();
  plot_c->add_option("--grid", plot_a.grid, "ROWSxCOLS")->capture_default_str();
  plot_c->add_option("--a-max", plot_a.cfg.a_max)->capture_default_str();
  plot_c->add_option("--b-max", plot_a.cfg.b_max)->capture_default_str();
  plot_c->add_option("--beta", plot_a.cfg.beta)->capture_default_str();
  plot_c->add_option("--gamma-min", plot_a.cfg.gamma_min)->capture_default_str();
  plot_c->add_option("--gamma-max", plot_a.cfg.gamma_max)->capture_default_str();
  plot_c->add_option("--gamma-step", plot_a.cfg.gamma_step)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!g.config.empty()) apply_config(app, sub, g.config);
    Output out(g, sub->get_name(), hex64(fnv1a64(canonical_options(app, sub))));
    int rc = 0;
    if (sub == nsc_c) rc = run_nsc(nsc_a, g, out);
    else if (sub == probe_c) rc = run_probe(probe_a, g, out);
    else if (sub == rec_c) rc = run_recover(rec_a, g, out);
    else if (sub == width_c) rc = run_width(width_a, g, out);
    else if (sub == trade_c) rc = run_tradeoff(trade_a, g, out);
    else if (sub == mc_c) rc = run_mc(mc_a, g, out);
    else if (sub == bnd_c) rc = run_boundary(bnd_a, g, out);
    else if (sub == ce1_c) rc = run_ce1(ce1_d, g, out);
    else if (sub == suite_c) rc = run_suite_cmd(suite_name, corrupt, g, out);
    else if (sub == plot_c) rc = run_plot(plot_a, g, out);
    out.flush();
    return rc;
  } catch (const CLI::ParseError& e) {
    std::cerr << "nsp-lab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "nsp-lab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "nsp-lab: " << e.what() << "\n";
    return kExitFailure;
  }
}
