#include "nsplab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nsplab/matrix_io.hpp"
#include "nsplab/parallel.hpp"
#include "nsplab/random.hpp"
#include "nsplab/solver.hpp"
#include "nsplab/width.hpp"

namespace nsplab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config key '" + key + "': expected a number, got '" + value + "'");
}

}  // namespace

// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_real("list", item));
  }
  return out;
}

MatrixSource parse_matrix_source(const std::string& s) {
  if (s == "gaussian_iid") return MatrixSource::gaussian_iid;
  if (s == "haar_nullspace") return MatrixSource::haar_nullspace;
  if (s == "file") return MatrixSource::file;
  throw std::invalid_argument("unknown matrix source '" + s + "' (gaussian_iid, haar_nullspace, file)");
}

OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + s + "' (csv, json)");
}

const char* to_string(MatrixSource s) {
  switch (s) {
    case MatrixSource::gaussian_iid: return "gaussian_iid";
    case MatrixSource::haar_nullspace: return "haar_nullspace";
    case MatrixSource::file: return "file";
  }
  return "?";
}

const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

void ExperimentConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (m < 1 || m >= n) throw std::invalid_argument("m must satisfy 1 <= m < n");
  if (k < 0 || k >= n) throw std::invalid_argument("k must satisfy 0 <= k < n");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (d_grid.empty()) throw std::invalid_argument("d_grid must not be empty");
  for (double d : d_grid)
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("d_grid entries must be positive");
  if (matrix_source == MatrixSource::file && matrix_path.empty())
    throw std::invalid_argument("matrix_source=file needs a matrix path");
  if (probe_budget < 1) throw std::invalid_argument("probe_budget must be at least 1");
  parse_measure(measure);
}

void ExperimentConfig::set(const std::string& key_raw, const std::string& value_raw) {
  const std::string key = trim(key_raw), value = trim(value_raw);
  if (key == "n") n = parse_integer<int>(key, value);
  else if (key == "m") m = parse_integer<int>(key, value);
  else if (key == "k") k = parse_integer<int>(key, value);
  else if (key == "measure") measure = parse_measure(value).spec();
  else if (key == "trials") trials = parse_integer<int>(key, value);
  else if (key == "d_grid" || key == "d") d_grid = parse_real_list(value);
  else if (key == "seed") seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "matrix_source") matrix_source = parse_matrix_source(value);
  else if (key == "matrix") matrix_path = value;
  else if (key == "output" || key == "out") output = value;
  else if (key == "format") format = parse_output_format(value);
  else if (key == "threads") threads = parse_integer<unsigned>(key, value);
  else if (key == "probe_budget" || key == "budget") probe_budget = parse_integer<std::size_t>(key, value);
  else if (key == "grid") {
    const auto x = value.find('x');
    if (x == std::string::npos) throw std::invalid_argument("grid must look like ROWSxCOLS");
    grid_rows = parse_integer<int>(key, value.substr(0, x));
    grid_cols = parse_integer<int>(key, value.substr(x + 1));
  } else if (key == "grid_rows") grid_rows = parse_integer<int>(key, value);
  else if (key == "grid_cols") grid_cols = parse_integer<int>(key, value);
  else if (key == "a_max") a_max = parse_real(key, value);
  else if (key == "b_max") b_max = parse_real(key, value);
  else if (key == "beta") beta = parse_real(key, value);
  else if (key == "gamma_min") gamma_min = parse_real(key, value);
  else if (key == "gamma_max") gamma_max = parse_real(key, value);
  else if (key == "gamma_step") gamma_step = parse_real(key, value);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::string grid;
  for (std::size_t i = 0; i < d_grid.size(); ++i) grid += (i ? "," : "") + format_double(d_grid[i]);
  return {
      {"n", std::to_string(n)},
      {"m", std::to_string(m)},
      {"k", std::to_string(k)},
      {"measure", measure},
      {"trials", std::to_string(trials)},
      {"d_grid", grid},
      {"seed", std::to_string(seed)},
      {"matrix_source", to_string(matrix_source)},
      {"matrix", matrix_path},
      {"format", to_string(format)},
      {"probe_budget", std::to_string(probe_budget)},
      {"grid_rows", std::to_string(grid_rows)},
      {"grid_cols", std::to_string(grid_cols)},
      {"a_max", format_double(a_max)},
      {"b_max", format_double(b_max)},
      {"beta", format_double(beta)},
      {"gamma_min", format_double(gamma_min)},
      {"gamma_max", format_double(gamma_max)},
      {"gamma_step", format_double(gamma_step)},
  };
}

std::string ExperimentConfig::hash() const {
  std::string canon;
  for (const auto& [k_, v] : to_map()) canon += k_ + "=" + v + "\n";
  return hex64(fnv1a64(canon));
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return read_key_values(in);
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  for (const auto& [k, v] : read_key_value_file(path)) base.set(k, v);
  return base;
}

// ---------------------------------------------------------------------------

ProportionEstimate wilson(std::size_t successes, std::size_t trials, double z) {
  ProportionEstimate e;
  e.successes = successes;
  e.trials = trials;
  if (trials == 0) {
    e.lo = 0.0;
    e.hi = 1.0;
    return e;
  }
  const double nn = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  e.p = p;
  e.lo = std::max(0.0, centre - half);
  e.hi = std::min(1.0, centre + half);
  return e;
}

Subspace mc_trial_subspace(const ExperimentConfig& cfg, std::size_t trial) {
  Rng rng = make_rng(cfg.seed, trial);
  switch (cfg.matrix_source) {
    case MatrixSource::gaussian_iid:
      return MeasurementMatrix::gaussian(cfg.m, cfg.n, rng).null_space();
    case MatrixSource::haar_nullspace:
      return sample_haar(cfg.n, cfg.n - cfg.m, rng);
    case MatrixSource::file:
      return MeasurementMatrix(read_matrix_csv_file(cfg.matrix_path)).null_space();
  }
  throw std::logic_error("unreachable");
}

MonteCarloSummary mc_probability(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.matrix_source == MatrixSource::file) {
    const Eigen::MatrixXd a = read_matrix_csv_file(cfg.matrix_path);
    cfg.m = static_cast<int>(a.rows());
    cfg.n = static_cast<int>(a.cols());
  }
  cfg.validate();
  const SparsenessMeasure F = parse_measure(cfg.measure);
  const CostFunction J(F, cfg.n);
  const std::size_t D = cfg.d_grid.size();
  const bool ce1_oracle = F.kind() == MeasureKind::exp_ce1 && cfg.n == 3 && cfg.m == 2 && cfg.k == 1;

  struct Trial {
    bool erc = false;
    bool boundary = false;
    std::vector<char> rrc;
    int ce1 = -1;  // -1 not compared, 0 agree, 1 disagree
  };
  std::vector<Trial> out(static_cast<std::size_t>(cfg.trials));

  parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
    const Subspace nu = mc_trial_subspace(cfg, i);
    SearchOptions opts;
    opts.seed = derive_seed(cfg.seed ^ 0x9d2c5680ULL, i);
    const ErcResult erc = erc_member(nu, J, cfg.k, opts);
    Trial& t = out[i];
    t.erc = erc.member;
    t.boundary = std::abs(erc.margin) < kTol.mc_boundary;
    t.rrc.assign(D, 0);
    for (std::size_t j = 0; j < D; ++j) {
      const RobustnessProbe p = rrc_probe(nu, J, cfg.k, cfg.d_grid[j], cfg.probe_budget, opts);
      t.rrc[j] = p.outcome == ProbeOutcome::passed_at_resolution;
    }
    if (ce1_oracle) {
      const Ce1Class c = ce1_membership(nu, kTol.mc_boundary);
      if (c != Ce1Class::boundary) t.ce1 = (erc.member == (c == Ce1Class::interior)) ? 0 : 1;
    }
  });

  MonteCarloSummary s;
  s.trials = cfg.trials;
  s.d_grid = cfg.d_grid;
  s.config_hash = cfg_in.hash();
  std::size_t erc_count = 0, compared = 0, disagreements = 0;
  std::vector<std::size_t> rrc_count(D, 0);
  for (const Trial& t : out) {
    erc_count += t.erc;
    s.boundary_count += t.boundary;
    bool subset_broken = false;
    for (std::size_t j = 0; j < D; ++j) {
      rrc_count[j] += t.rrc[j];
      if (t.rrc[j] && !t.erc) subset_broken = true;
    }
    s.subset_violations += subset_broken;
    if (t.ce1 >= 0) {
      ++compared;
      disagreements += static_cast<std::size_t>(t.ce1);
    }
  }
  const auto N = static_cast<std::size_t>(cfg.trials);
  s.p_erc = wilson(erc_count, N);
  for (std::size_t j = 0; j < D; ++j) s.p_rrc_at_d.push_back(wilson(rrc_count[j], N));
  s.boundary_fraction = static_cast<double>(s.boundary_count) / static_cast<double>(N);
  if (ce1_oracle) {
    s.ce1_disagreements = disagreements;
    s.ce1_compared = compared;
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

double ce1_F(double t) { return t - std::expm1(-t); }

double ce1_deficit(double d, double t) { return ce1_F(2.0 * t) - ce1_F((1.0 - d) * t) - ce1_F(t); }

}  // namespace

Ce1Row ce1_violation_search(double d) {
  if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("d must lie in (0, 1)");
  // The deficit is 2dt - (1 + d - d^2/2) t^2 + O(t^3), so the maximum sits
  // near t = d; a log grid over [1e-9, 1] followed by golden-section
  // refinement in log t brackets it for every d in (0, 1).
  constexpr int points = 361;
  const double lo = std::log(1e-9), hi = 0.0;
  auto at = [&](int i) { return std::exp(lo + (hi - lo) * i / (points - 1)); };
  int best = 0;
  double best_val = -INFINITY;
  for (int i = 0; i < points; ++i) {
    const double v = ce1_deficit(d, at(i));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = std::log(at(std::max(0, best - 1))), b = std::log(at(std::min(points - 1, best + 1)));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), e = a + g * (b - a);
  double fc = ce1_deficit(d, std::exp(c)), fe = ce1_deficit(d, std::exp(e));
  for (int it = 0; it < 100; ++it) {
    if (fc > fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = ce1_deficit(d, std::exp(c));
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = ce1_deficit(d, std::exp(e));
    }
  }
  Ce1Row row;
  row.d = d;
  row.t = at(best);
  row.deficit = best_val;
  const double tc = std::exp(fc > fe ? c : e);
  const double vc = ce1_deficit(d, tc);
  if (vc > row.deficit) {
    row.t = tc;
    row.deficit = vc;
  }
  row.found = row.deficit > kTol.ce1_band;
  return row;
}

Ce1Report verify_counterexample1(const std::vector<double>& d_list) {
  if (d_list.empty()) throw std::invalid_argument("d list must not be empty");
  for (double d : d_list)
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("every d must lie in (0, 1)");

  Ce1Report rep;
  rep.grid_points = 100;
  rep.min_margin = INFINITY;
  bool ok = true;
  for (int i = 0; i < rep.grid_points; ++i) {
    const double t = std::pow(10.0, -3.0 + 5.0 * i / (rep.grid_points - 1));
    const double margin = 2.0 * ce1_F(t) - ce1_F(2.0 * t);
    const double closed = std::expm1(-t) * std::expm1(-t);
    rep.min_margin = std::min(rep.min_margin, margin);
    rep.max_margin_error = std::max(rep.max_margin_error, std::abs(margin - closed) / closed);
    ok = ok && margin > 0.0;
  }
  rep.margin_at_1 = 2.0 * ce1_F(1.0) - ce1_F(2.0);
  rep.erc_margin_ok = ok && rep.max_margin_error < 1e-9;

  const SparsenessMeasure F = builtin_measure("exp_ce1");
  const CostFunction J(F, 3);
  const Subspace nu = Subspace::from_generator(Eigen::Vector3d(1.0, 1.0, 2.0));
  rep.verdict = nsp_check(nu, J, 1).verdict;
  const MeasurementMatrix A = MeasurementMatrix::with_null_space(nu);

  rep.all_found = true;
  for (double d : d_list) {
    Ce1Row row = ce1_violation_search(d);
    if (row.found) {
      Violation v;
      v.z = row.t * Eigen::Vector3d(1.0, 1.0, 2.0);
      v.n_vec = Eigen::Vector3d(-d * row.t, 0.0, 0.0);
      v.T = {2};
      v.deficit = row.deficit;
      if (!verify_violation(nu, J, 1, d, v))
        throw std::runtime_error("one-coordinate violation failed direct re-evaluation at d=" + format_double(d));
      const AdversarialPair pair = adversarial_pair(A, J, 1, d, v);
      row.epsilon = pair.epsilon;
      row.adversarial_ratio = pair.ratio;
      row.converse_ratio = pair.converse_ratio;
    }
    rep.all_found = rep.all_found && row.found;
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------

PlotKind parse_plot_kind(const std::string& s) {
  if (s == "boundary_map") return PlotKind::boundary_map;
  if (s == "tradeoff_curve") return PlotKind::tradeoff_curve;
  if (s == "probability_vs_k") return PlotKind::probability_vs_k;
  throw std::invalid_argument("unknown plot kind '" + s + "' (boundary_map, tradeoff_curve, probability_vs_k)");
}

const char* to_string(PlotKind k) {
  switch (k) {
    case PlotKind::boundary_map: return "boundary_map";
    case PlotKind::tradeoff_curve: return "tradeoff_curve";
    case PlotKind::probability_vs_k: return "probability_vs_k";
  }
  return "?";
}

void emit_plot_data(PlotKind kind, const ExperimentConfig& cfg, std::ostream& out) {
  out << "# nsp-lab " << to_string(kind) << " seed=" << cfg.seed << " config_hash=" << cfg.hash() << "\n";
  switch (kind) {
    case PlotKind::boundary_map: {
      if (cfg.grid_rows < 1 || cfg.grid_cols < 1) throw std::invalid_argument("boundary map grid is empty");
      if (!(cfg.a_max > 0.0) || !(cfg.b_max > 0.0)) throw std::invalid_argument("a_max and b_max must be positive");
      const SparsenessMeasure F = parse_measure(cfg.measure);
      const RegionMap map = region_boundary_map(F, cfg.grid_rows, cfg.grid_cols, cfg.a_max, cfg.b_max, {},
                                                cfg.threads);
      out << "# measure=" << F.spec() << " grid=" << cfg.grid_rows << "x" << cfg.grid_cols
          << " upward_closure_violations=" << map.upward_closure_violations << "\n";
      out << "# a b region (1 = A, 0 = B, -1 = inconclusive)\n";
      for (int i = 0; i < map.rows; ++i) {
        if (i) out << "\n";
        for (int j = 0; j < map.cols; ++j)
          out << format_double(map.a(j)) << " " << format_double(map.b(i)) << " "
              << static_cast<int>(map.at(i, j)) << "\n";
      }
      return;
    }
    case PlotKind::tradeoff_curve: {
      if (!(cfg.gamma_step > 0.0) || cfg.gamma_max < cfg.gamma_min)
        throw std::invalid_argument("gamma sweep is empty");
      out << "# beta=" << format_double(cfg.beta) << "\n";
      out << "# gamma delta C oracle_C gordon_bound\n";
      const int count = static_cast<int>(std::floor((cfg.gamma_max - cfg.gamma_min) / cfg.gamma_step + 1e-9)) + 1;
      for (int i = 0; i < count; ++i) {
        const double gamma = cfg.gamma_min + i * cfg.gamma_step;
        // gamma = beta makes 1 - sqrt(gamma / beta) vanish; sweeps stop short of it.
        if (gamma >= cfg.beta) break;
        const TradeoffPoint p = tradeoff(cfg.beta, gamma, true);
        out << format_double(gamma) << " " << format_double(p.delta) << " " << format_double(p.C.value_or(NAN))
            << " " << format_double(p.oracle_C.value_or(NAN)) << " " << format_double(p.gordon_bound) << "\n";
      }
      return;
    }
    case PlotKind::probability_vs_k: {
      out << "# n=" << cfg.n << " m=" << cfg.m << " measure=" << cfg.measure << " trials=" << cfg.trials << "\n";
      out << "# k p_erc p_erc_lo p_erc_hi";
      for (double d : cfg.d_grid) {
        const std::string s = format_double(d);
        out << " p_rrc(" << s << ") lo(" << s << ") hi(" << s << ")";
      }
      out << "\n";
      for (int kk = 0; kk <= cfg.k; ++kk) {
        ExperimentConfig c = cfg;
        c.k = kk;
        const MonteCarloSummary s = mc_probability(c);
        out << kk << " " << format_double(s.p_erc.p) << " " << format_double(s.p_erc.lo) << " "
            << format_double(s.p_erc.hi);
        for (const auto& e : s.p_rrc_at_d)
          out << " " << format_double(e.p) << " " << format_double(e.lo) << " " << format_double(e.hi);
        out << "\n";
      }
      return;
    }
  }
}

// ---------------------------------------------------------------------------

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::header(const std::vector<std::string>& cols) {
  for (const auto& c : cols) cell(c);
  end_row();
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (!first_) out_ << ",";
  first_ = false;
  if (s.find_first_of(",\"\n") != std::string::npos) {
    out_ << '"';
    for (char c : s) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  } else {
    out_ << s;
  }
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << "\n";
  first_ = true;
}

}  // namespace nsplab
