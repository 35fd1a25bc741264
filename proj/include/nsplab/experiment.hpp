#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsplab/measures.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/subspaces.hpp"

namespace nsplab {

enum class MatrixSource { gaussian_iid, haar_nullspace, file };
enum class OutputFormat { csv, json };

// Plain key=value settings for Monte Carlo runs and plot data. Config files
// use the same keys, one per line, `#` starting a comment.
struct ExperimentConfig {
  int n = 5;
  int m = 3;
  int k = 1;
  std::string measure = "l1";
  int trials = 2000;
  std::vector<double> d_grid{1e-3};
  std::uint64_t seed = 1;
  MatrixSource matrix_source = MatrixSource::gaussian_iid;
  std::string matrix_path;
  std::string output;
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 1;
  std::size_t probe_budget = 5000;
  // Plot data.
  int grid_rows = 10;
  int grid_cols = 10;
  double a_max = 2.0;
  double b_max = 2.0;
  double beta = 100.0;
  double gamma_min = 62.0;
  double gamma_max = 100.0;
  double gamma_step = 1.0;

  // Throws std::invalid_argument on the first violated invariant.
  void validate() const;
  // Applies one key=value pair; throws std::invalid_argument on unknown keys
  // or unparsable values.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_map() const;
  // FNV-1a 64 of the sorted key=value lines, as 16 hex digits. `output` and
  // `threads` are excluded: they do not change results.
  std::string hash() const;
};

// key=value lines; blank lines and `#` comments skipped.
std::map<std::string, std::string> read_key_values(std::istream& in);
std::map<std::string, std::string> read_key_value_file(const std::string& path);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

std::vector<double> parse_real_list(const std::string& s);
MatrixSource parse_matrix_source(const std::string& s);
OutputFormat parse_output_format(const std::string& s);
const char* to_string(MatrixSource s);
const char* to_string(OutputFormat f);

// ---------------------------------------------------------------------------

struct ProportionEstimate {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double p = 0.0;
  double lo = 0.0;  // Wilson 95% interval
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

ProportionEstimate wilson(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct MonteCarloSummary {
  ProportionEstimate p_erc;
  std::vector<double> d_grid;
  std::vector<ProportionEstimate> p_rrc_at_d;
  std::size_t boundary_count = 0;  // |margin| < kTol.mc_boundary
  double boundary_fraction = 0.0;
  int trials = 0;
  // Trials where the probe passed at some d although ERC failed. Zero on a
  // sound run: a failed NSP is itself a violation at every d.
  std::size_t subset_violations = 0;
  // F_exp, n = 3, l = 1, k = 1 only: disagreements with the closed-form
  // classifier outside the boundary band, and the number compared.
  std::optional<std::size_t> ce1_disagreements;
  std::size_t ce1_compared = 0;
  std::string config_hash;
};

// Per trial: draw a null space (Gaussian A with N(0, 1/n) entries, a Haar
// subspace, or the fixed matrix file), decide ERC, probe at every d.
MonteCarloSummary mc_probability(const ExperimentConfig& cfg);

// Subspace for trial i of a Monte Carlo run (exposed for oracle tests).
Subspace mc_trial_subspace(const ExperimentConfig& cfg, std::size_t trial);

// ---------------------------------------------------------------------------
// nu = span{(1,1,2)}, k = 1, F(t) = t + 1 - e^{-t}.

struct Ce1Row {
  double d = 0.0;
  double t = 0.0;        // scale of z = t (1,1,2)
  double deficit = 0.0;  // F(2t) - F((1-d)t) - F(t) with n = (-d t, 0, 0)
  bool found = false;
  double epsilon = 0.0;  // adversarial noise level
  double adversarial_ratio = 0.0;
  double converse_ratio = 0.0;
};

struct Ce1Report {
  int grid_points = 0;
  double min_margin = 0.0;        // min over the t-grid of 2F(t) - F(2t)
  double max_margin_error = 0.0;  // max relative gap to (1 - e^{-t})^2
  double margin_at_1 = 0.0;
  bool erc_margin_ok = false;
  NspVerdict verdict = NspVerdict::holds_strict;
  std::vector<Ce1Row> rows;
  bool all_found = false;
};

Ce1Report verify_counterexample1(const std::vector<double>& d_list);

// Best t > 0 for the one-coordinate perturbation at radius d.
Ce1Row ce1_violation_search(double d);

// ---------------------------------------------------------------------------

enum class PlotKind { boundary_map, tradeoff_curve, probability_vs_k };
PlotKind parse_plot_kind(const std::string& s);
const char* to_string(PlotKind k);

// Whitespace-separated columns with a `#` header naming the axes, seed and
// config hash.
void emit_plot_data(PlotKind kind, const ExperimentConfig& cfg, std::ostream& out);

// ---------------------------------------------------------------------------

// CSV with a header row, `\n` line endings, doubles at 17 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void comment(const std::string& text);
  void header(const std::vector<std::string>& cols);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
  CsvWriter& cell(bool v) { return cell(std::string(v ? "true" : "false")); }
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

}  // namespace nsplab
