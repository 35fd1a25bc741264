#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace nsplab {

struct SuiteOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Mutation switch: replaces mcp_zap by the same formula with alpha negated,
  // which must make the comparison-rule check fail.
  bool corrupt_mcp = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0 means none
};

// Ids 1..11 are the acceptance criteria; 12 is the MCP-versus-l1 comparison
// rule check.
constexpr int kCriterionCount = 12;

CriterionResult run_criterion(int id, const SuiteOptions& opts = {});

struct SuiteReport {
  std::string name;
  std::vector<CriterionResult> results;
  bool passed = false;
  // Deterministic for a given seed: wall-clock times are left out.
  nlohmann::json bundle;
};

// Ids run by a named suite; throws std::invalid_argument for unknown names.
std::vector<int> suite_criteria(const std::string& name);

// `paper_checks` runs every criterion, `quick` the sub-minute subset.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opts = {},
                      void (*on_result)(const CriterionResult&) = nullptr);

}  // namespace nsplab
