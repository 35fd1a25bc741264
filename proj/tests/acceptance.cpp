// Runs every acceptance criterion and prints one PASS/FAIL line per
// criterion. Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "nsplab/suite.hpp"

int main(int argc, char** argv) {
  nsplab::SuiteOptions opts;
  if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);
  int failures = 0;
  for (int id = 1; id <= nsplab::kCriterionCount; ++id) {
    const nsplab::CriterionResult r = nsplab::run_criterion(id, opts);
    std::printf("%s criterion %d: %s (%.2f s) -- %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
    failures += !r.passed;
  }
  std::printf("%d of %d criteria passed\n", nsplab::kCriterionCount - failures, nsplab::kCriterionCount);
  return failures == 0 ? 0 : 1;
}
