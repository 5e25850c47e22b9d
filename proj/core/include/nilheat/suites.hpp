#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nilheat/lattice.hpp"
#include "nilheat/report.hpp"

namespace nilheat {

struct SuiteOptions {
  long k = 1;
  std::vector<std::string> l{"1"};
  IntVec j;                 // empty: the zero sector
  std::optional<double> t;  // each suite has its own default
  double tol = 0.0;         // > 0 replaces the tolerance of residual checks
  unsigned seed = 7;
  int N = 8;                // Hermite truncation for thm3.4
};

/// Suite ids accepted by run_suite, "all" last.
const std::vector<std::string>& suite_ids();
bool is_suite(const std::string& id);

/// Runs one suite. Throws Error(out_of_scope) for k = 0 and invalid_argument for an
/// unknown id (the message lists the known ones).
SuiteReport run_suite(const std::string& id, const SuiteOptions& opt = {});
/// "all" expands to every suite in order.
std::vector<SuiteReport> run_suites(const std::string& id, const SuiteOptions& opt = {});

}  // namespace nilheat
