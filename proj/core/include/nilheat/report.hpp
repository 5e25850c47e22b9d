#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace nilheat {

struct CheckResult {
  std::string name;
  double value = 0.0;  // measured residual, spread or ratio
  double tol = 0.0;    // pass iff value <= tol (or a boolean check with value 0/1 and tol 0)
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::string anchor;  // statement the suite checks
  unsigned seed = 0;
  std::vector<CheckResult> checks;
  nlohmann::json measured;  // suite-specific numbers (ratios, constants)
  double runtime = 0.0;     // seconds

  bool pass() const;
  /// Adds a check; pass iff value <= tol and value is finite.
  void add(std::string name, double value, double tol, std::string detail = {});
  /// Adds a boolean check.
  void add_bool(std::string name, bool ok, std::string detail = {});
};

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const SuiteReport& r);
SuiteReport suite_report_from_json(const nlohmann::json& j);
/// Aligned text table for --pretty.
std::string pretty(const SuiteReport& r);

}  // namespace nilheat
