#include "nilheat/report.hpp"

#include <cmath>
#include <cstdio>

#include "nilheat/common.hpp"

namespace nilheat {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::out_of_scope: return "out_of_scope";
    case ErrorCode::not_a_lattice: return "not_a_lattice";
    case ErrorCode::exact_arithmetic_required: return "exact_arithmetic_required";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::quadrature: return "quadrature";
    case ErrorCode::axiom_violation: return "axiom_violation";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::sector_mismatch: return "sector_mismatch";
    case ErrorCode::unsupported: return "unsupported";
  }
  return "unknown";
}

bool SuiteReport::pass() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void SuiteReport::add(std::string name, double value, double tol, std::string detail) {
  checks.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol, std::move(detail)});
}

void SuiteReport::add_bool(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, ok, std::move(detail)});
}

namespace {

// JSON has no NaN or infinity; keep them as strings so the report stays lossless
nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

double from_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  return std::nan("");
}

}  // namespace

nlohmann::json to_json(const CheckResult& c) {
  nlohmann::json j{{"name", c.name}, {"value", number(c.value)}, {"tol", number(c.tol)},
                   {"status", c.pass ? "PASS" : "FAIL"}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

nlohmann::json to_json(const SuiteReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  nlohmann::json j{{"suite", r.suite},   {"anchor", r.anchor},
                   {"seed", r.seed},     {"status", r.pass() ? "PASS" : "FAIL"},
                   {"runtime_s", r.runtime}, {"checks", checks}};
  if (!r.measured.is_null()) j["measured"] = r.measured;
  return j;
}

SuiteReport suite_report_from_json(const nlohmann::json& j) {
  SuiteReport r;
  r.suite = j.at("suite").get<std::string>();
  r.anchor = j.at("anchor").get<std::string>();
  r.seed = j.at("seed").get<unsigned>();
  r.runtime = j.at("runtime_s").get<double>();
  if (j.contains("measured")) r.measured = j.at("measured");
  for (const auto& c : j.at("checks")) {
    CheckResult cr;
    cr.name = c.at("name").get<std::string>();
    cr.value = from_number(c.at("value"));
    cr.tol = from_number(c.at("tol"));
    cr.pass = c.at("status").get<std::string>() == "PASS";
    if (c.contains("detail")) cr.detail = c.at("detail").get<std::string>();
    r.checks.push_back(cr);
  }
  return r;
}

std::string pretty(const SuiteReport& r) {
  std::string out = r.suite + "  (" + r.anchor + ")  seed " + std::to_string(r.seed) + "  " +
                    (r.pass() ? "PASS" : "FAIL");
  char buf[64];
  std::snprintf(buf, sizeof buf, "  %.1f s\n", r.runtime);
  out += buf;
  std::size_t w = 0;
  for (const auto& c : r.checks) w = std::max(w, c.name.size());
  for (const auto& c : r.checks) {
    out += "  " + c.name + std::string(w - c.name.size() + 2, ' ');
    std::snprintf(buf, sizeof buf, "%-5s %11.3e <= %9.2e", c.pass ? "PASS" : "FAIL", c.value, c.tol);
    out += buf;
    if (!c.detail.empty()) out += "  " + c.detail;
    out += "\n";
  }
  if (!r.measured.is_null()) out += "  measured: " + r.measured.dump() + "\n";
  return out;
}

}  // namespace nilheat
