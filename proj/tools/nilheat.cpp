// nilheat: evaluate heat kernels, run verification suites, reduce lattices.
#include <algorithm>
#include <cmath>
#include <optional>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nilheat/heat.hpp"
#include "nilheat/lattice.hpp"
#include "nilheat/suites.hpp"
#include "nilheat/weilbrezin.hpp"

using nlohmann::json;
using namespace nilheat;

namespace {

enum Exit { ok = 0, usage = 1, numeric = 2, suite_failure = 3 };

// "1.5", "-2i", "0.3-1e-2i", "i"
cplx parse_complex(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  require(!s.empty(), ErrorCode::invalid_argument, "empty coordinate");
  auto real = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == t.size() && !t.empty(), ErrorCode::invalid_argument, "bad coordinate '" + s + "'");
    return v;
  };
  if (s.back() != 'i') return real(s);
  const std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign or the leading sign
  std::size_t cut = std::string::npos;
  for (std::size_t p = body.size(); p-- > 1;)
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      cut = p;
      break;
    }
  auto imag = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return real(t);
  };
  if (cut == std::string::npos) return cplx(0.0, imag(body));
  return cplx(real(body.substr(0, cut)), imag(body.substr(cut)));
}

std::vector<cplx> parse_point(const std::string& s) {
  std::vector<cplx> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
  return out;
}

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

void emit(const json& j, bool pretty_text, const std::string& text) {
  if (pretty_text) std::cout << text;
  else std::cout << j.dump(2) << "\n";
}

int fail(ErrorCode code, const std::string& msg) {
  std::cout << json{{"error", to_string(code)}, {"message", msg}}.dump(2) << "\n";
  std::cerr << "error: " << msg << "\n";
  return code == ErrorCode::out_of_scope || code == ErrorCode::invalid_argument ||
                 code == ErrorCode::dimension_mismatch
             ? usage
             : numeric;
}

struct Common {
  std::string csv;
  bool json_out = false, pretty = false;
  unsigned seed = 7;
};

int cmd_eval(const std::string& kernel_s, int n_flag, int m, double t, const std::vector<std::string>& points, long k,
             const std::vector<std::string>& l, const Common& c) {
  const KernelKind kind = parse_kernel_kind(kernel_s);
  json rows = json::array();
  std::vector<std::vector<cplx>> coords;
  std::vector<cplx> values;
  std::optional<KernelEvaluator> ev;
  for (const auto& ps : points) {
    const auto p = parse_point(ps);
    const int len = int(p.size());
    int n = n_flag;
    if (kind == KernelKind::hn) {
      if (n <= 0) n = (len - 1) / 2;
      require(n >= 1 && len == 2 * n + 1, ErrorCode::dimension_mismatch, "hn needs 2n+1 coordinates (x, u, xi)");
    } else if (kind == KernelKind::hn_lambda) {
      if (n <= 0) n = len / 2;
      require(n >= 1 && len == 2 * n, ErrorCode::dimension_mismatch, "hn-lambda needs 2n coordinates (x, u)");
    } else {
      if (n <= 0) n = (len - m) / 2;
      require(n >= 1 && len == 2 * n + m, ErrorCode::dimension_mismatch, "htype needs 2n+m coordinates (v, z)");
    }
    if (!ev || ev->n() != n) ev.emplace(kind, t, n, kind == KernelKind::htype ? m : 1);
    cplx val;
    if (kind == KernelKind::hn) {
      ComplexPoint q{CplxVec(p.begin(), p.begin() + n), CplxVec(p.begin() + n, p.begin() + 2 * n), p[2 * n]};
      val = ev->kt(q);
    } else if (kind == KernelKind::hn_lambda) {
      DivisorChain chain = DivisorChain::parse(l.size() == std::size_t(n) ? l : std::vector<std::string>(n, "1"));
      val = ev->kt_lambda(lambda_of(k, chain), CplxVec(p.begin(), p.begin() + n), CplxVec(p.begin() + n, p.end()));
    } else {
      val = ev->qt(CplxVec(p.begin(), p.begin() + 2 * n), CplxVec(p.begin() + 2 * n, p.end()));
    }
    require(std::isfinite(val.real()) && std::isfinite(val.imag()), ErrorCode::quadrature, "non-finite kernel value");
    json pj = json::array();
    for (auto z : p) pj.push_back(z.imag() == 0.0 ? json(z.real()) : cjson(z));
    rows.push_back({{"point", pj}, {"value", cjson(val)}});
    coords.push_back(p);
    values.push_back(val);
  }
  json out{{"kernel", to_string(kind)}, {"t", t}, {"m", kind == KernelKind::htype ? m : 1},
           {"n", ev ? ev->n() : 0},      {"c", ev ? ev->c() : 0.0}, {"seed", c.seed}, {"results", rows}};
  if (kind == KernelKind::hn_lambda) out["k"] = k;
  if (!c.csv.empty()) {
    std::ofstream f(c.csv);
    require(bool(f), ErrorCode::invalid_argument, "cannot write " + c.csv);
    f.precision(17);
    for (std::size_t r = 0; r < coords.size(); ++r) {
      for (auto z : coords[r]) {
        f << z.real();
        if (z.imag() != 0.0) f << std::showpos << z.imag() << std::noshowpos << "i";
        f << ",";
      }
      f << values[r].real() << "," << values[r].imag() << "\n";
    }
  }
  std::ostringstream text;
  text.precision(12);
  for (std::size_t r = 0; r < coords.size(); ++r) text << kernel_s << "  " << points[r] << "  ->  " << values[r] << "\n";
  emit(out, c.pretty, text.str());
  return ok;
}

int cmd_verify(const std::string& suite, const SuiteOptions& opt, const Common& c) {
  if (!is_suite(suite)) {
    std::string known;
    for (const auto& s : suite_ids()) known += "  " + s + "\n";
    std::cerr << "unknown suite '" << suite << "'. Available suites:\n" << known;
    std::cout << json{{"error", "unknown_suite"}, {"suite", suite}, {"available", suite_ids()}}.dump(2) << "\n";
    return usage;
  }
  const auto reports = run_suites(suite, opt);
  bool pass = true;
  json arr = json::array();
  std::string text;
  for (const auto& r : reports) {
    pass = pass && r.pass();
    arr.push_back(to_json(r));
    text += pretty(r);
  }
  json out = reports.size() == 1 ? arr[0]
                                 : json{{"suite", suite}, {"seed", opt.seed}, {"status", pass ? "PASS" : "FAIL"},
                                        {"reports", arr}};
  if (!c.csv.empty()) {
    std::ofstream f(c.csv);
    require(bool(f), ErrorCode::invalid_argument, "cannot write " + c.csv);
    f.precision(17);
    f << "suite,check,value,tol,status\n";
    for (const auto& r : reports)
      for (const auto& ch : r.checks)
        f << r.suite << ",\"" << ch.name << "\"," << ch.value << "," << ch.tol << "," << (ch.pass ? "PASS" : "FAIL")
          << "\n";
  }
  emit(out, c.pretty, text + (reports.size() > 1 ? std::string("overall ") + (pass ? "PASS" : "FAIL") + "\n" : ""));
  return pass ? ok : suite_failure;
}

int cmd_normal_form(const std::string& path, const Common& c) {
  std::ifstream f(path);
  require(bool(f), ErrorCode::invalid_argument, "cannot read " + path);
  json in;
  try {
    in = json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed JSON: ") + e.what());
  }
  const RatMatrix basis = read_basis_json(in);
  const NormalForm nf = normal_form(basis);
  const RatMatrix rebuilt = rat_transpose(rat_mul(nf.A_scaled, rat_transpose(divisor_basis(nf.chain))));
  require(same_module(basis, rebuilt), ErrorCode::not_a_lattice, "normal form does not reproduce the lattice");
  json out = normal_form_json(nf);
  out["verified"] = true;
  emit(out, c.pretty, "d = " + out["d"].get<std::string>() + "\nl = " + nf.chain.str() + "\n" + out.dump(2) + "\n");
  return ok;
}

const CLI::Validator positive_time(
    [](std::string& v) -> std::string {
      try {
        if (std::stod(v) > 0.0) return {};
      } catch (const std::exception&) {
      }
      return "t must be positive, got " + v;
    },
    "POSITIVE");

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat kernels, sector transforms and lattice reduction on Heisenberg and H-type groups"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--csv", common.csv, "write rows to this CSV file");
    s->add_flag("--json", common.json_out, "JSON output (default)");
    s->add_flag("--pretty", common.pretty, "human-readable output");
    s->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
  };

  std::string kernel = "hn";
  int n = 0, m = 1;
  double t = 0.0;
  std::vector<std::string> points;
  long k = 1;
  std::vector<std::string> l;
  auto* ev = app.add_subcommand("eval", "evaluate a heat kernel");
  ev->add_option("--kernel", kernel, "hn, hn-lambda or htype")
      ->check(CLI::IsMember({"hn", "hn-lambda", "htype"}))
      ->capture_default_str();
  ev->add_option("--n", n, "half the dimension of v (default: from the point)");
  ev->add_option("--m", m, "centre dimension (htype)")->capture_default_str()->check(CLI::PositiveNumber);
  ev->add_option("--t", t, "time")->required()->check(positive_time);
  ev->add_option("--point", points, "comma-separated coordinates, complex as a+bi; repeatable")->required();
  ev->add_option("--k", k, "central index for hn-lambda")->capture_default_str();
  ev->add_option("--l", l, "divisor chain for hn-lambda")->delimiter(',');
  add_common(ev);

  std::string suite;
  SuiteOptions sopt;
  std::vector<std::string> lv{"1"};
  std::vector<long> jv;
  double tv = 0.0;
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("--suite", suite, "suite id, or 'all'")->required();
  ver->add_option("--k", sopt.k, "central index")->capture_default_str();
  ver->add_option("--l", lv, "divisor chain, comma list")->delimiter(',');
  ver->add_option("--j", jv, "sector index, comma list")->delimiter(',');
  auto* topt = ver->add_option("--t", tv, "time")->check(positive_time);
  ver->add_option("--tol", sopt.tol, "replace residual tolerances")->check(CLI::NonNegativeNumber);
  ver->add_option("--truncation", sopt.N, "Hermite truncation N for thm3.4")->capture_default_str()->check(
      CLI::Range(1, 12));
  add_common(ver);

  std::string basis;
  auto* nf = app.add_subcommand("normal-form", "reduce a lattice basis to d, l, A");
  nf->add_option("--basis", basis, "lattice JSON file")->required()->check(CLI::ExistingFile);
  add_common(nf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*ev) return cmd_eval(kernel, n, m, t, points, k, l, common);
    if (*ver) {
      sopt.l = lv;
      sopt.j.assign(jv.begin(), jv.end());
      if (*topt) sopt.t = tv;
      sopt.seed = common.seed;
      return cmd_verify(suite, sopt, common);
    }
    return cmd_normal_form(basis, common);
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numeric;
  }
}
