#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilheat {

using cplx = std::complex<double>;
using RealVec = std::vector<double>;
using CplxVec = std::vector<cplx>;
using IntVec = std::vector<long>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

enum class ErrorCode {
  dimension_mismatch,
  invalid_argument,
  degenerate,
  out_of_scope,
  not_a_lattice,
  exact_arithmetic_required,
  truncation,
  quadrature,
  axiom_violation,
  divergence,
  sector_mismatch,
  unsupported,
};

/// v * e^s, for quantities whose magnitude leaves the double range.
struct Scaled {
  cplx v = 0.0;
  double s = 0.0;
  cplx value() const { return v == 0.0 ? cplx(0.0) : v * std::exp(s); }
};
inline Scaled operator*(const Scaled& a, const Scaled& b) { return {a.v * b.v, a.s + b.s}; }
inline Scaled operator*(const Scaled& a, cplx c) { return {a.v * c, a.s}; }
inline Scaled operator+(const Scaled& a, const Scaled& b) {
  if (a.v == 0.0) return b;
  if (b.v == 0.0) return a;
  if (a.s >= b.s) return {a.v + b.v * std::exp(b.s - a.s), a.s};
  return {b.v + a.v * std::exp(a.s - b.s), b.s};
}

const char* to_string(ErrorCode code);

/// Structured error carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool ok, ErrorCode code, const std::string& msg) {
  if (!ok) throw Error(code, msg);
}

}  // namespace nilheat
