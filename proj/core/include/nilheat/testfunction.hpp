#pragma once

#include <vector>

#include "nilheat/common.hpp"

namespace nilheat {

/// One-dimensional factor
///   s -> sum_k h[k] H_k(sqrt(2a)(s-b)) exp(-a(s-b)^2) exp(2 pi i c s)
/// with a > 0 and b, c real.
struct Factor1D {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  CplxVec h{1.0};

  cplx eval(cplx s) const;
  int degree() const { return int(h.size()) - 1; }
};

/// coef * prod_i factors[i](v_i)
struct Atom {
  cplx coef = 1.0;
  std::vector<Factor1D> factors;

  cplx eval(const CplxVec& v) const;
};

/// Finite sum of separable Gaussian-Hermite atoms on R^dim. The family is closed
/// under translation, modulation, real affine changes of variable, the Fourier
/// transform and the Schroedinger action, so every operation below is exact.
class TestFunction {
 public:
  TestFunction() = default;
  explicit TestFunction(int dim) : dim_(dim) {}

  static TestFunction gaussian(int dim, double a, RealVec b = {}, RealVec c = {});
  /// H_alpha(sqrt(2a)(v-b)) exp(-a|v-b|^2) exp(2 pi i c.v), product over coordinates.
  static TestFunction hermite(int dim, double a, const std::vector<int>& alpha, RealVec b = {},
                              RealVec c = {});
  static TestFunction from_atom(Atom atom);

  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::vector<Atom>& atoms() { return atoms_; }
  bool empty() const { return atoms_.empty(); }

  cplx operator()(const CplxVec& v) const;
  cplx operator()(const RealVec& v) const;

  TestFunction& operator+=(const TestFunction& g);
  TestFunction operator+(const TestFunction& g) const;
  TestFunction operator*(cplx s) const;

  /// v -> f(v + shift)
  TestFunction translated(const RealVec& shift) const;
  /// v -> exp(2 pi i c.v) f(v)
  TestFunction modulated(const RealVec& c) const;
  /// y -> f(alpha * y + beta), coordinatewise, alpha_i != 0
  TestFunction affine(const RealVec& alpha, const RealVec& beta) const;
  /// hat f(xi) = int f(v) exp(-2 pi i v.xi) dv
  TestFunction fourier() const;
  /// hat f evaluated at xi without building the transform
  cplx fourier_at(const RealVec& xi) const;

  /// Exact L^2 inner product int f conj(g).
  cplx inner(const TestFunction& g) const;
  double norm2() const { return inner(*this).real(); }
  double norm() const;

  /// Largest atom width parameter and smallest (for truncation heuristics).
  double min_width() const;

 private:
  int dim_ = 0;
  std::vector<Atom> atoms_;
};

/// int_R F(s) conj(G(s)) ds for two factors, exact.
cplx factor_inner(const Factor1D& f, const Factor1D& g);
/// Fourier transform of one factor, returned as (factor, multiplicative constant).
std::pair<Factor1D, cplx> factor_fourier(const Factor1D& f);

/// Reproducible family of mixed Gaussian/Hermite test functions with random
/// centres, modulations and widths in [a_min, a_max].
std::vector<TestFunction> sample_functions(int dim, int count, unsigned seed, double a_min = 0.7,
                                           double a_max = 1.4);

}  // namespace nilheat
