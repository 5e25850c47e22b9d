#pragma once

#include <functional>

#include "nilheat/hgroup.hpp"
#include "nilheat/lattice.hpp"
#include "nilheat/testfunction.hpp"

namespace nilheat {

/// Sum over m in Z of pre(m) exp(E(m)) where Re E is a concave quadratic in m.
/// The range is centred on the vertex and cut where Re E has dropped by `drop`.
cplx lattice_sum(const std::function<cplx(long)>& exponent, const std::function<cplx(long)>& pre,
                 double drop = 50.0, long max_terms = 200000);
/// Same sum returned as v e^s so that large exponents do not overflow.
Scaled lattice_sum_scaled(const std::function<cplx(long)>& exponent, const std::function<cplx(long)>& pre,
                          double drop = 50.0, long max_terms = 200000);

/// One term coef * e^{2 pi i twist.x} V_k f, without the central factor.
struct NilTerm {
  cplx coef = 1.0;
  IntVec twist;
  TestFunction f;
};

/// Quasi-periodic function G(x,u) of central index k, stored as a finite
/// combination of twisted Weil-Brezin images. F(x,u,xi) = e^{i lambda(k) xi} G(x,u).
class NilFunction {
 public:
  NilFunction() = default;
  NilFunction(long k, DivisorChain chain);

  long k() const { return k_; }
  const DivisorChain& chain() const { return chain_; }
  int n() const { return chain_.n(); }
  double lambda() const { return lambda_; }
  const std::vector<NilTerm>& terms() const { return terms_; }
  void add_term(NilTerm t);

  cplx G(const CplxVec& x, const CplxVec& u) const;
  cplx G(const RealVec& x, const RealVec& u) const;
  cplx operator()(const ComplexPoint& p) const;
  cplx operator()(const GroupPoint& g) const;

  NilFunction operator+(const NilFunction& o) const;
  NilFunction operator*(cplx s) const;

 private:
  long k_ = 1;
  DivisorChain chain_;
  double lambda_ = 0.0;
  RealVec l_;
  std::vector<NilTerm> terms_;
};

double lambda_of(long k, const DivisorChain& chain);

NilFunction weil_brezin(long k, const DivisorChain& chain, const TestFunction& f);
/// Multiplies by e^{2 pi i j.x}; j must lie in A_k.
NilFunction twist_j(const NilFunction& F, const IntVec& j);
/// Component in H_{k,j}: keeps terms whose twist is congruent to j modulo 2|k|p.
NilFunction project_sector(const NilFunction& F, const IntVec& j);
/// The averaging projection evaluated pointwise from samples of G alone.
cplx project_sector_at(const std::function<cplx(const CplxVec&, const CplxVec&)>& G, long k,
                       const DivisorChain& chain, const IntVec& j, const CplxVec& x, const CplxVec& u);
/// f_j with F = V_{k,j} f_j; throws sector_mismatch if F has components outside sector j.
TestFunction invert_sector(const NilFunction& F, const IntVec& j);
/// c_m(u) = int_{[0,1)^n} G(x,u) e^{-2 pi i j.x} e^{-i lambda x.u/2} e^{-i lambda (ml).x} dx
cplx fourier_coefficient(const NilFunction& F, const IntVec& j, const IntVec& m, const RealVec& u,
                         int points = 64);
/// Residual of the extra quasi-period condition of sector j at one point, for shift d.
cplx sector_shift_defect(const std::function<cplx(const CplxVec&, const CplxVec&)>& G, long k,
                         const DivisorChain& chain, const IntVec& j, const IntVec& d,
                         const CplxVec& x, const CplxVec& u);

/// (nu_j, f) = sum_m hat f((j_1 + 2k m_1)/l_1, ..., (j_n + 2k m_n p_n)/l_n)
cplx nu_j_apply(long k, const DivisorChain& chain, const IntVec& j, const TestFunction& f);
/// g_j with g_j(l s) = hat f(j/l + (2k/l_1) s).
TestFunction nu_j_partner(long k, const DivisorChain& chain, const IntVec& j, const TestFunction& f);
/// Max relative residual of (nu_j, pi_lambda(x,u,xi) f) = V_{k,j} g_j(u/l, -lx, xi)
/// over `probes` random points.
double nu_j_coefficient_check(long k, const DivisorChain& chain, const IntVec& j, const TestFunction& f,
                    int probes = 20, unsigned seed = 1);

/// L^2 inner product over the fundamental domain [0,1)^n x Q(l) (central
/// variable normalized away), by periodic trapezoid rules of `points` per axis;
/// refines by doubling until two levels agree to tol.
struct L2Options {
  int points = 64;
  int max_points = 1024;
  double tol = 1e-10;
};
cplx l2m_inner(const NilFunction& F, const NilFunction& G, const L2Options& opt = {});
double l2m_norm(const NilFunction& F, const L2Options& opt = {});

}  // namespace nilheat
