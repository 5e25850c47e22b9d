#pragma once

#include <functional>
#include <string>

#include "nilheat/hgroup.hpp"
#include "nilheat/testfunction.hpp"
#include "nilheat/weilbrezin.hpp"

namespace nilheat {

/// Integral of f over [lo, hi] (or the half line when half_line is set) with
/// the range grown until the integrand is negligible at the ends and the
/// composite Gauss-Legendre rule doubled until two levels agree.
struct LineReport {
  cplx value;
  double lo = 0.0, hi = 0.0;
  int panels = 0;
  double change = 0.0;  // last refinement change, relative to int |f|
};
LineReport integrate_line(const std::function<cplx(double)>& f, double lo, double hi, double panel_width,
                          bool half_line = false, double tol = 1e-12, int order = 16);

enum class KernelKind { hn, hn_lambda, htype };
KernelKind parse_kernel_kind(const std::string& s);
std::string to_string(KernelKind k);

/// Heat kernels normalized for Delta = sum X_j^2 + U_j^2 + d_xi^2 (H^n) or
/// sum over v-directions plus the centre Laplacian (H-type, centre R^m).
/// v has 2n coordinates in both cases.
class KernelEvaluator {
 public:
  KernelEvaluator(KernelKind kind, double t, int n, int m = 1, double tol = 1e-12);
  /// Total lambda nodes over all precomputed bands (reported by the CLI).
  std::size_t node_count() const;

  KernelKind kind() const { return kind_; }
  double t() const { return t_; }
  int n() const { return n_; }
  int m() const { return m_; }
  double tol() const { return tol_; }
  /// Calibrated constant: the kernel integrates to 1 over the group.
  double c() const { return c_; }
  /// 1/((2 pi)^m (4 pi)^n), what calibration should reproduce.
  double c_reference() const;

  /// k_t at a (possibly complex) point of H^n.
  cplx kt(const ComplexPoint& p) const;
  /// int k_t(x,u,xi) e^{-i lambda xi} dxi in closed form.
  cplx kt_lambda(double lambda, const CplxVec& x, const CplxVec& u) const;
  /// kt_lambda without the e^{-t lambda^2} centre factor.
  cplx pt_lambda(double lambda, const CplxVec& x, const CplxVec& u) const;
  /// q_t(v, z) on the H-type group with centre R^m; complex z only for m in {1,3}.
  cplx qt(const CplxVec& v, const CplxVec& z) const;

 private:
  /// Fixed lambda nodes for |Re| of the oscillation argument up to band_max,
  /// imaginary parts up to `strip`; validated against a doubled rule.
  struct Band {
    double band_max;
    RealVec lam, w, log_rad, kappa;
  };
  const Band* band_for(double osc, double im, double re_s_min) const;
  template <class F>
  cplx radial_integral(const F& integrand, double osc, double im, double re_s_min) const;

  KernelKind kind_;
  double t_;
  int n_, m_;
  double tol_;
  double c_ = 0.0;
  double strip_ = 2.0;
  std::vector<Band> bands_;
};

cplx eval_kt(const KernelEvaluator& ev, const ComplexPoint& p);
cplx eval_kt_lambda(const KernelEvaluator& ev, double lambda, const CplxVec& x, const CplxVec& u);
cplx eval_qt(const KernelEvaluator& ev, const CplxVec& v, const CplxVec& z);

/// lambda / sinh(t lambda) and (lambda/4) coth(t lambda), continuous at 0.
double lambda_over_sinh(double t, double lambda);
double quarter_lambda_coth(double t, double lambda);

/// S_t f = f * k_t for f a test function on R^{2n+1} = H^n, at a complex point.
cplx heat_transform(const TestFunction& f, const KernelEvaluator& ev, const ComplexPoint& p);
/// S_t F for F in the central sector of index k; the result is again
/// e^{i lambda xi} times a function of (x,u).
cplx heat_transform(const NilFunction& F, const KernelEvaluator& ev, const ComplexPoint& p);
/// Same without the central factor e^{i lambda zeta}.
cplx heat_transform_slice(const NilFunction& F, const KernelEvaluator& ev, const CplxVec& z, const CplxVec& w);

Scaled heat_transform_slice_scaled(const NilFunction& F, const KernelEvaluator& ev, const CplxVec& z,
                                   const CplxVec& w);
/// Building blocks of the slice: log of 2 pi c (lambda/sinh t lambda)^n e^{-t lambda^2},
/// and one coordinate of the twisted convolution of a single twisted atom.
double heat_log_prefactor(const KernelEvaluator& ev, double lambda);
Scaled heat_coordinate_factor(const KernelEvaluator& ev, double lambda, double l, long twist, const Factor1D& f,
                              cplx z, cplx w);
/// heat_coordinate_factor with the point-independent algebra done once.
class HeatCoordinate {
 public:
  HeatCoordinate(const KernelEvaluator& ev, double lambda, double l, long twist, const Factor1D& f);
  Scaled operator()(cplx z, cplx w) const;

 private:
  double lam_, li_;
  long twist_;
  Factor1D fa_;
  double kappa_, sa_;
  Eigen::Matrix2cd Qi_;
  cplx log_norm_;
  RealVec gh_nodes_, gh_weights_;
};

/// Residuals used by the verification suites.
/// |d_t S_t f - Delta S_t f| / max(1, |S_t f|) at a real point, by left-invariant
/// second differences with step h and a centred t-difference.
double heat_equation_residual(const std::function<cplx(double, const GroupPoint&)>& S, double t,
                              const GroupPoint& g, double h = 1e-3);
/// |d/d zbar| / max(1, |d/dz|) of a map C -> C on a 4-point stencil.
double cauchy_riemann_residual(const std::function<cplx(cplx)>& F, cplx z, double h = 1e-4);

}  // namespace nilheat
