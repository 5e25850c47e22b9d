#include "nilheat/heat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nilheat/hermite.hpp"
#include "nilheat/quadrature.hpp"

namespace nilheat {

LineReport integrate_line(const std::function<cplx(double)>& f, double lo, double hi, double panel_width,
                          bool half_line, double tol, int order) {
  require(hi > lo && panel_width > 0.0, ErrorCode::invalid_argument, "bad integration range");
  if (half_line) lo = 0.0;
  double peak = 0.0;
  auto scan = [&](double a, double b) {
    for (int q = 0; q <= 64; ++q) peak = std::max(peak, std::abs(f(a + (b - a) * q / 64.0)));
  };
  scan(lo, hi);
  // grow until both ends are negligible against the running peak
  auto small = [&](double a, double dir) {
    const double span = hi - lo;
    for (double s : {0.0, span / 97.0, span / 31.0})
      if (std::abs(f(a + dir * s)) > 1e-17 * peak) return false;
    return true;
  };
  for (int it = 0;; ++it) {
    require(it < 60, ErrorCode::quadrature, "integration range did not close");
    bool grew = false;
    const double step = 0.5 * (hi - lo);
    if (!small(hi, -1.0)) {
      scan(hi, hi + step);
      hi += step;
      grew = true;
    }
    if (!half_line && !small(lo, 1.0)) {
      scan(lo - step, lo);
      lo -= step;
      grew = true;
    }
    if (!grew) break;
  }
  LineReport rep;
  rep.lo = lo;
  rep.hi = hi;
  if (peak == 0.0) return rep;
  int panels = std::max(1, int(std::ceil((hi - lo) / panel_width)));
  auto run = [&](int p, double& absint) {
    auto rule = quad::composite_legendre(lo, hi, p, order);
    cplx s = 0.0;
    absint = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      cplx v = f(rule.nodes[q]);
      s += rule.weights[q] * v;
      absint += rule.weights[q] * std::abs(v);
    }
    return s;
  };
  double absint = 0.0;
  cplx prev = run(panels, absint);
  for (int level = 0; level < 8; ++level) {
    panels *= 2;
    cplx cur = run(panels, absint);
    rep.change = std::abs(cur - prev) / std::max(absint, 1e-300);
    if (rep.change <= tol) {
      rep.value = cur;
      rep.panels = panels;
      return rep;
    }
    prev = cur;
  }
  std::ostringstream os;
  os << "line quadrature unstable on [" << lo << ", " << hi << "] after " << panels
     << " panels: last relative change " << rep.change << " > " << tol;
  throw Error(ErrorCode::quadrature, os.str());
}

KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "hn") return KernelKind::hn;
  if (s == "hn-lambda") return KernelKind::hn_lambda;
  if (s == "htype") return KernelKind::htype;
  throw Error(ErrorCode::invalid_argument, "unknown kernel '" + s + "' (expected hn, hn-lambda, htype)");
}

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::hn: return "hn";
    case KernelKind::hn_lambda: return "hn-lambda";
    case KernelKind::htype: return "htype";
  }
  return "?";
}

double lambda_over_sinh(double t, double lambda) {
  const double x = t * lambda;
  if (std::abs(x) < 1e-4) return (1.0 - x * x / 6.0) / t;
  return lambda / std::sinh(x);
}

double quarter_lambda_coth(double t, double lambda) {
  const double x = t * lambda;
  if (std::abs(x) < 1e-4) return 0.25 * (1.0 + x * x / 3.0) / t;
  return 0.25 * lambda / std::tanh(x);
}

namespace {

// n log(lambda/sinh(t lambda)) - t lambda^2 without overflow
double log_radial(double t, int n, double lambda) {
  const double x = std::abs(t * lambda);
  double ls;
  if (x < 1e-4) ls = std::log((1.0 - x * x / 6.0) / t);
  else ls = std::log(std::abs(lambda)) - (x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0));
  return n * ls - t * lambda * lambda;
}

cplx sinc(cplx w) {
  if (std::abs(w) < 1e-4) return 1.0 - w * w / 6.0;
  return std::sin(w) / w;
}

cplx sum_sq(const CplxVec& a) {
  cplx s = 0.0;
  for (auto v : a) s += v * v;
  return s;
}

}  // namespace

KernelEvaluator::KernelEvaluator(KernelKind kind, double t, int n, int m, double tol)
    : kind_(kind), t_(t), n_(n), m_(kind == KernelKind::htype ? m : 1), tol_(tol) {
  require(t > 0.0, ErrorCode::invalid_argument, "t must be positive");
  require(n >= 1 && m_ >= 1, ErrorCode::invalid_argument, "n and m must be positive");
  // unit mass: int over the centre is (2 pi)^m times the zero-frequency slice,
  // whose v-integral is t^{-n} (int e^{-s^2/4t} ds)^{2n}
  auto r = integrate_line([&](double s) { return cplx(std::exp(-s * s / (4.0 * t))); }, -4.0 * std::sqrt(t),
                          4.0 * std::sqrt(t), std::sqrt(t), false, 1e-13);
  const double mass = std::pow(2.0 * pi, m_) * std::pow(t, -n) * std::pow(r.value.real(), 2 * n);
  c_ = 1.0 / mass;
  if (m_ != 1 && m_ != 3) return;

  // cutoff from the worst case inside the strip
  const double re_s_min = -2.0 * n * strip_ * strip_;
  auto bound = [&](double lam) {
    return log_radial(t, n, lam) - quarter_lambda_coth(t, lam) * re_s_min + lam * strip_ * std::sqrt(double(m_)) +
           (m_ - 1) * std::log1p(lam);
  };
  const double thr = log_radial(t, n, 0.0) - 40.0;
  const double step = 0.05 / std::sqrt(t);
  double lam_max = 1.0 / std::sqrt(t);
  while (bound(lam_max) > thr) lam_max += step;

  auto probe = [&](double lam, double lr, double kap, cplx S, cplx arg) -> cplx {
    cplx e = std::exp(lr - kap * S);
    if (m_ == 3) return 4.0 * pi * lam * lam * e * sinc(lam * arg);
    return 2.0 * e * std::cos(lam * arg);
  };
  auto make = [&](double band_max, int panels) {
    Band b;
    b.band_max = band_max;
    auto rule = quad::composite_legendre(0.0, lam_max, panels, 16);
    b.lam = rule.nodes;
    b.w = rule.weights;
    for (double lam : b.lam) {
      b.log_rad.push_back(log_radial(t, n, lam));
      b.kappa.push_back(quarter_lambda_coth(t, lam));
    }
    return b;
  };
  auto apply = [&](const Band& b, cplx S, cplx arg, double& absint) {
    cplx acc = 0.0;
    absint = 0.0;
    for (std::size_t q = 0; q < b.lam.size(); ++q) {
      cplx v = probe(b.lam[q], b.log_rad[q], b.kappa[q], S, arg);
      acc += b.w[q] * v;
      absint += b.w[q] * std::abs(v);
    }
    return acc;
  };
  const std::vector<cplx> probes_S{0.0, re_s_min, 2.0 * n * cplx(1.0, strip_) * cplx(1.0, strip_)};
  for (int k = 0; k <= 7; ++k) {
    const double band_max = std::ldexp(1.0, k);
    const double w = std::min({1.0 / std::sqrt(t), 1.0 / t, 3.0 / (1.0 + band_max + strip_)});
    int panels = std::max(1, int(std::ceil(lam_max / w)));
    for (int level = 0;; ++level) {
      require(level < 8, ErrorCode::quadrature, "lambda rule did not stabilise for band " + std::to_string(k));
      Band coarse = make(band_max, panels), fine = make(band_max, 2 * panels);
      double worst = 0.0;
      for (cplx S : probes_S)
        for (cplx arg : {cplx(band_max), cplx(band_max, strip_)}) {
          double a1, a2;
          cplx v1 = apply(coarse, S, arg, a1), v2 = apply(fine, S, arg, a2);
          worst = std::max(worst, std::abs(v1 - v2) / std::max(a2, 1e-300));
        }
      if (worst <= tol_) {
        bands_.push_back(std::move(coarse));
        break;
      }
      panels *= 2;
    }
  }
}

std::size_t KernelEvaluator::node_count() const {
  std::size_t s = 0;
  for (const auto& b : bands_) s += b.lam.size();
  return s;
}

const KernelEvaluator::Band* KernelEvaluator::band_for(double osc, double im, double re_s_min) const {
  if (im > strip_ || re_s_min < -2.0 * n_ * strip_ * strip_) return nullptr;
  for (const auto& b : bands_)
    if (osc <= b.band_max) return &b;
  return nullptr;
}

template <class F>
cplx KernelEvaluator::radial_integral(const F& integrand, double osc, double im, double re_s_min) const {
  if (const Band* b = band_for(osc, im, re_s_min)) {
    cplx acc = 0.0;
    for (std::size_t q = 0; q < b->lam.size(); ++q) acc += b->w[q] * integrand(b->lam[q], b->log_rad[q], b->kappa[q]);
    return acc;
  }
  auto f = [&](double lam) { return integrand(lam, log_radial(t_, n_, lam), quarter_lambda_coth(t_, lam)); };
  const double w = std::min({1.0 / std::sqrt(t_), 1.0 / t_, 2.0 / (1.0 + osc + im)});
  return integrate_line(f, 0.0, 3.0 / std::sqrt(t_), w, true, tol_).value;
}

double KernelEvaluator::c_reference() const { return 1.0 / (std::pow(2.0 * pi, m_) * std::pow(4.0 * pi, n_)); }

namespace {

double max_imag(const CplxVec& a, double m = 0.0) {
  for (auto v : a) m = std::max(m, std::abs(v.imag()));
  return m;
}

// smallest Re of sum z_i^2 consistent with the bound used to build the bands
double re_sum_sq_min(const CplxVec& a) {
  double s = 0.0;
  for (auto v : a) s -= v.imag() * v.imag();
  return s;
}

}  // namespace

cplx KernelEvaluator::kt(const ComplexPoint& p) const {
  require(p.n() == n_, ErrorCode::dimension_mismatch, "point dimension differs from n");
  require(m_ == 1, ErrorCode::unsupported, "k_t needs a one-dimensional centre");
  const cplx S = sum_sq(p.z) + sum_sq(p.w);
  const cplx zeta = p.zeta;
  auto f = [&](double lam, double lr, double kap) { return 2.0 * std::exp(lr - kap * S) * std::cos(lam * zeta); };
  const double im = std::max(max_imag(p.w, max_imag(p.z)), std::abs(zeta.imag()));
  return c_ * radial_integral(f, std::abs(zeta.real()), im, re_sum_sq_min(p.z) + re_sum_sq_min(p.w));
}

cplx KernelEvaluator::kt_lambda(double lambda, const CplxVec& x, const CplxVec& u) const {
  return pt_lambda(lambda, x, u) * std::exp(-t_ * lambda * lambda);
}

cplx KernelEvaluator::pt_lambda(double lambda, const CplxVec& x, const CplxVec& u) const {
  require(int(x.size()) == n_ && int(u.size()) == n_, ErrorCode::dimension_mismatch, "point dimension");
  cplx e = log_radial(t_, n_, lambda) + t_ * lambda * lambda - quarter_lambda_coth(t_, lambda) * (sum_sq(x) + sum_sq(u));
  return 2.0 * pi * c_ * std::exp(e);
}

cplx KernelEvaluator::qt(const CplxVec& v, const CplxVec& z) const {
  require(int(v.size()) == 2 * n_ && int(z.size()) == m_, ErrorCode::dimension_mismatch,
          "q_t needs v in R^{2n} and z in R^m");
  const cplx S = sum_sq(v);
  const double im = std::max(max_imag(v), max_imag(z)), smin = re_sum_sq_min(v);
  if (m_ == 1) {
    auto f = [&](double r, double lr, double kap) { return 2.0 * std::exp(lr - kap * S) * std::cos(r * z[0]); };
    return c_ * radial_integral(f, std::abs(z[0].real()), im, smin);
  }
  if (m_ == 3) {
    const cplx rho = std::sqrt(sum_sq(z));
    auto f = [&](double r, double lr, double kap) {
      return 4.0 * pi * r * r * std::exp(lr - kap * S) * sinc(r * rho);
    };
    return c_ * radial_integral(f, std::abs(rho.real()), im, smin);
  }
  double rho = 0.0;
  for (auto c : z) {
    require(c.imag() == 0.0, ErrorCode::unsupported, "complex centre argument needs m = 1 or 3");
    rho += c.real() * c.real();
  }
  rho = std::sqrt(rho);
  const double half = 0.5 * m_;
  auto R = [&](double r) { return std::exp(cplx(log_radial(t_, n_, r)) - quarter_lambda_coth(t_, r) * S); };
  const double w = std::min({1.0 / std::sqrt(t_), 1.0 / t_, 2.0 / (1.0 + rho)});
  const double hi = 3.0 / std::sqrt(t_);
  if (rho == 0.0) {
    const double area = 2.0 * std::pow(pi, half) / std::tgamma(half);
    auto f = [&](double r) { return area * std::pow(r, m_ - 1) * R(r); };
    return c_ * integrate_line(f, 0.0, hi, w, true, tol_).value;
  }
  auto f = [&](double r) {
    return std::pow(2.0 * pi, half) * std::pow(rho, 1.0 - half) * std::pow(r, half) *
           std::cyl_bessel_j(half - 1.0, r * rho) * R(r);
  };
  return c_ * integrate_line(f, 0.0, hi, w, true, tol_).value;
}

cplx eval_kt(const KernelEvaluator& ev, const ComplexPoint& p) { return ev.kt(p); }
cplx eval_kt_lambda(const KernelEvaluator& ev, double lambda, const CplxVec& x, const CplxVec& u) {
  return ev.kt_lambda(lambda, x, u);
}
cplx eval_qt(const KernelEvaluator& ev, const CplxVec& v, const CplxVec& z) { return ev.qt(v, z); }

namespace {

// int phi(d - X) e^{-kappa X^2 + extra X} dX for one factor phi, d complex
cplx shifted_factor_integral(const Factor1D& f, cplx point, double kappa, cplx extra) {
  const double a = f.a, sa = std::sqrt(2.0 * a);
  const cplx d = point - f.b;
  const cplx L = 2.0 * a * d - 2.0 * pi * I * f.c + extra;
  const cplx c0 = -a * d * d + 2.0 * pi * I * f.c * point;
  auto poly = [&](cplx X) { return hermite_series(f.h, sa * (d - X)); };
  return quad::gaussian_poly_1d(kappa + a, L, c0, poly, f.degree() / 2 + 1);
}

}  // namespace

cplx heat_transform(const TestFunction& f, const KernelEvaluator& ev, const ComplexPoint& p) {
  const int n = ev.n();
  require(f.dim() == 2 * n + 1 && p.n() == n, ErrorCode::dimension_mismatch,
          "heat transform needs a function on R^{2n+1}");
  require(ev.m() == 1, ErrorCode::unsupported, "heat transform on H^n needs the H^n kernel");
  const double t = ev.t();
  struct Prep {
    cplx coef;
    Factor1D xi_hat;
    const Atom* atom;
  };
  std::vector<Prep> prep;
  double lo = -3.0 / std::sqrt(t), hi = 3.0 / std::sqrt(t), amin = 1e300;
  for (const auto& at : f.atoms()) {
    auto [g, kk] = factor_fourier(at.factors[2 * n]);
    prep.push_back({at.coef * kk, g, &at});
    lo = std::min(lo, 2.0 * pi * g.b - 3.0 / std::sqrt(t));
    hi = std::max(hi, 2.0 * pi * g.b + 3.0 / std::sqrt(t));
    for (const auto& fac : at.factors) amin = std::min(amin, fac.a);
  }
  auto integrand = [&](double lam) {
    const double kappa = quarter_lambda_coth(t, lam);
    cplx s = 0.0;
    for (const auto& pr : prep) {
      cplx v = pr.coef * pr.xi_hat.eval(lam / (2.0 * pi));
      for (int i = 0; i < n && v != 0.0; ++i) {
        v *= shifted_factor_integral(pr.atom->factors[i], p.z[i], kappa, -0.5 * I * lam * p.w[i]);
        v *= shifted_factor_integral(pr.atom->factors[n + i], p.w[i], kappa, 0.5 * I * lam * p.z[i]);
      }
      s += v;
    }
    return s * std::exp(log_radial(t, n, lam) + I * lam * p.zeta);
  };
  double osc = 1.0 + std::abs(p.zeta);
  for (int i = 0; i < n; ++i) osc += std::abs(p.z[i]) + std::abs(p.w[i]);
  const double w = std::min({1.0 / std::sqrt(t), std::sqrt(amin), 2.0 / osc});
  return ev.c() * integrate_line(integrand, lo, hi, w, false, ev.tol()).value;
}

double heat_log_prefactor(const KernelEvaluator& ev, double lambda) {
  return std::log(2.0 * pi * ev.c()) + log_radial(ev.t(), ev.n(), lambda);
}

HeatCoordinate::HeatCoordinate(const KernelEvaluator& ev, double lam, double li, long twist, const Factor1D& fa)
    : lam_(lam), li_(li), twist_(twist), fa_(fa), kappa_(quarter_lambda_coth(ev.t(), lam)),
      sa_(std::sqrt(2.0 * fa.a)) {
  Eigen::Matrix2cd Q;
  Q << kappa_, -0.25 * I * lam, -0.25 * I * lam, kappa_ + fa.a;
  Qi_ = Q.inverse();
  // log of the Cholesky diagonal product, on the branch with positive real parts
  log_norm_ = std::log(pi) - 0.5 * (std::log(cplx(kappa_)) + std::log(Q(1, 1) - Q(0, 1) * Q(0, 1) / kappa_));
  if (fa.h.size() > 1) {
    const auto& gh = quad::gauss_hermite(fa.degree() / 2 + 1);
    gh_nodes_ = gh.nodes;
    gh_weights_ = gh.weights;
  }
}

Scaled HeatCoordinate::operator()(cplx x, cplx u) const {
  const double a = fa_.a;
  // L(m) = L0 + m dL
  Eigen::Vector2cd L0, dL;
  L0 << 2.0 * pi * I * double(twist_) + 2.0 * kappa_ * x + 0.5 * I * lam_ * u,
      2.0 * a * fa_.b + 2.0 * pi * I * fa_.c + 2.0 * kappa_ * u - 0.5 * I * lam_ * x;
  dL << I * lam_ * li_, -2.0 * a * li_;
  const cplx base = -kappa_ * (x * x + u * u) + log_norm_;
  auto expo = [&](long m) {
    const double s = double(m) * li_ - fa_.b;
    const Eigen::Vector2cd L = L0 + double(m) * dL;
    return base - a * s * s + 2.0 * pi * I * fa_.c * (double(m) * li_) + 0.25 * (L.transpose() * Qi_ * L)(0, 0);
  };
  // polynomial part only through the U-marginal
  auto pre = [&](long m) -> cplx {
    if (fa_.h.size() == 1) return fa_.h[0];
    const cplx mean = 0.5 * (Qi_.row(1) * (L0 + double(m) * dL))(0, 0);
    const cplx sc = std::sqrt(Qi_(1, 1));
    cplx acc = 0.0;
    for (std::size_t q = 0; q < gh_nodes_.size(); ++q)
      acc += gh_weights_[q] * hermite_series(fa_.h, sa_ * (mean + sc * gh_nodes_[q] + double(m) * li_ - fa_.b));
    return acc / std::sqrt(pi);
  };
  return lattice_sum_scaled(expo, pre);
}

Scaled heat_coordinate_factor(const KernelEvaluator& ev, double lam, double li, long twist, const Factor1D& fa,
                              cplx x, cplx u) {
  return HeatCoordinate(ev, lam, li, twist, fa)(x, u);
}

Scaled heat_transform_slice_scaled(const NilFunction& F, const KernelEvaluator& ev, const CplxVec& z,
                                   const CplxVec& w) {
  const int n = F.n();
  require(ev.n() == n && ev.m() == 1, ErrorCode::dimension_mismatch, "kernel does not match the nilmanifold");
  require(int(z.size()) == n && int(w.size()) == n, ErrorCode::dimension_mismatch, "point dimension");
  RealVec l = F.chain().lengths();
  Scaled total;
  for (const auto& term : F.terms())
    for (const auto& at : term.f.atoms()) {
      Scaled v{term.coef * at.coef, 0.0};
      for (int i = 0; i < n && v.v != 0.0; ++i)
        v = v * heat_coordinate_factor(ev, F.lambda(), l[i], term.twist[i], at.factors[i], z[i], w[i]);
      total = total + v;
    }
  total.s += heat_log_prefactor(ev, F.lambda());
  return total;
}

cplx heat_transform_slice(const NilFunction& F, const KernelEvaluator& ev, const CplxVec& z, const CplxVec& w) {
  return heat_transform_slice_scaled(F, ev, z, w).value();
}

cplx heat_transform(const NilFunction& F, const KernelEvaluator& ev, const ComplexPoint& p) {
  return std::exp(I * F.lambda() * p.zeta) * heat_transform_slice(F, ev, p.z, p.w);
}

double heat_equation_residual(const std::function<cplx(double, const GroupPoint&)>& S, double t,
                              const GroupPoint& g, double h) {
  const int n = g.n();
  const cplx s0 = S(t, g);
  const cplx dt = (S(t + h, g) - S(t - h, g)) / (2.0 * h);
  cplx lap = 0.0;
  for (int dir = 0; dir < 2 * n + 1; ++dir) {
    GroupPoint e = GroupPoint::identity(n), em = GroupPoint::identity(n);
    if (dir < n) e.x[dir] = h, em.x[dir] = -h;
    else if (dir < 2 * n) e.u[dir - n] = h, em.u[dir - n] = -h;
    else e.xi = h, em.xi = -h;
    lap += (S(t, group_mul(g, e)) - 2.0 * s0 + S(t, group_mul(g, em))) / (h * h);
  }
  return std::abs(dt - lap) / std::max({std::abs(dt), std::abs(lap), std::abs(s0)});
}

double cauchy_riemann_residual(const std::function<cplx(cplx)>& F, cplx z, double h) {
  const cplx dx = (F(z + h) - F(z - h)) / (2.0 * h);
  const cplx dy = (F(z + I * h) - F(z - I * h)) / (2.0 * h);
  const cplx dzbar = 0.5 * (dx + I * dy), dz = 0.5 * (dx - I * dy);
  return std::abs(dzbar) / std::max(std::abs(dz), std::abs(F(z)));
}

}  // namespace nilheat
