#include "doctest.h"

#include <cmath>
#include <random>

#include "nilheat/heat.hpp"
#include "nilheat/quadrature.hpp"

using namespace nilheat;

namespace {

ComplexPoint cp(double x, double u, double xi) { return ComplexPoint::from(GroupPoint{{x}, {u}, xi}); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// (f * k)(g) = int f(g h^{-1}) k(h) dh on H^1 by a product Gauss-Legendre grid
cplx brute_convolution(const std::function<cplx(const GroupPoint&)>& f,
                       const std::function<cplx(const GroupPoint&)>& k, const GroupPoint& g, double R, double Xi,
                       int panels_xu, int panels_xi) {
  auto rx = quad::composite_legendre(-R, R, panels_xu, 10);
  auto rxi = quad::composite_legendre(-Xi, Xi, panels_xi, 10);
  cplx s = 0.0;
  for (std::size_t a = 0; a < rx.size(); ++a)
    for (std::size_t b = 0; b < rx.size(); ++b)
      for (std::size_t c = 0; c < rxi.size(); ++c) {
        GroupPoint h{{rx.nodes[a]}, {rx.nodes[b]}, rxi.nodes[c]};
        cplx kv = k(h);
        if (std::abs(kv) < 1e-300) continue;
        s += rx.weights[a] * rx.weights[b] * rxi.weights[c] * f(group_mul(g, group_inv(h))) * kv;
      }
  return s;
}

}  // namespace

TEST_CASE("integrate_line") {
  auto r = integrate_line([](double x) { return cplx(std::exp(-x * x)); }, -1, 1, 0.5);
  CHECK(std::abs(r.value - std::sqrt(pi)) < 1e-13);
  auto h = integrate_line([](double x) { return cplx(std::exp(-x) * std::cos(3 * x)); }, 0, 1, 0.5, true);
  CHECK(std::abs(h.value - 0.1) < 1e-12);
}

TEST_CASE("k_t: calibration, positivity, symmetry") {
  for (int n : {1, 2}) {
    KernelEvaluator ev(KernelKind::hn, 0.5, n);
    CHECK(std::abs(ev.c() / ev.c_reference() - 1.0) < 1e-12);
  }
  KernelEvaluator ev(KernelKind::hn, 0.5, 1);
  for (auto [x, u, xi] : {std::tuple{0.0, 0.0, 0.0}, {0.5, -1.0, 0.7}, {1.5, 0.3, -2.0}, {0.0, 2.0, 3.0}}) {
    cplx a = ev.kt(cp(x, u, xi)), b = ev.kt(cp(x, u, -xi));
    CHECK(a.real() > 0.0);
    CHECK(std::abs(a.imag()) < 1e-14 * a.real());
    CHECK(rel(a, b) < 1e-12);
  }
}

TEST_CASE("k_t has unit mass (dense polar x product oracle)") {
  // the kernel depends on (x,u) only through x^2+u^2 when n = 1
  for (double t : {0.3, 0.5, 1.0}) {
    KernelEvaluator ev(KernelKind::hn, t, 1);
    const double R = 12.0 * std::sqrt(t), Xi = 14.0 * t + 6.0;
    auto rr = quad::composite_legendre(0.0, R, 6, 16);
    auto rxi = quad::composite_legendre(0.0, Xi, 12, 16);
    double mass = 0.0;
    for (std::size_t a = 0; a < rr.size(); ++a)
      for (std::size_t c = 0; c < rxi.size(); ++c)
        mass += 2.0 * pi * rr.nodes[a] * rr.weights[a] * 2.0 * rxi.weights[c] * ev.kt(cp(rr.nodes[a], 0.0, rxi.nodes[c])).real();
    CHECK(std::abs(mass - 1.0) < 1e-6);
  }
}

TEST_CASE("central slice is the xi-Fourier transform of k_t") {
  KernelEvaluator ev(KernelKind::hn, 0.4, 1);
  for (double lam : {0.5, 2.0, -3.0}) {
    CplxVec x{0.3}, u{-0.6};
    auto r = quad::composite_legendre(-30.0, 30.0, 60, 16);
    cplx s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q)
      s += r.weights[q] * ev.kt(cp(0.3, -0.6, r.nodes[q])) * std::exp(-I * lam * r.nodes[q]);
    CHECK(rel(s, ev.kt_lambda(lam, x, u)) < 1e-6);
  }
  // small lambda: Euclidean heat factor (4 pi t)^{-n} e^{-|z|^2/4t}
  for (int n : {1, 2}) {
    KernelEvaluator e2(KernelKind::hn_lambda, 0.7, n);
    CplxVec x(n, 0.4), u(n, -0.2);
    double z2 = n * (0.16 + 0.04);
    double eu = std::pow(4.0 * pi * 0.7, -n) * std::exp(-z2 / (4.0 * 0.7));
    CHECK(rel(e2.kt_lambda(1e-3, x, u), eu) < 1e-4);
    CplxVec mx(n, -0.4), mu(n, 0.2);
    CHECK(rel(e2.kt_lambda(0.8, x, u), e2.kt_lambda(0.8, mx, mu)) < 1e-15);
  }
}

TEST_CASE("q_t: m = 1 is k_t, m = 3 radial vs direct 3-D quadrature") {
  KernelEvaluator k1(KernelKind::hn, 0.5, 1);
  KernelEvaluator q1(KernelKind::htype, 0.5, 1, 1);
  for (auto [x, u, z] : {std::tuple{0.1, 0.2, 0.3}, {1.0, -0.5, 2.0}}) {
    CHECK(rel(q1.qt({cplx(x), cplx(u)}, {cplx(z)}), k1.kt(cp(x, u, z))) < 1e-8);
  }
  KernelEvaluator q3(KernelKind::htype, 0.6, 2, 3);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    CplxVec v(4), z(3), mz(3);
    for (auto& a : v) a = U(rng);
    for (int i = 0; i < 3; ++i) z[i] = U(rng), mz[i] = -z[i];
    cplx radial = q3.qt(v, z);
    CHECK(rel(q3.qt(v, mz), radial) < 1e-12);
    // brute force over a cube in u
    double S = 0.0;
    for (auto a : v) S += std::norm(a);
    auto r = quad::composite_legendre(-9.0, 9.0, 12, 12);
    cplx s = 0.0;
    for (std::size_t a = 0; a < r.size(); ++a)
      for (std::size_t b = 0; b < r.size(); ++b)
        for (std::size_t c = 0; c < r.size(); ++c) {
          double w = r.weights[a] * r.weights[b] * r.weights[c];
          double ux = r.nodes[a], uy = r.nodes[b], uz = r.nodes[c];
          double ru = std::sqrt(ux * ux + uy * uy + uz * uz);
          double val = std::exp(-0.6 * ru * ru) * std::pow(lambda_over_sinh(0.6, ru), 2) *
                       std::exp(-quarter_lambda_coth(0.6, ru) * S);
          s += w * val * std::exp(-I * (ux * z[0].real() + uy * z[1].real() + uz * z[2].real()));
        }
    CHECK(rel(q3.c() * s, radial) < 1e-5);
  }
}

TEST_CASE("semigroup k_t * k_s = k_{t+s}") {
  const double t = 0.4, s = 0.6;
  KernelEvaluator et(KernelKind::hn, t, 1), es(KernelKind::hn, s, 1), ets(KernelKind::hn, t + s, 1);
  auto kt = [&](const GroupPoint& g) { return et.kt(ComplexPoint::from(g)); };
  auto ks = [&](const GroupPoint& g) { return es.kt(ComplexPoint::from(g)); };
  for (auto g : {GroupPoint{{0.0}, {0.0}, 0.0}, GroupPoint{{0.5}, {-0.3}, 0.4}, GroupPoint{{-1.0}, {0.7}, -1.2}}) {
    cplx conv = brute_convolution(kt, ks, g, 7.0, 12.0, 3, 6);
    CHECK(rel(conv, ets.kt(ComplexPoint::from(g))) < 1e-4);
  }
}

TEST_CASE("heat transform of a test function") {
  const int n = 1;
  auto f = sample_functions(2 * n + 1, 2, 77)[1];
  KernelEvaluator ev(KernelKind::hn, 0.3, n);
  auto S = [&](double t, const GroupPoint& g) {
    KernelEvaluator e(KernelKind::hn, t, n);
    return heat_transform(f, e, ComplexPoint::from(g));
  };
  // against brute-force convolution with the kernel
  GroupPoint g{{0.2}, {-0.1}, 0.3};
  auto fh = [&](const GroupPoint& h) { return f(RealVec{h.x[0], h.u[0], h.xi}); };
  auto kh = [&](const GroupPoint& h) { return ev.kt(ComplexPoint::from(h)); };
  cplx brute = brute_convolution(fh, kh, g, 7.0, 10.0, 6, 12);
  // the grid itself is good to a few 1e-6 here (checked by refining it)
  CHECK(rel(heat_transform(f, ev, ComplexPoint::from(g)), brute) < 1e-5);

  std::mt19937 rng(8);
  std::uniform_real_distribution<double> U(-0.8, 0.8);
  for (int trial = 0; trial < 3; ++trial) {
    GroupPoint p{{U(rng)}, {U(rng)}, U(rng)};
    CHECK(heat_equation_residual(S, 0.3, p) < 1e-4);
    ComplexPoint c = ComplexPoint::from(p);
    auto along_z = [&](cplx z) {
      ComplexPoint q = c;
      q.z[0] = z;
      return heat_transform(f, ev, q);
    };
    auto along_zeta = [&](cplx z) {
      ComplexPoint q = c;
      q.zeta = z;
      return heat_transform(f, ev, q);
    };
    CHECK(cauchy_riemann_residual(along_z, cplx(p.x[0], 0.4)) < 1e-5);
    CHECK(cauchy_riemann_residual(along_zeta, cplx(p.xi, -0.3)) < 1e-5);
  }
  // approximate identity
  GroupPoint p{{0.1}, {0.2}, -0.1};
  double prev = 1e9;
  for (double t : {0.4, 0.2, 0.1, 0.05}) {
    double err = std::abs(S(t, p) - fh(p));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("heat transform on a central sector") {
  DivisorChain chain = DivisorChain::ones(1);
  const long k = 1;
  auto fs = sample_functions(1, 2, 91);
  NilFunction F = twist_j(weil_brezin(k, chain, fs[1]), {1});
  KernelEvaluator ev(KernelKind::hn, 0.1, 1);
  const double lam = F.lambda();
  // brute-force twisted convolution with the lambda slice
  CplxVec x{0.3}, u{-0.2};
  auto r = quad::composite_legendre(-5.0, 5.0, 32, 12);
  cplx s = 0.0;
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = 0; b < r.size(); ++b) {
      double xp = r.nodes[a], up = r.nodes[b];
      cplx ph = std::exp(0.5 * I * lam * (up * x[0] - xp * u[0]));
      s += r.weights[a] * r.weights[b] * ev.kt_lambda(lam, {cplx(xp)}, {cplx(up)}) * ph *
           F.G(CplxVec{x[0] - xp}, CplxVec{u[0] - up});
    }
  CHECK(rel(heat_transform_slice(F, ev, x, u), s) < 1e-8);

  // stays Gamma-invariant and inside sector j = 1
  auto SF = [&](const CplxVec& a, const CplxVec& b) { return heat_transform_slice(F, ev, a, b); };
  auto gens = make_gamma_l(chain).all();
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    GroupPoint g{{U(rng)}, {U(rng)}, U(rng)};
    cplx base = heat_transform(F, ev, ComplexPoint::from(g));
    for (const auto& gam : gens) {
      cplx moved = heat_transform(F, ev, ComplexPoint::from(group_mul(gam.to_double(), g)));
      CHECK(std::abs(moved - base) < 1e-8 * std::max(1.0, std::abs(base)));
    }
    CplxVec a{g.x[0]}, b{g.u[0]};
    CHECK(std::abs(project_sector_at(SF, k, chain, {0}, a, b)) < 1e-10);
    CHECK(std::abs(project_sector_at(SF, k, chain, {1}, a, b) - SF(a, b)) < 1e-10);
    auto S = [&](double t, const GroupPoint& p) {
      return heat_transform(F, KernelEvaluator(KernelKind::hn, t, 1), ComplexPoint::from(p));
    };
    CHECK(heat_equation_residual(S, 0.1, g, 1e-4) < 1e-4);
  }
}
