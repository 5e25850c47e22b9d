#include "doctest.h"

#include <cmath>
#include <random>

#include "nilheat/weilbrezin.hpp"

using namespace nilheat;

namespace {

DivisorChain chain12() { return DivisorChain::parse({"1", "2"}); }

GroupPoint random_point(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  GroupPoint g = GroupPoint::identity(n);
  for (int i = 0; i < n; ++i) g.x[i] = U(rng), g.u[i] = U(rng);
  g.xi = U(rng);
  return g;
}

GroupPoint to_point(const RatPoint& r) { return r.to_double(); }

// direct evaluation of one term straight from the series, no shared helpers
cplx brute_V(long k, const DivisorChain& chain, const TestFunction& f, const RealVec& x, const RealVec& u) {
  const int n = chain.n();
  RealVec l = chain.lengths();
  const double lambda = 4.0 * pi * double(k) / l[0];
  cplx s = 0.0;
  std::vector<int> m(n, -12);
  for (;;) {
    double ph = 0.0;
    RealVec v(n);
    for (int i = 0; i < n; ++i) {
      ph += lambda * l[i] * m[i] * x[i] + 0.5 * lambda * x[i] * u[i];
      v[i] = u[i] + m[i] * l[i];
    }
    s += std::exp(I * ph) * f(v);
    int i = 0;
    while (i < n && ++m[i] > 12) m[i++] = -12;
    if (i == n) break;
  }
  return s;
}

}  // namespace

TEST_CASE("lattice_sum matches a theta function") {
  // sum_m exp(-pi t m^2) = t^{-1/2} sum_m exp(-pi m^2/t)
  const double t = 0.37;
  cplx lhs = lattice_sum([&](long m) { return cplx(-pi * t * m * m, 0.0); }, [](long) { return cplx(1.0); });
  cplx rhs = lattice_sum([&](long m) { return cplx(-pi * m * m / t, 0.0); }, [](long) { return cplx(1.0); });
  CHECK(std::abs(lhs - rhs / std::sqrt(t)) < 1e-12);
  CHECK_THROWS_AS(lattice_sum([](long m) { return cplx(double(m) * m, 0.0); }, [](long) { return cplx(1.0); }),
                  Error);
  try {
    lattice_sum([](long m) { return cplx(-1e-9 * m * m, 0.0); }, [](long) { return cplx(1.0); });
    FAIL("expected truncation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::truncation);
    CHECK(std::string(e.what()).find("M =") != std::string::npos);
  }
}

TEST_CASE("Weil-Brezin evaluation against the raw series") {
  std::mt19937 rng(3);
  for (auto chain : {DivisorChain::ones(1), chain12()}) {
    const int n = chain.n();
    for (long k : {1L, 2L, -1L}) {
      auto fs = sample_functions(n, 3, 11 + unsigned(k));
      for (const auto& f : fs) {
        NilFunction F = weil_brezin(k, chain, f);
        GroupPoint g = random_point(rng, n);
        CHECK(std::abs(F.G(g.x, g.u) - brute_V(k, chain, f, g.x, g.u)) < 1e-10);
      }
    }
  }
}

TEST_CASE("Weil-Brezin images are Gamma-invariant") {
  std::mt19937 rng(5);
  for (auto chain : {DivisorChain::ones(1), chain12()}) {
    const int n = chain.n();
    auto gens = make_gamma_l(chain).all();
    for (long k : {1L, 2L}) {
      auto f = sample_functions(n, 2, 7)[1];
      NilFunction F = twist_j(weil_brezin(k, chain, f), IntVec(n, 1));
      for (int trial = 0; trial < 5; ++trial) {
        GroupPoint g = random_point(rng, n);
        cplx base = F(g);
        for (const auto& gam : gens) {
          cplx a = F(group_mul(to_point(gam), g));
          cplx b = F(group_mul(group_inv(to_point(gam)), g));
          CHECK(std::abs(a - base) < 1e-10 * std::max(1.0, std::abs(base)));
          CHECK(std::abs(b - base) < 1e-10 * std::max(1.0, std::abs(base)));
        }
      }
    }
  }
}

TEST_CASE("Weil-Brezin isometry in L2(M)") {
  for (auto chain : {DivisorChain::ones(1), chain12()})
    for (long k : {1L, 2L}) {
      auto fs = sample_functions(chain.n(), 5, 21);
      for (const auto& f : fs) {
        double r = l2m_norm(weil_brezin(k, chain, f)) / f.norm();
        CHECK(std::abs(r - 1.0) < 1e-8);
      }
      // polarization: inner products carry over too
      cplx a = l2m_inner(weil_brezin(k, chain, fs[0]), weil_brezin(k, chain, fs[1]));
      CHECK(std::abs(a - fs[0].inner(fs[1])) < 1e-8);
    }
}

TEST_CASE("sector projection: literal average agrees with twist bookkeeping") {
  DivisorChain chain = chain12();
  const long k = 1;
  auto fs = sample_functions(2, 3, 31);
  // a function spread across several sectors, including a shifted representative
  NilFunction F = weil_brezin(k, chain, fs[0]) + twist_j(weil_brezin(k, chain, fs[1]), {1, 3}) * cplx(0.3, -0.8) +
                  twist_j(weil_brezin(k, chain, fs[2]), {0, 2});
  auto Gf = [&](const CplxVec& x, const CplxVec& u) { return F.G(x, u); };
  std::mt19937 rng(9);
  for (int trial = 0; trial < 4; ++trial) {
    GroupPoint g = random_point(rng, 2);
    CplxVec x(g.x.begin(), g.x.end()), u(g.u.begin(), g.u.end());
    cplx sum = 0.0;
    for (const auto& j : ak_elements(k, chain)) {
      cplx lit = project_sector_at(Gf, k, chain, j, x, u);
      cplx alg = project_sector(F, j).G(x, u);
      CHECK(std::abs(lit - alg) < 1e-10);
      sum += lit;
      NilFunction Fj = project_sector(F, j);
      auto Gj = [&](const CplxVec& a, const CplxVec& b) { return Fj.G(a, b); };
      CHECK(std::abs(sector_shift_defect(Gj, k, chain, j, {1, 0}, x, u)) < 1e-10);
      CHECK(std::abs(sector_shift_defect(Gj, k, chain, j, {0, 1}, x, u)) < 1e-10);
    }
    CHECK(std::abs(sum - F.G(x, u)) < 1e-10);
  }
}

TEST_CASE("sectors are orthogonal and invert") {
  DivisorChain chain = chain12();
  const long k = 1;
  auto fs = sample_functions(2, 4, 41);
  auto js = ak_elements(k, chain);
  std::vector<NilFunction> parts;
  for (std::size_t q = 0; q < 4; ++q) parts.push_back(twist_j(weil_brezin(k, chain, fs[q]), js[q]));
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = a + 1; b < parts.size(); ++b) CHECK(std::abs(l2m_inner(parts[a], parts[b])) < 1e-9);

  for (std::size_t q = 0; q < 4; ++q) {
    TestFunction back = invert_sector(parts[q], js[q]);
    CHECK((back + fs[q] * -1.0).norm() < 1e-12);
  }
  // representative shifted by 2kp N lands in the same sector with a translated function
  NilFunction shifted = twist_j(weil_brezin(k, chain, fs[0]), {1, 1});
  NilTerm t = shifted.terms()[0];
  t.twist = {1 + 2 * 2, 1 - 4};
  NilFunction S(k, chain);
  S.add_term(t);
  TestFunction back = invert_sector(S, {1, 1});
  NilFunction again = twist_j(weil_brezin(k, chain, back), {1, 1});
  std::mt19937 rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    GroupPoint g = random_point(rng, 2);
    CHECK(std::abs(again.G(g.x, g.u) - S.G(g.x, g.u)) < 1e-10);
  }
  CHECK_THROWS_AS(invert_sector(parts[0] + parts[1], js[0]), Error);
  CHECK_THROWS_AS(twist_j(parts[0], {2, 0}), Error);
  CHECK_THROWS_AS(weil_brezin(0, chain, fs[0]), Error);
}

TEST_CASE("Fourier coefficient in x recovers the shifted function") {
  DivisorChain chain = chain12();
  auto f = sample_functions(2, 2, 51)[1];
  IntVec j{1, 2};
  NilFunction F = twist_j(weil_brezin(2, chain, f), j);
  RealVec l = chain.lengths();
  for (IntVec m : {IntVec{0, 0}, IntVec{1, -1}, IntVec{-1, 0}}) {
    RealVec u{0.2, -0.4};
    RealVec v{u[0] + m[0] * l[0], u[1] + m[1] * l[1]};
    CHECK(std::abs(fourier_coefficient(F, j, m, u, 96) - f(v)) < 1e-9);
  }
}

TEST_CASE("nu_j is invariant and intertwines") {
  for (auto chain : {DivisorChain::ones(1), chain12()}) {
    const int n = chain.n();
    for (long k : {1L, 2L}) {
      const double lambda = lambda_of(k, chain);
      auto gens = make_gamma_l(chain).all();
      auto fs = sample_functions(n, 3, 61);
      for (const auto& j : ak_elements(k, chain)) {
        for (const auto& f : fs) {
          cplx base = nu_j_apply(k, chain, j, f);
          for (const auto& gam : gens) {
            cplx moved = nu_j_apply(k, chain, j, schrodinger_apply(lambda, to_point(gam), f));
            CHECK(std::abs(moved - base) < 1e-9 * std::max(1.0, std::abs(base)));
          }
        }
        CHECK(nu_j_coefficient_check(k, chain, j, fs[1], 8, 3) < 1e-9);
      }
    }
  }
}
