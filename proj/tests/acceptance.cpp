// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "nilheat/bergman.hpp"
#include "nilheat/htype.hpp"
#include "nilheat/quadrature.hpp"
#include "nilheat/weilbrezin.hpp"

using namespace nilheat;

namespace {

class Criterion {
 public:
  Criterion(int id, double budget_s) : id_(id), budget_(budget_s), t0_(std::chrono::steady_clock::now()) {}

  void check(bool ok, const std::string& what, double value) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s=%.3g", notes_.empty() ? "" : ", ", what.c_str(), value);
    notes_ += buf;
    if (!ok) pass_ = false;
  }
  void check_le(const std::string& what, double value, double tol) { check(std::isfinite(value) && value <= tol, what, value); }

  bool finish() {
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    const bool in_time = el < budget_;
    std::printf("criterion %d: %s (%s; runtime %.1f s of %.0f s)\n", id_, pass_ && in_time ? "PASS" : "FAIL",
                notes_.c_str(), el, budget_);
    std::fflush(stdout);
    return pass_ && in_time;
  }

 private:
  int id_;
  double budget_;
  std::chrono::steady_clock::time_point t0_;
  bool pass_ = true;
  std::string notes_;
};

template <class F>
bool guarded(int id, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::printf("criterion %d: FAIL (exception: %s)\n", id, e.what());
    return false;
  }
}

GroupPoint random_point(std::mt19937_64& rng, int n, double r = 1.0) {
  std::uniform_real_distribution<double> U(-r, r);
  GroupPoint g = GroupPoint::identity(n);
  for (int i = 0; i < n; ++i) g.x[i] = U(rng), g.u[i] = U(rng);
  g.xi = U(rng);
  return g;
}

// ||f||^2 by a tensor Gauss-Legendre grid over a box holding the Gaussians
double brute_norm2(const TestFunction& f) {
  const int n = f.dim();
  const auto r = quad::composite_legendre(-7.0, 7.0, 14, 12);
  std::vector<std::size_t> idx(n, 0);
  double s = 0.0;
  RealVec v(n);
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) v[i] = r.nodes[idx[i]], w *= r.weights[idx[i]];
    s += w * std::norm(f(v));
    int i = 0;
    while (i < n && ++idx[i] == r.size()) idx[i++] = 0;
    if (i == n) break;
  }
  return s;
}

double parameter_error(const TestFunction& a, const TestFunction& b) {
  if (a.atoms().size() != b.atoms().size()) return HUGE_VAL;
  double e = 0.0;
  for (std::size_t q = 0; q < a.atoms().size(); ++q) {
    const Atom &x = a.atoms()[q], &y = b.atoms()[q];
    e = std::max(e, std::abs(x.coef - y.coef));
    for (std::size_t i = 0; i < x.factors.size(); ++i) {
      const Factor1D &f = x.factors[i], &g = y.factors[i];
      if (f.h.size() != g.h.size()) return HUGE_VAL;
      e = std::max({e, std::abs(f.a - g.a), std::abs(f.b - g.b), std::abs(f.c - g.c)});
      for (std::size_t d = 0; d < f.h.size(); ++d) e = std::max(e, std::abs(f.h[d] - g.h[d]));
    }
  }
  return e;
}

// sector decomposition checks shared by criteria 2 and 9
void sector_checks(Criterion& c, long k, const DivisorChain& chain, unsigned seed, const std::string& tag) {
  const int n = chain.n();
  std::mt19937_64 rng(seed);
  auto js = ak_elements(k, chain);
  if (js.size() > 6) js.resize(6);
  const auto fs = sample_functions(n, int(js.size()), seed);
  std::vector<NilFunction> parts;
  for (std::size_t q = 0; q < js.size(); ++q) parts.push_back(twist_j(weil_brezin(k, chain, fs[q]), js[q]));
  NilFunction G = parts[0];
  for (std::size_t q = 1; q < parts.size(); ++q) G = G + parts[q];
  // the projections only see samples of G
  auto Gf = [&](const CplxVec& x, const CplxVec& u) { return G.G(x, u); };
  double sum = 0.0;
  for (int probe = 0; probe < 5; ++probe) {
    const GroupPoint g = random_point(rng, n);
    const CplxVec x(g.x.begin(), g.x.end()), u(g.u.begin(), g.u.end());
    cplx acc = 0.0;
    for (const auto& j : ak_elements(k, chain)) acc += project_sector_at(Gf, k, chain, j, x, u);
    sum = std::max(sum, std::abs(acc - G.G(x, u)) / std::max(1.0, std::abs(G.G(x, u))));
  }
  c.check_le(tag + "sum_Gj", sum, 1e-9);
  double orth = 0.0;
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = a + 1; b < parts.size(); ++b)
      orth = std::max(orth, std::abs(l2m_inner(parts[a], parts[b])) / (l2m_norm(parts[a]) * l2m_norm(parts[b])));
  c.check_le(tag + "sector_inner", orth, 1e-6);
  double trip = 0.0;
  for (std::size_t q = 0; q < parts.size(); ++q) trip = std::max(trip, parameter_error(invert_sector(parts[q], js[q]), fs[q]));
  c.check_le(tag + "round_trip", trip, 1e-8);
}

double isometry_error(long k, const DivisorChain& chain, unsigned seed, bool brute) {
  double worst = 0.0;
  for (const auto& f : sample_functions(chain.n(), 5, seed)) {
    const double ref = brute ? std::sqrt(brute_norm2(f)) : f.norm();
    worst = std::max(worst, std::abs(l2m_norm(weil_brezin(k, chain, f)) / ref - 1.0));
  }
  return worst;
}

bool criterion1() {
  Criterion c(1, 30.0);
  double worst = 0.0;
  for (const auto& l : {std::vector<std::string>{"1"}, std::vector<std::string>{"1", "2"}})
    for (long k : {1L, 2L}) worst = std::max(worst, isometry_error(k, DivisorChain::parse(l), 101 + unsigned(k), true));
  c.check_le("max|ratio-1|", worst, 1e-6);
  return c.finish();
}

bool criterion2() {
  Criterion c(2, 120.0);
  sector_checks(c, 1, DivisorChain::parse({"1", "2"}), 202, "");
  return c.finish();
}

bool criterion3() {
  Criterion c(3, 120.0);
  double inv = 0.0, p26 = 0.0;
  for (const auto& l : {std::vector<std::string>{"1"}, std::vector<std::string>{"1", "2"}}) {
    const DivisorChain chain = DivisorChain::parse(l);
    const int n = chain.n();
    const RealVec len = chain.lengths();
    const IntVec p = chain.ratios();
    for (long k : {1L, 2L}) {
      const double lambda = lambda_of(k, chain);
      const auto gens = make_gamma_l(chain).all();
      const auto fs = sample_functions(n, 2, 303);
      auto js = ak_elements(k, chain);
      if (js.size() > 4) js.resize(4);
      for (const auto& j : js)
        for (const auto& f : fs) {
          // the distribution written out as a lattice sum of Fourier samples
          cplx direct = 0.0;
          std::vector<long> m(n, -8);
          for (;;) {
            RealVec xi(n);
            for (int i = 0; i < n; ++i) xi[i] = (double(j[i]) + 2.0 * k * m[i] * p[i]) / len[i];
            direct += f.fourier_at(xi);
            int i = 0;
            while (i < n && ++m[i] > 8) m[i++] = -8;
            if (i == n) break;
          }
          const cplx base = nu_j_apply(k, chain, j, f);
          inv = std::max(inv, std::abs(base - direct) / std::max(1.0, std::abs(direct)));
          for (const auto& g : gens)
            inv = std::max(inv, std::abs(nu_j_apply(k, chain, j, schrodinger_apply(lambda, g.to_double(), f)) - direct) /
                                    std::max(1.0, std::abs(direct)));
          p26 = std::max(p26, nu_j_coefficient_check(k, chain, j, f, 8, 3));
        }
    }
  }
  c.check_le("nu_invariance", inv, 1e-8);
  c.check_le("coefficient_residual", p26, 1e-6);
  return c.finish();
}

// Smith diagonal of an integer matrix by row and column elimination
std::vector<Integer> smith_diagonal(IntMatrix A) {
  const int m = int(A.size());
  std::vector<Integer> diag;
  for (int t = 0; t < m; ++t) {
    for (;;) {
      int pi_ = -1, pj = -1;
      for (int i = t; i < m; ++i)
        for (int j = t; j < m; ++j)
          if (A[i][j] != 0 && (pi_ < 0 || abs(A[i][j]) < abs(A[pi_][pj]))) pi_ = i, pj = j;
      if (pi_ < 0) return diag;
      std::swap(A[t], A[pi_]);
      for (auto& row : A) std::swap(row[t], row[pj]);
      bool clean = true;
      for (int i = t + 1; i < m; ++i) {
        const Integer q = A[i][t] / A[t][t];
        for (int j = t; j < m; ++j) A[i][j] -= q * A[t][j];
        if (A[i][t] != 0) clean = false;
      }
      for (int j = t + 1; j < m; ++j) {
        const Integer q = A[t][j] / A[t][t];
        for (int i = t; i < m; ++i) A[i][j] -= q * A[i][t];
        if (A[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      bool divides = true;
      for (int i = t + 1; i < m && divides; ++i)
        for (int j = t + 1; j < m; ++j)
          if (A[i][j] % A[t][t] != 0) {
            for (int q = t; q < m; ++q) A[t][q] += A[i][q];
            divides = false;
            break;
          }
      if (divides) break;
    }
    diag.push_back(abs(A[t][t]));
  }
  return diag;
}

bool criterion4() {
  Criterion c(4, 60.0);
  std::mt19937_64 rng(404);
  const DivisorChain chain = DivisorChain::parse({"1", "3"});
  int chains = 0, smith = 0, modules = 0;
  for (int q = 0; q < 100; ++q) {
    const RatMatrix v = apply_to_vectors(random_integer_symplectic(2, rng), divisor_basis(chain, Rational(1 + q % 4, 3)));
    const NormalForm nf = normal_form(v);
    chains += nf.chain == chain;
    // oracle: invariant factors of the Gram matrix divided by its content
    RatMatrix G = rat_zero(4, 4);
    std::vector<Rational> entries;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        for (int a = 0; a < 2; ++a) G[i][j] += v[i][a] * v[j][2 + a] - v[i][2 + a] * v[j][a];
        entries.push_back(G[i][j]);
      }
    const Rational g = rational_gcd(entries);
    IntMatrix Gi(4, std::vector<Integer>(4));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) Gi[i][j] = boost::multiprecision::numerator(Rational(G[i][j] / g));
    const auto sd = smith_diagonal(Gi);
    smith += sd.size() == 4 && nf.chain.l()[1] == Rational(sd[2], sd[0]);
    modules += same_module(v, rat_transpose(rat_mul(nf.A_scaled, rat_transpose(divisor_basis(nf.chain)))));
  }
  c.check(chains == 100, "exact_chains", chains);
  c.check(smith == 100, "smith_agree", smith);
  c.check(modules == 100, "double_inclusion", modules);
  return c.finish();
}

bool criterion5() {
  Criterion c(5, 120.0);
  std::mt19937_64 rng(505);
  {
    KernelEvaluator ev(KernelKind::hn, 0.5, 1);
    const auto rr = quad::composite_legendre(0.0, 12.0 * std::sqrt(0.5), 6, 16);
    const auto rz = quad::composite_legendre(0.0, 13.0, 12, 16);
    double mass = 0.0;
    for (std::size_t a = 0; a < rr.size(); ++a)
      for (std::size_t b = 0; b < rz.size(); ++b)
        mass += 4.0 * pi * rr.nodes[a] * rr.weights[a] * rz.weights[b] *
                ev.kt(ComplexPoint::from(GroupPoint{{rr.nodes[a]}, {0.0}, rz.nodes[b]})).real();
    c.check_le("|mass-1|", std::abs(mass - 1.0), 1e-6);
  }
  {
    KernelEvaluator ea(KernelKind::hn, 0.4, 1), eb(KernelKind::hn, 0.6, 1), eab(KernelKind::hn, 1.0, 1);
    const auto rx = quad::composite_legendre(-7.0, 7.0, 3, 10), rz = quad::composite_legendre(-12.0, 12.0, 6, 10);
    double worst = 0.0;
    for (int probe = 0; probe < 5; ++probe) {
      const GroupPoint g = probe == 0 ? GroupPoint::identity(1) : random_point(rng, 1, 1.2);
      cplx conv = 0.0;
      for (std::size_t p = 0; p < rx.size(); ++p)
        for (std::size_t q = 0; q < rx.size(); ++q)
          for (std::size_t r = 0; r < rz.size(); ++r) {
            const GroupPoint h{{rx.nodes[p]}, {rx.nodes[q]}, rz.nodes[r]};
            conv += rx.weights[p] * rx.weights[q] * rz.weights[r] *
                    ea.kt(ComplexPoint::from(group_mul(g, group_inv(h)))) * eb.kt(ComplexPoint::from(h));
          }
      const cplx ref = eab.kt(ComplexPoint::from(g));
      worst = std::max(worst, std::abs(conv - ref) / std::abs(ref));
    }
    c.check_le("semigroup", worst, 1e-4);
  }
  {
    const DivisorChain chain = DivisorChain::ones(1);
    const NilFunction F = twist_j(weil_brezin(1, chain, sample_functions(1, 1, 55)[0]), {1});
    KernelEvaluator ev(KernelKind::hn, 0.5, 1);
    auto S = [&](double t, const GroupPoint& g) {
      return heat_transform(F, KernelEvaluator(KernelKind::hn, t, 1), ComplexPoint::from(g));
    };
    double heat = 0.0, cr = 0.0;
    for (int probe = 0; probe < 3; ++probe) {
      const GroupPoint g = random_point(rng, 1, 0.8);
      heat = std::max(heat, heat_equation_residual(S, 0.5, g, 1e-4));
      const ComplexPoint p = ComplexPoint::from(g);
      auto along_z = [&](cplx z) {
        ComplexPoint q = p;
        q.z[0] = z;
        return heat_transform(F, ev, q);
      };
      auto along_w = [&](cplx w) {
        ComplexPoint q = p;
        q.w[0] = w;
        return heat_transform(F, ev, q);
      };
      cr = std::max({cr, cauchy_riemann_residual(along_z, cplx(g.x[0], 0.4)),
                     cauchy_riemann_residual(along_w, cplx(g.u[0], -0.3))});
    }
    c.check_le("heat_residual", heat, 1e-4);
    c.check_le("CR_residual", cr, 1e-5);
  }
  return c.finish();
}

bool criterion6() {
  Criterion c(6, 300.0);
  const DivisorChain chain = DivisorChain::ones(1);
  const double t = 0.1;
  const auto fs = sample_functions(1, 5, 5, 2.0 * pi, 4.0 * pi);
  const BergmanRatioResult r = bergman_ratios(fs, 1, chain, {0}, t, WeightForm::corrected);
  bool finite = true;
  for (double x : r.ratios) finite = finite && std::isfinite(x) && x > 0;
  c.check(finite, "finite_norms", finite);
  // e^{2 t lambda^2} variant: ratios scale by one constant
  RealVec alt;
  for (double x : r.ratios) alt.push_back(x * r.exp2_factor);
  double mean = 0.0, var = 0.0;
  for (double x : alt) mean += x / alt.size();
  for (double x : alt) var += (x - mean) * (x - mean) / alt.size();
  const double cv_alt = std::sqrt(var) / mean;
  c.check(std::min(r.cv, cv_alt) < 1e-3, "cv", std::min(r.cv, cv_alt));
  c.check(true, "mean_ratio", r.mean);

  KernelEvaluator ev(KernelKind::hn, t, 1);
  BergmanWeight W(1, chain, t);
  const auto rep = bergman_gram({heat_image(twist_j(weil_brezin(1, chain, fs[0]), {0}), ev, 1.0),
                                 heat_image(twist_j(weil_brezin(1, chain, fs[2]), ak_elements(1, chain).back()), ev, 1.0)},
                                W);
  c.check_le("cross_sector", std::abs(rep.gram(0, 1)) / std::sqrt(rep.gram(0, 0).real() * rep.gram(1, 1).real()), 1e-5);
  return c.finish();
}

Eigen::VectorXd unit_vector(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd w(m);
  for (int i = 0; i < m; ++i) w(i) = N(rng);
  return w / w.norm();
}

bool criterion7() {
  Criterion c(7, 120.0);
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto s = make_quaternionic();
  const Eigen::Matrix4d Id = Eigen::Matrix4d::Identity();
  double sq = 0.0, orth = 0.0;
  for (int q = 0; q < 20; ++q) {
    const Eigen::VectorXd w = unit_vector(rng, 3);
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 3; ++i) J += w(i) * s.J[i];
    sq = std::max(sq, (J * J + Id).cwiseAbs().maxCoeff());
    orth = std::max(orth, (J.transpose() * J - Id).cwiseAbs().maxCoeff());
  }
  c.check_le("J^2+I", sq, 1e-12);
  c.check_le("J^TJ-I", orth, 1e-12);

  double hom = 0.0;
  for (int q = 0; q < 30; ++q) {
    const Eigen::VectorXd w = unit_vector(rng, 3);
    Eigen::VectorXd v1(4), v2(4), z1(3), z2(3);
    for (int i = 0; i < 4; ++i) v1(i) = U(rng), v2(i) = U(rng);
    for (int i = 0; i < 3; ++i) z1(i) = U(rng), z2(i) = U(rng);
    // product on N written out: z + z' + (1/2)[v, v'] with [v,v']_i = (J_i v).v'
    Eigen::VectorXd zp = z1 + z2;
    for (int i = 0; i < 3; ++i) zp(i) += 0.5 * (s.J[i] * v1).dot(v2);
    const GroupPoint lhs = alpha_omega_apply(s, w, {v1 + v2, zp});
    const GroupPoint rhs = group_mul(alpha_omega_apply(s, w, {v1, z1}), alpha_omega_apply(s, w, {v2, z2}));
    for (int i = 0; i < 2; ++i) hom = std::max({hom, std::abs(lhs.x[i] - rhs.x[i]), std::abs(lhs.u[i] - rhs.u[i])});
    hom = std::max(hom, std::abs(lhs.xi - rhs.xi));
  }
  c.check_le("alpha_hom", hom, 1e-10);

  KernelEvaluator q3(KernelKind::htype, 0.5, 2, 3), k2(KernelKind::hn, 0.5, 2);
  double fiber = 0.0;
  for (int q = 0; q < 5; ++q) {
    Eigen::VectorXd v(4);
    for (int i = 0; i < 4; ++i) v(i) = U(rng);
    const double z = 1.5 * U(rng);
    const cplx kt = k2.kt(ComplexPoint{{v(0), v(1)}, {v(2), v(3)}, z});
    fiber = std::max(fiber, std::abs(qt_radon(q3, v, z) - kt) / std::abs(kt));
  }
  c.check_le("qt_fiber", fiber, 1e-3);

  double planch = 0.0;
  for (const auto& f : sample_htype_functions(2, 3, 4, 77)) planch = std::max(planch, std::abs(radon_plancherel(s, f) / f.norm2() - 1.0));
  c.check_le("plancherel", planch, 1e-3);
  return c.finish();
}

bool criterion8() {
  Criterion c(8, 600.0);
  const auto s = make_quaternionic();
  RealVec r;
  for (const auto& f : sample_htype_functions(2, 3, 3, 11)) r.push_back(weighted_hs_integral(s, f, 0.5, {8, 50, 1e-6}).ratio);
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  const double mean = (r[0] + r[1] + r[2]) / 3.0;
  c.check(true, "ratio_mean", mean);
  c.check_le("spread", (*hi - *lo) / mean, 0.10);
  return c.finish();
}

bool criterion9() {
  Criterion c(9, 60.0);
  const auto s = make_quaternionic();
  const ProjectedLattice pl = project_lattice(s, standard_htype_lattice(s), Eigen::Vector3d(0.0, 0.0, 1.0));
  c.check(pl.verified && pl.rank == 4, "heisenberg_lattice", pl.rank);
  const NormalForm nf = normal_form(pl.v_basis);
  c.check(same_module(pl.v_basis, rat_transpose(rat_mul(nf.A_scaled, rat_transpose(divisor_basis(nf.chain))))),
          "normal_form", 1.0);
  c.check_le("isometry", isometry_error(1, nf.chain, 909, false), 1e-6);
  sector_checks(c, 1, nf.chain, 910, "gamma_");
  return c.finish();
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<bool()>>> all{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
  int failed = 0;
  for (const auto& [id, fn] : all) failed += !guarded(id, fn);
  std::printf("%d of %zu criteria passed\n", int(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
