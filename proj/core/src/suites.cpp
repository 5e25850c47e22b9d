#include "nilheat/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "nilheat/bergman.hpp"
#include "nilheat/htype.hpp"
#include "nilheat/quadrature.hpp"
#include "nilheat/weilbrezin.hpp"

namespace nilheat {

namespace {

struct Ctx {
  const SuiteOptions& opt;
  SuiteReport& rep;
  std::mt19937_64 rng;

  Ctx(const SuiteOptions& o, SuiteReport& r) : opt(o), rep(r), rng(o.seed) {}
  // residual tolerance, unless the caller overrides it
  double tol(double def) const { return opt.tol > 0.0 ? opt.tol : def; }
  double t(double def) const { return opt.t.value_or(def); }
  DivisorChain chain() const { return DivisorChain::parse(opt.l); }
  IntVec j(int n) const {
    if (opt.j.empty()) return IntVec(n, 0);
    require(int(opt.j.size()) == n, ErrorCode::dimension_mismatch, "--j needs one entry per chain entry");
    return opt.j;
  }
  GroupPoint point(int n, double r = 1.0) {
    std::uniform_real_distribution<double> U(-r, r);
    GroupPoint g = GroupPoint::identity(n);
    for (int i = 0; i < n; ++i) g.x[i] = U(rng), g.u[i] = U(rng);
    g.xi = U(rng);
    return g;
  }
};

void require_sector(long k) { require(k != 0, ErrorCode::out_of_scope, "k=0 sector out of scope"); }

double spread(const RealVec& r) {
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  double mean = 0.0;
  for (double x : r) mean += x;
  mean /= double(r.size());
  return (*hi - *lo) / std::abs(mean);
}

// sectors of A_k used for decomposition checks: at most `cap`, always including j = 0
std::vector<IntVec> some_sectors(long k, const DivisorChain& chain, std::size_t cap) {
  auto js = ak_elements(k, chain);
  if (js.size() > cap) js.resize(cap);
  return js;
}

// largest difference of atom parameters; the norm of a difference would only resolve sqrt(eps)
double parameter_error(const TestFunction& a, const TestFunction& b) {
  if (a.dim() != b.dim() || a.atoms().size() != b.atoms().size()) return HUGE_VAL;
  double e = 0.0;
  for (std::size_t q = 0; q < a.atoms().size(); ++q) {
    const Atom &x = a.atoms()[q], &y = b.atoms()[q];
    e = std::max(e, std::abs(x.coef - y.coef));
    for (int i = 0; i < a.dim(); ++i) {
      const Factor1D &f = x.factors[i], &g = y.factors[i];
      if (f.h.size() != g.h.size()) return HUGE_VAL;
      e = std::max({e, std::abs(f.a - g.a), std::abs(f.b - g.b), std::abs(f.c - g.c)});
      for (std::size_t d = 0; d < f.h.size(); ++d) e = std::max(e, std::abs(f.h[d] - g.h[d]));
    }
  }
  return e;
}

void weil_brezin_checks(Ctx& c, long k, const DivisorChain& chain, const std::string& tag) {
  const int n = chain.n();
  const auto fs = sample_functions(n, 5, unsigned(c.rng()));
  double iso = 0.0;
  for (const auto& f : fs) iso = std::max(iso, std::abs(l2m_norm(weil_brezin(k, chain, f)) / f.norm() - 1.0));
  c.rep.add(tag + "isometry ||V_k f|| / ||f|| - 1", iso, c.tol(1e-6), "5 functions");

  const auto js = some_sectors(k, chain, 4);
  std::vector<NilFunction> parts;
  NilFunction G(k, chain);
  for (std::size_t q = 0; q < js.size(); ++q) {
    parts.push_back(twist_j(weil_brezin(k, chain, fs[q % fs.size()]), js[q]));
    G = q == 0 ? parts.back() : G + parts.back();
  }
  auto Gf = [&](const CplxVec& x, const CplxVec& u) { return G.G(x, u); };
  double sum_res = 0.0;
  for (int probe = 0; probe < 5; ++probe) {
    const GroupPoint g = c.point(n);
    const CplxVec x(g.x.begin(), g.x.end()), u(g.u.begin(), g.u.end());
    cplx acc = 0.0;
    for (const auto& j : ak_elements(k, chain)) acc += project_sector_at(Gf, k, chain, j, x, u);
    sum_res = std::max(sum_res, std::abs(acc - G.G(x, u)) / std::max(1.0, std::abs(G.G(x, u))));
  }
  c.rep.add(tag + "sum of sector projections = G", sum_res, c.tol(1e-9), "5 points");

  double orth = 0.0;
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = a + 1; b < parts.size(); ++b)
      orth = std::max(orth, std::abs(l2m_inner(parts[a], parts[b])) / (l2m_norm(parts[a]) * l2m_norm(parts[b])));
  c.rep.add(tag + "sector inner products", orth, c.tol(1e-6), std::to_string(parts.size()) + " sectors");

  double trip = 0.0;
  for (std::size_t q = 0; q < parts.size(); ++q) trip = std::max(trip, parameter_error(invert_sector(parts[q], js[q]), fs[q % fs.size()]));
  c.rep.add(tag + "invert o twist o weil_brezin parameter error", trip, c.tol(1e-8));
}

void suite_prop24(Ctx& c) {
  require_sector(c.opt.k);
  weil_brezin_checks(c, c.opt.k, c.chain(), "");
}

void suite_prop25(Ctx& c) {
  require_sector(c.opt.k);
  const DivisorChain chain = c.chain();
  const long k = c.opt.k;
  const double lambda = lambda_of(k, chain);
  const auto gens = make_gamma_l(chain).all();
  const auto fs = sample_functions(chain.n(), 3, unsigned(c.rng()));
  double worst = 0.0;
  for (const auto& j : some_sectors(k, chain, 4))
    for (const auto& f : fs) {
      const cplx base = nu_j_apply(k, chain, j, f);
      for (const auto& g : gens)
        worst = std::max(worst, std::abs(nu_j_apply(k, chain, j, schrodinger_apply(lambda, g.to_double(), f)) - base) /
                                    std::max(1.0, std::abs(base)));
    }
  c.rep.add("nu_j invariance under the 2n+1 generators", worst, c.tol(1e-8));
}

void suite_prop26(Ctx& c) {
  require_sector(c.opt.k);
  const DivisorChain chain = c.chain();
  const IntVec j = c.j(chain.n());
  double worst = 0.0;
  for (const auto& f : sample_functions(chain.n(), 3, unsigned(c.rng())))
    worst = std::max(worst, nu_j_coefficient_check(c.opt.k, chain, j, f, 10, unsigned(c.rng())));
  c.rep.add("Schroedinger coefficients of nu_j vs sector image", worst, c.tol(1e-6));
}

// Bergman family: widths where the heat image decays fast enough at t ~ 0.1
std::vector<TestFunction> bergman_family(int n, int count, unsigned seed) {
  return sample_functions(n, count, seed, 2.0 * pi, 4.0 * pi);
}

IntVec other_sector(long k, const DivisorChain& chain, const IntVec& j) {
  for (const auto& q : ak_elements(k, chain))
    if (q != j) return q;
  throw Error(ErrorCode::degenerate, "A_k has a single sector");
}

void suite_prop27(Ctx& c) {
  require_sector(c.opt.k);
  const DivisorChain chain = c.chain();
  const long k = c.opt.k;
  const double t = c.t(0.1);
  const IntVec j0 = c.j(chain.n()), j1 = other_sector(k, chain, j0);
  const auto fs = bergman_family(chain.n(), 2, unsigned(c.rng()));
  KernelEvaluator ev(KernelKind::hn, t, chain.n());
  BergmanWeight W(k, chain, t);
  const NilFunction F0 = twist_j(weil_brezin(k, chain, fs[0]), j0);
  const NilFunction F1 = twist_j(weil_brezin(k, chain, fs[1]), j1);
  const auto rep = bergman_gram({heat_image(F0, ev, 1.0), heat_image(F1, ev, 1.0)}, W);
  const double n0 = rep.gram(0, 0).real(), n1 = rep.gram(1, 1).real();
  c.rep.add_bool("finite Bergman norms", std::isfinite(n0) && std::isfinite(n1) && n0 > 0 && n1 > 0);
  c.rep.add("cross-sector Bergman inner product", std::abs(rep.gram(0, 1)) / std::sqrt(n0 * n1), c.tol(1e-5));

  auto S1 = [&](const CplxVec& x, const CplxVec& u) { return heat_transform_slice(F1, ev, x, u); };
  double defect = 0.0;
  for (int probe = 0; probe < 3; ++probe) {
    const GroupPoint g = c.point(chain.n(), 0.5);
    CplxVec x(chain.n()), u(chain.n());
    for (int i = 0; i < chain.n(); ++i) x[i] = cplx(g.x[i], 0.3), u[i] = cplx(g.u[i], -0.2);
    const double scale = std::abs(S1(x, u));
    for (int i = 0; i < chain.n(); ++i) {
      IntVec d(chain.n(), 0);
      d[i] = 1;
      defect = std::max(defect, std::abs(sector_shift_defect(S1, k, chain, j1, d, x, u)) / scale);
    }
  }
  c.rep.add("heat image stays in its sector (complex points)", defect, c.tol(1e-6));
}

void suite_thm22(Ctx& c) {
  const DivisorChain chain = c.chain();
  const int n = chain.n();
  int exact = 0, modules = 0;
  const int trials = 100;
  for (int q = 0; q < trials; ++q) {
    const Rational scale(1 + q % 3, 2);
    const RatMatrix v = apply_to_vectors(random_integer_symplectic(n, c.rng), divisor_basis(chain, scale));
    const NormalForm nf = normal_form(v);
    if (nf.chain == chain) ++exact;
    if (same_module(v, rat_transpose(rat_mul(nf.A_scaled, rat_transpose(divisor_basis(nf.chain)))))) ++modules;
  }
  c.rep.add("chains recovered exactly", double(trials - exact), 0.0, std::to_string(exact) + "/100");
  c.rep.add("module double inclusion", double(trials - modules), 0.0, std::to_string(modules) + "/100");
}

void suite_thm28(Ctx& c) {
  require_sector(c.opt.k);
  const DivisorChain chain = c.chain();
  const double t = c.t(0.1);
  const auto fs = bergman_family(chain.n(), 5, unsigned(c.rng()));
  const BergmanRatioResult r = bergman_ratios(fs, c.opt.k, chain, c.j(chain.n()), t, WeightForm::corrected);
  bool finite = true;
  for (double x : r.ratios) finite = finite && std::isfinite(x) && x > 0;
  c.rep.add_bool("finite Bergman norms of heat images", finite);
  c.rep.add("ratio CV, prefactor e^{t lambda^2}", r.cv, 1e-3);
  c.rep.add("ratio CV, prefactor e^{2 t lambda^2}", r.cv, 1e-3, "differs by a constant factor");
  RealVec exp2;
  for (double x : r.ratios) exp2.push_back(x * r.exp2_factor);
  c.rep.measured = {{"weight", to_string(r.form)},
                    {"ratios_exp_t", r.ratios},
                    {"ratios_exp_2t", exp2},
                    {"mean_exp_t", r.mean},
                    {"cv", r.cv},
                    {"quadrature_change", r.change}};
}

void suite_thm29(Ctx& c) {
  require_sector(c.opt.k);
  const DivisorChain chain = c.chain();
  const double t = c.t(0.5);
  KernelEvaluator ev(KernelKind::hn, t, 1);
  c.rep.add("calibrated c_n vs 1/((2pi)(4pi)^n)", std::abs(ev.c() / ev.c_reference() - 1.0), 1e-12);

  // unit mass: polar grid in (x,u) times the centre line
  {
    const double R = 12.0 * std::sqrt(t), Xi = 14.0 * t + 6.0;
    const auto rr = quad::composite_legendre(0.0, R, 6, 16);
    const auto rxi = quad::composite_legendre(0.0, Xi, 12, 16);
    double mass = 0.0;
    for (std::size_t a = 0; a < rr.size(); ++a)
      for (std::size_t b = 0; b < rxi.size(); ++b)
        mass += 4.0 * pi * rr.nodes[a] * rr.weights[a] * rxi.weights[b] *
                ev.kt(ComplexPoint::from(GroupPoint{{rr.nodes[a]}, {0.0}, rxi.nodes[b]})).real();
    c.rep.add("unit mass of k_t", std::abs(mass - 1.0), c.tol(1e-6));
  }

  // semigroup: (k_a * k_b)(g) = int k_a(g h^{-1}) k_b(h) dh on a product Gauss-Legendre grid
  {
    const double a = 0.4 * t / 0.5, b = 0.6 * t / 0.5;
    KernelEvaluator ea(KernelKind::hn, a, 1), eb(KernelKind::hn, b, 1), eab(KernelKind::hn, a + b, 1);
    const auto rx = quad::composite_legendre(-7.0, 7.0, 3, 10), rz = quad::composite_legendre(-12.0, 12.0, 6, 10);
    double worst = 0.0;
    for (int probe = 0; probe < 5; ++probe) {
      const GroupPoint g = probe == 0 ? GroupPoint::identity(1) : c.point(1, 1.2);
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
    c.rep.add("semigroup k_a * k_b = k_{a+b}", worst, c.tol(1e-4), "5 probes");
  }

  // sector function: heat equation and holomorphy
  const auto f = sample_functions(chain.n(), 1, unsigned(c.rng()))[0];
  const NilFunction F = twist_j(weil_brezin(c.opt.k, chain, f), c.j(chain.n()));
  KernelEvaluator evn(KernelKind::hn, t, chain.n());
  auto S = [&](double s, const GroupPoint& g) {
    return heat_transform(F, KernelEvaluator(KernelKind::hn, s, chain.n()), ComplexPoint::from(g));
  };
  double heat = 0.0, cr = 0.0;
  for (int probe = 0; probe < 3; ++probe) {
    const GroupPoint g = c.point(chain.n(), 0.8);
    heat = std::max(heat, heat_equation_residual(S, t, g, 1e-4));
    const ComplexPoint p = ComplexPoint::from(g);
    auto along_z = [&](cplx z) {
      ComplexPoint q = p;
      q.z[0] = z;
      return heat_transform(F, evn, q);
    };
    auto along_w = [&](cplx w) {
      ComplexPoint q = p;
      q.w[0] = w;
      return heat_transform(F, evn, q);
    };
    cr = std::max({cr, cauchy_riemann_residual(along_z, cplx(g.x[0], 0.3)),
                   cauchy_riemann_residual(along_w, cplx(g.u[0], -0.2))});
  }
  c.rep.add("heat equation residual of S_t F", heat, c.tol(1e-4));
  c.rep.add("Cauchy-Riemann residual of S_t F", cr, c.tol(1e-5));
}

void suite_thm34(Ctx& c) {
  const auto s = make_quaternionic();
  const double t = c.t(0.5);
  const auto fs = sample_htype_functions(2, 3, 3, unsigned(c.rng()));
  RealVec ratios;
  double change = 0.0;
  for (const auto& f : fs) {
    const HSIntegralResult r = weighted_hs_integral(s, f, t, {c.opt.N, 50, 1e-6});
    ratios.push_back(r.ratio);
    change = std::max(change, r.change);
  }
  bool finite = true;
  for (double x : ratios) finite = finite && std::isfinite(x) && x > 0;
  c.rep.add_bool("weighted HS integrals finite", finite);
  c.rep.add("ratio spread (max - min)/mean", spread(ratios), 0.10, "N = " + std::to_string(c.opt.N));
  c.rep.measured = {{"N", c.opt.N}, {"t", t}, {"ratios", ratios}, {"lambda_change", change}};
}

void suite_lemma35(Ctx& c) {
  const auto s = make_quaternionic();
  const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(4, 4);
  std::normal_distribution<double> N01(0.0, 1.0);
  auto unit = [&] {
    Eigen::VectorXd w(3);
    for (int i = 0; i < 3; ++i) w(i) = N01(c.rng);
    return Eigen::VectorXd(w / w.norm());
  };
  double sq = 0.0, orth = 0.0, inter = 0.0;
  for (int q = 0; q < 20; ++q) {
    const Eigen::VectorXd w = unit();
    const Eigen::MatrixXd J = s.J_omega(w), S = sigma_omega(s, w);
    sq = std::max(sq, (J * J + Id).cwiseAbs().maxCoeff());
    orth = std::max(orth, (J.transpose() * J - Id).cwiseAbs().maxCoeff());
    inter = std::max(inter, (S * heisenberg_J(2) * S.transpose() - J).cwiseAbs().maxCoeff());
  }
  c.rep.add("J_omega^2 = -I", sq, 1e-12, "20 directions");
  c.rep.add("J_omega orthogonal", orth, 1e-12);
  c.rep.add("sigma J sigma^T = J_omega", inter, 1e-12);
  c.rep.add_bool("H-type axioms", validate_htype(s).pass);

  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto vec = [&](int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = U(c.rng);
    return v;
  };
  double hom = 0.0;
  for (int q = 0; q < 30; ++q) {
    const Eigen::VectorXd w = unit();
    const HTypePoint a{vec(4), vec(3)}, b{vec(4), vec(3)};
    const GroupPoint l = alpha_omega_apply(s, w, htype_mul(s, a, b));
    const GroupPoint r = group_mul(alpha_omega_apply(s, w, a), alpha_omega_apply(s, w, b));
    for (int i = 0; i < 2; ++i) hom = std::max({hom, std::abs(l.x[i] - r.x[i]), std::abs(l.u[i] - r.u[i])});
    hom = std::max(hom, std::abs(l.xi - r.xi));
  }
  c.rep.add("alpha_omega homomorphism", hom, c.tol(1e-10), "30 pairs");

  const double t = c.t(0.5);
  KernelEvaluator q3(KernelKind::htype, t, 2, 3), k2(KernelKind::hn, t, 2);
  double fiber = 0.0;
  for (int q = 0; q < 5; ++q) {
    const Eigen::VectorXd v = vec(4);
    const double z = 1.5 * U(c.rng);
    const cplx kt = k2.kt(ComplexPoint{{v(0), v(1)}, {v(2), v(3)}, z});
    fiber = std::max(fiber, std::abs(qt_radon(q3, v, z) - kt) / std::abs(kt));
  }
  c.rep.add("(q_t)_omega = k_t", fiber, c.tol(1e-3), "5 probes");

  double planch = 0.0;
  for (const auto& f : sample_htype_functions(2, 3, 4, unsigned(c.rng())))
    planch = std::max(planch, std::abs(radon_plancherel(s, f) / f.norm2() - 1.0));
  c.rep.add("Radon Plancherel", planch, c.tol(1e-3), "4 functions, 50-point sphere rule");

  // Gamma_omega: the projected quaternionic lattice and sectors built on it
  const ProjectedLattice pl = project_lattice(s, standard_htype_lattice(s), Eigen::Vector3d(0, 0, 1));
  c.rep.add_bool("Gamma_omega is a Heisenberg lattice", pl.verified && pl.rank == 4, pl.message);
  if (!pl.verified) return;
  const NormalForm nf = normal_form(pl.v_basis);
  c.rep.add_bool("Gamma_omega normal form round trip",
                 same_module(pl.v_basis, rat_transpose(rat_mul(nf.A_scaled, rat_transpose(divisor_basis(nf.chain))))),
                 "l = " + nf.chain.str() + ", beta = " + to_string(pl.beta));
  weil_brezin_checks(c, 1, nf.chain, "Gamma_omega ");
}

struct Entry {
  const char* id;
  const char* anchor;
  void (*run)(Ctx&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {"prop2.4", "Weil-Brezin isometry and sector decomposition", suite_prop24},
      {"prop2.5", "invariant distributions nu_j", suite_prop25},
      {"prop2.6", "sector images from nu_j", suite_prop26},
      {"prop2.7", "orthogonal sectors of heat images", suite_prop27},
      {"thm2.2", "lattice normal form", suite_thm22},
      {"thm2.8", "Bergman characterization of heat images", suite_thm28},
      {"thm2.9", "heat kernel, semigroup and holomorphic extension", suite_thm29},
      {"thm3.4", "weighted Hilbert-Schmidt integral on H-type groups", suite_thm34},
      {"lemma3.5", "H-type reduction and Gamma_omega", suite_lemma35},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : registry()) v.push_back(e.id);
    v.push_back("all");
    return v;
  }();
  return ids;
}

bool is_suite(const std::string& id) {
  const auto& ids = suite_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

SuiteReport run_suite(const std::string& id, const SuiteOptions& opt) {
  for (const auto& e : registry()) {
    if (id != e.id) continue;
    SuiteReport rep;
    rep.suite = e.id;
    rep.anchor = e.anchor;
    rep.seed = opt.seed;
    const auto t0 = std::chrono::steady_clock::now();
    Ctx c(opt, rep);
    e.run(c);
    rep.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }
  std::string known;
  for (const auto& s : suite_ids()) known += (known.empty() ? "" : ", ") + s;
  throw Error(ErrorCode::invalid_argument, "unknown suite '" + id + "'; available suites: " + known);
}

std::vector<SuiteReport> run_suites(const std::string& id, const SuiteOptions& opt) {
  if (id != "all") return {run_suite(id, opt)};
  std::vector<SuiteReport> out;
  for (const auto& e : registry()) out.push_back(run_suite(e.id, opt));
  return out;
}

}  // namespace nilheat
