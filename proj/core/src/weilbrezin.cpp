#include "nilheat/weilbrezin.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "nilheat/hermite.hpp"

namespace nilheat {

Scaled lattice_sum_scaled(const std::function<cplx(long)>& exponent, const std::function<cplx(long)>& pre,
                          double drop, long max_terms) {
  const double e0 = exponent(0).real(), e1 = exponent(1).real(), em = exponent(-1).real();
  const double A = 0.5 * (e1 + em - 2.0 * e0);
  const double B = 0.5 * (e1 - em);
  require(A < 0.0, ErrorCode::divergence, "lattice sum does not decay");
  const double mstar = -B / (2.0 * A);
  const double radius = std::sqrt(drop / -A) + 3.0;
  const long lo = long(std::floor(mstar - radius)), hi = long(std::ceil(mstar + radius));
  if (hi - lo > max_terms) {
    std::ostringstream os;
    os << "lattice sum truncation needs " << (hi - lo) << " terms (M = " << long(radius)
       << "), above the limit " << max_terms;
    throw Error(ErrorCode::truncation, os.str());
  }
  // the vertex of the exact quadratic is the largest real part
  const double shift = e0 + A * mstar * mstar + B * mstar;
  cplx s = 0.0;
  for (long m = lo; m <= hi; ++m) s += pre(m) * std::exp(exponent(m) - shift);
  return {s, shift};
}

cplx lattice_sum(const std::function<cplx(long)>& exponent, const std::function<cplx(long)>& pre,
                 double drop, long max_terms) {
  return lattice_sum_scaled(exponent, pre, drop, max_terms).value();
}

double lambda_of(long k, const DivisorChain& chain) {
  return 4.0 * pi * double(k) / to_double(chain.l()[0]);
}

namespace {

// e^{2 pi i t x} e^{i lambda x u / 2} sum_m e^{i lambda l m x} phi(u + m l)
cplx coord_factor(const Factor1D& f, double lambda, double l, long twist, cplx x, cplx u) {
  const double sa = std::sqrt(2.0 * f.a);
  auto expo = [&](long m) {
    cplx s = u + double(m) * l;
    cplx d = s - f.b;
    return I * lambda * l * double(m) * x - f.a * d * d + 2.0 * pi * I * f.c * s;
  };
  auto pre = [&](long m) {
    if (f.h.size() == 1) return f.h[0];
    return hermite_series(f.h, sa * (u + double(m) * l - f.b));
  };
  return std::exp(2.0 * pi * I * double(twist) * x + 0.5 * I * lambda * x * u) * lattice_sum(expo, pre);
}

void check_sector_index(long k, const DivisorChain& chain, const IntVec& j) {
  require(int(j.size()) == chain.n(), ErrorCode::dimension_mismatch, "sector index length");
  IntVec p = chain.ratios();
  for (int i = 0; i < chain.n(); ++i)
    require(j[i] >= 0 && j[i] < 2 * std::labs(k) * p[i], ErrorCode::invalid_argument,
            "sector index j outside A_k");
}

long mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

NilFunction::NilFunction(long k, DivisorChain chain)
    : k_(k), chain_(std::move(chain)), lambda_(lambda_of(k, chain_)), l_(chain_.lengths()) {
  require(k != 0, ErrorCode::out_of_scope, "k=0 sector out of scope");
}

void NilFunction::add_term(NilTerm t) {
  require(t.f.dim() == n() && int(t.twist.size()) == n(), ErrorCode::dimension_mismatch,
          "term dimension differs from the chain");
  terms_.push_back(std::move(t));
}

cplx NilFunction::G(const CplxVec& x, const CplxVec& u) const {
  require(int(x.size()) == n() && int(u.size()) == n(), ErrorCode::dimension_mismatch,
          "evaluation point dimension");
  cplx total = 0.0;
  for (const auto& t : terms_)
    for (const auto& at : t.f.atoms()) {
      cplx v = t.coef * at.coef;
      for (int i = 0; i < n() && v != 0.0; ++i)
        v *= coord_factor(at.factors[i], lambda_, l_[i], t.twist[i], x[i], u[i]);
      total += v;
    }
  return total;
}

cplx NilFunction::G(const RealVec& x, const RealVec& u) const {
  return G(CplxVec(x.begin(), x.end()), CplxVec(u.begin(), u.end()));
}

cplx NilFunction::operator()(const ComplexPoint& p) const {
  return std::exp(I * lambda_ * p.zeta) * G(p.z, p.w);
}

cplx NilFunction::operator()(const GroupPoint& g) const { return (*this)(ComplexPoint::from(g)); }

NilFunction NilFunction::operator+(const NilFunction& o) const {
  require(k_ == o.k_ && chain_ == o.chain_, ErrorCode::sector_mismatch,
          "adding functions of different central index or lattice");
  NilFunction r = *this;
  r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
  return r;
}

NilFunction NilFunction::operator*(cplx s) const {
  NilFunction r = *this;
  for (auto& t : r.terms_) t.coef *= s;
  return r;
}

NilFunction weil_brezin(long k, const DivisorChain& chain, const TestFunction& f) {
  NilFunction F(k, chain);
  require(f.dim() == chain.n(), ErrorCode::dimension_mismatch, "test function dimension differs from n");
  if (!f.empty()) F.add_term({1.0, IntVec(chain.n(), 0), f});
  return F;
}

NilFunction twist_j(const NilFunction& F, const IntVec& j) {
  check_sector_index(F.k(), F.chain(), j);
  NilFunction r(F.k(), F.chain());
  for (auto t : F.terms()) {
    for (int i = 0; i < F.n(); ++i) t.twist[i] += j[i];
    r.add_term(std::move(t));
  }
  return r;
}

namespace {

bool in_sector(const NilTerm& t, long k, const IntVec& p, const IntVec& j) {
  for (std::size_t i = 0; i < j.size(); ++i)
    if (mod(t.twist[i] - j[i], 2 * std::labs(k) * p[i]) != 0) return false;
  return true;
}

}  // namespace

NilFunction project_sector(const NilFunction& F, const IntVec& j) {
  check_sector_index(F.k(), F.chain(), j);
  IntVec p = F.chain().ratios();
  NilFunction r(F.k(), F.chain());
  for (const auto& t : F.terms())
    if (in_sector(t, F.k(), p, j)) r.add_term(t);
  return r;
}

cplx project_sector_at(const std::function<cplx(const CplxVec&, const CplxVec&)>& G, long k,
                       const DivisorChain& chain, const IntVec& j, const CplxVec& x, const CplxVec& u) {
  check_sector_index(k, chain, j);
  const int n = chain.n();
  IntVec p = chain.ratios();
  RealVec l = chain.lengths();
  cplx acc = 0.0;
  for (const IntVec& m : ak_elements(k, chain)) {
    CplxVec xs = x;
    cplx phase = 0.0;
    for (int i = 0; i < n; ++i) {
      xs[i] += double(m[i]) / (2.0 * double(k) * double(p[i]));
      phase += -pi * I * double(m[i]) / l[i] * u[i] - pi * I / double(k) * double(m[i]) / double(p[i]) * double(j[i]);
    }
    acc += std::exp(phase) * G(xs, u);
  }
  return acc / double(ak_size(k, chain));
}

cplx sector_shift_defect(const std::function<cplx(const CplxVec&, const CplxVec&)>& G, long k,
                         const DivisorChain& chain, const IntVec& j, const IntVec& d,
                         const CplxVec& x, const CplxVec& u) {
  const int n = chain.n();
  IntVec p = chain.ratios();
  RealVec l = chain.lengths();
  CplxVec xs = x;
  cplx phase = 0.0;
  for (int i = 0; i < n; ++i) {
    xs[i] += double(d[i]) / (2.0 * double(k) * double(p[i]));
    phase += pi * I * double(d[i]) / l[i] * u[i] + pi * I / double(k) * double(d[i]) / double(p[i]) * double(j[i]);
  }
  return G(xs, u) - std::exp(phase) * G(x, u);
}

TestFunction invert_sector(const NilFunction& F, const IntVec& j) {
  check_sector_index(F.k(), F.chain(), j);
  IntVec p = F.chain().ratios();
  RealVec l = F.chain().lengths();
  TestFunction out(F.n());
  for (const auto& t : F.terms()) {
    if (!in_sector(t, F.k(), p, j))
      throw Error(ErrorCode::sector_mismatch, "function has components outside the requested sector");
    RealVec shift(F.n());
    for (int i = 0; i < F.n(); ++i) {
      long N = (t.twist[i] - j[i]) / (2 * F.k() * p[i]);
      shift[i] = -double(N) * l[i];
    }
    out += t.f.translated(shift) * t.coef;
  }
  return out;
}

cplx fourier_coefficient(const NilFunction& F, const IntVec& j, const IntVec& m, const RealVec& u,
                         int points) {
  const int n = F.n();
  require(int(j.size()) == n && int(m.size()) == n && int(u.size()) == n, ErrorCode::dimension_mismatch,
          "index dimension");
  RealVec l = F.chain().lengths();
  std::vector<int> idx(n, 0);
  cplx acc = 0.0;
  RealVec x(n);
  for (;;) {
    cplx phase = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = (idx[i] + 0.5) / points;
      phase += -2.0 * pi * I * double(j[i]) * x[i] - 0.5 * I * F.lambda() * x[i] * u[i] -
               I * F.lambda() * double(m[i]) * l[i] * x[i];
    }
    acc += F.G(x, u) * std::exp(phase);
    int i = 0;
    while (i < n && ++idx[i] == points) idx[i++] = 0;
    if (i == n) break;
  }
  return acc / std::pow(double(points), n);
}

cplx nu_j_apply(long k, const DivisorChain& chain, const IntVec& j, const TestFunction& f) {
  require(k != 0, ErrorCode::out_of_scope, "k=0 sector out of scope");
  require(f.dim() == chain.n() && int(j.size()) == chain.n(), ErrorCode::dimension_mismatch,
          "dimension mismatch");
  IntVec p = chain.ratios();
  RealVec l = chain.lengths();
  cplx total = 0.0;
  for (const auto& at : f.atoms()) {
    cplx v = at.coef;
    for (int i = 0; i < f.dim() && v != 0.0; ++i) {
      auto [g, kk] = factor_fourier(at.factors[i]);
      const double sa = std::sqrt(2.0 * g.a);
      auto node = [&](long m) { return (double(j[i]) + 2.0 * double(k) * double(m) * double(p[i])) / l[i]; };
      auto expo = [&](long m) {
        double s = node(m), d = s - g.b;
        return cplx(-g.a * d * d, 2.0 * pi * g.c * s);
      };
      auto pre = [&](long m) { return hermite_series(g.h, sa * (node(m) - g.b)); };
      v *= kk * lattice_sum(expo, pre);
    }
    total += v;
  }
  return total;
}

TestFunction nu_j_partner(long k, const DivisorChain& chain, const IntVec& j, const TestFunction& f) {
  RealVec l = chain.lengths(), alpha(chain.n()), beta(chain.n());
  for (int i = 0; i < chain.n(); ++i) {
    alpha[i] = 2.0 * double(k) / (l[0] * l[i]);
    beta[i] = double(j[i]) / l[i];
  }
  return f.fourier().affine(alpha, beta);
}

double nu_j_coefficient_check(long k, const DivisorChain& chain, const IntVec& j, const TestFunction& f,
                    int probes, unsigned seed) {
  check_sector_index(k, chain, j);
  if (f.empty()) return 0.0;
  const int n = chain.n();
  const double lambda = lambda_of(k, chain);
  RealVec l = chain.lengths();
  NilFunction Vg = twist_j(weil_brezin(k, chain, nu_j_partner(k, chain, j, f)), j);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    GroupPoint g = GroupPoint::identity(n);
    for (int i = 0; i < n; ++i) g.x[i] = U(rng), g.u[i] = U(rng);
    g.xi = U(rng);
    cplx lhs = nu_j_apply(k, chain, j, schrodinger_apply(lambda, g, f));
    GroupPoint h = GroupPoint::identity(n);
    for (int i = 0; i < n; ++i) {
      h.x[i] = g.u[i] / l[i];
      h.u[i] = -l[i] * g.x[i];
    }
    h.xi = g.xi;
    cplx rhs = Vg(h);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  return worst;
}

namespace {

struct Piece {
  cplx coef;
  long twist_i;
  const Factor1D* factor;
};

// int over [0,1) x [0,l) of g_A conj(g_B) for one coordinate pair.
std::vector<CplxVec> coordinate_samples(const std::vector<Piece>& pieces, double lambda, double l, int P) {
  std::vector<CplxVec> out;
  for (const auto& pc : pieces) {
    CplxVec v(std::size_t(P) * P);
    for (int a = 0; a < P; ++a)
      for (int b = 0; b < P; ++b) {
        double x = (a + 0.5) / P, u = l * (b + 0.5) / P;
        v[std::size_t(a) * P + b] = coord_factor(*pc.factor, lambda, l, pc.twist_i, x, u);
      }
    out.push_back(std::move(v));
  }
  return out;
}

cplx l2m_inner_level(const NilFunction& F, const NilFunction& G, int P) {
  const int n = F.n();
  RealVec l = F.chain().lengths();
  struct Sep {
    cplx coef;
    const NilTerm* term;
    const Atom* atom;
  };
  auto flatten = [](const NilFunction& H) {
    std::vector<Sep> s;
    for (const auto& t : H.terms())
      for (const auto& at : t.f.atoms()) s.push_back({t.coef * at.coef, &t, &at});
    return s;
  };
  auto sf = flatten(F), sg = flatten(G);
  // per coordinate Gram between the separable pieces
  std::vector<Eigen::MatrixXcd> gram(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Piece> pf, pg;
    for (auto& s : sf) pf.push_back({s.coef, s.term->twist[i], &s.atom->factors[i]});
    for (auto& s : sg) pg.push_back({s.coef, s.term->twist[i], &s.atom->factors[i]});
    auto vf = coordinate_samples(pf, F.lambda(), l[i], P);
    auto vg = coordinate_samples(pg, F.lambda(), l[i], P);
    gram[i] = Eigen::MatrixXcd::Zero(pf.size(), pg.size());
    const double w = l[i] / (double(P) * P);
    for (std::size_t a = 0; a < vf.size(); ++a)
      for (std::size_t b = 0; b < vg.size(); ++b) {
        cplx s = 0.0;
        for (std::size_t q = 0; q < vf[a].size(); ++q) s += vf[a][q] * std::conj(vg[b][q]);
        gram[i](a, b) = s * w;
      }
  }
  cplx total = 0.0;
  for (std::size_t a = 0; a < sf.size(); ++a)
    for (std::size_t b = 0; b < sg.size(); ++b) {
      cplx v = sf[a].coef * std::conj(sg[b].coef);
      for (int i = 0; i < n; ++i) v *= gram[i](a, b);
      total += v;
    }
  return total;
}

}  // namespace

cplx l2m_inner(const NilFunction& F, const NilFunction& G, const L2Options& opt) {
  require(F.k() == G.k() && F.chain() == G.chain(), ErrorCode::sector_mismatch,
          "inner product of functions with different central index or lattice");
  int P = opt.points;
  cplx prev = l2m_inner_level(F, G, P);
  while (2 * P <= opt.max_points) {
    P *= 2;
    cplx cur = l2m_inner_level(F, G, P);
    if (std::abs(cur - prev) <= opt.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "L2(M) quadrature did not settle up to " << P << " points per axis";
  throw Error(ErrorCode::quadrature, os.str());
}

double l2m_norm(const NilFunction& F, const L2Options& opt) {
  return std::sqrt(std::max(0.0, l2m_inner(F, F, opt).real()));
}

}  // namespace nilheat
