#include "nilheat/testfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nilheat/hermite.hpp"
#include "nilheat/quadrature.hpp"

namespace nilheat {

cplx Factor1D::eval(cplx s) const {
  cplx d = s - b;
  return hermite_series(h, std::sqrt(2.0 * a) * d) * std::exp(-a * d * d + 2.0 * pi * I * c * s);
}

cplx Atom::eval(const CplxVec& v) const {
  cplx r = coef;
  for (std::size_t i = 0; i < factors.size(); ++i) r *= factors[i].eval(v[i]);
  return r;
}

namespace {

RealVec padded(RealVec v, int dim) {
  if (v.empty()) v.assign(dim, 0.0);
  require(int(v.size()) == dim, ErrorCode::dimension_mismatch, "vector length differs from dimension");
  return v;
}

}  // namespace

TestFunction TestFunction::gaussian(int dim, double a, RealVec b, RealVec c) {
  return hermite(dim, a, std::vector<int>(dim, 0), std::move(b), std::move(c));
}

TestFunction TestFunction::hermite(int dim, double a, const std::vector<int>& alpha, RealVec b,
                                   RealVec c) {
  require(a > 0.0, ErrorCode::invalid_argument, "width must be positive");
  require(int(alpha.size()) == dim, ErrorCode::dimension_mismatch, "multi-index length");
  b = padded(std::move(b), dim);
  c = padded(std::move(c), dim);
  Atom atom;
  for (int i = 0; i < dim; ++i) {
    Factor1D f;
    f.a = a;
    f.b = b[i];
    f.c = c[i];
    f.h.assign(alpha[i] + 1, 0.0);
    f.h[alpha[i]] = 1.0;
    atom.factors.push_back(std::move(f));
  }
  return from_atom(std::move(atom));
}

TestFunction TestFunction::from_atom(Atom atom) {
  TestFunction f(int(atom.factors.size()));
  f.atoms_.push_back(std::move(atom));
  return f;
}

cplx TestFunction::operator()(const CplxVec& v) const {
  require(int(v.size()) == dim_, ErrorCode::dimension_mismatch, "evaluation point dimension");
  cplx r = 0.0;
  for (const auto& at : atoms_) r += at.eval(v);
  return r;
}

cplx TestFunction::operator()(const RealVec& v) const {
  return (*this)(CplxVec(v.begin(), v.end()));
}

TestFunction& TestFunction::operator+=(const TestFunction& g) {
  if (atoms_.empty() && dim_ == 0) dim_ = g.dim_;
  require(dim_ == g.dim_, ErrorCode::dimension_mismatch, "adding test functions of different dimension");
  atoms_.insert(atoms_.end(), g.atoms_.begin(), g.atoms_.end());
  return *this;
}

TestFunction TestFunction::operator+(const TestFunction& g) const {
  TestFunction r = *this;
  r += g;
  return r;
}

TestFunction TestFunction::operator*(cplx s) const {
  TestFunction r = *this;
  for (auto& at : r.atoms_) at.coef *= s;
  return r;
}

TestFunction TestFunction::translated(const RealVec& shift) const {
  require(int(shift.size()) == dim_, ErrorCode::dimension_mismatch, "shift dimension");
  TestFunction r = *this;
  for (auto& at : r.atoms_)
    for (int i = 0; i < dim_; ++i) {
      auto& f = at.factors[i];
      at.coef *= std::exp(2.0 * pi * I * f.c * shift[i]);
      f.b -= shift[i];
    }
  return r;
}

TestFunction TestFunction::modulated(const RealVec& c) const {
  require(int(c.size()) == dim_, ErrorCode::dimension_mismatch, "modulation dimension");
  TestFunction r = *this;
  for (auto& at : r.atoms_)
    for (int i = 0; i < dim_; ++i) at.factors[i].c += c[i];
  return r;
}

TestFunction TestFunction::affine(const RealVec& alpha, const RealVec& beta) const {
  require(int(alpha.size()) == dim_ && int(beta.size()) == dim_, ErrorCode::dimension_mismatch,
          "affine map dimension");
  TestFunction r = *this;
  for (auto& at : r.atoms_)
    for (int i = 0; i < dim_; ++i) {
      require(alpha[i] != 0.0, ErrorCode::degenerate, "affine scale must be nonzero");
      auto& f = at.factors[i];
      at.coef *= std::exp(2.0 * pi * I * f.c * beta[i]);
      f.b = (f.b - beta[i]) / alpha[i];
      f.a *= alpha[i] * alpha[i];
      f.c *= alpha[i];
      if (alpha[i] < 0.0)
        for (std::size_t k = 1; k < f.h.size(); k += 2) f.h[k] = -f.h[k];
    }
  return r;
}

std::pair<Factor1D, cplx> factor_fourier(const Factor1D& f) {
  Factor1D g;
  g.a = pi * pi / f.a;
  g.b = f.c;
  g.c = -f.b;
  g.h = f.h;
  cplx rot = 1.0;
  for (auto& hk : g.h) {
    hk *= rot;
    rot *= -I;
  }
  cplx k = std::sqrt(pi / f.a) * std::exp(2.0 * pi * I * f.b * f.c);
  return {g, k};
}

TestFunction TestFunction::fourier() const {
  TestFunction r = *this;
  for (auto& at : r.atoms_)
    for (auto& f : at.factors) {
      auto [g, k] = factor_fourier(f);
      f = g;
      at.coef *= k;
    }
  return r;
}

cplx TestFunction::fourier_at(const RealVec& xi) const {
  require(int(xi.size()) == dim_, ErrorCode::dimension_mismatch, "frequency dimension");
  cplx r = 0.0;
  for (const auto& at : atoms_) {
    cplx t = at.coef;
    for (int i = 0; i < dim_; ++i) {
      auto [g, k] = factor_fourier(at.factors[i]);
      t *= k * g.eval(xi[i]);
    }
    r += t;
  }
  return r;
}

cplx factor_inner(const Factor1D& f, const Factor1D& g) {
  CplxVec hg(g.h.size());
  for (std::size_t k = 0; k < hg.size(); ++k) hg[k] = std::conj(g.h[k]);
  double sf = std::sqrt(2.0 * f.a), sg = std::sqrt(2.0 * g.a);
  auto poly = [&](cplx s) { return hermite_series(f.h, sf * (s - f.b)) * hermite_series(hg, sg * (s - g.b)); };
  cplx qa = f.a + g.a;
  cplx qb = 2.0 * f.a * f.b + 2.0 * g.a * g.b + 2.0 * pi * I * (f.c - g.c);
  cplx qc = -f.a * f.b * f.b - g.a * g.b * g.b;
  int nodes = (f.degree() + g.degree()) / 2 + 1;
  return quad::gaussian_poly_1d(qa, qb, qc, poly, nodes);
}

cplx TestFunction::inner(const TestFunction& g) const {
  require(dim_ == g.dim_, ErrorCode::dimension_mismatch, "inner product of different dimensions");
  cplx r = 0.0;
  for (const auto& p : atoms_)
    for (const auto& q : g.atoms_) {
      cplx t = p.coef * std::conj(q.coef);
      for (int i = 0; i < dim_ && t != 0.0; ++i) t *= factor_inner(p.factors[i], q.factors[i]);
      r += t;
    }
  return r;
}

double TestFunction::norm() const { return std::sqrt(std::max(0.0, norm2())); }

double TestFunction::min_width() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& at : atoms_)
    for (const auto& f : at.factors) w = std::min(w, f.a);
  return w;
}

std::vector<TestFunction> sample_functions(int dim, int count, unsigned seed, double a_min,
                                           double a_max) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> W(a_min, a_max), C(-0.5, 0.5), Z(-1.0, 1.0);
  std::vector<TestFunction> out;
  for (int q = 0; q < count; ++q) {
    auto vec = [&](std::uniform_real_distribution<double>& d) {
      RealVec v(dim);
      for (auto& x : v) x = d(rng);
      return v;
    };
    TestFunction f = TestFunction::gaussian(dim, W(rng), vec(C), vec(C));
    // every other function gets a Hermite admixture so the family is not all Gaussian
    if (q % 2 == 1) {
      std::vector<int> alpha(dim, 0);
      alpha[q % dim] = 1 + q % 3;
      f += TestFunction::hermite(dim, W(rng), alpha, vec(C), vec(C)) * cplx(Z(rng), Z(rng));
    }
    out.push_back(f * (1.0 / f.norm()));
  }
  return out;
}

}  // namespace nilheat
