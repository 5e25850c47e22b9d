#include "nilheat/hgroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nilheat/hermite.hpp"
#include "nilheat/quadrature.hpp"

namespace nilheat {

ComplexPoint ComplexPoint::from(const GroupPoint& g) {
  return {CplxVec(g.x.begin(), g.x.end()), CplxVec(g.u.begin(), g.u.end()), g.xi};
}

bool ComplexPoint::is_real(double tol) const {
  for (auto& c : z)
    if (std::abs(c.imag()) > tol) return false;
  for (auto& c : w)
    if (std::abs(c.imag()) > tol) return false;
  return std::abs(zeta.imag()) <= tol;
}

GroupPoint ComplexPoint::real_part() const {
  GroupPoint g;
  for (auto& c : z) g.x.push_back(c.real());
  for (auto& c : w) g.u.push_back(c.real());
  g.xi = zeta.real();
  return g;
}

namespace {

void check_dims(int a, int b) {
  require(a == b, ErrorCode::dimension_mismatch, "group elements of different dimension");
}

}  // namespace

GroupPoint group_mul(const GroupPoint& g, const GroupPoint& h) {
  check_dims(g.n(), h.n());
  require(g.u.size() == g.x.size() && h.u.size() == h.x.size(), ErrorCode::dimension_mismatch,
          "x and u lengths differ");
  GroupPoint r = g;
  double s = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    r.x[i] += h.x[i];
    r.u[i] += h.u[i];
    s += h.x[i] * g.u[i] - h.u[i] * g.x[i];
  }
  r.xi = g.xi + h.xi + 0.5 * s;
  return r;
}

ComplexPoint group_mul(const ComplexPoint& g, const ComplexPoint& h) {
  check_dims(g.n(), h.n());
  ComplexPoint r = g;
  cplx s = 0.0;
  for (int i = 0; i < g.n(); ++i) {
    r.z[i] += h.z[i];
    r.w[i] += h.w[i];
    s += h.z[i] * g.w[i] - h.w[i] * g.z[i];
  }
  r.zeta = g.zeta + h.zeta + 0.5 * s;
  return r;
}

GroupPoint group_inv(const GroupPoint& g) {
  GroupPoint r = g;
  for (auto& v : r.x) v = -v;
  for (auto& v : r.u) v = -v;
  r.xi = -g.xi;
  return r;
}

GroupPoint commutator(const GroupPoint& g, const GroupPoint& h) {
  return group_mul(group_mul(group_mul(g, h), group_inv(g)), group_inv(h));
}

SymplecticForm::SymplecticForm(int n) : n_(n), J_(Eigen::MatrixXd::Zero(2 * n, 2 * n)) {
  require(n >= 1, ErrorCode::invalid_argument, "dimension must be positive");
  for (int i = 0; i < n; ++i) {
    J_(i, n + i) = 1.0;
    J_(n + i, i) = -1.0;
  }
}

double SymplecticForm::operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  require(a.size() == 2 * n_ && b.size() == 2 * n_, ErrorCode::dimension_mismatch,
          "symplectic form argument length");
  return a.dot(J_ * b);
}

double SymplecticForm::symplectic_defect(const Eigen::MatrixXd& A) const {
  require(A.rows() == 2 * n_ && A.cols() == 2 * n_, ErrorCode::dimension_mismatch,
          "matrix size");
  return (A.transpose() * J_ * A - J_).cwiseAbs().maxCoeff();
}

TestFunction schrodinger_apply(double lambda, const GroupPoint& g, const TestFunction& f) {
  require(lambda != 0.0, ErrorCode::degenerate, "central character degenerate");
  require(g.n() == f.dim() && int(g.u.size()) == f.dim(), ErrorCode::dimension_mismatch,
          "group point and test function dimensions differ");
  double xu = 0.0;
  RealVec c(f.dim());
  for (int i = 0; i < f.dim(); ++i) {
    xu += g.x[i] * g.u[i];
    c[i] = lambda * g.x[i] / (2.0 * pi);
  }
  cplx phase = std::exp(I * lambda * (g.xi + 0.5 * xu));
  return f.translated(g.u).modulated(c) * phase;
}

HermiteBasis hermite_basis(int n, int N) {
  require(n >= 1 && N >= 1, ErrorCode::invalid_argument, "basis needs n >= 1 and N >= 1");
  HermiteBasis b;
  b.n = n;
  b.N = N;
  std::vector<int> a(n, 0);
  for (;;) {
    int tot = 0;
    for (int v : a) tot += v;
    if (tot < N) b.index.push_back(a);
    int i = 0;
    while (i < n && ++a[i] == N) a[i++] = 0;
    if (i == n) break;
  }
  std::stable_sort(b.index.begin(), b.index.end(), [](const auto& p, const auto& q) {
    int sp = 0, sq = 0;
    for (int v : p) sp += v;
    for (int v : q) sq += v;
    return sp < sq;
  });
  return b;
}

TestFunction hermite_basis_function(double lambda, const std::vector<int>& alpha) {
  require(lambda != 0.0, ErrorCode::degenerate, "central character degenerate");
  double L = std::abs(lambda);
  Atom atom;
  for (int k : alpha) {
    Factor1D f;
    f.a = L / 2.0;
    f.h.assign(k + 1, 0.0);
    double norm = std::pow(L, 0.25) * std::pow(pi, -0.25);
    for (int j = 1; j <= k; ++j) norm /= std::sqrt(2.0 * j);
    f.h[k] = norm;
    atom.factors.push_back(f);
  }
  return TestFunction::from_atom(atom);
}

Eigen::MatrixXcd hermite_coefficients_1d(double lambda, double x, double u, int N) {
  double L = std::abs(lambda);
  double sl = std::sqrt(L);
  // int e^{-L v^2 + (-L u + i lambda x) v} p_b(sl(v+u)) p_a(sl v) dv * sl * e^{-L u^2/2 + i lambda x u/2}
  cplx a = L, b = -L * u + I * lambda * x;
  cplx mu = b / (2.0 * a);
  const quad::Rule& gh = quad::gauss_hermite(N);
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
  std::vector<cplx> pa(N), pb(N);
  for (std::size_t k = 0; k < gh.size(); ++k) {
    cplx v = mu + gh.nodes[k] / sl;
    hermite_normalized(N - 1, sl * v, pa.data());
    hermite_normalized(N - 1, sl * (v + u), pb.data());
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) S(i, j) += gh.weights[k] * pa[i] * pb[j];
  }
  cplx pre = std::exp(b * b / (4.0 * a) - L * u * u / 2.0 + I * lambda * x * u / 2.0);
  return S * pre;  // sl / sqrt(a) = 1
}

namespace {

// Full matrix from per-pair one-dimensional matrices.
void accumulate(const HermiteBasis& basis, const std::vector<Eigen::MatrixXcd>& per_pair, cplx w,
                Eigen::MatrixXcd& M) {
  const int D = basis.size();
  for (int r = 0; r < D; ++r)
    for (int c = 0; c < D; ++c) {
      cplx t = w;
      for (int i = 0; i < basis.n; ++i) t *= per_pair[i](basis.index[r][i], basis.index[c][i]);
      M(r, c) += t;
    }
}

Eigen::MatrixXcd hermite_matrix_level(double lambda, const SliceSampler& slice, int n, int N,
                                      const HermiteMatrixOptions& opt, int panels) {
  quad::Rule r = quad::composite_legendre(-opt.radius, opt.radius, panels, opt.order);
  const int M = int(r.size());
  std::vector<Eigen::MatrixXcd> table(std::size_t(M) * M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) table[std::size_t(i) * M + j] = hermite_coefficients_1d(lambda, r.nodes[i], r.nodes[j], N);
  HermiteBasis basis = hermite_basis(n, N);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  std::vector<Eigen::MatrixXcd> per_pair(n);
  RealVec x(n), u(n);
  // odometer over 2n indices
  std::vector<int> idx(2 * n, 0);
  for (;;) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      x[i] = r.nodes[idx[i]];
      u[i] = r.nodes[idx[n + i]];
      w *= r.weights[idx[i]] * r.weights[idx[n + i]];
      per_pair[i] = table[std::size_t(idx[i]) * M + idx[n + i]];
    }
    cplx fv = slice(x, u);
    if (fv != 0.0) accumulate(basis, per_pair, w * fv, out);
    int k = 0;
    while (k < 2 * n && ++idx[k] == M) idx[k++] = 0;
    if (k == 2 * n) break;
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd hermite_matrix(double lambda, const SliceSampler& slice, int n, int N,
                                const HermiteMatrixOptions& opt) {
  require(lambda != 0.0, ErrorCode::degenerate, "central character degenerate");
  require(N >= 1 && n >= 1, ErrorCode::invalid_argument, "truncation must be >= 1");
  Eigen::MatrixXcd coarse = hermite_matrix_level(lambda, slice, n, N, opt, opt.panels);
  Eigen::MatrixXcd fine = hermite_matrix_level(lambda, slice, n, N, opt, 2 * opt.panels);
  double change = (fine - coarse).cwiseAbs().maxCoeff();
  double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
  if (change > opt.tol * scale) {
    std::ostringstream os;
    os << "hermite_matrix quadrature not converged: max entry change " << change
       << " between " << opt.panels << " and " << 2 * opt.panels << " panels (tol "
       << opt.tol * scale << ")";
    throw Error(ErrorCode::quadrature, os.str());
  }
  return fine;
}

namespace {

// int int phi_x(x) phi_u(u) <pi(x,u,0) h_b, h_a> dx du for all a, b < N.
Eigen::MatrixXcd pair_moment(double lambda, const Factor1D& fx, const Factor1D& fu, int N) {
  double L = std::abs(lambda), sl = std::sqrt(L);
  Eigen::MatrixXcd Q(3, 3);
  Q << fx.a, -I * lambda / 4.0, -I * lambda / 2.0,
       -I * lambda / 4.0, fu.a + L / 2.0, L / 2.0,
       -I * lambda / 2.0, L / 2.0, L;
  Eigen::VectorXcd lin(3);
  lin << 2.0 * fx.a * fx.b + 2.0 * pi * I * fx.c, 2.0 * fu.a * fu.b + 2.0 * pi * I * fu.c, 0.0;
  cplx c0 = -fx.a * fx.b * fx.b - fu.a * fu.b * fu.b;
  int deg = fx.degree() + fu.degree() + 2 * (N - 1);
  quad::ComplexRule rule = quad::gaussian_rule(Q, lin, c0, deg / 2 + 1);
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
  std::vector<cplx> pa(N), pb(N);
  double sx = std::sqrt(2.0 * fx.a), su = std::sqrt(2.0 * fu.a);
  for (std::size_t k = 0; k < rule.points.size(); ++k) {
    const auto& p = rule.points[k];
    cplx pre = rule.weights[k] * sl * hermite_series(fx.h, sx * (p(0) - fx.b)) *
               hermite_series(fu.h, su * (p(1) - fu.b));
    hermite_normalized(N - 1, sl * p(2), pa.data());
    hermite_normalized(N - 1, sl * (p(2) + p(1)), pb.data());
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) S(i, j) += pre * pa[i] * pb[j];
  }
  return S;
}

}  // namespace

Eigen::MatrixXcd hermite_matrix(double lambda, const TestFunction& f, int N) {
  require(lambda != 0.0, ErrorCode::degenerate, "central character degenerate");
  require(f.dim() % 2 == 1, ErrorCode::dimension_mismatch, "expected a function on H^n (odd dimension)");
  const int n = (f.dim() - 1) / 2;
  HermiteBasis basis = hermite_basis(n, N);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  std::vector<Eigen::MatrixXcd> per_pair(n);
  for (const auto& at : f.atoms()) {
    auto [fxi, kxi] = factor_fourier(at.factors[2 * n]);
    cplx w = at.coef * kxi * fxi.eval(-lambda / (2.0 * pi));
    if (w == 0.0) continue;
    for (int i = 0; i < n; ++i) per_pair[i] = pair_moment(lambda, at.factors[i], at.factors[n + i], N);
    accumulate(basis, per_pair, w, out);
  }
  return out;
}

SliceSampler central_slice(const std::function<cplx(const GroupPoint&)>& f, int n, double lambda,
                           double xi_radius, int xi_nodes) {
  quad::Rule r = quad::composite_legendre(-xi_radius, xi_radius, std::max(1, xi_nodes / 16), 16);
  return [=](const RealVec& x, const RealVec& u) {
    GroupPoint g{x, u, 0.0};
    require(int(x.size()) == n, ErrorCode::dimension_mismatch, "slice point dimension");
    cplx acc = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      g.xi = r.nodes[k];
      acc += r.weights[k] * f(g) * std::exp(I * lambda * g.xi);
    }
    return acc;
  };
}

}  // namespace nilheat
