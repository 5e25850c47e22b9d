#include "nilheat/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace nilheat::quad {

namespace {

Rule build_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

// Orthonormal Hermite polynomials for the weight exp(-t^2): returns psi_n(x)
// and psi_{n-1}(x).
std::pair<double, double> hermite_orthonormal(int n, double x) {
  double pm1 = 0.0;
  double p = std::pow(pi, -0.25);
  for (int k = 0; k < n; ++k) {
    double pn = std::sqrt(2.0 / (k + 1)) * x * p - std::sqrt(double(k) / (k + 1)) * pm1;
    pm1 = p;
    p = pn;
  }
  return {p, pm1};
}

Rule build_hermite(int n) {
  // Golub-Welsch for initial nodes, then Newton polish and Christoffel weights.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jac(k, k - 1) = jac(k - 1, k) = std::sqrt(k / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    for (int it = 0; it < 5; ++it) {
      auto [p, pm1] = hermite_orthonormal(n, x);
      double dp = std::sqrt(2.0 * n) * pm1;
      if (dp == 0.0) break;
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    double s = 0.0, pm1 = 0.0, p = std::pow(pi, -0.25);
    for (int k = 0; k < n; ++k) {
      s += p * p;
      double pn = std::sqrt(2.0 / (k + 1)) * x * p - std::sqrt(double(k) / (k + 1)) * pm1;
      pm1 = p;
      p = pn;
    }
    r.nodes[i] = x;
    r.weights[i] = 1.0 / s;
  }
  return r;
}

template <class Builder>
const Rule& cached(std::map<int, std::unique_ptr<Rule>>& cache, std::mutex& mu, int n,
                   Builder build) {
  require(n >= 1, ErrorCode::invalid_argument, "quadrature order must be >= 1");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Rule>(build(n))).first;
  return *it->second;
}

}  // namespace

const Rule& gauss_legendre(int order) {
  static std::map<int, std::unique_ptr<Rule>> cache;
  static std::mutex mu;
  return cached(cache, mu, order, build_legendre);
}

const Rule& gauss_hermite(int order) {
  static std::map<int, std::unique_ptr<Rule>> cache;
  static std::mutex mu;
  return cached(cache, mu, order, build_hermite);
}

Rule composite_legendre(double a, double b, int panels, int order) {
  require(panels >= 1, ErrorCode::invalid_argument, "panels must be >= 1");
  const Rule& g = gauss_legendre(order);
  Rule r;
  r.nodes.reserve(std::size_t(panels) * g.size());
  r.weights.reserve(r.nodes.capacity());
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    for (std::size_t i = 0; i < g.size(); ++i) {
      r.nodes.push_back(lo + 0.5 * h * (g.nodes[i] + 1.0));
      r.weights.push_back(0.5 * h * g.weights[i]);
    }
  }
  return r;
}

Rule periodic_midpoint(double a, double b, int points) {
  require(points >= 1, ErrorCode::invalid_argument, "points must be >= 1");
  Rule r;
  double h = (b - a) / points;
  for (int i = 0; i < points; ++i) {
    r.nodes.push_back(a + (i + 0.5) * h);
    r.weights.push_back(h);
  }
  return r;
}

std::vector<SpherePoint> sphere_rule(int points) {
  if (points == 26 || points == 50) return lebedev(points);
  require(points >= 8, ErrorCode::invalid_argument, "sphere rule needs at least 8 points");
  const int nt = int(std::ceil(std::sqrt(points / 2.0)));
  const Rule& gl = gauss_legendre(nt);
  const Rule ph = periodic_midpoint(0.0, 2.0 * pi, 2 * nt);
  std::vector<SpherePoint> out;
  for (std::size_t a = 0; a < gl.size(); ++a) {
    const double c = gl.nodes[a], s = std::sqrt(1.0 - c * c);
    for (std::size_t b = 0; b < ph.size(); ++b)
      out.push_back({s * std::cos(ph.nodes[b]), s * std::sin(ph.nodes[b]), c, gl.weights[a] * ph.weights[b]});
  }
  return out;
}

std::vector<SpherePoint> lebedev(int points) {
  std::vector<SpherePoint> out;
  auto octa = [&](double w) {
    for (int s : {-1, 1}) {
      out.push_back({double(s), 0, 0, w});
      out.push_back({0, double(s), 0, w});
      out.push_back({0, 0, double(s), w});
    }
  };
  auto edges = [&](double w) {
    const double a = 1.0 / std::sqrt(2.0);
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1}) {
        out.push_back({0, s1 * a, s2 * a, w});
        out.push_back({s1 * a, 0, s2 * a, w});
        out.push_back({s1 * a, s2 * a, 0, w});
      }
  };
  auto corners = [&](double w) {
    const double a = 1.0 / std::sqrt(3.0);
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1})
        for (int s3 : {-1, 1}) out.push_back({s1 * a, s2 * a, s3 * a, w});
  };
  // (l, l, m) orbit with 24 points.
  auto llm = [&](double l, double m, double w) {
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1})
        for (int s3 : {-1, 1}) {
          out.push_back({s1 * l, s2 * l, s3 * m, w});
          out.push_back({s1 * l, s2 * m, s3 * l, w});
          out.push_back({s1 * m, s2 * l, s3 * l, w});
        }
  };
  if (points == 26) {
    octa(1.0 / 21.0);
    edges(4.0 / 105.0);
    corners(9.0 / 280.0);
  } else if (points == 50) {
    octa(4.0 / 315.0);
    edges(64.0 / 2835.0);
    corners(27.0 / 1280.0);
    llm(1.0 / std::sqrt(11.0), 3.0 / std::sqrt(11.0), 14641.0 / 725760.0);
  } else {
    throw Error(ErrorCode::unsupported, "Lebedev rule available for 26 or 50 points");
  }
  for (auto& p : out) p.w *= 4.0 * pi;
  return out;
}

cplx gaussian_poly_1d(cplx a, cplx b, cplx c, const std::function<cplx(cplx)>& poly,
                      int nodes) {
  require(a.real() > 0.0, ErrorCode::divergence, "Gaussian integral needs Re(a) > 0");
  const Rule& gh = gauss_hermite(nodes);
  cplx sa = std::sqrt(a);
  cplx mu = b / (2.0 * a);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < gh.size(); ++k) acc += gh.weights[k] * poly(mu + gh.nodes[k] / sa);
  return acc / sa * std::exp(c + b * b / (4.0 * a));
}

namespace {

// Q = L L^T with complex L, no conjugation, no pivoting.
Eigen::MatrixXcd symmetric_cholesky(const Eigen::MatrixXcd& Q) {
  const auto d = Q.rows();
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    cplx s = Q(j, j);
    for (Eigen::Index k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
    require(s.real() > 0.0, ErrorCode::divergence,
            "quadratic form lacks a positive definite real part");
    L(j, j) = std::sqrt(s);
    for (Eigen::Index i = j + 1; i < d; ++i) {
      cplx t = Q(i, j);
      for (Eigen::Index k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
      L(i, j) = t / L(j, j);
    }
  }
  return L;
}

}  // namespace

GaussianMass gaussian_mass(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& L) {
  const auto d = Q.rows();
  Eigen::MatrixXcd chol = symmetric_cholesky(Q);
  Eigen::MatrixXcd Qinv = Q.inverse();
  GaussianMass g;
  g.mean = 0.5 * Qinv * L;
  g.cov = 0.5 * Qinv;
  cplx logdet = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) logdet += std::log(chol(j, j));
  cplx quad_term = 0.25 * (L.transpose() * Qinv * L)(0, 0);
  g.log_mass = 0.5 * double(d) * std::log(pi) - logdet + quad_term;
  return g;
}

ComplexRule gaussian_rule(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& L, cplx c,
                          int nodes) {
  const auto d = Q.rows();
  Eigen::MatrixXcd chol = symmetric_cholesky(Q);
  Eigen::MatrixXcd Qinv = Q.inverse();
  Eigen::VectorXcd mu = 0.5 * Qinv * L;
  // s = mu + chol^{-T} t
  Eigen::MatrixXcd back = chol.transpose().inverse();
  cplx logdet = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) logdet += std::log(chol(j, j));
  cplx scale = std::exp(c + 0.25 * (L.transpose() * Qinv * L)(0, 0) - logdet);
  const Rule& gh = gauss_hermite(nodes);
  ComplexRule out;
  std::vector<int> idx(d, 0);
  Eigen::VectorXcd t(d);
  for (;;) {
    double w = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      t(j) = gh.nodes[idx[j]];
      w *= gh.weights[idx[j]];
    }
    out.points.push_back(mu + back * t);
    out.weights.push_back(w * scale);
    Eigen::Index j = 0;
    while (j < d && ++idx[j] == nodes) idx[j++] = 0;
    if (j == d) break;
  }
  return out;
}

cplx gaussian_poly_nd(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& L, cplx c,
                      const std::function<cplx(const Eigen::VectorXcd&)>& poly, int nodes) {
  ComplexRule r = gaussian_rule(Q, L, c, nodes);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < r.points.size(); ++k) acc += r.weights[k] * poly(r.points[k]);
  return acc;
}

}  // namespace nilheat::quad
