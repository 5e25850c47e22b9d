#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nilheat/common.hpp"

namespace nilheat::quad {

struct Rule {
  RealVec nodes;
  RealVec weights;
  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [-1, 1]. Cached; the returned reference stays valid.
const Rule& gauss_legendre(int order);

/// Gauss-Hermite rule for the weight exp(-t^2) on the real line. Cached.
const Rule& gauss_hermite(int order);

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
Rule composite_legendre(double a, double b, int panels, int order);

/// Midpoint rule on [a, b); spectrally accurate for smooth periodic integrands.
Rule periodic_midpoint(double a, double b, int points);

struct SpherePoint {
  double x, y, z, w;
};

/// Lebedev rule on S^2 with 26 (degree 7) or 50 (degree 11) points.
/// Weights sum to 4*pi.
std::vector<SpherePoint> lebedev(int points);

/// Lebedev for 26 or 50 points; otherwise a Gauss-Legendre (cos theta) x midpoint
/// (phi) product with about `points` nodes. Weights sum to 4*pi, antipodally symmetric.
std::vector<SpherePoint> sphere_rule(int points);

/// int_R P(s) exp(-a s^2 + b s + c) ds for Re(a) > 0 and polynomial P of
/// degree < 2*nodes. Exact up to rounding.
cplx gaussian_poly_1d(cplx a, cplx b, cplx c, const std::function<cplx(cplx)>& poly,
                      int nodes);

/// int_{R^d} P(s) exp(-s^T Q s + L.s + c) ds for complex symmetric Q with
/// positive definite real part and polynomial P of per-axis degree < 2*nodes.
cplx gaussian_poly_nd(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& L, cplx c,
                      const std::function<cplx(const Eigen::VectorXcd&)>& poly, int nodes);

/// Complex node set realizing int P(s) exp(-s^T Q s + L.s + c) ds as
/// sum_k weights[k] * P(points[k]) for polynomials of per-axis degree < 2*nodes.
struct ComplexRule {
  std::vector<Eigen::VectorXcd> points;
  CplxVec weights;
};
ComplexRule gaussian_rule(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& L, cplx c, int nodes);

/// Moment data of the complex Gaussian exp(-s^T Q s + L.s): log of the total mass
/// and the mean vector. Used when only a marginal polynomial is needed.
struct GaussianMass {
  cplx log_mass;          // log of int exp(-s^T Q s + L.s) ds
  Eigen::VectorXcd mean;  // (1/2) Q^{-1} L
  Eigen::MatrixXcd cov;   // (1/2) Q^{-1}
};
GaussianMass gaussian_mass(const Eigen::MatrixXcd& Q, const Eigen::VectorXcd& L);

}  // namespace nilheat::quad
