#pragma once

#include <functional>

#include <Eigen/Dense>

#include "nilheat/common.hpp"
#include "nilheat/testfunction.hpp"

namespace nilheat {

/// Element (x, u, xi) of the Heisenberg group H^n.
struct GroupPoint {
  RealVec x, u;
  double xi = 0.0;

  int n() const { return int(x.size()); }
  static GroupPoint identity(int n) { return {RealVec(n, 0.0), RealVec(n, 0.0), 0.0}; }
};

/// Complexified point (z, w, zeta); real parts are (x, u, xi).
struct ComplexPoint {
  CplxVec z, w;
  cplx zeta = 0.0;

  int n() const { return int(z.size()); }
  static ComplexPoint from(const GroupPoint& g);
  bool is_real(double tol = 0.0) const;
  GroupPoint real_part() const;
};

// (x,u,xi)(x',u',xi') = (x+x', u+u', xi+xi'+(x'.u - u'.x)/2)
GroupPoint group_mul(const GroupPoint& g, const GroupPoint& h);
ComplexPoint group_mul(const ComplexPoint& g, const ComplexPoint& h);
GroupPoint group_inv(const GroupPoint& g);
GroupPoint commutator(const GroupPoint& g, const GroupPoint& h);

/// Standard symplectic form on R^{2n}, coordinates ordered (x_1..x_n, u_1..u_n).
class SymplecticForm {
 public:
  explicit SymplecticForm(int n);
  int n() const { return n_; }
  const Eigen::MatrixXd& J() const { return J_; }
  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  /// max_ij |omega(A e_i, A e_j) - omega(e_i, e_j)|
  double symplectic_defect(const Eigen::MatrixXd& A) const;
  bool is_symplectic(const Eigen::MatrixXd& A, double tol = 1e-12) const {
    return symplectic_defect(A) <= tol;
  }

 private:
  int n_;
  Eigen::MatrixXd J_;
};

/// pi_lambda(x,u,xi) phi(v) = e^{i lambda xi} e^{i lambda (x.v + x.u/2)} phi(v+u), exactly.
TestFunction schrodinger_apply(double lambda, const GroupPoint& g, const TestFunction& f);

/// Scaled Hermite basis h_alpha(v) = |lambda|^{n/4} prod_i psi_{alpha_i}(sqrt|lambda| v_i),
/// truncated to total degree |alpha| < N.
struct HermiteBasis {
  int n = 1;
  int N = 1;
  std::vector<std::vector<int>> index;
  int size() const { return int(index.size()); }
};
HermiteBasis hermite_basis(int n, int N);
TestFunction hermite_basis_function(double lambda, const std::vector<int>& alpha);

/// One-dimensional matrix coefficients <pi_lambda(x,u,0) h_b, h_a>, a,b < N.
Eigen::MatrixXcd hermite_coefficients_1d(double lambda, double x, double u, int N);

/// Central slice f^lambda(x,u) = int f(x,u,xi) e^{i lambda xi} dxi.
using SliceSampler = std::function<cplx(const RealVec& x, const RealVec& u)>;

struct HermiteMatrixOptions {
  double radius = 6.0;  // outer box [-radius, radius]^{2n}
  int order = 12;       // Gauss-Legendre order per panel
  int panels = 4;       // coarse level; the fine level doubles it
  double tol = 1e-8;    // allowed change between levels
};

/// Matrix of pi_lambda(f) in the scaled Hermite basis by outer quadrature over (x,u).
Eigen::MatrixXcd hermite_matrix(double lambda, const SliceSampler& slice, int n, int N,
                                const HermiteMatrixOptions& opt = {});
/// Same for f a test function on H^n (dimension 2n+1), by exact Gaussian moments.
Eigen::MatrixXcd hermite_matrix(double lambda, const TestFunction& f, int N);

SliceSampler central_slice(const std::function<cplx(const GroupPoint&)>& f, int n, double lambda,
                           double xi_radius = 8.0, int xi_nodes = 96);

}  // namespace nilheat
