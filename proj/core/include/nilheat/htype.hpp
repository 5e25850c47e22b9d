#pragma once

#include <Eigen/Dense>

#include "json.hpp"
#include "nilheat/heat.hpp"
#include "nilheat/hgroup.hpp"
#include "nilheat/lattice.hpp"

namespace nilheat {

/// Two-step nilpotent algebra v + z, dim v = 2n, dim z = m, given by skew maps
/// J_1..J_m with ([v,v'])_i = (J_i v, v'). Coordinates of v are (x_1..x_n, u_1..u_n).
struct HTypeStructure {
  int n = 0, m = 0;
  std::vector<Eigen::MatrixXd> J;

  Eigen::MatrixXd J_omega(const Eigen::VectorXd& omega) const;
  Eigen::VectorXd bracket(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;
};

/// The standard symplectic matrix for which (J0 v, v') is the central part of the
/// Heisenberg product: (J0 (x,u), (x',u')) = x'.u - u'.x.
Eigen::MatrixXd heisenberg_J(int n);

HTypeStructure make_heisenberg(int n);
/// Left multiplication by i, j, k on the quaternions, written in a basis where J_1 is heisenberg_J(2).
HTypeStructure make_quaternionic();

struct HTypeReport {
  double pairing = 0.0;       // max |(J_w v, v') - (w, [v,v'])|
  double square = 0.0;        // max ||J_w^2 + I|| over random unit w
  double orthogonal = 0.0;    // max ||J_w^T J_w - I||
  double ad_isometry = 0.0;   // max | sigma(ad v) - |v| | on (ker ad v)^perp
  bool pass = false;
  std::vector<std::string> failures;
};
HTypeReport validate_htype(const HTypeStructure& s, double tol = 1e-10, int probes = 20, unsigned seed = 7);

HTypeStructure htype_from_json(const nlohmann::json& j);
nlohmann::json htype_to_json(const HTypeStructure& s);

struct HTypePoint {
  Eigen::VectorXd v, z;
};
HTypePoint htype_mul(const HTypeStructure& s, const HTypePoint& p, const HTypePoint& q);

/// Orthogonal sigma with sigma J0 sigma^T = J_omega, built from the standard basis
/// in a fixed order (deterministic).
Eigen::MatrixXd sigma_omega(const HTypeStructure& s, const Eigen::VectorXd& omega);
/// alpha_omega(v, z) = (sigma^T v, z.omega) as a point of H^n.
GroupPoint alpha_omega_apply(const HTypeStructure& s, const Eigen::VectorXd& omega, const HTypePoint& p);

/// Closed family on N: coef * g(v) * e^{-b|z - z0|^2} e^{2 pi i c.z}, with g an
/// isotropic Gaussian e^{-a|v - vb|^2} e^{2 pi i vc.v}, optionally times the linear
/// factor p.(v - vb). The family is stable under rotations of v, so Radon
/// transforms stay separable test functions on H^n.
struct HTypeAtom {
  cplx coef = 1.0;
  double a = 1.0;
  Eigen::VectorXd vb, vc, p;  // p empty: no linear factor
  double b = 1.0;
  Eigen::VectorXd z0, zc;
};
struct HTypeFunction {
  int n = 0, m = 0;
  std::vector<HTypeAtom> atoms;

  cplx operator()(const Eigen::VectorXd& v, const Eigen::VectorXd& z) const;
  /// v-part of one atom rotated by R (w = R^T v), as separable atoms in 2n variables.
  TestFunction v_part(std::size_t atom, const Eigen::MatrixXd& R) const;
  double norm2() const;
};
/// Random members: Gaussians, and linear-factor atoms for odd indices.
std::vector<HTypeFunction> sample_htype_functions(int n, int m, int count, unsigned seed);

/// f_omega on H^n coordinates (x, u, s): the fiber integral over k(omega), pulled
/// back through alpha_omega. Exact for the closed family.
TestFunction radon(const HTypeStructure& s, const HTypeFunction& f, const Eigen::VectorXd& omega);
/// R_omega f(x,u,s) = (1/2pi) int |lambda|^{(m-1)/2} (f_omega)^(x,u,lambda) e^{i lambda s} dlambda.
cplx modified_radon(const HTypeStructure& s, const HTypeFunction& f, const Eigen::VectorXd& omega,
                    const GroupPoint& g);
/// int |R_omega f|^2 over H^n, from the central-frequency side.
double modified_radon_norm2(const HTypeStructure& s, const HTypeFunction& f, const Eigen::VectorXd& omega);
/// kappa_m int_{S^{m-1}} ||R_omega f||^2 domega with kappa_m = 1/(2 (2 pi)^{m-1}),
/// on a Lebedev grid (m = 3) or the two points +-1 (m = 1).
double radon_plancherel(const HTypeStructure& s, const HTypeFunction& f, int sphere_points = 50);

/// (q_t)_omega(v, s) by radial quadrature of q_t over the fiber.
cplx qt_radon(const KernelEvaluator& ev, const Eigen::VectorXd& v, double s);

/// pi_lambda(f_omega) in the scaled Hermite basis of total degree < N.
Eigen::MatrixXcd pi_lambda_omega_matrix(const HTypeStructure& s, double lambda, const Eigen::VectorXd& omega,
                                        const HTypeFunction& f, int N);
/// <pi_lambda(x,u,0) h_b, h_a> for complex (x, u), one coordinate, a, b < N.
Eigen::MatrixXcd complex_translation_1d(double lambda, cplx x, cplx u, int N);

struct HSIntegralOptions {
  int N = 6;
  int sphere_points = 50;
  double tol = 1e-6;  // lambda integration
};
struct HSIntegralResult {
  double value = 0.0;
  double norm2 = 0.0;
  double ratio = 0.0;
  int lambda_nodes = 0;
  double change = 0.0;
};
/// Weighted Hilbert-Schmidt integral of the heat image F = f * q_t at truncation N:
/// int_0^inf dlambda lambda^{n+m-1} int_{S^{m-1}} domega int dy dv deta
///   ||pi_{lambda,omega}(i(y,v,eta)) pi_{lambda,omega}(F)^*||_HS^2 e^{-|eta|^2/2t} p_{2t}^lambda(2y,2v).
HSIntegralResult weighted_hs_integral(const HTypeStructure& s, const HTypeFunction& f, double t, const HSIntegralOptions& opt = {});

/// Image of a lattice of N under alpha_omega, with the discreteness checks.
struct ProjectedLattice {
  std::vector<RatPoint> gens;
  RatMatrix v_basis;  // one row per projected v-part
  int rank = 0;
  Rational beta;
  bool verified = false;
  std::string message;
};
ProjectedLattice project_lattice(const HTypeStructure& s, const std::vector<HTypePoint>& gens,
                                 const Eigen::VectorXd& omega);
/// Integer v-lattice with half-integer centre.
std::vector<HTypePoint> standard_htype_lattice(const HTypeStructure& s);

}  // namespace nilheat
