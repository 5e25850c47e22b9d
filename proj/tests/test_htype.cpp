#include "doctest.h"

#include <cmath>
#include <random>

#include "nilheat/htype.hpp"
#include "nilheat/quadrature.hpp"

using namespace nilheat;

namespace {

Eigen::VectorXd unit(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd w(m);
  for (int i = 0; i < m; ++i) w(i) = N(rng);
  return w / w.norm();
}

Eigen::VectorXd rvec(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = U(rng);
  return v;
}

// Dawson's integral by Gauss-Legendre on [0, x]
double dawson(double x) {
  const auto& gl = quad::gauss_legendre(40);
  double s = 0.0;
  for (std::size_t k = 0; k < gl.size(); ++k) {
    const double t = 0.5 * x * (gl.nodes[k] + 1.0);
    s += 0.5 * x * gl.weights[k] * std::exp(t * t - x * x);
  }
  return s;
}

}  // namespace

TEST_CASE("quaternionic structure") {
  const auto q = make_quaternionic();
  CHECK((q.J[0] - heisenberg_J(2)).norm() == 0.0);
  const Eigen::Matrix4d Id = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 3; ++i) CHECK((q.J[i] * q.J[i] + Id).norm() < 1e-14);
  // anticommuting units, as for i, j, k
  CHECK((q.J[0] * q.J[1] + q.J[1] * q.J[0]).norm() < 1e-14);
  CHECK((q.J[0] * q.J[1] - q.J[2]).norm() < 1e-14);

  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd Jw = q.J_omega(unit(rng, 3));
    CHECK((Jw * Jw + Id).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((Jw.transpose() * Jw - Id).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(validate_htype(q).pass);
  CHECK(validate_htype(make_heisenberg(3)).pass);
}

TEST_CASE("validation reports each failing axiom") {
  auto bad = make_quaternionic();
  bad.J[1] *= 1.1;
  const auto rep = validate_htype(bad);
  CHECK_FALSE(rep.pass);
  CHECK(rep.square > 1e-3);
  CHECK(rep.orthogonal > 1e-3);
  CHECK(rep.failures.size() >= 2);
  CHECK_THROWS_AS(htype_from_json(htype_to_json(bad)), Error);

  const auto good = htype_from_json(htype_to_json(make_quaternionic()));
  CHECK(good.m == 3);
  CHECK((good.J[2] - make_quaternionic().J[2]).norm() == 0.0);
}

TEST_CASE("adapted basis intertwines J_omega with the standard form") {
  const auto q = make_quaternionic();
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd w = unit(rng, 3);
    const Eigen::MatrixXd S = sigma_omega(q, w);
    CHECK((S * heisenberg_J(2) * S.transpose() - q.J_omega(w)).norm() < 1e-12);
    CHECK((S.transpose() * S - Eigen::Matrix4d::Identity()).norm() < 1e-12);
    CHECK((sigma_omega(q, w) - S).norm() == 0.0);
  }
}

TEST_CASE("alpha_omega is a homomorphism onto the Heisenberg group") {
  const auto q = make_quaternionic();
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int k = 0; k < 30; ++k) {
    const Eigen::VectorXd w = unit(rng, 3);
    const HTypePoint a{rvec(rng, 4), rvec(rng, 3)}, b{rvec(rng, 4), rvec(rng, 3)};
    const GroupPoint lhs = alpha_omega_apply(q, w, htype_mul(q, a, b));
    const GroupPoint rhs = group_mul(alpha_omega_apply(q, w, a), alpha_omega_apply(q, w, b));
    for (int i = 0; i < 2; ++i) worst = std::max({worst, std::abs(lhs.x[i] - rhs.x[i]), std::abs(lhs.u[i] - rhs.u[i])});
    worst = std::max(worst, std::abs(lhs.xi - rhs.xi));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Radon transform matches the fiber integral") {
  const auto q = make_quaternionic();
  const auto fs = sample_htype_functions(2, 3, 2, 4);
  std::mt19937_64 rng(12);
  for (const auto& f : fs) {
    const Eigen::VectorXd w = unit(rng, 3);
    const Eigen::MatrixXd S = sigma_omega(q, w);
    // orthonormal frame of the complement of omega
    Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
    Q.col(0) = w;
    Q = Eigen::HouseholderQR<Eigen::Matrix3d>(Q).householderQ();
    const TestFunction fw = radon(q, f, w);
    for (int probe = 0; probe < 3; ++probe) {
      const Eigen::VectorXd xu = rvec(rng, 4);
      const double s = rvec(rng, 1)(0);
      const Eigen::VectorXd v = S * xu;
      cplx brute = 0.0;
      const double h = 0.1;
      for (double e1 = -8; e1 <= 8; e1 += h)
        for (double e2 = -8; e2 <= 8; e2 += h)
          brute += h * h * f(v, s * w + e1 * Q.col(1) + e2 * Q.col(2));
      const cplx fast = fw(RealVec{xu(0), xu(1), xu(2), xu(3), s});
      CHECK(std::abs(fast - brute) < 1e-10 * std::max(1.0, std::abs(brute)));
    }
  }
}

TEST_CASE("modified Radon transform of a centred Gaussian") {
  // R f = (1/2pi) int |lambda| F(lambda) e^{i lambda s}, closed form through Dawson's integral
  const auto q = make_quaternionic();
  HTypeFunction f{2, 3, {}};
  HTypeAtom at;
  at.a = 0.9;
  at.b = 1.3;
  at.vb = at.vc = Eigen::VectorXd::Zero(4);
  at.z0 = at.zc = Eigen::VectorXd::Zero(3);
  f.atoms.push_back(at);
  std::mt19937_64 rng(21);
  const Eigen::VectorXd w = unit(rng, 3);
  const double p = 1.0 / (4.0 * at.b);
  for (double s : {0.0, 0.3, 1.2}) {
    GroupPoint g{{0.2, -0.4}, {0.1, 0.5}, s};
    const double V = std::exp(-at.a * (0.04 + 0.16 + 0.01 + 0.25));
    const double fiber = pi / at.b;
    const double radial = 1.0 / (2.0 * p) - s / (2.0 * std::pow(p, 1.5)) * dawson(s / (2.0 * std::sqrt(p)));
    const double expect = fiber * V * std::sqrt(pi / at.b) * radial / pi;
    CHECK(std::abs(modified_radon(q, f, w, g) - expect) < 1e-9 * std::abs(expect));
  }
}

TEST_CASE("Radon Plancherel") {
  const auto q = make_quaternionic();
  for (const auto& f : sample_htype_functions(2, 3, 4, 11)) CHECK(std::abs(radon_plancherel(q, f) - f.norm2()) < 1e-3);
  // m = 1 reduces to the Heisenberg Plancherel formula
  const auto h = make_heisenberg(1);
  for (const auto& f : sample_htype_functions(1, 1, 2, 2)) CHECK(radon_plancherel(h, f) == doctest::Approx(f.norm2()).epsilon(1e-8));
}

TEST_CASE("fiber integral of the H-type heat kernel is the Heisenberg heat kernel") {
  KernelEvaluator ev(KernelKind::htype, 0.5, 2, 3);
  KernelEvaluator kh(KernelKind::hn, 0.5, 2);
  std::mt19937_64 rng(31);
  for (int k = 0; k < 5; ++k) {
    const Eigen::VectorXd v = rvec(rng, 4);
    const double s = 1.5 * rvec(rng, 1)(0);
    const cplx a = qt_radon(ev, v, s), b = kh.kt(ComplexPoint{{v(0), v(1)}, {v(2), v(3)}, s});
    CHECK(std::abs(a - b) < 1e-3 * std::abs(b));
  }
}

TEST_CASE("complex translations agree with real matrix coefficients") {
  for (double lam : {1.3, -0.7})
    for (auto xu : {std::pair{0.4, -0.7}, std::pair{-1.1, 0.2}}) {
      const auto A = complex_translation_1d(lam, xu.first, xu.second, 6);
      const auto B = hermite_coefficients_1d(lam, xu.first, xu.second, 6);
      CHECK((A - B).norm() < 1e-12);
    }
  // pi(iw)^* pi(iw) = pi(2iw) on the span where the truncation is exact
  const auto M = complex_translation_1d(0.8, cplx(0, 0.3), cplx(0, -0.2), 30);
  const auto M2 = complex_translation_1d(0.8, cplx(0, 0.6), cplx(0, -0.4), 30);
  CHECK(((M.adjoint() * M).topLeftCorner(4, 4) - M2.topLeftCorner(4, 4)).norm() < 1e-10 * M2.norm());
}

TEST_CASE("heat kernel acts diagonally in the Hermite basis") {
  const double t = 0.3, lam = 1.7;
  KernelEvaluator ev(KernelKind::hn, t, 1);
  SliceSampler slice = [&](const RealVec& x, const RealVec& u) { return ev.kt_lambda(lam, {x[0]}, {u[0]}); };
  const auto K = hermite_matrix(lam, slice, 1, 5);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      const double expect = a == b ? std::exp(-t * lam * lam - t * lam * (2 * a + 1)) : 0.0;
      CHECK(std::abs(K(a, b) - expect) < 1e-8);
    }
}

TEST_CASE("projected lattices and their normal form") {
  const auto q = make_quaternionic();
  for (int axis = 0; axis < 3; ++axis) {
    const ProjectedLattice pl = project_lattice(q, standard_htype_lattice(q), Eigen::VectorXd::Unit(3, axis));
    CHECK(pl.rank == 4);
    CHECK(pl.verified);
    CHECK(pl.beta == Rational(1, 2));
    const NormalForm nf = normal_form(pl.v_basis);
    CHECK(same_module(pl.v_basis, rat_transpose(rat_mul(nf.A_scaled, rat_transpose(divisor_basis(nf.chain))))));
  }
  // an irrational direction gives an irrational projection
  const Eigen::Vector3d w(0.5, std::sqrt(0.5), 0.5);
  CHECK_THROWS_AS(project_lattice(q, standard_htype_lattice(q), w), Error);
}

TEST_CASE("weighted Hilbert-Schmidt integral, Heisenberg centre") {
  const auto h = make_heisenberg(1);
  const auto f = sample_htype_functions(1, 1, 1, 8)[0];
  // per frequency the integrand is (1/4) (2 pi t)^{1/2} ||pi(f)||_HS^2 restricted to degree < N,
  // so the ratio increases with N towards (2 pi)^2 pi^{1/2} / 4
  const double limit = std::pow(2.0 * pi, 2) * std::sqrt(pi) / 4.0;
  double prev = 0.0;
  for (int N : {4, 8, 12}) {
    const double r = weighted_hs_integral(h, f, 0.5, {N, 26, 1e-8}).ratio / limit;
    CHECK(r > prev);
    CHECK(r < 1.0 + 1e-6);
    prev = r;
  }
  CHECK(prev > 0.8);
}
