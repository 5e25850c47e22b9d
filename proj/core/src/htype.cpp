#include "nilheat/htype.hpp"

#include <cmath>
#include <random>

#include <boost/math/special_functions/factorials.hpp>

#include "nilheat/quadrature.hpp"

namespace nilheat {

Eigen::MatrixXd HTypeStructure::J_omega(const Eigen::VectorXd& omega) const {
  require(int(omega.size()) == m, ErrorCode::dimension_mismatch, "omega must have m entries");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < m; ++i) out += omega(i) * J[i];
  return out;
}

Eigen::VectorXd HTypeStructure::bracket(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const {
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z(i) = (J[i] * v).dot(w);
  return z;
}

Eigen::MatrixXd heisenberg_J(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

HTypeStructure make_heisenberg(int n) {
  require(n >= 1, ErrorCode::invalid_argument, "n must be positive");
  return {n, 1, {heisenberg_J(n)}};
}

HTypeStructure make_quaternionic() {
  // left multiplication on H = span(1, i, j, k)
  auto left = [](int unit) {
    // q * e_b for q in {i, j, k}; table[unit][b] = (sign, index)
    static const int idx[3][4] = {{1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static const int sgn[3][4] = {{1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
    Eigen::Matrix4d L = Eigen::Matrix4d::Zero();
    for (int b = 0; b < 4; ++b) L(idx[unit][b], b) = sgn[unit][b];
    return L;
  };
  // (x1, x2, u1, u2) = (1, j, -i, -k) turns left multiplication by i into heisenberg_J(2)
  Eigen::Matrix4d B = Eigen::Matrix4d::Zero();
  B(0, 0) = 1;
  B(2, 1) = 1;
  B(1, 2) = -1;
  B(3, 3) = -1;
  HTypeStructure s{2, 3, {}};
  for (int q = 0; q < 3; ++q) s.J.push_back(B.transpose() * left(q) * B);
  return s;
}

namespace {

Eigen::VectorXd random_unit(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd w(m);
  for (int i = 0; i < m; ++i) w(i) = N(rng);
  return w / w.norm();
}

}  // namespace

HTypeReport validate_htype(const HTypeStructure& s, double tol, int probes, unsigned seed) {
  HTypeReport rep;
  require(s.n >= 1 && s.m >= 1 && int(s.J.size()) == s.m, ErrorCode::dimension_mismatch, "need m maps J_i");
  for (const auto& J : s.J)
    require(J.rows() == 2 * s.n && J.cols() == 2 * s.n, ErrorCode::dimension_mismatch, "J_i must be 2n x 2n");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const int d = 2 * s.n;
  const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(d, d);
  for (int k = 0; k < probes; ++k) {
    const Eigen::VectorXd w = random_unit(rng, s.m);
    Eigen::VectorXd v(d), v2(d);
    for (int i = 0; i < d; ++i) v(i) = N(rng), v2(i) = N(rng);
    const Eigen::MatrixXd Jw = s.J_omega(w);
    // skewness is what makes the pairing an alternating bracket
    rep.pairing = std::max({rep.pairing, std::abs((Jw * v).dot(v2) - w.dot(s.bracket(v, v2))),
                            (Jw + Jw.transpose()).cwiseAbs().maxCoeff()});
    rep.square = std::max(rep.square, (Jw * Jw + Id).cwiseAbs().maxCoeff());
    rep.orthogonal = std::max(rep.orthogonal, (Jw.transpose() * Jw - Id).cwiseAbs().maxCoeff());
    // ad(v): v' -> [v, v'], rows (J_i v)^T; its nonzero singular values must all be |v|
    Eigen::MatrixXd ad(s.m, d);
    for (int i = 0; i < s.m; ++i) ad.row(i) = (s.J[i] * v).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ad);
    for (int i = 0; i < svd.singularValues().size(); ++i)
      rep.ad_isometry = std::max(rep.ad_isometry, std::abs(svd.singularValues()(i) - v.norm()) / v.norm());
  }
  if (rep.pairing > tol) rep.failures.push_back("pairing identity or skewness: residual " + std::to_string(rep.pairing));
  if (rep.square > tol) rep.failures.push_back("J_omega^2 = -I: residual " + std::to_string(rep.square));
  if (rep.orthogonal > tol) rep.failures.push_back("J_omega orthogonal: residual " + std::to_string(rep.orthogonal));
  if (rep.ad_isometry > tol)
    rep.failures.push_back("ad(v) surjective isometry: residual " + std::to_string(rep.ad_isometry));
  rep.pass = rep.failures.empty();
  return rep;
}

HTypeStructure htype_from_json(const nlohmann::json& j) {
  HTypeStructure s;
  try {
    s.n = j.at("n").get<int>();
    s.m = j.at("m").get<int>();
    for (const auto& mat : j.at("J")) {
      Eigen::MatrixXd J(2 * s.n, 2 * s.n);
      require(int(mat.size()) == 2 * s.n, ErrorCode::dimension_mismatch, "J_i must have 2n rows");
      for (int r = 0; r < 2 * s.n; ++r) {
        require(int(mat[r].size()) == 2 * s.n, ErrorCode::dimension_mismatch, "J_i must have 2n columns");
        for (int c = 0; c < 2 * s.n; ++c) J(r, c) = mat[r][c].get<double>();
      }
      s.J.push_back(J);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed H-type structure: ") + e.what());
  }
  require(int(s.J.size()) == s.m, ErrorCode::dimension_mismatch, "need m maps J_i");
  const HTypeReport rep = validate_htype(s);
  if (!rep.pass) {
    std::string msg = "not an H-type structure:";
    for (const auto& f : rep.failures) msg += " " + f + ";";
    throw Error(ErrorCode::axiom_violation, msg);
  }
  return s;
}

nlohmann::json htype_to_json(const HTypeStructure& s) {
  nlohmann::json j{{"n", s.n}, {"m", s.m}, {"J", nlohmann::json::array()}};
  for (const auto& J : s.J) {
    nlohmann::json mat = nlohmann::json::array();
    for (int r = 0; r < J.rows(); ++r) {
      std::vector<double> row(J.cols());
      for (int c = 0; c < J.cols(); ++c) row[c] = J(r, c);
      mat.push_back(row);
    }
    j["J"].push_back(mat);
  }
  return j;
}

HTypePoint htype_mul(const HTypeStructure& s, const HTypePoint& p, const HTypePoint& q) {
  return {p.v + q.v, p.z + q.z + 0.5 * s.bracket(p.v, q.v)};
}

Eigen::MatrixXd sigma_omega(const HTypeStructure& s, const Eigen::VectorXd& omega) {
  require(std::abs(omega.norm() - 1.0) < 1e-12, ErrorCode::invalid_argument, "omega must be a unit vector");
  const int n = s.n, d = 2 * n;
  const Eigen::MatrixXd Jw = s.J_omega(omega);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  // J_w sigma = sigma J0 forces the u_k column to be -J_w times the x_k column
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd best;
    double best_norm = 0.0;
    for (int e = 0; e < d; ++e) {
      Eigen::VectorXd r = Eigen::VectorXd::Unit(d, e);
      for (int q = 0; q < k; ++q) {
        r -= sigma.col(q).dot(r) * sigma.col(q);
        r -= sigma.col(n + q).dot(r) * sigma.col(n + q);
      }
      if (r.norm() > best_norm + 1e-12) best_norm = r.norm(), best = r;
    }
    require(best_norm > 1e-8, ErrorCode::degenerate, "adapted basis could not be completed");
    sigma.col(k) = best / best_norm;
    sigma.col(n + k) = -Jw * sigma.col(k);
  }
  return sigma;
}

GroupPoint alpha_omega_apply(const HTypeStructure& s, const Eigen::VectorXd& omega, const HTypePoint& p) {
  const Eigen::VectorXd w = sigma_omega(s, omega).transpose() * p.v;
  GroupPoint g = GroupPoint::identity(s.n);
  for (int i = 0; i < s.n; ++i) g.x[i] = w(i), g.u[i] = w(s.n + i);
  g.xi = p.z.dot(omega);
  return g;
}

cplx HTypeFunction::operator()(const Eigen::VectorXd& v, const Eigen::VectorXd& z) const {
  cplx total = 0.0;
  for (const auto& at : atoms) {
    cplx val = at.coef * std::exp(-at.a * (v - at.vb).squaredNorm() + 2.0 * pi * I * at.vc.dot(v)) *
               std::exp(-at.b * (z - at.z0).squaredNorm() + 2.0 * pi * I * at.zc.dot(z));
    if (at.p.size() > 0) val *= at.p.dot(v - at.vb);
    total += val;
  }
  return total;
}

TestFunction HTypeFunction::v_part(std::size_t k, const Eigen::MatrixXd& R) const {
  const HTypeAtom& at = atoms.at(k);
  const int d = 2 * n;
  const Eigen::VectorXd b = R.transpose() * at.vb, c = R.transpose() * at.vc;
  auto gauss = [&](int i) {
    Factor1D f;
    f.a = at.a;
    f.b = b(i);
    f.c = c(i);
    return f;
  };
  TestFunction out(d);
  if (at.p.size() == 0) {
    Atom a;
    for (int i = 0; i < d; ++i) a.factors.push_back(gauss(i));
    out.atoms().push_back(a);
    return out;
  }
  // p.(R w - vb) = sum_i q_i (w_i - b_i), and s - b = H_1(sqrt(2a)(s - b)) / (2 sqrt(2a))
  const Eigen::VectorXd q = R.transpose() * at.p;
  for (int i = 0; i < d; ++i) {
    if (q(i) == 0.0) continue;
    Atom a;
    a.coef = q(i);
    for (int j = 0; j < d; ++j) a.factors.push_back(gauss(j));
    a.factors[i].h = {0.0, 1.0 / (2.0 * std::sqrt(2.0 * at.a))};
    out.atoms().push_back(a);
  }
  return out;
}

namespace {

// isotropic z-Gaussian of one atom as m separable factors
std::vector<Factor1D> z_factors(const HTypeAtom& at, int m) {
  std::vector<Factor1D> out(m);
  for (int j = 0; j < m; ++j) out[j].a = at.b, out[j].b = at.z0(j), out[j].c = at.zc(j);
  return out;
}

}  // namespace

double HTypeFunction::norm2() const {
  const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  cplx total = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a)
    for (std::size_t b = 0; b < atoms.size(); ++b) {
      cplx zi = 1.0;
      auto za = z_factors(atoms[a], m), zb = z_factors(atoms[b], m);
      for (int j = 0; j < m; ++j) zi *= factor_inner(za[j], zb[j]);
      total += atoms[a].coef * std::conj(atoms[b].coef) * v_part(a, Id).inner(v_part(b, Id)) * zi;
    }
  return total.real();
}

std::vector<HTypeFunction> sample_htype_functions(int n, int m, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> W(0.7, 1.4), C(-0.3, 0.3), Z(-1.0, 1.0);
  auto vec = [&](int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = C(rng);
    return v;
  };
  std::vector<HTypeFunction> out;
  for (int k = 0; k < count; ++k) {
    HTypeFunction f{n, m, {}};
    HTypeAtom g;
    g.a = W(rng);
    g.vb = vec(2 * n);
    g.vc = vec(2 * n);
    g.b = W(rng);
    g.z0 = vec(m);
    g.zc = vec(m);
    f.atoms.push_back(g);
    if (k % 2 == 1) {
      HTypeAtom h = g;
      h.coef = cplx(Z(rng), Z(rng));
      h.a = W(rng);
      h.p = vec(2 * n);
      h.p /= h.p.norm();
      f.atoms.push_back(h);
    }
    const double s = 1.0 / std::sqrt(f.norm2());
    for (auto& at : f.atoms) at.coef *= s;
    out.push_back(f);
  }
  return out;
}

namespace {

struct FiberSplit {
  cplx constant;  // value of the integral over the complement of omega
  Factor1D s;     // remaining Gaussian in s
};

// int_{eta perp omega} e^{-b|s omega + eta - z0|^2} e^{2 pi i c.(s omega + eta)} d eta
FiberSplit fiber(const HTypeAtom& at, const Eigen::VectorXd& omega, int m) {
  const double z_par = at.z0.dot(omega), c_par = at.zc.dot(omega);
  const Eigen::VectorXd z_perp = at.z0 - z_par * omega, c_perp = at.zc - c_par * omega;
  FiberSplit out;
  out.constant = std::pow(pi / at.b, 0.5 * (m - 1)) * std::exp(2.0 * pi * I * c_perp.dot(z_perp)) *
                 std::exp(-pi * pi * c_perp.squaredNorm() / at.b);
  out.s.a = at.b;
  out.s.b = z_par;
  out.s.c = c_par;
  return out;
}

}  // namespace

TestFunction radon(const HTypeStructure& s, const HTypeFunction& f, const Eigen::VectorXd& omega) {
  require(f.n == s.n && f.m == s.m, ErrorCode::dimension_mismatch, "function does not live on this group");
  const Eigen::MatrixXd sigma = sigma_omega(s, omega);
  TestFunction out(2 * s.n + 1);
  for (std::size_t k = 0; k < f.atoms.size(); ++k) {
    const FiberSplit fs = fiber(f.atoms[k], omega, s.m);
    const TestFunction vp = f.v_part(k, sigma);
    for (Atom a : vp.atoms()) {
      a.coef *= f.atoms[k].coef * fs.constant;
      a.factors.push_back(fs.s);
      out.atoms().push_back(std::move(a));
    }
  }
  return out;
}

namespace {

// central Fourier side of f_omega: sum_A C_A(lambda) V_A(x,u), C_A(lambda) = coef int f_s e^{-i lambda s} ds
struct CentralSide {
  std::vector<Atom> v_atoms;  // coefficient 1, 2n factors
  std::vector<cplx> coef;
  std::vector<std::pair<Factor1D, cplx>> s_hat;

  explicit CentralSide(const TestFunction& fw) {
    const int d = fw.dim() - 1;
    for (const auto& at : fw.atoms()) {
      Atom v;
      v.factors.assign(at.factors.begin(), at.factors.begin() + d);
      v_atoms.push_back(v);
      coef.push_back(at.coef);
      s_hat.push_back(factor_fourier(at.factors[d]));
    }
  }
  cplx C(std::size_t k, double lambda) const {
    return coef[k] * s_hat[k].second * s_hat[k].first.eval(lambda / (2.0 * pi));
  }
  double width() const {
    double w = 1e300;
    for (const auto& sh : s_hat) w = std::min(w, 1.0 / std::sqrt(sh.first.a));
    return w;
  }
};

double radial_power(int m, double lambda) { return std::pow(std::abs(lambda), 0.5 * (m - 1)); }

}  // namespace

cplx modified_radon(const HTypeStructure& s, const HTypeFunction& f, const Eigen::VectorXd& omega,
                    const GroupPoint& g) {
  const CentralSide side(radon(s, f, omega));
  CplxVec v(2 * s.n);
  for (int i = 0; i < s.n; ++i) v[i] = g.x[i], v[s.n + i] = g.u[i];
  std::vector<cplx> V(side.v_atoms.size());
  for (std::size_t k = 0; k < V.size(); ++k) V[k] = side.v_atoms[k].eval(v);
  auto at = [&](double lam) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < V.size(); ++k) acc += side.C(k, lam) * V[k];
    return radial_power(s.m, lam) * acc * std::exp(I * lam * g.xi);
  };
  // even split keeps the |lambda| kink at a panel edge
  auto folded = [&](double lam) { return at(lam) + at(-lam); };
  return integrate_line(folded, 0.0, 8.0 / side.width(), 1.0 / side.width(), true).value / (2.0 * pi);
}

double modified_radon_norm2(const HTypeStructure& s, const HTypeFunction& f, const Eigen::VectorXd& omega) {
  const CentralSide side(radon(s, f, omega));
  const std::size_t K = side.v_atoms.size();
  Eigen::MatrixXcd gram(K, K);
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = 0; b < K; ++b) {
      cplx g = 1.0;
      for (std::size_t i = 0; i < side.v_atoms[a].factors.size(); ++i)
        g *= factor_inner(side.v_atoms[a].factors[i], side.v_atoms[b].factors[i]);
      gram(a, b) = g;
    }
  auto at = [&](double lam) {
    Eigen::VectorXcd c(K);
    for (std::size_t k = 0; k < K; ++k) c(k) = side.C(k, lam);
    return cplx(std::pow(std::abs(lam), s.m - 1) * (c.transpose() * gram * c.conjugate())(0, 0).real());
  };
  auto folded = [&](double lam) { return at(lam) + at(-lam); };
  return integrate_line(folded, 0.0, 8.0 / side.width(), 1.0 / side.width(), true).value.real() / (2.0 * pi);
}

double radon_plancherel(const HTypeStructure& s, const HTypeFunction& f, int sphere_points) {
  if (s.m == 1) {
    Eigen::VectorXd w(1);
    double total = 0.0;
    for (double sgn : {1.0, -1.0}) {
      w(0) = sgn;
      total += modified_radon_norm2(s, f, w);
    }
    return 0.5 * total;
  }
  require(s.m == 3, ErrorCode::unsupported, "sphere integration implemented for m = 1 and m = 3");
  double total = 0.0;
  for (const auto& p : quad::sphere_rule(sphere_points))
    total += p.w * modified_radon_norm2(s, f, Eigen::Vector3d(p.x, p.y, p.z));
  const double kappa = 1.0 / (2.0 * std::pow(2.0 * pi, s.m - 1));
  return kappa * total;
}

cplx qt_radon(const KernelEvaluator& ev, const Eigen::VectorXd& v, double s) {
  require(ev.kind() == KernelKind::htype, ErrorCode::invalid_argument, "needs the H-type kernel");
  require(int(v.size()) == 2 * ev.n(), ErrorCode::dimension_mismatch, "v must have 2n entries");
  CplxVec vv(v.data(), v.data() + v.size());
  if (ev.m() == 1) return ev.qt(vv, {cplx(s)});
  require(ev.m() == 3, ErrorCode::unsupported, "fiber quadrature implemented for m = 1 and m = 3");
  // q_t is radial in z, so the plane integral is 2 pi int q_t(v, |(s, r)|) r dr
  auto f = [&](double r) { return 2.0 * pi * r * ev.qt(vv, {cplx(std::hypot(s, r)), 0.0, 0.0}); };
  // q_t has rounding noise far out in z, so cut the range at a relative floor instead of
  // letting the tail search chase it
  const double w = std::sqrt(ev.t());
  const double ref = std::abs(ev.qt(vv, {cplx(s), 0.0, 0.0}));
  double hi = 4.0 * w;
  while (std::abs(f(hi)) > 1e-13 * ref * w) {
    hi *= 1.5;
    require(hi < 1e3 * w, ErrorCode::quadrature, "fiber integral did not decay");
  }
  auto run = [&](int panels) {
    cplx acc = 0.0;
    const auto rule = quad::composite_legendre(0.0, hi, panels, 16);
    for (std::size_t k = 0; k < rule.size(); ++k) acc += rule.weights[k] * f(rule.nodes[k]);
    return acc;
  };
  int panels = std::max(2, int(std::ceil(hi / w)));
  cplx prev = run(panels);
  for (int it = 0; it < 6; ++it) {
    panels *= 2;
    const cplx cur = run(panels);
    if (std::abs(cur - prev) <= 1e-10 * std::abs(cur)) return cur;
    prev = cur;
  }
  throw Error(ErrorCode::quadrature, "fiber integral did not converge");
}

Eigen::MatrixXcd pi_lambda_omega_matrix(const HTypeStructure& s, double lambda, const Eigen::VectorXd& omega,
                                        const HTypeFunction& f, int N) {
  return hermite_matrix(lambda, radon(s, f, omega), N);
}

namespace {

// complex_translation_1d split as exp(log_pref) * poly
Eigen::MatrixXcd translation_poly(double lambda, cplx x, cplx u, int N, cplx& log_pref) {
  require(lambda != 0.0, ErrorCode::degenerate, "central character degenerate");
  // pi_lambda(x,u,0) = exp(alpha a^+ - beta a) in the scaled Hermite basis
  const double r = std::sqrt(std::abs(lambda) / 2.0);
  const cplx xs = lambda > 0 ? x : -x;
  const cplx alpha = r * (I * xs - u), beta = -r * (I * xs + u);
  log_pref = -alpha * beta / 2.0;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      cplx s = 0.0;
      for (int k = 0; k <= std::min(a, b); ++k)
        s += std::sqrt(boost::math::factorial<double>(a) * boost::math::factorial<double>(b)) /
             (boost::math::factorial<double>(k) * boost::math::factorial<double>(a - k) *
              boost::math::factorial<double>(b - k)) *
             std::pow(alpha, a - k) * std::pow(-beta, b - k);
      M(a, b) = s;
    }
  return M;
}

}  // namespace

Eigen::MatrixXcd complex_translation_1d(double lambda, cplx x, cplx u, int N) {
  cplx lp;
  const Eigen::MatrixXcd M = translation_poly(lambda, x, u, N, lp);
  return std::exp(lp) * M;
}

HSIntegralResult weighted_hs_integral(const HTypeStructure& s, const HTypeFunction& f, double t, const HSIntegralOptions& opt) {
  require(t > 0.0, ErrorCode::invalid_argument, "t must be positive");
  require(opt.N >= 1, ErrorCode::invalid_argument, "truncation must be >= 1");
  const int n = s.n, m = s.m, N = opt.N;
  const HermiteBasis basis = hermite_basis(n, N);
  const int D = basis.size();
  KernelEvaluator ev2(KernelKind::hn, 2.0 * t, n);

  std::vector<Eigen::VectorXd> omegas;
  RealVec weights;
  if (m == 1) {
    omegas = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)};
    weights = {1.0, 1.0};
  } else {
    require(m == 3, ErrorCode::unsupported, "sphere integration implemented for m = 1 and m = 3");
    for (const auto& p : quad::sphere_rule(opt.sphere_points)) {
      omegas.push_back(Eigen::Vector3d(p.x, p.y, p.z));
      weights.push_back(p.w);
    }
  }
  std::vector<TestFunction> radons;
  for (const auto& w : omegas) radons.push_back(radon(s, f, w));

  auto integrand = [&](double lam) -> cplx {
    if (lam <= 0.0) return 0.0;
    // G = int pi(iw)^* pi(iw) p_{2t}^lambda(2w) dw. For imaginary w, pi(iw)^* = pi(iw) and
    // pi(iw)^2 = pi(2iw), so G is a Gaussian average of pi(2iw), per coordinate
    // exp((lambda - 4 kappa)(y^2 + v^2)) times a polynomial of degree < 2N
    const double kap = quarter_lambda_coth(2.0 * t, lam);
    const double rate = 4.0 * kap - lam;
    const auto& gh = quad::gauss_hermite(N + 1);
    const double sc = 1.0 / std::sqrt(rate);
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(N, N);
    for (std::size_t p = 0; p < gh.size(); ++p)
      for (std::size_t q = 0; q < gh.size(); ++q) {
        const double y = sc * gh.nodes[p], v = sc * gh.nodes[q];
        // the exponential part of pi(2iw) is exactly exp(lambda (y^2 + v^2)); drop it with the weight
        cplx lp;
        g += gh.weights[p] * gh.weights[q] * sc * sc * translation_poly(lam, 2.0 * I * y, 2.0 * I * v, N, lp);
      }
    const CplxVec zero(n, 0.0);
    const double pref = ev2.pt_lambda(lam, zero, zero).real();
    Eigen::MatrixXcd G(D, D);
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) {
        cplx acc = pref;
        for (int i = 0; i < n; ++i) acc *= g(basis.index[r][i], basis.index[c][i]);
        G(r, c) = acc;
      }
    // pi(k_t) without its e^{-t lambda^2}, which cancels against the eta integral's e^{2 t lambda^2}
    Eigen::VectorXd K(D);
    for (int r = 0; r < D; ++r) {
      int deg = 0;
      for (int i = 0; i < n; ++i) deg += basis.index[r][i];
      K(r) = std::exp(-t * lam * (2.0 * deg + n));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < omegas.size(); ++k) {
      const Eigen::MatrixXcd P = hermite_matrix(lam, radons[k], N);
      const Eigen::MatrixXcd PK = P * K.asDiagonal();
      // ||pi(iw) B||_HS^2 integrated, B = (P K)^*: tr(B^* G B) = tr(PK G (PK)^*)
      total += weights[k] * (PK * G * PK.adjoint()).trace().real();
    }
    return std::pow(lam, n + m - 1) * std::pow(2.0 * pi * t, 0.5 * m) * total;
  };
  double zw = 1e300;
  for (const auto& at : f.atoms) zw = std::min(zw, std::sqrt(at.b));
  const LineReport lr = integrate_line(integrand, 0.0, 10.0 * zw, zw, true, opt.tol, 8);
  HSIntegralResult res;
  res.value = lr.value.real();
  res.norm2 = f.norm2();
  res.ratio = res.value / res.norm2;
  res.lambda_nodes = lr.panels * 8;
  res.change = lr.change;
  return res;
}

namespace {

Rational exact(double x) {
  // small denominators only; the built-in projections are signed permutations
  for (long q = 1; q <= 1 << 16; q *= 2) {
    const double r = std::round(x * q);
    if (std::abs(r / q - x) < 1e-12) return Rational(static_cast<long long>(r), q);
  }
  throw Error(ErrorCode::exact_arithmetic_required, "projected coordinate is not a dyadic rational");
}

}  // namespace

ProjectedLattice project_lattice(const HTypeStructure& s, const std::vector<HTypePoint>& gens,
                                 const Eigen::VectorXd& omega) {
  ProjectedLattice out;
  for (const auto& p : gens) {
    const GroupPoint g = alpha_omega_apply(s, omega, p);
    RatPoint r;
    for (int i = 0; i < s.n; ++i) r.x.push_back(exact(g.x[i])), r.u.push_back(exact(g.u[i]));
    r.xi = exact(g.xi);
    bool v_zero = true;
    for (int i = 0; i < s.n; ++i) v_zero = v_zero && r.x[i] == 0 && r.u[i] == 0;
    if (v_zero && r.xi == 0) continue;  // kernel element
    if (!v_zero) {
      RatVec v = r.x;
      v.insert(v.end(), r.u.begin(), r.u.end());
      out.v_basis.push_back(v);
    }
    out.gens.push_back(r);
  }
  out.rank = out.v_basis.empty() ? 0 : rat_rank(out.v_basis);
  if (out.rank != 2 * s.n) {
    out.message = "image not verified discrete: projected v-parts have rank " + std::to_string(out.rank);
    return out;
  }
  out.beta = beta(out.gens);
  out.verified = out.beta > 0;
  out.message = out.verified ? "Heisenberg lattice" : "image not verified discrete: beta search failed";
  return out;
}

std::vector<HTypePoint> standard_htype_lattice(const HTypeStructure& s) {
  std::vector<HTypePoint> gens;
  for (int i = 0; i < 2 * s.n; ++i) gens.push_back({Eigen::VectorXd::Unit(2 * s.n, i), Eigen::VectorXd::Zero(s.m)});
  for (int j = 0; j < s.m; ++j) gens.push_back({Eigen::VectorXd::Zero(2 * s.n), 0.5 * Eigen::VectorXd::Unit(s.m, j)});
  return gens;
}

}  // namespace nilheat
