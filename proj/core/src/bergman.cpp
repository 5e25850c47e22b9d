#include "nilheat/bergman.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "nilheat/quadrature.hpp"

namespace nilheat {

std::string to_string(WeightForm f) { return f == WeightForm::corrected ? "corrected" : "literal"; }

BergmanWeight::BergmanWeight(long k_, DivisorChain chain_, double t_, WeightForm form_)
    : k(k_), chain(std::move(chain_)), t(t_), lambda(lambda_of(k_, chain)), form(form_) {
  require(k != 0, ErrorCode::out_of_scope, "k=0 sector out of scope");
  require(t > 0.0, ErrorCode::invalid_argument, "t must be positive");
}

double BergmanWeight::rate() const {
  const double s = form == WeightForm::corrected ? 2.0 * t : t;
  return lambda / std::tanh(s * lambda);
}

cplx BergmanWeight::log_factor(cplx z, cplx w) const {
  const double x = z.real(), y = z.imag(), u = w.real(), v = w.imag();
  const double gauss = -rate() * (y * y + v * v);
  if (form == WeightForm::corrected) return std::log(2.0) + lambda * (v * x - u * y) + gauss;
  return std::log(2.0) + I * lambda * (u * y - v * x) + gauss;
}

cplx BergmanWeight::operator()(const CplxVec& z, const CplxVec& w) const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += log_factor(z[i], w[i]);
  return std::exp(s);
}

Scaled SeparableFunction::operator()(const CplxVec& z, const CplxVec& w) const {
  Scaled total;
  for (const auto& p : pieces) {
    Scaled v = p.coef;
    for (int i = 0; i < n; ++i) v = v * p.factors[i](z[i], w[i]);
    total = total + v;
  }
  return total;
}

SeparableFunction heat_image(const NilFunction& F, const KernelEvaluator& ev, double exponent) {
  SeparableFunction out;
  out.n = F.n();
  const double lam = F.lambda();
  const double log_pre = exponent * ev.t() * lam * lam + heat_log_prefactor(ev, lam);
  RealVec l = F.chain().lengths();
  for (const auto& term : F.terms())
    for (const auto& at : term.f.atoms()) {
      SeparableFunction::Piece p;
      p.coef = {term.coef * at.coef, log_pre};
      for (int i = 0; i < F.n(); ++i) {
        HeatCoordinate hc(ev, lam, l[i], term.twist[i], at.factors[i]);
        p.factors.push_back([hc](cplx z, cplx w) { return hc(z, w); });
      }
      out.pieces.push_back(std::move(p));
    }
  return out;
}

namespace {

struct PieceRef {
  const SeparableFunction::Piece* piece;
  int owner;
};

// inner integral of F_p conj(F_q) W over the fundamental domain, coordinate i, at one outer node
Scaled inner_pair(const PieceRef& P_, const PieceRef& Q_, int i, double li, double y, double v,
                  const BergmanWeight& W, int P) {
  quad::Rule rx, ru;
  if (W.form == WeightForm::corrected) {
    // integrand is periodic in both directions
    rx = quad::periodic_midpoint(0.0, 1.0, P);
    ru = quad::periodic_midpoint(0.0, li, P);
  } else {
    rx = quad::composite_legendre(0.0, 1.0, std::max(1, P / 8), 8);
    ru = quad::composite_legendre(0.0, li, std::max(1, P / 8), 8);
  }
  const bool same = P_.piece == Q_.piece;
  Scaled acc;
  for (std::size_t a = 0; a < rx.size(); ++a)
    for (std::size_t b = 0; b < ru.size(); ++b) {
      const cplx z(rx.nodes[a], y), w(ru.nodes[b], v);
      const cplx lw = W.log_factor(z, w) + std::log(rx.weights[a] * ru.weights[b]);
      const Scaled fp = P_.piece->factors[i](z, w);
      const Scaled fq = same ? fp : Q_.piece->factors[i](z, w);
      acc = acc + Scaled{fp.v * std::conj(fq.v) * std::exp(I * lw.imag()), fp.s + fq.s + lw.real()};
    }
  return acc;
}

double log_abs(const Scaled& x) { return x.v == 0.0 ? -1e300 : std::log(std::abs(x.v)) + x.s; }

// Gaussian model log D ~ alpha + beta.s - s^T M s of an outer integrand, and the
// affine map s = mu + T g that turns it into e^{-|g|^2}.
struct Frame {
  Eigen::Matrix2d M;
  Eigen::Vector2d beta, mu, eig;
  Eigen::Matrix2d T;
  double logjac = 0.0;
};

Frame make_frame(const Eigen::Matrix2d& M, const Eigen::Vector2d& beta) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
  require(es.eigenvalues().minCoeff() > 0.0, ErrorCode::divergence, "not in H^t_k: outer integrand does not decay");
  Frame fr;
  fr.M = M;
  fr.beta = beta;
  fr.mu = 0.5 * M.inverse() * beta;
  fr.eig = es.eigenvalues();
  fr.T = es.eigenvectors() * fr.eig.cwiseSqrt().cwiseInverse().asDiagonal();
  fr.logjac = -0.5 * std::log(fr.eig(0) * fr.eig(1));
  return fr;
}

// Gaussian with the mean and covariance of D on a grid around `centre`. Moments
// see the whole bump, so lobed images (Hermite atoms) get a frame of their true
// extent where a local quadratic fit would not. The grid is recentred and
// widened until its edge is negligible.
Frame moment_frame(const std::function<double(double, double)>& logD, Eigen::Vector2d centre, double step) {
  const int H = 8;
  for (int attempt = 0; attempt < 6; ++attempt) {
    std::vector<double> L((2 * H + 1) * (2 * H + 1));
    double top = -1e300, edge = -1e300;
    for (int i = -H; i <= H; ++i)
      for (int j = -H; j <= H; ++j) {
        const double val = logD(centre(0) + i * step, centre(1) + j * step);
        L[(i + H) * (2 * H + 1) + j + H] = val;
        top = std::max(top, val);
        if (std::abs(i) == H || std::abs(j) == H) edge = std::max(edge, val);
      }
    double mass = 0.0;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
    for (int i = -H; i <= H; ++i)
      for (int j = -H; j <= H; ++j) {
        const double w = std::exp(L[(i + H) * (2 * H + 1) + j + H] - top);
        const Eigen::Vector2d s(centre(0) + i * step, centre(1) + j * step);
        mass += w;
        mean += w * s;
        second += w * s * s.transpose();
      }
    mean /= mass;
    const Eigen::Matrix2d cov = second / mass - mean * mean.transpose();
    if (edge < top - 25.0 && cov.determinant() > 0.0) {
      const Eigen::Matrix2d M = 0.5 * cov.inverse();
      const Frame fr = make_frame(M, 2.0 * M * mean);
      // a bump inside the grid does not rule out growth beyond it
      for (int d = 0; d < 16; ++d) {
        const Eigen::Vector2d g(6.0 * std::cos(d * pi / 8), 6.0 * std::sin(d * pi / 8));
        const Eigen::Vector2d s = fr.mu + fr.T * g;
        require(logD(s(0), s(1)) < top - 15.0, ErrorCode::divergence,
                "not in H^t_k: outer integrand does not decay");
      }
      return fr;
    }
    centre = mean;
    step *= 1.5;
  }
  throw Error(ErrorCode::divergence, "not in H^t_k: outer integrand does not decay");
}

}  // namespace

BergmanReport bergman_gram(const std::vector<SeparableFunction>& fs, const BergmanWeight& W,
                           const BergmanOptions& opt) {
  const int n = W.chain.n();
  RealVec l = W.chain.lengths();
  std::vector<PieceRef> refs;
  for (std::size_t p = 0; p < fs.size(); ++p) {
    require(fs[p].n == n, ErrorCode::dimension_mismatch, "function dimension differs from the chain");
    for (const auto& pc : fs[p].pieces) refs.push_back({&pc, int(p)});
  }
  const std::size_t np = refs.size(), nf = fs.size();
  BergmanReport rep;
  rep.gram = Eigen::MatrixXcd::Zero(nf, nf);
  if (np == 0) return rep;

  // Gaussian frame of each piece's outer integrand per coordinate, sampled at the
  // expected decay scale (heat images under the corrected weight decay like
  // e^{-(rate - |lambda|)(y^2+v^2)}). A cross term is bounded by the geometric
  // mean of its diagonals, whose frame averages the two quadratic models.
  const double excess = W.rate() - std::abs(W.lambda);
  const double hint = (W.form == WeightForm::corrected && excess > 1e-3 * W.rate()) ? excess : W.rate();
  std::vector<std::vector<Frame>> frames(n, std::vector<Frame>(np));
  for (int i = 0; i < n; ++i)
    for (std::size_t p = 0; p < np; ++p) {
      auto logD = [&](double y, double v) { return log_abs(inner_pair(refs[p], refs[p], i, l[i], y, v, W, opt.inner)); };
      const Frame fr = moment_frame(logD, Eigen::Vector2d::Zero(), 0.6 / std::sqrt(hint));
      frames[i][p] = fr;
      rep.rate.push_back(fr.eig(0));
      rep.rate.push_back(fr.eig(1));
      rep.centre.push_back(fr.mu(0));
      rep.centre.push_back(fr.mu(1));
    }

  // Outer integral by the trapezoid rule in frame coordinates g (s = mu + T g):
  // the integrand is real-analytic with Gaussian decay, so the rule converges
  // geometrically in 1/h. The square grows until its edge is negligible against
  // the diagonal peaks.
  const bool hermitian = W.form == WeightForm::corrected;
  int outer_nodes = 0;
  auto level = [&](int P, double h) {
    std::vector<std::vector<cplx>> I_(n, std::vector<cplx>(np * np, 0.0));
    for (int i = 0; i < n; ++i) {
      RealVec peak(np, -1e300);
      auto pair = [&](std::size_t p, std::size_t q) {
        const Frame fr = p == q ? frames[i][p]
                                : make_frame(0.5 * (frames[i][p].M + frames[i][q].M),
                                             0.5 * (frames[i][p].beta + frames[i][q].beta));
        std::map<std::pair<int, int>, Scaled> cache;
        auto node = [&](int a, int b) {
          auto it = cache.find({a, b});
          if (it != cache.end()) return it->second;
          const Eigen::Vector2d s = fr.mu + fr.T * Eigen::Vector2d(a * h, b * h);
          Scaled val = inner_pair(refs[p], refs[q], i, l[i], s(0), s(1), W, P);
          val.s += std::log(h * h) + fr.logjac;
          cache.emplace(std::make_pair(a, b), val);
          return val;
        };
        int K = int(std::ceil(6.0 / h));
        for (;;) {
          double top = -1e300, edge = -1e300;
          for (int a = -K; a <= K; ++a)
            for (int b = -K; b <= K; ++b) {
              const double ld = log_abs(node(a, b));
              top = std::max(top, ld);
              if (std::abs(a) == K || std::abs(b) == K) edge = std::max(edge, ld);
            }
          if (p == q) peak[p] = top;
          const double ref = p == q ? top : 0.5 * (peak[p] + peak[q]);
          if (edge < ref - 35.0) break;
          require(K * h < 20.0, ErrorCode::divergence, "not in H^t_k: outer integrand does not decay");
          K += int(std::ceil(2.0 / h));
        }
        outer_nodes = std::max(outer_nodes, 2 * K + 1);
        Scaled acc;
        for (int a = -K; a <= K; ++a)
          for (int b = -K; b <= K; ++b) acc = acc + node(a, b);
        I_[i][p * np + q] = acc.value();
      };
      for (std::size_t p = 0; p < np; ++p) pair(p, p);
      for (std::size_t p = 0; p < np; ++p)
        for (std::size_t q = 0; q < np; ++q) {
          if (p == q || (hermitian && q < p)) continue;
          pair(p, q);
          if (hermitian) I_[i][q * np + p] = std::conj(I_[i][p * np + q]);
        }
    }
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(nf, nf);
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t q = 0; q < np; ++q) {
        Scaled c = refs[p].piece->coef;
        Scaled d = refs[q].piece->coef;
        cplx v = c.v * std::conj(d.v) * std::exp(c.s + d.s);
        for (int i = 0; i < n; ++i) v *= I_[i][p * np + q];
        G(refs[p].owner, refs[q].owner) += v;
      }
    return G;
  };
  auto change = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    double scale = 0.0;
    for (Eigen::Index q = 0; q < a.rows(); ++q) scale = std::max(scale, std::abs(a(q, q)));
    return (a - b).cwiseAbs().maxCoeff() / std::max(scale, 1e-300);
  };
  // Both rules converge geometrically: doubling P squares the inner error and
  // halving h raises the outer one to the fourth power. A level is accepted once
  // the change into it is below 0.1 sqrt(tol), which bounds its own error by ~tol^2.
  // The inner resolution is settled on the coarse outer grid, where it is cheap.
  const double accept = 0.1 * std::sqrt(opt.tol);
  int P = opt.inner;
  double h = opt.outer_step;
  if (W.form == WeightForm::literal) {
    // the unimodular phase oscillates in (y,v) with frequency up to lambda l_i;
    // start from a step that resolves it along the widest frame axis
    for (int i = 0; i < n; ++i)
      for (const auto& fr : frames[i]) {
        const double hs = 0.8 * 2.0 * pi / (std::abs(W.lambda) * l[i] + 6.0 * std::sqrt(fr.eig.maxCoeff()));
        h = std::min(h, hs * std::sqrt(fr.eig.minCoeff()));
      }
  }
  Eigen::MatrixXcd cur = level(P, h);
  bool settled = false;
  for (int lev = 0; lev <= opt.max_levels && !settled; ++lev) {
    Eigen::MatrixXcd next = level(2 * P, h);
    rep.change = change(next, cur);
    P *= 2;
    cur = next;
    settled = rep.change <= accept;
  }
  double dp = rep.change;
  settled = false;
  for (int lev = 0; lev <= opt.max_levels && !settled && dp <= accept; ++lev) {
    Eigen::MatrixXcd next = level(P, h / 2);
    rep.change = change(next, cur);
    h /= 2;
    cur = next;
    settled = rep.change <= accept;
  }
  rep.change = std::max(rep.change, dp);
  rep.gram = cur;
  rep.inner = P;
  rep.outer = outer_nodes;
  if (rep.change <= accept) return rep;
  std::ostringstream os;
  os << "Bergman quadrature unstable: relative change " << rep.change << " at " << P << " inner points and "
     << outer_nodes << " outer nodes per axis";
  throw Error(ErrorCode::quadrature, os.str());
}

double bergman_norm2(const SeparableFunction& F, const BergmanWeight& W, const BergmanOptions& opt) {
  auto r = bergman_gram({F}, W, opt);
  return r.gram(0, 0).real();
}

BergmanRatioResult bergman_ratios(const std::vector<TestFunction>& fs, long k, const DivisorChain& chain, const IntVec& j,
                         double t, WeightForm form, const BergmanOptions& opt) {
  BergmanWeight W(k, chain, t, form);
  KernelEvaluator ev(KernelKind::hn, t, chain.n());
  BergmanRatioResult res;
  res.form = form;
  res.exp2_factor = std::exp(2.0 * t * W.lambda * W.lambda);
  for (const auto& f : fs) {
    SeparableFunction F = heat_image(twist_j(weil_brezin(k, chain, f), j), ev, 1.0);
    auto rep = bergman_gram({F}, W, opt);
    res.change = std::max(res.change, rep.change);
    res.ratios.push_back(rep.gram(0, 0).real() / f.norm2());
  }
  double s = 0.0, s2 = 0.0;
  for (double r : res.ratios) s += r;
  res.mean = s / res.ratios.size();
  for (double r : res.ratios) s2 += (r - res.mean) * (r - res.mean);
  res.cv = std::sqrt(s2 / res.ratios.size()) / std::abs(res.mean);
  return res;
}

}  // namespace nilheat
