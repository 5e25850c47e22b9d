#include "nilheat/lattice.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace nilheat {

DivisorChain::DivisorChain(RatVec l) : l_(std::move(l)) {
  require(!l_.empty(), ErrorCode::invalid_argument, "divisor chain must be non-empty");
  for (std::size_t i = 0; i < l_.size(); ++i) {
    require(l_[i] > 0, ErrorCode::invalid_argument, "divisor chain entries must be positive");
    if (i > 0) {
      Rational q = l_[i] / l_[i - 1];
      require(boost::multiprecision::denominator(q) == 1, ErrorCode::invalid_argument,
              "divisor chain: l_{j+1}/l_j must be an integer");
    }
  }
}

DivisorChain DivisorChain::parse(const std::vector<std::string>& entries) {
  RatVec l;
  for (const auto& e : entries) l.push_back(parse_rational(e));
  return DivisorChain(std::move(l));
}

RealVec DivisorChain::lengths() const {
  RealVec r;
  for (const auto& x : l_) r.push_back(to_double(x));
  return r;
}

IntVec DivisorChain::ratios() const {
  IntVec r;
  for (const auto& x : l_) r.push_back(Rational(x / l_[0]).convert_to<long>());
  return r;
}

std::string DivisorChain::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < l_.size(); ++i) s += (i ? "," : "") + to_string(l_[i]);
  return s + ")";
}

GroupPoint RatPoint::to_double() const {
  GroupPoint g;
  for (auto& v : x) g.x.push_back(nilheat::to_double(v));
  for (auto& v : u) g.u.push_back(nilheat::to_double(v));
  g.xi = nilheat::to_double(xi);
  return g;
}

RatPoint rat_mul(const RatPoint& g, const RatPoint& h) {
  require(g.n() == h.n(), ErrorCode::dimension_mismatch, "group elements of different dimension");
  RatPoint r = g;
  Rational s = 0;
  for (int i = 0; i < g.n(); ++i) {
    r.x[i] += h.x[i];
    r.u[i] += h.u[i];
    s += h.x[i] * g.u[i] - h.u[i] * g.x[i];
  }
  r.xi = g.xi + h.xi + s / 2;
  return r;
}

RatPoint rat_inv(const RatPoint& g) {
  RatPoint r = g;
  for (auto& v : r.x) v = -v;
  for (auto& v : r.u) v = -v;
  r.xi = -g.xi;
  return r;
}

GammaGenerators make_gamma_l(const DivisorChain& chain) {
  const int n = chain.n();
  GammaGenerators out;
  for (int i = 0; i < n; ++i) {
    RatPoint p{RatVec(n, 0), RatVec(n, 0), 0};
    p.x[i] = 1;
    out.gens.push_back(p);
  }
  for (int i = 0; i < n; ++i) {
    RatPoint p{RatVec(n, 0), RatVec(n, 0), 0};
    p.u[i] = chain.l()[i];
    out.gens.push_back(p);
  }
  out.central = RatPoint{RatVec(n, 0), RatVec(n, 0), chain.l()[0] / 2};
  return out;
}

namespace {

bool integral(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

std::string key(const RatPoint& p) {
  std::string k;
  for (auto& v : p.x) k += to_string(v) + ",";
  for (auto& v : p.u) k += to_string(v) + ",";
  return k + to_string(p.xi);
}

}  // namespace

bool in_lambda(const RatPoint& g, const DivisorChain& chain) {
  require(g.n() == chain.n(), ErrorCode::dimension_mismatch, "point and chain dimensions differ");
  for (int i = 0; i < g.n(); ++i) {
    if (!integral(g.x[i])) return false;
    if (!integral(g.u[i] / chain.l()[i])) return false;
  }
  return integral(g.xi / (chain.l()[0] / 2));
}

Rational beta(const std::vector<RatPoint>& gens, int max_word) {
  require(!gens.empty(), ErrorCode::invalid_argument, "empty generator set");
  std::vector<RatPoint> alphabet;
  for (const auto& g : gens) {
    alphabet.push_back(g);
    alphabet.push_back(rat_inv(g));
  }
  const int n = gens[0].n();
  RatPoint id{RatVec(n, 0), RatVec(n, 0), 0};
  std::set<std::string> seen{key(id)};
  std::vector<RatPoint> frontier{id};
  Rational best = 0;
  for (int w = 1; w <= max_word; ++w) {
    std::vector<RatPoint> next;
    for (const auto& e : frontier)
      for (const auto& a : alphabet) {
        RatPoint p = rat_mul(e, a);
        if (!seen.insert(key(p)).second) continue;
        bool central = true;
        for (int i = 0; i < n && central; ++i) central = p.x[i] == 0 && p.u[i] == 0;
        if (central && p.xi != 0) {
          Rational v = abs(p.xi);
          if (best == 0 || v < best) best = v;
        }
        next.push_back(std::move(p));
      }
    frontier = std::move(next);
  }
  require(best != 0, ErrorCode::not_a_lattice, "not a lattice or W too small");
  return best;
}

SymplecticGram symplectic_gram(const std::vector<Eigen::VectorXd>& basis, double rel_tol) {
  const int m = int(basis.size());
  require(m % 2 == 0 && m > 0, ErrorCode::dimension_mismatch, "need 2n basis vectors");
  const int n = m / 2;
  Eigen::MatrixXd B(m, m);
  for (int i = 0; i < m; ++i) {
    require(basis[i].size() == m, ErrorCode::dimension_mismatch, "basis vectors must have length 2n");
    B.col(i) = basis[i];
  }
  require(std::abs(B.determinant()) > 1e-12 * std::pow(B.norm(), m), ErrorCode::degenerate,
          "basis is linearly dependent");
  SymplecticForm om(n);
  SymplecticGram out;
  out.gram = B.transpose() * om.J() * B;
  std::vector<double> vals;
  double scale = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(out.gram(i, j)) > 0) {
        vals.push_back(std::abs(out.gram(i, j)));
        scale = std::max(scale, vals.back());
      }
  require(!vals.empty(), ErrorCode::degenerate, "symplectic Gram matrix vanishes");
  double g = vals[0];
  const double eps = rel_tol * scale;
  for (double v : vals) {
    double a = std::max(g, v), b = std::min(g, v);
    while (b > eps) {
      double r = std::fmod(a, b);
      if (r > b - eps) r = 0.0;
      a = b;
      b = r;
    }
    g = a;
  }
  out.generator = g;
  out.heisenberg = true;
  for (double v : vals) {
    double q = v / g;
    if (q > 1e6 || std::abs(q - std::round(q)) > rel_tol * std::max(1.0, q)) out.heisenberg = false;
  }
  return out;
}

namespace {

struct Congruence {
  IntMatrix K, U;
  int m;
  // column k += q * column s, mirrored on rows
  void colop(int k, int s, const Integer& q) {
    if (q == 0) return;
    for (int i = 0; i < m; ++i) K[i][k] += q * K[i][s];
    for (int j = 0; j < m; ++j) K[k][j] += q * K[s][j];
    for (int i = 0; i < m; ++i) U[i][k] += q * U[i][s];
  }
};

}  // namespace

RatMatrix divisor_basis(const DivisorChain& chain, const Rational& scale) {
  const int n = chain.n();
  RatMatrix v = rat_zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    v[i][i] = scale;
    v[n + i][n + i] = scale * chain.l()[i];
  }
  return v;
}

bool same_module(const RatMatrix& a, const RatMatrix& b) {
  // rows of a and b; a = T b and b = S a with integral T, S
  RatMatrix T = rat_mul(a, rat_inverse(b));
  RatMatrix S = rat_mul(b, rat_inverse(a));
  return rat_is_integral(T) && rat_is_integral(S);
}

NormalForm normal_form(const RatMatrix& vectors) {
  const int m = int(vectors.size());
  require(m > 0 && m % 2 == 0, ErrorCode::dimension_mismatch, "need 2n basis vectors");
  for (const auto& v : vectors)
    require(int(v.size()) == m, ErrorCode::dimension_mismatch, "basis vectors must have length 2n");
  const int n = m / 2;
  require(rat_rank(vectors) == m, ErrorCode::degenerate, "basis is linearly dependent");

  RatMatrix G = rat_zero(m, m);
  std::vector<Rational> entries;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Rational s = 0;
      for (int k = 0; k < n; ++k) s += vectors[i][k] * vectors[j][n + k] - vectors[i][n + k] * vectors[j][k];
      G[i][j] = s;
      entries.push_back(s);
    }
  Rational g = rational_gcd(entries);
  require(g != 0, ErrorCode::not_a_lattice, "symplectic Gram matrix vanishes");

  Congruence c;
  c.m = m;
  c.K.assign(m, std::vector<Integer>(m, 0));
  c.U.assign(m, std::vector<Integer>(m, 0));
  for (int i = 0; i < m; ++i) {
    c.U[i][i] = 1;
    for (int j = 0; j < m; ++j) c.K[i][j] = boost::multiprecision::numerator(Rational(G[i][j] / g));
  }

  std::vector<int> active(m);
  for (int i = 0; i < m; ++i) active[i] = i;
  std::vector<int> first, second;
  std::vector<Integer> divisors;
  while (!active.empty()) {
    for (;;) {
      int a = -1, b = -1;
      Integer best = 0;
      for (std::size_t p = 0; p < active.size(); ++p)
        for (std::size_t q = p + 1; q < active.size(); ++q) {
          const Integer& v = c.K[active[p]][active[q]];
          if (v != 0 && (best == 0 || abs(v) < best)) {
            best = abs(v);
            a = active[p];
            b = active[q];
          }
        }
      require(a >= 0, ErrorCode::degenerate, "symplectic Gram matrix is degenerate");
      if (c.K[a][b] < 0) std::swap(a, b);
      const Integer piv = c.K[a][b];
      bool dirty = false;
      for (int k : active) {
        if (k == a || k == b) continue;
        c.colop(k, b, -Integer(c.K[a][k] / piv));
        if (c.K[a][k] != 0) dirty = true;
        c.colop(k, a, Integer(c.K[b][k] / piv));
        if (c.K[b][k] != 0) dirty = true;
      }
      if (dirty) continue;
      for (int i : active) {
        if (i == a || i == b || dirty) continue;
        for (int j : active) {
          if (j == a || j == b) continue;
          if (c.K[i][j] % piv != 0) {
            c.colop(a, i, 1);
            dirty = true;
            break;
          }
        }
      }
      if (dirty) continue;
      first.push_back(a);
      second.push_back(b);
      divisors.push_back(piv);
      std::erase(active, a);
      std::erase(active, b);
      break;
    }
  }

  NormalForm nf;
  nf.elementary_divisors = divisors;
  nf.gram_generator = g;
  RatVec l;
  for (int i = 0; i < n; ++i) l.push_back(Rational(divisors[i], divisors[0]));
  nf.chain = DivisorChain(l);
  nf.d_squared = g * divisors[0];

  std::vector<int> order = first;
  order.insert(order.end(), second.begin(), second.end());
  nf.unimodular = rat_zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) nf.unimodular[i][j] = Rational(c.U[i][order[j]]);
  // new basis vectors c_j = sum_i U_ij b_i, stored as rows
  RatMatrix C = rat_mul(rat_transpose(nf.unimodular), vectors);
  nf.A_scaled = rat_zero(m, m);
  for (int j = 0; j < m; ++j) {
    Rational s = j < n ? Rational(1) : l[j - n];
    for (int r = 0; r < m; ++r) nf.A_scaled[r][j] = C[j][r] / s;
  }

  // (d A)^T Omega (d A) = d^2 Omega
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Rational s = 0;
      for (int k = 0; k < n; ++k)
        s += nf.A_scaled[k][i] * nf.A_scaled[n + k][j] - nf.A_scaled[n + k][i] * nf.A_scaled[k][j];
      Rational expect = (j == i + n) ? nf.d_squared : (i == j + n) ? Rational(-nf.d_squared) : Rational(0);
      require(s == expect, ErrorCode::axiom_violation, "normal form: reduced matrix is not symplectic");
    }
  require(same_module(vectors, C), ErrorCode::axiom_violation, "normal form: module equality failed");
  return nf;
}

double NormalForm::d() const { return std::sqrt(to_double(d_squared)); }

Eigen::MatrixXd NormalForm::A() const {
  const int m = int(A_scaled.size());
  Eigen::MatrixXd a(m, m);
  double dd = d();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = to_double(A_scaled[i][j]) / dd;
  return a;
}

RatMatrix apply_to_vectors(const RatMatrix& M, const RatMatrix& vectors) {
  return rat_transpose(rat_mul(M, rat_transpose(vectors)));
}

RatMatrix random_integer_symplectic(int n, std::mt19937_64& rng, int steps) {
  const int m = 2 * n;
  std::uniform_int_distribution<int> kind(0, 3), small(-2, 2), idx(0, n - 1);
  RatMatrix M = rat_identity(m);
  for (int s = 0; s < steps; ++s) {
    RatMatrix E = rat_identity(m);
    switch (kind(rng)) {
      case 0:
      case 1: {
        // [[I,S],[0,I]] or [[I,0],[S,I]], S symmetric
        bool upper = kind(rng) % 2 == 0;
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            int v = small(rng);
            if (upper) E[i][n + j] = E[j][n + i] = v;
            else E[n + i][j] = E[n + j][i] = v;
          }
        break;
      }
      case 2: {
        if (n == 1) {
          E[0][0] = -1;
          E[1][1] = -1;
          break;
        }
        int i = idx(rng), j = idx(rng);
        if (i == j) j = (i + 1) % n;
        int v = small(rng);
        E[i][j] = v;           // block E
        E[n + j][n + i] = -v;  // block E^{-T}
        break;
      }
      default:
        for (int i = 0; i < n; ++i) {
          E[i][i] = 0;
          E[n + i][n + i] = 0;
          E[i][n + i] = 1;
          E[n + i][i] = -1;
        }
    }
    M = rat_mul(E, M);
  }
  return M;
}

long ak_size(long k, const DivisorChain& chain) {
  require(k != 0, ErrorCode::out_of_scope, "k=0 sector out of scope");
  long s = 1;
  for (long p : chain.ratios()) s *= 2 * std::labs(k) * p;
  return s;
}

std::vector<IntVec> ak_elements(long k, const DivisorChain& chain) {
  const long total = ak_size(k, chain);
  IntVec ranges;
  for (long p : chain.ratios()) ranges.push_back(2 * std::labs(k) * p);
  std::vector<IntVec> out;
  out.reserve(total);
  IntVec j(chain.n(), 0);
  for (long t = 0; t < total; ++t) {
    out.push_back(j);
    for (int i = 0; i < chain.n(); ++i) {
      if (++j[i] < ranges[i]) break;
      j[i] = 0;
    }
  }
  return out;
}

RatMatrix read_basis_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("basis"), ErrorCode::invalid_argument,
          "lattice JSON needs a \"basis\" array");
  RatMatrix v;
  for (const auto& row : j.at("basis")) {
    RatVec r;
    for (const auto& e : row) {
      if (e.is_string()) r.push_back(parse_rational(e.get<std::string>()));
      else if (e.is_number_integer()) r.push_back(Rational(e.get<long long>()));
      else if (e.is_number()) r.push_back(parse_rational(e.dump()));
      else throw Error(ErrorCode::exact_arithmetic_required, "exact arithmetic required: bad basis entry");
    }
    v.push_back(r);
  }
  if (j.contains("n"))
    require(int(v.size()) == 2 * j.at("n").get<int>(), ErrorCode::dimension_mismatch,
            "basis must contain 2n vectors");
  return v;
}

nlohmann::json normal_form_json(const NormalForm& nf) {
  nlohmann::json out;
  Integer num = boost::multiprecision::numerator(nf.d_squared);
  Integer den = boost::multiprecision::denominator(nf.d_squared);
  Integer rn = boost::multiprecision::sqrt(num), rd = boost::multiprecision::sqrt(den);
  if (rn * rn == num && rd * rd == den) {
    out["d"] = to_string(Rational(rn, rd));
  } else {
    std::ostringstream os;
    os.precision(17);
    os << nf.d();
    out["d"] = os.str();
  }
  out["d_squared"] = to_string(nf.d_squared);
  out["l"] = nlohmann::json::array();
  for (const auto& x : nf.chain.l()) out["l"].push_back(to_string(x));
  Eigen::MatrixXd A = nf.A();
  out["A"] = nlohmann::json::array();
  out["A_scaled"] = nlohmann::json::array();
  for (int i = 0; i < A.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array(), srow = nlohmann::json::array();
    for (int j = 0; j < A.cols(); ++j) {
      row.push_back(A(i, j));
      srow.push_back(to_string(nf.A_scaled[i][j]));
    }
    out["A"].push_back(row);
    out["A_scaled"].push_back(srow);
  }
  out["elementary_divisors"] = nlohmann::json::array();
  for (const auto& d : nf.elementary_divisors) out["elementary_divisors"].push_back(d.str());
  return out;
}

}  // namespace nilheat
