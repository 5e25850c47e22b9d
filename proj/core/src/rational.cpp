#include "nilheat/rational.hpp"

#include <cctype>
#include <regex>

namespace nilheat {

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  static const std::regex frac(R"(([+-]?\d+)(?:/(\d+))?)");
  static const std::regex dec(R"(([+-]?)(\d*)\.?(\d*)(?:[eE]([+-]?\d+))?)");
  std::smatch m;
  if (std::regex_match(s, m, frac)) {
    Integer num(m[1].str());
    Integer den = m[2].matched ? Integer(m[2].str()) : Integer(1);
    require(den != 0, ErrorCode::invalid_argument, "zero denominator in '" + raw + "'");
    return Rational(num, den);
  }
  if (std::regex_match(s, m, dec) && (m[2].length() + m[3].length()) > 0) {
    std::string digits = m[2].str() + m[3].str();
    Integer num(digits);
    long exp10 = -long(m[3].length());
    if (m[4].matched) exp10 += std::stol(m[4].str());
    Rational r(num);
    Integer ten = 10;
    for (long e = 0; e < std::labs(exp10); ++e) {
      if (exp10 > 0) r *= ten;
      else r /= ten;
    }
    return m[1].str() == "-" ? Rational(-r) : r;
  }
  throw Error(ErrorCode::exact_arithmetic_required,
              "exact arithmetic required: cannot read '" + raw + "' as a rational");
}

std::string to_string(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Integer gcd(const Integer& a, const Integer& b) {
  Integer x = abs(a), y = abs(b);
  while (y != 0) {
    Integer t = x % y;
    x = y;
    y = t;
  }
  return x;
}

Rational rational_gcd(const std::vector<Rational>& xs) {
  Integer g = 0, l = 1;
  for (const auto& x : xs) {
    if (x == 0) continue;
    Integer den = boost::multiprecision::denominator(x);
    l = l / gcd(l, den) * den;
  }
  for (const auto& x : xs) {
    if (x == 0) continue;
    Rational scaled = x * l;
    g = gcd(g, boost::multiprecision::numerator(scaled));
  }
  return Rational(g, l);
}

RatMatrix rat_zero(int rows, int cols) { return RatMatrix(rows, RatVec(cols, Rational(0))); }

RatMatrix rat_identity(int n) {
  RatMatrix m = rat_zero(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

RatMatrix rat_mul(const RatMatrix& a, const RatMatrix& b) {
  require(!a.empty() && a[0].size() == b.size(), ErrorCode::dimension_mismatch, "matrix product shape");
  RatMatrix c = rat_zero(int(a.size()), int(b[0].size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

RatMatrix rat_transpose(const RatMatrix& a) {
  RatMatrix t = rat_zero(int(a[0].size()), int(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

RatMatrix rat_inverse(const RatMatrix& a) {
  const int n = int(a.size());
  RatMatrix m = a, inv = rat_identity(n);
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (p < n && m[p][c] == 0) ++p;
    require(p < n, ErrorCode::degenerate, "matrix is singular");
    std::swap(m[p], m[c]);
    std::swap(inv[p], inv[c]);
    Rational piv = m[c][c];
    for (int j = 0; j < n; ++j) {
      m[c][j] /= piv;
      inv[c][j] /= piv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      Rational f = m[r][c];
      for (int j = 0; j < n; ++j) {
        m[r][j] -= f * m[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

int rat_rank(RatMatrix m) {
  if (m.empty()) return 0;
  const int rows = int(m.size()), cols = int(m[0].size());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int p = rank;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[rank]);
    for (int r = rank + 1; r < rows; ++r) {
      if (m[r][c] == 0) continue;
      Rational f = m[r][c] / m[rank][c];
      for (int j = c; j < cols; ++j) m[r][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

bool rat_is_integral(const RatMatrix& a) {
  for (const auto& row : a)
    for (const auto& x : row)
      if (boost::multiprecision::denominator(x) != 1) return false;
  return true;
}

}  // namespace nilheat
