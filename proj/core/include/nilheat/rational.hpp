#pragma once

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nilheat/common.hpp"

namespace nilheat {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using RatVec = std::vector<Rational>;
using RatMatrix = std::vector<RatVec>;  // row-major
using IntMatrix = std::vector<std::vector<Integer>>;

/// Accepts "p/q", integers and finite decimals ("1.25", "-3e-2"); anything else throws
/// exact_arithmetic_required.
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

Integer gcd(const Integer& a, const Integer& b);
/// Generator of the additive group spanned by the entries (0 if all vanish).
Rational rational_gcd(const std::vector<Rational>& xs);

RatMatrix rat_zero(int rows, int cols);
RatMatrix rat_identity(int n);
RatMatrix rat_mul(const RatMatrix& a, const RatMatrix& b);
RatMatrix rat_transpose(const RatMatrix& a);
/// Exact inverse; throws degenerate if singular.
RatMatrix rat_inverse(const RatMatrix& a);
int rat_rank(RatMatrix a);
bool rat_is_integral(const RatMatrix& a);

}  // namespace nilheat
