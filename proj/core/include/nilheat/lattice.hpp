#pragma once

#include <random>

#include <Eigen/Dense>

#include "json.hpp"
#include "nilheat/hgroup.hpp"
#include "nilheat/rational.hpp"

namespace nilheat {

/// l = (l_1, ..., l_n) with l_{j+1}/l_j a positive integer.
class DivisorChain {
 public:
  DivisorChain() = default;
  explicit DivisorChain(RatVec l);
  static DivisorChain ones(int n) { return DivisorChain(RatVec(n, Rational(1))); }
  static DivisorChain parse(const std::vector<std::string>& entries);

  int n() const { return int(l_.size()); }
  const RatVec& l() const { return l_; }
  RealVec lengths() const;
  /// p_i = l_i / l_1, integral by the chain condition.
  IntVec ratios() const;
  std::string str() const;
  bool operator==(const DivisorChain& o) const { return l_ == o.l_; }

 private:
  RatVec l_;
};

/// Group element with exact coordinates.
struct RatPoint {
  RatVec x, u;
  Rational xi;
  int n() const { return int(x.size()); }
  GroupPoint to_double() const;
};
RatPoint rat_mul(const RatPoint& g, const RatPoint& h);
RatPoint rat_inv(const RatPoint& g);

struct GammaGenerators {
  std::vector<RatPoint> gens;  // (e_i,0,0) then (0, l_i e_i, 0)
  RatPoint central;            // (0,0,l_1/2)
  std::vector<RatPoint> all() const {
    auto v = gens;
    v.push_back(central);
    return v;
  }
};
GammaGenerators make_gamma_l(const DivisorChain& chain);
/// Membership in Z^n x (l_1 Z x ... x l_n Z) x (l_1/2) Z.
bool in_lambda(const RatPoint& g, const DivisorChain& chain);

/// Smallest positive central value among words of length <= max_word in the
/// generators and their inverses.
Rational beta(const std::vector<RatPoint>& gens, int max_word = 6);

struct SymplecticGram {
  Eigen::MatrixXd gram;
  double generator = 0.0;  // g with every entry in g Z
  bool heisenberg = false;
};
SymplecticGram symplectic_gram(const std::vector<Eigen::VectorXd>& basis, double rel_tol = 1e-9);

/// Result of the reduction basis = A (d D(l)) up to a change of Z-basis.
/// d may be irrational, so it is carried as d^2 together with the exact
/// matrix A_scaled = d A.
struct NormalForm {
  Rational d_squared;
  DivisorChain chain;
  RatMatrix A_scaled;    // d * A, exact; (d A)^T Omega (d A) = d^2 Omega
  RatMatrix unimodular;  // U with basis * U = A_scaled * D(l)
  double d() const;
  Eigen::MatrixXd A() const;
  std::vector<Integer> elementary_divisors;  // d_1 | d_2 | ... of the reduced Gram
  Rational gram_generator;
};

/// basis: 2n column vectors given as rows of `vectors` (vectors[i] is b_i).
NormalForm normal_form(const RatMatrix& vectors);
/// Checks basis and A_scaled D(l) span the same Z-module (exact double inclusion).
bool same_module(const RatMatrix& vectors_a, const RatMatrix& vectors_b);
/// Columns of D(l): e_1..e_n, l_1 e_{n+1}, ..., l_n e_{2n}; returned as rows.
RatMatrix divisor_basis(const DivisorChain& chain, const Rational& scale = 1);

/// Random element of Sp(2n, Z) built from elementary transvections.
RatMatrix random_integer_symplectic(int n, std::mt19937_64& rng, int steps = 6);
RatMatrix apply_to_vectors(const RatMatrix& M, const RatMatrix& vectors);

/// A_k = Z/2|k|Z x Z/2|k|p_2 Z x ...
std::vector<IntVec> ak_elements(long k, const DivisorChain& chain);
long ak_size(long k, const DivisorChain& chain);

RatMatrix read_basis_json(const nlohmann::json& j);
nlohmann::json normal_form_json(const NormalForm& nf);

}  // namespace nilheat
