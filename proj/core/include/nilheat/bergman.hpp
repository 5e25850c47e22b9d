#pragma once

#include <functional>

#include "nilheat/heat.hpp"
#include "nilheat/weilbrezin.hpp"

namespace nilheat {

/// `corrected` is 2^n e^{lambda(v.x - u.y)} e^{-lambda coth(2 t lambda)(y^2+v^2)}, the weight
/// under which the heat image is isometric; `literal` keeps the unimodular phase
/// e^{i lambda(u.y - v.x)} and the rate lambda coth(t lambda).
enum class WeightForm { corrected, literal };
std::string to_string(WeightForm f);

struct BergmanWeight {
  long k;
  DivisorChain chain;
  double t;
  double lambda;
  WeightForm form;

  BergmanWeight(long k, DivisorChain chain, double t, WeightForm form = WeightForm::corrected);
  double rate() const;
  /// log W(z, w) restricted to coordinate i (the weight is a product over i).
  cplx log_factor(cplx z, cplx w) const;
  cplx operator()(const CplxVec& z, const CplxVec& w) const;
};

/// sum_A c_A prod_i f_{A,i}(z_i, w_i)
struct SeparableFunction {
  using Factor = std::function<Scaled(cplx, cplx)>;
  struct Piece {
    Scaled coef;
    std::vector<Factor> factors;
  };
  int n = 0;
  std::vector<Piece> pieces;

  Scaled operator()(const CplxVec& z, const CplxVec& w) const;
};

/// e^{c t lambda^2} (F * k_t)(z, w, 0) for F a sector function, c = exponent.
SeparableFunction heat_image(const NilFunction& F, const KernelEvaluator& ev, double exponent);

struct BergmanOptions {
  int inner = 16;  // points per axis of the fundamental domain at the first level
  double outer_step = 0.8;  // trapezoid step of the outer plane in fitted frame units
  double tol = 1e-6;
  int max_levels = 3;
};

struct BergmanReport {
  Eigen::MatrixXcd gram;
  double change = 0.0;  // last refinement changes relative to the largest diagonal entry; the error is ~change^2
  int inner = 0, outer = 0;  // final inner points per axis, outer nodes per axis
  RealVec rate, centre;  // fitted frame eigenvalues and centre, two per piece and coordinate
};

/// Gram matrix <F_p, F_q>_{k,t} of several functions in one pass.
BergmanReport bergman_gram(const std::vector<SeparableFunction>& fs, const BergmanWeight& W,
                           const BergmanOptions& opt = {});
double bergman_norm2(const SeparableFunction& F, const BergmanWeight& W, const BergmanOptions& opt = {});

struct BergmanRatioResult {
  WeightForm form;
  RealVec ratios;           // ||F||^2/||f||^2 with prefactor e^{t lambda^2}
  double exp2_factor = 1;   // extra factor e^{2 t lambda^2} of the e^{2 t lambda^2} prefactor
  double mean = 0.0, cv = 0.0;
  double change = 0.0;
};
/// Ratio ||e^{t lambda^2} S_t V_{k,j} f||^2_{k,t} / ||f||^2 over a family; the
/// e^{2 t lambda^2} variant differs by exp2_factor uniformly.
BergmanRatioResult bergman_ratios(const std::vector<TestFunction>& fs, long k, const DivisorChain& chain, const IntVec& j,
                         double t, WeightForm form, const BergmanOptions& opt = {});

}  // namespace nilheat
