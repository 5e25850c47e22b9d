#include "nilheat/hermite.hpp"

#include <cmath>

namespace nilheat {

void hermite_values(int kmax, cplx x, cplx* out) {
  out[0] = 1.0;
  if (kmax == 0) return;
  out[1] = 2.0 * x;
  for (int k = 1; k < kmax; ++k) out[k + 1] = 2.0 * x * out[k] - 2.0 * double(k) * out[k - 1];
}

cplx hermite_series(const CplxVec& h, cplx x) {
  // H_{k+1} = 2x H_k - 2k H_{k-1}
  cplx b1 = 0.0, b2 = 0.0;
  for (int k = int(h.size()) - 1; k >= 0; --k) {
    cplx b = h[k] + 2.0 * x * b1 - 2.0 * double(k + 1) * b2;
    b2 = b1;
    b1 = b;
  }
  return b1;
}

void hermite_normalized(int kmax, cplx x, cplx* out) {
  out[0] = std::pow(pi, -0.25);
  if (kmax == 0) return;
  out[1] = std::sqrt(2.0) * x * out[0];
  for (int k = 1; k < kmax; ++k)
    out[k + 1] = std::sqrt(2.0 / (k + 1)) * x * out[k] - std::sqrt(double(k) / (k + 1)) * out[k - 1];
}

double laguerre(int k, double alpha, double x) {
  if (k == 0) return 1.0;
  double l0 = 1.0, l1 = 1.0 + alpha - x;
  for (int j = 1; j < k; ++j) {
    double l2 = ((2.0 * j + 1.0 + alpha - x) * l1 - (j + alpha) * l0) / (j + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

}  // namespace nilheat
