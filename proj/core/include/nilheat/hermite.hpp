#pragma once

#include "nilheat/common.hpp"

namespace nilheat {

/// Physicists' Hermite polynomials H_0..H_kmax at x, written to out[0..kmax].
void hermite_values(int kmax, cplx x, cplx* out);

/// sum_k h[k] H_k(x) by Clenshaw recurrence.
cplx hermite_series(const CplxVec& h, cplx x);

/// Orthonormal polynomial p_k(x) = H_k(x) / sqrt(2^k k! sqrt(pi)), k = 0..kmax,
/// so that p_k(x) exp(-x^2/2) are the L^2-normalized Hermite functions.
void hermite_normalized(int kmax, cplx x, cplx* out);

/// Generalized Laguerre polynomial L_k^{(alpha)}(x).
double laguerre(int k, double alpha, double x);

}  // namespace nilheat
