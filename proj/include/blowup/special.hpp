#pragma once

#include <complex>

namespace blowup {

using cplx = std::complex<double>;

// Lanczos approximation (g = 7, nine terms), reflection for Re z < 1/2.
cplx complex_gamma(cplx z);
// 1 / Gamma(z), entire; exact zeros at the non-positive integers.
cplx rgamma(cplx z);

// Gauss hypergeometric function for real z < 1. Pfaff transformation for z < -1/2, power series
// up to z = 0.9, beyond that the connection to 1 - z unless c - a - b is an integer.
// PoleError if c is a non-positive integer, ConvergenceError if the series does not settle.
cplx hyp2f1(cplx a, cplx b, cplx c, double z);
// d/dz and d^2/dz^2 via the contiguous parameter shift
cplx hyp2f1_d1(cplx a, cplx b, cplx c, double z);
cplx hyp2f1_d2(cplx a, cplx b, cplx c, double z);

}  // namespace blowup
