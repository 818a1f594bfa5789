#pragma once

#include "fspif/types.hpp"

namespace fspif::special {

double bessel_j0(double x);
double bessel_j1(double x);

// 1 - J0(x) without cancellation for small x.
double one_minus_j0(double x);

// J1(x) / x, continuous at 0 with limit 1/2.
double j1_over_x(double x);

// erf of a complex argument. Taylor series for |z| < 3, otherwise the
// Laplace continued fraction for erfc in the right half plane (Lentz).
Complex erf(Complex z);

}  // namespace fspif::special
