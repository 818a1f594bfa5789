#include "fspif/special.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>

namespace fspif::special {

double bessel_j0(double x) { return boost::math::cyl_bessel_j(0, x); }

double bessel_j1(double x) { return boost::math::cyl_bessel_j(1, x); }

double one_minus_j0(double x) {
  if (std::abs(x) >= 1.0) return 1.0 - bessel_j0(x);
  // 1 - J0(x) = sum_{m>=1} (-1)^{m+1} (x^2/4)^m / (m!)^2
  const double q = 0.25 * x * x;
  double term = q;
  double sum = q;
  for (int m = 2; m < 30; ++m) {
    term *= -q / (static_cast<double>(m) * m);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double j1_over_x(double x) {
  if (std::abs(x) < 1e-4) {
    const double q = x * x;
    return 0.5 - q / 16.0 + q * q / 384.0;
  }
  return bessel_j1(x) / x;
}

namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955126;
constexpr double kInvSqrtPi = 0.5641895835477563;

Complex erf_series(Complex z) {
  // erf(z) = 2/sqrt(pi) sum_n (-1)^n z^{2n+1} / (n! (2n+1))
  const Complex z2 = z * z;
  Complex power = z;  // (-1)^n z^{2n+1} / n!
  Complex sum = z;
  for (int n = 1; n < 200; ++n) {
    power *= -z2 / static_cast<double>(n);
    const Complex term = power / static_cast<double>(2 * n + 1);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

// erfc(z) for Re z > 0 via
//   erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
Complex erfc_continued_fraction(Complex z) {
  constexpr double tiny = 1e-300;
  Complex f = z;
  Complex c = f;
  Complex d = 0.0;
  for (int n = 1; n < 5000; ++n) {
    const double a = 0.5 * n;
    d = z + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = z + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const Complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-z * z) * kInvSqrtPi / f;
}

}  // namespace

Complex erf(Complex z) {
  if (z.real() < 0.0) return -erf(-z);
  if (std::abs(z) < 3.0) return erf_series(z);
  return 1.0 - erfc_continued_fraction(z);
}

}  // namespace fspif::special
