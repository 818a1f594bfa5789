#include "fspif/shapes.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <vector>

#include "fspif/special.hpp"
#include "fspif/types.hpp"

namespace fspif {

ShapeFunction ShapeFunction::radial_bspline(int order, double support_radius) {
  ShapeFunction s;
  s.kind = ShapeKind::RadialBSpline;
  s.order = order;
  s.support_radius = support_radius;
  s.validate();
  return s;
}

ShapeFunction ShapeFunction::truncated_gaussian(double sigma, double support_radius) {
  ShapeFunction s;
  s.kind = ShapeKind::TruncatedGaussian;
  s.order = 0;
  s.sigma = sigma;
  s.support_radius = support_radius;
  s.validate();
  return s;
}

void ShapeFunction::validate() const {
  if (!(support_radius > 0.0)) throw InputError("shape support radius must be positive");
  if (kind == ShapeKind::RadialBSpline && (order < 0 || order > 8)) {
    throw InputError("radial b-spline order must lie in [0, 8]");
  }
  if (kind == ShapeKind::TruncatedGaussian && !(sigma > 0.0)) {
    throw InputError("Gaussian sigma must be positive");
  }
}

double ShapeFunction::fourier(double k_mag) const {
  return kind == ShapeKind::RadialBSpline ? fourier_bspline(order, k_mag, support_radius)
                                          : fourier_truncated_gaussian(k_mag, sigma, support_radius);
}

double ShapeFunction::realspace(double r) const {
  if (kind == ShapeKind::TruncatedGaussian) {
    if (r >= support_radius) return 0.0;
    return std::exp(-r * r / (2.0 * sigma * sigma)) / (2.0 * kPi * sigma * sigma);
  }
  const double lambda = 2.0 * support_radius / (order + 1);
  return bspline_realspace_unscaled(order, r / lambda) / (lambda * lambda);
}

std::string ShapeFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == ShapeKind::RadialBSpline) {
    os << "bspline(order=" << order << ",R=" << support_radius << ")";
  } else {
    os << "gaussian(sigma=" << sigma << ",R=" << support_radius << ")";
  }
  return os.str();
}

double fourier_bspline(int order, double k_mag, double support_radius) {
  const double lambda = 2.0 * support_radius / (order + 1);
  const double half_arg = 0.5 * lambda * k_mag;
  const double disk = 2.0 * special::j1_over_x(half_arg);
  return std::pow(disk, order + 1);
}

double fourier_truncated_gaussian(double k_mag, double sigma, double support_radius) {
  const double b = k_mag * sigma / std::sqrt(2.0);
  const Complex z{support_radius / (std::sqrt(2.0) * sigma), b};
  return std::exp(-b * b) * special::erf(z).real();
}

namespace {

constexpr double kDiskHeight = 4.0 / kPi;

// Length of the arc of the circle |y| = rho inside the disk |y - x| < 1/2, |x| = r.
double arc_inside(double rho, double r) {
  constexpr double a = 0.5;
  if (rho <= 0.0) return 0.0;
  if (rho + r <= a) return 2.0 * kPi * rho;
  if (rho >= r + a || r >= rho + a) return 0.0;
  const double c = std::clamp((rho * rho + r * r - a * a) / (2.0 * rho * r), -1.0, 1.0);
  return 2.0 * rho * std::acos(c);
}

}  // namespace

double bspline_realspace_unscaled(int order, double r) {
  r = std::abs(r);
  const double support = 0.5 * (order + 1);
  if (r >= support) return 0.0;
  if (order == 0) return kDiskHeight;
  if (order == 1) {
    // Lens area of two radius-1/2 disks at distance r.
    constexpr double a = 0.5;
    const double area = 2.0 * a * a * std::acos(r / (2.0 * a)) - 0.5 * r * std::sqrt(4.0 * a * a - r * r);
    return kDiskHeight * kDiskHeight * area;
  }
  // S_l(r) = (4/pi) int S_{l-1}(rho) arc(rho, r) drho
  const double lo = std::max(0.0, r - 0.5);
  const double hi = std::min(0.5 * order, r + 0.5);
  std::vector<double> breaks{lo, hi};
  if (0.5 - r > lo && 0.5 - r < hi) breaks.push_back(0.5 - r);
  for (int m = 1; m < order; ++m) {
    const double b = 0.5 * m;
    if (b > lo && b < hi) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  auto integrand = [&](double rho) { return bspline_realspace_unscaled(order - 1, rho) * arc_inside(rho, r); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] - breaks[i] <= 0.0) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, breaks[i], breaks[i + 1], 8,
                                                                           1e-13);
  }
  return kDiskHeight * total;
}

}  // namespace fspif
