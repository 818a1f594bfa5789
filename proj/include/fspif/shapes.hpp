#pragma once

// Radially symmetric particle shape functions with closed-form transforms.
//
// Radial b-spline of order l: S_0 is the disk of radius 1/2 with height 4/pi
// (unit mass) and S_l = S_0 * S_{l-1}, so S_l has support radius (l+1)/2 and
//
//     S_l^(k) = (2 J1(k/2) / (k/2))^(l+1)  =  2^(l+1) (J1(k/2)/(k/2))^(l+1),
//
// normalized so S^(0) = 1. A shape with support radius R is the dilation
// S(x) = S_l(x/lambda) / lambda^2 with lambda = 2R/(l+1), i.e. S^(k) = S_l^(lambda k).
//
// Truncated Gaussian: S(x) = exp(-|x|^2 / 2 sigma^2) / (2 pi sigma^2) for |x| < R,
// with transform exp(-sigma^2 k^2 / 2) Re erf(R/(sqrt2 sigma) + i k sigma/sqrt2).
// That closed form is exact for the separable truncation; for the radial one it
// differs by O(exp(-R^2 / 2 sigma^2)).

#include <string>

namespace fspif {

enum class ShapeKind { RadialBSpline, TruncatedGaussian };

struct ShapeFunction {
  ShapeKind kind = ShapeKind::RadialBSpline;
  int order = 2;                // b-spline order l
  double sigma = 0.0;           // Gaussian width
  double support_radius = 0.0;  // R

  static ShapeFunction radial_bspline(int order, double support_radius);
  static ShapeFunction truncated_gaussian(double sigma, double support_radius);

  void validate() const;

  // S^(|k|); real and radially symmetric.
  double fourier(double k_mag) const;
  // S(|x|).
  double realspace(double r) const;

  std::string describe() const;
};

// Scaled radial b-spline transform, l >= 0.
double fourier_bspline(int order, double k_mag, double support_radius);
// Closed-form truncated Gaussian transform.
double fourier_truncated_gaussian(double k_mag, double sigma, double support_radius);

// Unscaled S_l(r) (support (l+1)/2): closed form for l = 0, 1, nested radial
// quadrature of the self-convolution for l >= 2.
double bspline_realspace_unscaled(int order, double r);

}  // namespace fspif
