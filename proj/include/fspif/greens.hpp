#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fspif/nufft.hpp"
#include "fspif/shapes.hpp"

namespace fspif {

// Below L*s = 1e-3 the 2D transform is evaluated from its Taylor series.
inline constexpr double kGhatSeriesThreshold = 1e-3;

// Fourier transform of the Laplace Green's function truncated to a ball of
// radius L:
//   d = 2:  (1 - J0(Ls)) / s^2 - L log(L) J1(Ls) / s
//   d = 3:  2 (sin(Ls/2) / s)^2
double ghat(int dims, double truncation_radius, double s);

// Smallest L for which g^L reproduces the free-space field on the unit box
// when sources are mollified by a shape of radius R: sqrt(d) + 2R.
double min_truncation_radius(int dims, double shape_radius);

struct TruncatedGreen {
  int dims = 2;
  double truncation_radius = 1.5;

  double operator()(double s) const { return ghat(dims, truncation_radius, s); }
  // Throws InputError when L < sqrt(d) + 2R.
  void require_covers(double shape_radius) const;
};

// Real-space kernels computed once on the 4x extended grid and restricted to
// the 2x box [-1, 1)^2 (spacing 1/N_m, index 0 <-> x = -1), together with the
// alpha = 2 spectral multipliers obtained by FFT of the restricted kernels.
// Multipliers are stored divided by the alpha = 2 mode weight, so they play
// the role of g^(k) S^(k) in the direct path.
struct PrecomputedKernels {
  ModeGrid grid;  // alpha = 2
  double truncation_radius = 0.0;
  std::string shape;

  std::vector<double> potential_kernel;  // T1 = g^L * S
  std::vector<double> mollified_kernel;  // g^L * S * S
  std::vector<double> field_kernel_x;    // T2 = -grad(g^L * S * S), odd
  std::vector<double> field_kernel_y;

  std::vector<double> potential_multiplier;  // real, even
  std::vector<double> mollified_multiplier;  // real, even
  std::vector<double> field_multiplier_x;    // the multiplier is i * value
  std::vector<double> field_multiplier_y;

  int box_extent() const { return grid.extent(); }
};

// `grid` must be the alpha = 4 grid of the direct solver.
PrecomputedKernels precompute_kernels(const ModeGrid& grid, const ShapeFunction& shape,
                                      const TruncatedGreen& green);

// Same construction for an arbitrary radial multiplier m(|k|) (the Green's
// function times whatever mollifier the caller needs). Returns the restricted
// kernel of m and of -grad m, with their alpha = 2 multipliers.
struct RestrictedKernel {
  std::vector<double> potential;
  std::vector<double> potential_multiplier;
  std::vector<double> field_x, field_y;
  std::vector<double> field_multiplier_x, field_multiplier_y;
};
RestrictedKernel restrict_kernel(const ModeGrid& grid,
                                 const std::function<double(double)>& radial_multiplier);

// Kernel cache container, little-endian:
//   char[8] "FSPIFKRN" | u32 version (=1) | u32 dims | f64 L | u32 alpha_source (=4)
//   | u32 alpha (=2) | u32 N_m | u32 len | char[len] shape descriptor
//   | 8 x ( u64 count | f64[count] )   in the member order of PrecomputedKernels.
void save_kernels(const PrecomputedKernels& kernels, const std::filesystem::path& path);
PrecomputedKernels load_kernels(const std::filesystem::path& path);

}  // namespace fspif
