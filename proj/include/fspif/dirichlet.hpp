#pragma once

// Harmonic correction for Dirichlet data on a disk of radius r_b centred at
// the origin. Poisson's formula discretized by the trapezoidal rule on N_B
// equispaced nodes z_j:
//
//   phi^H(x) = (1/N_B) sum_j (r_b^2 - |x|^2) / |z_j - x|^2  f_j
//   E^H(x)   = (2/N_B) sum_j [x |z_j - x|^2 - (r_b^2 - |x|^2)(z_j - x)] / |z_j - x|^4  f_j
//
// The rule is only used at targets with |x| <= 0.9 r_b.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fspif/field_solver.hpp"
#include "fspif/types.hpp"

namespace fspif {

inline constexpr double kSafeRadiusFraction = 0.9;

struct DiskBoundary {
  double radius = 0.5;
  int nodes = 128;
  std::vector<double> data;  // f(z_j), j = 0 .. N_B - 1

  // Samples f at the nodes.
  static DiskBoundary sampled(double radius, int nodes, const std::function<double(Vec2)>& f);

  Vec2 node(int j) const;
  std::vector<Vec2> node_positions() const;
  void validate() const;
};

// Throw NearBoundaryError outside the safe disk.
double harmonic_potential(Vec2 x, double radius, std::span<const double> data);
Vec2 harmonic_field(Vec2 x, double radius, std::span<const double> data);

inline double harmonic_potential(Vec2 x, const DiskBoundary& b) {
  return harmonic_potential(x, b.radius, b.data);
}
inline Vec2 harmonic_field(Vec2 x, const DiskBoundary& b) { return harmonic_field(x, b.radius, b.data); }

struct DirichletCorrection {
  std::vector<double> residual;  // (f - psi^P)(z_j)
  std::vector<Vec2> field;       // E^H at each particle
  double harmonic_energy = 0.0;  // (q/2) sum_j psi^H(X_j)
  std::size_t margin_violations = 0;  // particles with |X| > r_b - 2R
};

// Boundary residual from the mollified free-space potential, then E^H and
// U_E^H at the particles. The free-space part of the force is not included.
DirichletCorrection compose_dirichlet(const FreeSpaceSolver& solver, std::span<const Complex> xhat,
                                      double q, std::span<const Vec2> positions,
                                      const DiskBoundary& boundary);

}  // namespace fspif
