#pragma once

// Free-space particle-in-cell baseline. Charges are spread to a collocated
// grid with the quadratic tensor-product b-spline, the grid potential and
// field come from the same truncated-Green's-function kernels as the
// gridless solver (sampled at node spacing, applied by zero-padded FFT
// convolution), and forces are gathered with the same stencil.

#include <span>
#include <vector>

#include "fspif/greens.hpp"
#include "fspif/types.hpp"

namespace fspif {

// N_g cell-centred nodes per dimension over the unit box:
// x_i = -1/2 + (i + 1/2) h, h = 1/N_g.
struct CollocatedGrid {
  int nodes_per_dim = 32;

  double spacing() const { return 1.0 / nodes_per_dim; }
  double node(int i) const { return -0.5 + (i + 0.5) * spacing(); }
  std::size_t size() const {
    return static_cast<std::size_t>(nodes_per_dim) * static_cast<std::size_t>(nodes_per_dim);
  }
  void validate() const;
};

// Quadratic b-spline weights of a coordinate on the node lattice: first
// node index and three weights. Throws if the stencil leaves the grid.
struct Stencil {
  int first = 0;
  double weight[3] = {0.0, 0.0, 0.0};
};
Stencil quadratic_stencil(double coord, const CollocatedGrid& grid);

struct GridField {
  std::vector<double> potential;
  std::vector<double> ex;
  std::vector<double> ey;
};

class PicSolver {
 public:
  PicSolver(const CollocatedGrid& grid, const TruncatedGreen& green);

  const CollocatedGrid& grid() const { return grid_; }

  // Charge density rho (per unit area) on the nodes; sum rho h^2 = q N_p.
  // Throws EscapedParticle when a stencil leaves the grid.
  std::vector<double> spread(std::span<const Vec2> positions, double q) const;
  // Same with one strength per particle.
  std::vector<double> spread(std::span<const Vec2> positions, std::span<const double> strengths) const;

  GridField solve(std::span<const double> density) const;

  std::vector<Vec2> gather(const GridField& field, std::span<const Vec2> positions) const;
  std::vector<double> gather(std::span<const double> nodal, std::span<const Vec2> positions) const;

  // (1/2) h^2 sum rho phi.
  double energy(std::span<const double> density, const GridField& field) const;

 private:
  CollocatedGrid grid_;
  RestrictedKernel kernel_;
};

}  // namespace fspif
