#include "fspif/pic.hpp"

#include <cmath>

#include "fspif/fft.hpp"

namespace fspif {

void CollocatedGrid::validate() const {
  if (nodes_per_dim < 4 || nodes_per_dim % 2 != 0) {
    throw InputError("PIC grid needs an even node count of at least 4");
  }
}

Stencil quadratic_stencil(double coord, const CollocatedGrid& grid) {
  const double u = (coord + 0.5) / grid.spacing() - 0.5;  // node coordinate
  const int centre = static_cast<int>(std::floor(u + 0.5));
  const double d = u - centre;
  Stencil s;
  s.first = centre - 1;
  if (s.first < 0 || s.first + 2 >= grid.nodes_per_dim) {
    throw InputError("stencil leaves the PIC grid");
  }
  s.weight[0] = 0.5 * (0.5 - d) * (0.5 - d);
  s.weight[1] = 0.75 - d * d;
  s.weight[2] = 0.5 * (0.5 + d) * (0.5 + d);
  return s;
}

PicSolver::PicSolver(const CollocatedGrid& grid, const TruncatedGreen& green) : grid_(grid) {
  grid_.validate();
  // Node differences stay inside the unit box diagonal, so no shape margin.
  green.require_covers(0.0);
  kernel_ = restrict_kernel(ModeGrid{grid_.nodes_per_dim, 4, 0.5}, [&](double s) { return green(s); });
}

namespace {

struct Stencil2 {
  Stencil x, y;
};

std::vector<Stencil2> stencils(std::span<const Vec2> positions, const CollocatedGrid& grid) {
  std::vector<Stencil2> out(positions.size());
  for (std::size_t j = 0; j < positions.size(); ++j) {
    try {
      out[j] = {quadratic_stencil(positions[j].x, grid), quadratic_stencil(positions[j].y, grid)};
    } catch (const InputError&) {
      throw EscapedParticle(j, positions[j]);
    }
  }
  return out;
}

}  // namespace

std::vector<double> PicSolver::spread(std::span<const Vec2> positions, double q) const {
  const std::vector<double> strengths(positions.size(), q);
  return spread(positions, strengths);
}

std::vector<double> PicSolver::spread(std::span<const Vec2> positions,
                                      std::span<const double> strengths) const {
  if (positions.size() != strengths.size()) throw InputError("spread: size mismatch");
  const int n = grid_.nodes_per_dim;
  const double inv_area = 1.0 / (grid_.spacing() * grid_.spacing());
  std::vector<double> rho(grid_.size(), 0.0);
  const auto st = stencils(positions, grid_);
  for (std::size_t j = 0; j < positions.size(); ++j) {
    for (int a = 0; a < 3; ++a) {
      const double wa = strengths[j] * inv_area * st[j].x.weight[a];
      double* row = rho.data() + static_cast<std::size_t>(st[j].x.first + a) * n;
      for (int b = 0; b < 3; ++b) row[st[j].y.first + b] += wa * st[j].y.weight[b];
    }
  }
  return rho;
}

GridField PicSolver::solve(std::span<const double> density) const {
  if (density.size() != grid_.size()) throw InputError("density does not match the PIC grid");
  const int n = grid_.nodes_per_dim;
  const int box = 2 * n;
  const double area = grid_.spacing() * grid_.spacing();

  // Node i sits at centred box index i - n/2; the rest is zero padding, so
  // the circular convolution on the 2n box is the aperiodic one.
  std::vector<Complex> q(static_cast<std::size_t>(box) * box);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      q[static_cast<std::size_t>(i + n / 2) * box + (k + n / 2)] = density[static_cast<std::size_t>(i) * n + k] * area;
    }
  }
  centered_dft2(q, box, -1);

  // FFT(T) = n^2 * multiplier, and the inverse DFT carries 1/box^2.
  const double scale = static_cast<double>(n) * n / (static_cast<double>(box) * box);
  std::vector<Complex> phi(q.size()), ex(q.size()), ey(q.size());
  for (std::size_t f = 0; f < q.size(); ++f) {
    phi[f] = scale * kernel_.potential_multiplier[f] * q[f];
    ex[f] = Complex{0.0, scale * kernel_.field_multiplier_x[f]} * q[f];
    ey[f] = Complex{0.0, scale * kernel_.field_multiplier_y[f]} * q[f];
  }
  centered_dft2(phi, box, +1);
  centered_dft2(ex, box, +1);
  centered_dft2(ey, box, +1);

  GridField out;
  out.potential.resize(grid_.size());
  out.ex.resize(grid_.size());
  out.ey.resize(grid_.size());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const std::size_t src = static_cast<std::size_t>(i + n / 2) * box + (k + n / 2);
      const std::size_t dst = static_cast<std::size_t>(i) * n + k;
      out.potential[dst] = phi[src].real();
      out.ex[dst] = ex[src].real();
      out.ey[dst] = ey[src].real();
    }
  }
  return out;
}

std::vector<double> PicSolver::gather(std::span<const double> nodal, std::span<const Vec2> positions) const {
  if (nodal.size() != grid_.size()) throw InputError("nodal array does not match the PIC grid");
  const int n = grid_.nodes_per_dim;
  const auto st = stencils(positions, grid_);
  std::vector<double> out(positions.size());
  for (std::size_t j = 0; j < positions.size(); ++j) {
    double acc = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double* row = nodal.data() + static_cast<std::size_t>(st[j].x.first + a) * n;
      double r = 0.0;
      for (int b = 0; b < 3; ++b) r += row[st[j].y.first + b] * st[j].y.weight[b];
      acc += r * st[j].x.weight[a];
    }
    out[j] = acc;
  }
  return out;
}

std::vector<Vec2> PicSolver::gather(const GridField& field, std::span<const Vec2> positions) const {
  const auto ex = gather(field.ex, positions);
  const auto ey = gather(field.ey, positions);
  std::vector<Vec2> out(positions.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = {ex[j], ey[j]};
  return out;
}

double PicSolver::energy(std::span<const double> density, const GridField& field) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) sum += density[i] * field.potential[i];
  return 0.5 * grid_.spacing() * grid_.spacing() * sum;
}

}  // namespace fspif
