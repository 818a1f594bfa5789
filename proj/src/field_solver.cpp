#include "fspif/field_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fspif {

ModeGrid FieldSolveConfig::grid() const {
  return ModeGrid{modes_per_dim, mode == SolverMode::DirectAlpha4 ? 4 : 2, 0.5};
}

void FieldSolveConfig::validate() const {
  grid().validate();
  shape.validate();
  green.require_covers(shape.support_radius);
  if (green.dims != 2) throw InputError("the field solver is two dimensional");
  if (!(tolerance >= kMinTolerance && tolerance <= kMaxTolerance)) {
    throw InputError("NUFFT tolerance must lie in [1e-14, 1e-4]");
  }
}

SpectralKernel SpectralKernel::direct(const ModeGrid& grid, const ShapeFunction& shape,
                                      const TruncatedGreen& green) {
  SpectralKernel k;
  k.grid = grid;
  k.potential.resize(grid.size());
  k.mollified.resize(grid.size());
  k.field_x.resize(grid.size());
  k.field_y.resize(grid.size());
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const Vec2 kv = grid.wavevector(f);
    const double s = norm(kv);
    const double g = green(s);
    const double sh = shape.fourier(s);
    k.potential[f] = g * sh;
    k.mollified[f] = g * sh * sh;
    if (!grid.unpaired(f)) {
      k.field_x[f] = -kv.x * k.mollified[f];
      k.field_y[f] = -kv.y * k.mollified[f];
    }
  }
  return k;
}

SpectralKernel SpectralKernel::from_precomputed(const PrecomputedKernels& kernels) {
  SpectralKernel k;
  k.grid = kernels.grid;
  k.potential = kernels.potential_multiplier;
  k.mollified = kernels.mollified_multiplier;
  k.field_x = kernels.field_multiplier_x;
  k.field_y = kernels.field_multiplier_y;
  return k;
}

namespace {

SpectralKernel build_kernel(const FieldSolveConfig& c, std::optional<PrecomputedKernels>& pre) {
  c.validate();
  if (c.mode == SolverMode::DirectAlpha4) {
    pre.reset();
    return SpectralKernel::direct(c.grid(), c.shape, c.green);
  }
  if (!pre) {
    pre = precompute_kernels(ModeGrid{c.modes_per_dim, 4, 0.5}, c.shape, c.green);
  } else if (pre->grid.modes_per_dim != c.modes_per_dim || pre->grid.alpha != 2) {
    throw InputError("precomputed kernels do not match the solver grid");
  }
  return SpectralKernel::from_precomputed(*pre);
}

}  // namespace

FreeSpaceSolver::FreeSpaceSolver(const FieldSolveConfig& config,
                                 std::optional<PrecomputedKernels> precomputed)
    : config_(config),
      precomputed_(std::move(precomputed)),
      kernel_(build_kernel(config_, precomputed_)),
      plan_(kernel_.grid, config_.tolerance) {}

std::vector<Complex> FreeSpaceSolver::deposit_modes(std::span<const Vec2> positions) const {
  const std::vector<double> ones(positions.size(), 1.0);
  return plan_.type1(positions, std::span<const double>(ones));
}

std::vector<Complex> FreeSpaceSolver::charge_modes(std::span<const Complex> xhat, double q) const {
  std::vector<Complex> out(xhat.begin(), xhat.end());
  const bool direct = config_.mode == SolverMode::DirectAlpha4;
  for (std::size_t f = 0; f < out.size(); ++f) {
    out[f] *= direct ? q * config_.shape.fourier(norm(grid().wavevector(f))) : q;
  }
  return out;
}

std::vector<Complex> FreeSpaceSolver::potential_modes(std::span<const Complex> xhat, double q) const {
  std::vector<Complex> out(xhat.size());
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = q * kernel_.potential[f] * xhat[f];
  return out;
}

std::vector<Complex> FreeSpaceSolver::mollified_modes(std::span<const Complex> xhat, double q) const {
  std::vector<Complex> out(xhat.size());
  for (std::size_t f = 0; f < out.size(); ++f) out[f] = q * kernel_.mollified[f] * xhat[f];
  return out;
}

double imaginary_residue(std::span<const Complex> values, std::span<const Complex> coeffs) {
  double bound = 0.0;
  for (const auto& c : coeffs) bound += std::abs(c);
  double worst = 0.0;
  for (const auto& v : values) worst = std::max(worst, std::abs(v.imag()));
  if (bound == 0.0) return worst == 0.0 ? 0.0 : INFINITY;
  return worst / bound;
}

std::vector<Vec2> FreeSpaceSolver::electric_field(std::span<const Complex> xhat, double q,
                                                  std::span<const Vec2> targets) const {
  if (xhat.size() != grid().size()) throw InputError("mode array does not match the solver grid");
  std::vector<Complex> cx(xhat.size()), cy(xhat.size());
  for (std::size_t f = 0; f < xhat.size(); ++f) {
    const Complex qx = Complex{0.0, q} * xhat[f];
    cx[f] = kernel_.field_x[f] * qx;
    cy[f] = kernel_.field_y[f] * qx;
  }
  const std::span<const Complex> sets[] = {cx, cy};
  const auto vals = plan_.type2_many(sets, targets);
  const double residue = std::max(imaginary_residue(vals[0], cx), imaginary_residue(vals[1], cy));
  if (residue > kResidueLimit) {
    throw ConsistencyError("imaginary residue " + std::to_string(residue) + " in the electric field");
  }
  const double w = grid().weight();
  std::vector<Vec2> out(targets.size());
  for (std::size_t j = 0; j < targets.size(); ++j) {
    out[j] = {w * vals[0][j].real(), w * vals[1][j].real()};
  }
  return out;
}

std::vector<double> FreeSpaceSolver::eval_modes(std::span<const Complex> coeffs,
                                                std::span<const Vec2> targets) const {
  const auto vals = plan_.type2(coeffs, targets);
  // Unpaired modes carry a genuine imaginary part (no conjugate partner);
  // only the paired part is checked.
  std::vector<Complex> paired(coeffs.begin(), coeffs.end());
  double unpaired_bound = 0.0;
  for (std::size_t f = 0; f < paired.size(); ++f) {
    if (grid().unpaired(f)) {
      unpaired_bound += std::abs(paired[f]);
      paired[f] = 0.0;
    }
  }
  double bound = unpaired_bound;
  for (const auto& c : paired) bound += std::abs(c);
  double worst = 0.0;
  for (const auto& v : vals) worst = std::max(worst, std::abs(v.imag()));
  if (bound > 0.0 && worst - unpaired_bound > kResidueLimit * bound) {
    throw ConsistencyError("imaginary residue in potential evaluation");
  }
  const double w = grid().weight();
  std::vector<double> out(vals.size());
  for (std::size_t j = 0; j < vals.size(); ++j) out[j] = w * vals[j].real();
  return out;
}

std::vector<double> FreeSpaceSolver::eval_potential(std::span<const Complex> xhat, double q,
                                                    std::span<const Vec2> targets, bool mollified) const {
  const auto coeffs = mollified ? mollified_modes(xhat, q) : potential_modes(xhat, q);
  return eval_modes(coeffs, targets);
}

double FreeSpaceSolver::potential_energy(std::span<const Complex> xhat, double q) const {
  double sum = 0.0;
  for (std::size_t f = 0; f < xhat.size(); ++f) {
    if (grid().unpaired(f)) continue;
    sum += kernel_.mollified[f] * std::norm(xhat[f]);
  }
  return 0.5 * q * q * grid().weight() * sum;
}

}  // namespace fspif
