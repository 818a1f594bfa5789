#pragma once

// Gridless free-space field solve. Particles enter only through the
// exponential sum X^(k) = sum_j exp(-i k.X_j); every field quantity is a
// per-mode multiplier applied to X^ followed by a type-2 evaluation,
//
//     phi(x) = w sum_k q g^(k) S^(k)   X^(k) e^{ik.x}        raw potential
//     psi(x) = w sum_k q g^(k) S^(k)^2 X^(k) e^{ik.x}        mollified potential
//     E(x)   = w sum_k (-ik) q g^ S^^2 X^(k) e^{ik.x}        mollified field
//
// with w the mode weight of the grid. Direct mode evaluates this on the
// alpha = 4 grid; precomputed mode swaps in the alpha = 2 multipliers of the
// restricted real-space kernels.

#include <optional>
#include <span>
#include <vector>

#include "fspif/greens.hpp"
#include "fspif/nufft.hpp"
#include "fspif/shapes.hpp"

namespace fspif {

enum class SolverMode { DirectAlpha4, PrecomputedAlpha2 };

struct FieldSolveConfig {
  int modes_per_dim = 32;
  ShapeFunction shape = ShapeFunction::radial_bspline(2, 1.0 / 32.0);
  TruncatedGreen green{2, 1.5};
  SolverMode mode = SolverMode::DirectAlpha4;
  double tolerance = kDefaultTolerance;

  // The mode grid the particles are transformed on (alpha 4 or 2 by mode).
  ModeGrid grid() const;
  void validate() const;
};

// Effective per-mode multipliers on the solve grid (weight not included).
struct SpectralKernel {
  ModeGrid grid;
  std::vector<double> potential;  // g^ S^, real and even
  std::vector<double> mollified;  // g^ S^^2
  // The field multiplier is i * field_{x,y}; direct values are -k g^ S^^2.
  // Unpaired modes are zero.
  std::vector<double> field_x;
  std::vector<double> field_y;

  static SpectralKernel direct(const ModeGrid& grid, const ShapeFunction& shape,
                               const TruncatedGreen& green);
  static SpectralKernel from_precomputed(const PrecomputedKernels& kernels);
};

class FreeSpaceSolver {
 public:
  // In precomputed mode the kernels are built here unless supplied.
  explicit FreeSpaceSolver(const FieldSolveConfig& config,
                           std::optional<PrecomputedKernels> precomputed = std::nullopt);

  const FieldSolveConfig& config() const { return config_; }
  const ModeGrid& grid() const { return kernel_.grid; }
  const SpectralKernel& kernel() const { return kernel_; }
  const NufftPlan& plan() const { return plan_; }
  // Present in precomputed mode.
  const std::optional<PrecomputedKernels>& precomputed() const { return precomputed_; }

  // X^(k) with unit strengths. Throws EscapedParticle.
  std::vector<Complex> deposit_modes(std::span<const Vec2> positions) const;

  // rho^(k) = q S^(k) X^(k) (direct mode) or q X^(k) (precomputed, where the
  // shape lives in the multipliers).
  std::vector<Complex> charge_modes(std::span<const Complex> xhat, double q) const;
  // phi^(k) = q g^ S^ X^.
  std::vector<Complex> potential_modes(std::span<const Complex> xhat, double q) const;
  // psi^(k) = q g^ S^^2 X^.
  std::vector<Complex> mollified_modes(std::span<const Complex> xhat, double q) const;

  // Mollified electric field at the targets. Throws ConsistencyError when
  // the discarded imaginary part exceeds 1e-8 of the magnitude bound.
  std::vector<Vec2> electric_field(std::span<const Complex> xhat, double q,
                                   std::span<const Vec2> targets) const;

  // phi (mollified = false) or psi (mollified = true) at the targets.
  std::vector<double> eval_potential(std::span<const Complex> xhat, double q,
                                     std::span<const Vec2> targets, bool mollified) const;
  // Real values of w sum_k coeffs(k) e^{ik.x}.
  std::vector<double> eval_modes(std::span<const Complex> coeffs, std::span<const Vec2> targets) const;

  // U_E = (1/2) q^2 w sum_k g^ S^^2 |X^(k)|^2 over the paired modes.
  double potential_energy(std::span<const Complex> xhat, double q) const;

 private:
  FieldSolveConfig config_;
  std::optional<PrecomputedKernels> precomputed_;
  SpectralKernel kernel_;
  NufftPlan plan_;
};

// Largest |Im| / bound over a batch of type-2 outputs; the bound is
// sum_k |coeff_k|, so the ratio is scale free and defined for zero fields.
double imaginary_residue(std::span<const Complex> values, std::span<const Complex> coeffs);

inline constexpr double kResidueLimit = 1e-8;

}  // namespace fspif
