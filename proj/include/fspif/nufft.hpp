#pragma once

// Type-1 / type-2 nonuniform FFTs between particle positions in the unit box
// and a centered Fourier mode grid, plus direct-summation reference paths.
//
// Conventions (used everywhere in the library):
//   type1:  f(k) = sum_j c_j exp(-i k.X_j)
//   type2:  v_j  = sum_k f(k) exp(+i k.X_j)
// Both are unnormalized. Internally the forward FFT is unnormalized and the
// inverse FFT would carry 1/M; the gridding code only ever needs the
// unnormalized pair, so no 1/M factor appears in these routines.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fspif/types.hpp"

namespace fspif {

// The d = 2 Fourier mode set of an alpha-times extended box of half width h.
// Mode indices n run over [-alpha*N_m/2, alpha*N_m/2 - 1] per dimension and
// map to k = n * 2 pi / (2 h alpha). Coefficient arrays are stored row-major
// with the x index slowest, index 0 <-> n = -alpha*N_m/2.
struct ModeGrid {
  int modes_per_dim = 32;
  int alpha = 4;
  double half_width = 0.5;

  static constexpr int kDims = 2;

  int extent() const { return alpha * modes_per_dim; }
  std::size_t size() const {
    return static_cast<std::size_t>(extent()) * static_cast<std::size_t>(extent());
  }
  double period() const { return 2.0 * half_width * alpha; }
  double spacing() const { return 2.0 * kPi / period(); }
  // (dk / 2 pi)^d: turns a mode sum into an inverse continuous transform.
  double weight() const { return 1.0 / (period() * period()); }
  int index_min() const { return -extent() / 2; }

  std::size_t flat(int nx, int ny) const {
    const int m = extent();
    return static_cast<std::size_t>(nx + m / 2) * static_cast<std::size_t>(m) +
           static_cast<std::size_t>(ny + m / 2);
  }
  int nx_of(std::size_t flat) const {
    return static_cast<int>(flat / static_cast<std::size_t>(extent())) + index_min();
  }
  int ny_of(std::size_t flat) const {
    return static_cast<int>(flat % static_cast<std::size_t>(extent())) + index_min();
  }
  Vec2 wavevector(std::size_t flat) const {
    return {nx_of(flat) * spacing(), ny_of(flat) * spacing()};
  }
  // Modes in the row/column n = -alpha*N_m/2 have no +k partner.
  bool unpaired(std::size_t flat) const {
    return nx_of(flat) == index_min() || ny_of(flat) == index_min();
  }

  void validate() const;
};

inline constexpr double kMinTolerance = 1e-14;
inline constexpr double kMaxTolerance = 1e-4;
inline constexpr double kDefaultTolerance = 1e-12;
// Upper bound on N_p * M for the direct reference sums.
inline constexpr double kDirectSizeGuard = 1e8;

// Throws EscapedParticle for the first point outside [-h, h]^2.
void check_points(std::span<const Vec2> points, const ModeGrid& grid);

// Gridding NUFFT with an "exponential of semicircle" spreading kernel on a
// 2x oversampled fine grid. A plan is immutable after construction and its
// transforms are reentrant: scratch buffers are per call.
class NufftPlan {
 public:
  NufftPlan(const ModeGrid& grid, double tol);
  ~NufftPlan();
  NufftPlan(NufftPlan&&) noexcept;
  NufftPlan& operator=(NufftPlan&&) noexcept;
  NufftPlan(const NufftPlan&) = delete;
  NufftPlan& operator=(const NufftPlan&) = delete;

  const ModeGrid& grid() const { return grid_; }
  double tolerance() const { return tol_; }
  int kernel_width() const { return width_; }
  int fine_size() const { return fine_; }

  std::vector<Complex> type1(std::span<const Vec2> points,
                             std::span<const Complex> strengths) const;
  // Real strengths, the common case for charge deposition.
  std::vector<Complex> type1(std::span<const Vec2> points,
                             std::span<const double> strengths) const;

  std::vector<Complex> type2(std::span<const Complex> coeffs,
                             std::span<const Vec2> points) const;
  // Several coefficient sets evaluated at the same points; spreading weights
  // are computed once per point.
  std::vector<std::vector<Complex>> type2_many(
      std::span<const std::span<const Complex>> coeffs,
      std::span<const Vec2> points) const;

 private:
  struct Impl;

  ModeGrid grid_;
  double tol_;
  int width_;
  int fine_;
  std::unique_ptr<Impl> impl_;
};

std::vector<Complex> type1(std::span<const Vec2> points,
                           std::span<const Complex> strengths,
                           const ModeGrid& grid, double tol);
std::vector<Complex> type2(std::span<const Complex> coeffs,
                           std::span<const Vec2> points, const ModeGrid& grid,
                           double tol);

// O(N_p M) reference sums, guarded by kDirectSizeGuard.
std::vector<Complex> type1_direct(std::span<const Vec2> points,
                                  std::span<const Complex> strengths,
                                  const ModeGrid& grid);
std::vector<Complex> type2_direct(std::span<const Complex> coeffs,
                                  std::span<const Vec2> points,
                                  const ModeGrid& grid);

}  // namespace fspif
