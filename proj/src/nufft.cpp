#include "fspif/nufft.hpp"

#include "fspif/fft.hpp"
#include "fspif/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <string>

namespace fspif {

void ModeGrid::validate() const {
  if (modes_per_dim <= 0 || modes_per_dim % 2 != 0) {
    throw InputError("modes_per_dim must be even and positive, got " +
                     std::to_string(modes_per_dim));
  }
  if (alpha != 1 && alpha != 2 && alpha != 4) {
    throw InputError("extension factor must be 1, 2 or 4, got " + std::to_string(alpha));
  }
  if (!(half_width > 0.0)) {
    throw InputError("half width must be positive");
  }
}

void check_points(std::span<const Vec2> points, const ModeGrid& grid) {
  const double h = grid.half_width;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const Vec2& p = points[j];
    if (!(std::abs(p.x) <= h) || !(std::abs(p.y) <= h)) {
      throw EscapedParticle(j, p);
    }
  }
}

namespace {

void check_tolerance(double tol) {
  if (!(tol >= kMinTolerance && tol <= kMaxTolerance)) {
    throw InputError("NUFFT tolerance must lie in [1e-14, 1e-4], got " + std::to_string(tol));
  }
}

int wrap(int l, int n) {
  const int r = l % n;
  return r < 0 ? r + n : r;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer make_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  std::fill_n(reinterpret_cast<double*>(p), 2 * n, 0.0);
  return FftwBuffer(p);
}

Complex* as_complex(fftw_complex* p) { return reinterpret_cast<Complex*>(p); }

}  // namespace

struct NufftPlan::Impl {
  int width = 0;
  int fine = 0;
  int extent = 0;
  double beta = 0.0;
  double dk = 0.0;
  std::vector<double> inv_correction;  // 1 / p(n) per 1D mode index
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(fftw_planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
  }

  double kernel(double z) const {
    const double s = 1.0 - z * z;
    return s > 0.0 ? std::exp(beta * (std::sqrt(s) - 1.0)) : 0.0;
  }

  // First fine-grid storage index touched by a point and its w weights along
  // one axis. Storage is offset by fine/2 so that x = 0 sits mid-array and
  // points of an extended grid (alpha >= 2) never wrap; the offset costs a
  // factor (-1)^n per mode, folded into inv_correction.
  int weights(double coord, double* out) const {
    const double u = coord * dk * fine / (2.0 * kPi);
    const double half = 0.5 * width;
    const int l0 = static_cast<int>(std::ceil(u - half));
    for (int i = 0; i < width; ++i) {
      out[i] = kernel((l0 + i - u) / half);
    }
    return l0 + fine / 2;
  }

  bool inside(int first) const { return first >= 0 && first + width <= fine; }

  std::size_t fine_size() const {
    return static_cast<std::size_t>(fine) * static_cast<std::size_t>(fine);
  }

  template <typename Strength>
  std::vector<Complex> type1(std::span<const Vec2> points, std::span<const Strength> strengths) const {
    auto buf = make_buffer(fine_size());
    Complex* g = as_complex(buf.get());
    std::vector<double> wx(width), wy(width);
    std::vector<int> iy(width);
    for (std::size_t j = 0; j < points.size(); ++j) {
      const int lx = weights(points[j].x, wx.data());
      const int ly = weights(points[j].y, wy.data());
      const Complex c = strengths[j];
      if (inside(lx) && inside(ly)) {
        for (int a = 0; a < width; ++a) {
          Complex* row = g + static_cast<std::size_t>(lx + a) * fine + ly;
          const Complex ca = c * wx[a];
          for (int b = 0; b < width; ++b) row[b] += ca * wy[b];
        }
        continue;
      }
      for (int b = 0; b < width; ++b) iy[b] = wrap(ly + b, fine);
      for (int a = 0; a < width; ++a) {
        Complex* row = g + static_cast<std::size_t>(wrap(lx + a, fine)) * fine;
        const Complex ca = c * wx[a];
        for (int b = 0; b < width; ++b) row[iy[b]] += ca * wy[b];
      }
    }
    fftw_execute_dft(forward, buf.get(), buf.get());

    std::vector<Complex> out(static_cast<std::size_t>(extent) * extent);
    const int half = extent / 2;
    for (int i = 0; i < extent; ++i) {
      const Complex* row = g + static_cast<std::size_t>(wrap(i - half, fine)) * fine;
      for (int k = 0; k < extent; ++k) {
        out[static_cast<std::size_t>(i) * extent + k] =
            row[wrap(k - half, fine)] * (inv_correction[i] * inv_correction[k]);
      }
    }
    return out;
  }

  FftwBuffer load_modes(std::span<const Complex> coeffs) const {
    auto buf = make_buffer(fine_size());
    Complex* g = as_complex(buf.get());
    const int half = extent / 2;
    for (int i = 0; i < extent; ++i) {
      Complex* row = g + static_cast<std::size_t>(wrap(i - half, fine)) * fine;
      for (int k = 0; k < extent; ++k) {
        row[wrap(k - half, fine)] =
            coeffs[static_cast<std::size_t>(i) * extent + k] * (inv_correction[i] * inv_correction[k]);
      }
    }
    fftw_execute_dft(backward, buf.get(), buf.get());
    return buf;
  }

  std::vector<std::vector<Complex>> type2(std::span<const std::span<const Complex>> coeffs,
                                          std::span<const Vec2> points) const {
    std::vector<FftwBuffer> grids;
    grids.reserve(coeffs.size());
    for (const auto& c : coeffs) grids.push_back(load_modes(c));

    std::vector<std::vector<Complex>> out(coeffs.size(), std::vector<Complex>(points.size()));
    parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
      std::vector<double> wx(width), wy(width);
      std::vector<int> ix(width), iy(width);
      for (std::size_t j = begin; j < end; ++j) {
        const int lx = weights(points[j].x, wx.data());
        const int ly = weights(points[j].y, wy.data());
        // Without wrap-around the column indices are a contiguous run.
        const bool contiguous = inside(lx) && inside(ly);
        for (int b = 0; b < width; ++b) {
          ix[b] = contiguous ? lx + b : wrap(lx + b, fine);
          iy[b] = contiguous ? ly + b : wrap(ly + b, fine);
        }
        for (std::size_t s = 0; s < grids.size(); ++s) {
          const Complex* g = as_complex(grids[s].get());
          double re = 0.0, im = 0.0;
          for (int a = 0; a < width; ++a) {
            const Complex* row = g + static_cast<std::size_t>(ix[a]) * fine;
            double rr = 0.0, ri = 0.0;
            if (contiguous) {
              const double* v = reinterpret_cast<const double*>(row + ly);
              for (int b = 0; b < width; ++b) {
                rr += v[2 * b] * wy[b];
                ri += v[2 * b + 1] * wy[b];
              }
            } else {
              for (int b = 0; b < width; ++b) {
                rr += row[iy[b]].real() * wy[b];
                ri += row[iy[b]].imag() * wy[b];
              }
            }
            re += rr * wx[a];
            im += ri * wx[a];
          }
          out[s][j] = {re, im};
        }
      }
    });
    return out;
  }
};

NufftPlan::NufftPlan(const ModeGrid& grid, double tol) : grid_(grid), tol_(tol) {
  grid_.validate();
  check_tolerance(tol);

  width_ = std::clamp(static_cast<int>(std::ceil(std::log10(1.0 / tol))) + 2, 2, 16);
  fine_ = std::max(2 * grid_.extent(), 2 * width_);
  if (fine_ % 2 != 0) ++fine_;

  impl_ = std::make_unique<Impl>();
  impl_->width = width_;
  impl_->fine = fine_;
  impl_->extent = grid_.extent();
  impl_->beta = 2.30 * width_;
  impl_->dk = grid_.spacing();

  // p(n) = (w/2) int_{-1}^{1} phi(z) cos(n pi w z / nf) dz, by composite
  // Gauss-Legendre on [0, 1].
  using Gauss = boost::math::quadrature::gauss<double, 30>;
  constexpr int kPanels = 8;
  impl_->inv_correction.resize(static_cast<std::size_t>(grid_.extent()));
  for (int i = 0; i < grid_.extent(); ++i) {
    const double n = i - grid_.extent() / 2;
    const double freq = kPi * n * width_ / fine_;
    double integral = 0.0;
    for (int p = 0; p < kPanels; ++p) {
      const double a = static_cast<double>(p) / kPanels;
      const double b = static_cast<double>(p + 1) / kPanels;
      integral += Gauss::integrate(
          [&](double z) { return impl_->kernel(z) * std::cos(freq * z); }, a, b);
    }
    const double sign = (i - grid_.extent() / 2) % 2 == 0 ? 1.0 : -1.0;
    impl_->inv_correction[static_cast<std::size_t>(i)] = sign / (width_ * integral);
  }

  auto scratch = make_buffer(impl_->fine_size());
  std::lock_guard lock(fftw_planner_mutex());
  impl_->forward = fftw_plan_dft_2d(fine_, fine_, scratch.get(), scratch.get(), FFTW_FORWARD,
                                    FFTW_ESTIMATE);
  impl_->backward = fftw_plan_dft_2d(fine_, fine_, scratch.get(), scratch.get(), FFTW_BACKWARD,
                                     FFTW_ESTIMATE);
}

NufftPlan::~NufftPlan() = default;
NufftPlan::NufftPlan(NufftPlan&&) noexcept = default;
NufftPlan& NufftPlan::operator=(NufftPlan&&) noexcept = default;

std::vector<Complex> NufftPlan::type1(std::span<const Vec2> points,
                                      std::span<const Complex> strengths) const {
  if (points.size() != strengths.size()) throw InputError("type1: points/strengths size mismatch");
  check_points(points, grid_);
  return impl_->type1(points, strengths);
}

std::vector<Complex> NufftPlan::type1(std::span<const Vec2> points,
                                      std::span<const double> strengths) const {
  if (points.size() != strengths.size()) throw InputError("type1: points/strengths size mismatch");
  check_points(points, grid_);
  return impl_->type1(points, strengths);
}

std::vector<Complex> NufftPlan::type2(std::span<const Complex> coeffs,
                                      std::span<const Vec2> points) const {
  const std::span<const Complex> one[] = {coeffs};
  return std::move(type2_many(one, points).front());
}

std::vector<std::vector<Complex>> NufftPlan::type2_many(
    std::span<const std::span<const Complex>> coeffs, std::span<const Vec2> points) const {
  for (const auto& c : coeffs) {
    if (c.size() != grid_.size()) throw InputError("type2: coefficient array does not match the mode grid");
  }
  check_points(points, grid_);
  return impl_->type2(coeffs, points);
}

std::vector<Complex> type1(std::span<const Vec2> points, std::span<const Complex> strengths,
                           const ModeGrid& grid, double tol) {
  return NufftPlan(grid, tol).type1(points, strengths);
}

std::vector<Complex> type2(std::span<const Complex> coeffs, std::span<const Vec2> points,
                           const ModeGrid& grid, double tol) {
  return NufftPlan(grid, tol).type2(coeffs, points);
}

namespace {

void check_direct_size(std::size_t points, const ModeGrid& grid) {
  if (static_cast<double>(points) * static_cast<double>(grid.size()) > kDirectSizeGuard) {
    throw InputError("direct sum too large: N_p * M exceeds 1e8");
  }
}

// exp(-i n dk x) for n over the extended index range.
std::vector<Complex> phases(double x, const ModeGrid& grid) {
  std::vector<Complex> out(static_cast<std::size_t>(grid.extent()));
  for (int i = 0; i < grid.extent(); ++i) {
    const double arg = -(i + grid.index_min()) * grid.spacing() * x;
    out[static_cast<std::size_t>(i)] = {std::cos(arg), std::sin(arg)};
  }
  return out;
}

}  // namespace

std::vector<Complex> type1_direct(std::span<const Vec2> points, std::span<const Complex> strengths,
                                  const ModeGrid& grid) {
  grid.validate();
  if (points.size() != strengths.size()) throw InputError("type1_direct: size mismatch");
  check_direct_size(points.size(), grid);
  check_points(points, grid);
  const int m = grid.extent();
  std::vector<Complex> out(grid.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto ex = phases(points[j].x, grid);
    const auto ey = phases(points[j].y, grid);
    for (int a = 0; a < m; ++a) {
      const Complex ca = strengths[j] * ex[static_cast<std::size_t>(a)];
      Complex* row = out.data() + static_cast<std::size_t>(a) * m;
      for (int b = 0; b < m; ++b) row[b] += ca * ey[static_cast<std::size_t>(b)];
    }
  }
  return out;
}

std::vector<Complex> type2_direct(std::span<const Complex> coeffs, std::span<const Vec2> points,
                                  const ModeGrid& grid) {
  grid.validate();
  if (coeffs.size() != grid.size()) throw InputError("type2_direct: coefficient size mismatch");
  check_direct_size(points.size(), grid);
  check_points(points, grid);
  const int m = grid.extent();
  std::vector<Complex> out(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    auto ex = phases(points[j].x, grid);
    auto ey = phases(points[j].y, grid);
    Complex acc{0.0, 0.0};
    for (int a = 0; a < m; ++a) {
      const Complex* row = coeffs.data() + static_cast<std::size_t>(a) * m;
      Complex r{0.0, 0.0};
      for (int b = 0; b < m; ++b) r += row[b] * std::conj(ey[static_cast<std::size_t>(b)]);
      acc += r * std::conj(ex[static_cast<std::size_t>(a)]);
    }
    out[j] = acc;
  }
  return out;
}

}  // namespace fspif
