#include "fspif/greens.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "fspif/fft.hpp"
#include "fspif/special.hpp"
#include "fspif/types.hpp"

namespace fspif {

double ghat(int dims, double truncation_radius, double s) {
  const double L = truncation_radius;
  if (!(L > 0.0)) throw InputError("truncation radius must be positive");
  s = std::abs(s);
  const double x = L * s;
  if (dims == 2) {
    const double logL = std::log(L);
    if (x < kGhatSeriesThreshold) {
      const double x2 = x * x;
      return L * L *
             ((0.25 - 0.5 * logL) + x2 * (-1.0 / 64.0 + logL / 16.0) +
              x2 * x2 * (1.0 / 2304.0 - logL / 384.0));
    }
    return special::one_minus_j0(x) / (s * s) - L * logL * special::bessel_j1(x) / s;
  }
  if (dims == 3) {
    const double half = 0.5 * x;
    const double sinc = half < kGhatSeriesThreshold ? 1.0 - half * half / 6.0 : std::sin(half) / half;
    return 0.5 * L * L * sinc * sinc;
  }
  throw InputError("ghat: dimension must be 2 or 3");
}

double min_truncation_radius(int dims, double shape_radius) {
  if (dims != 2 && dims != 3) throw InputError("min_truncation_radius: dimension must be 2 or 3");
  if (shape_radius < 0.0) throw InputError("shape radius must be non-negative");
  return std::sqrt(static_cast<double>(dims)) + 2.0 * shape_radius;
}

void TruncatedGreen::require_covers(double shape_radius) const {
  const double needed = min_truncation_radius(dims, shape_radius);
  if (truncation_radius < needed * (1.0 - 1e-14)) {
    throw InputError("truncation radius L=" + std::to_string(truncation_radius) +
                     " is below sqrt(d) + 2R = " + std::to_string(needed));
  }
}

namespace {

// Box of extent 2N cut from the 4N grid: the index offset of m = -N.
std::vector<double> restrict_box(const std::vector<Complex>& full, int n_modes, bool odd) {
  const int big = 4 * n_modes;
  const int box = 2 * n_modes;
  const int offset = n_modes;  // full index of m = -N is -N + 2N
  std::vector<double> out(static_cast<std::size_t>(box) * box);
  for (int a = 0; a < box; ++a) {
    for (int b = 0; b < box; ++b) {
      double v = full[static_cast<std::size_t>(a + offset) * big + (b + offset)].real();
      // x = -1 is identified with x = +1 in the 2x periodic box; an odd
      // kernel has no single value there.
      if (odd && (a == 0 || b == 0)) v = 0.0;
      out[static_cast<std::size_t>(a) * box + b] = v;
    }
  }
  return out;
}

// FFT of a restricted box kernel, scaled so the result approximates the
// continuous transform: (1/N^2) sum_m T(x_m) exp(-i k.x_m).
std::vector<Complex> box_transform(const std::vector<double>& kernel, int n_modes) {
  const int box = 2 * n_modes;
  std::vector<Complex> c(kernel.begin(), kernel.end());
  centered_dft2(c, box, -1);
  const double scale = 1.0 / (static_cast<double>(n_modes) * n_modes);
  for (auto& v : c) v *= scale;
  return c;
}

}  // namespace

RestrictedKernel restrict_kernel(const ModeGrid& grid,
                                 const std::function<double(double)>& radial_multiplier) {
  grid.validate();
  if (grid.alpha != 4) {
    throw InputError("kernel precomputation needs the alpha = 4 grid to resolve ghat oscillations");
  }
  const int n_modes = grid.modes_per_dim;
  const int big = grid.extent();
  const double w = grid.weight();

  std::vector<Complex> pot(grid.size()), fx(grid.size()), fy(grid.size());
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const Vec2 k = grid.wavevector(f);
    const double m = w * radial_multiplier(norm(k));
    pot[f] = m;
    if (!grid.unpaired(f)) {
      fx[f] = Complex{0.0, -k.x * m};
      fy[f] = Complex{0.0, -k.y * m};
    }
  }
  centered_dft2(pot, big, +1);
  centered_dft2(fx, big, +1);
  centered_dft2(fy, big, +1);

  RestrictedKernel out;
  out.potential = restrict_box(pot, n_modes, false);
  out.field_x = restrict_box(fx, n_modes, true);
  out.field_y = restrict_box(fy, n_modes, true);

  const ModeGrid coarse{n_modes, 2, grid.half_width};
  const auto mp = box_transform(out.potential, n_modes);
  const auto mx = box_transform(out.field_x, n_modes);
  const auto my = box_transform(out.field_y, n_modes);
  out.potential_multiplier.resize(coarse.size());
  out.field_multiplier_x.resize(coarse.size());
  out.field_multiplier_y.resize(coarse.size());
  for (std::size_t f = 0; f < coarse.size(); ++f) {
    out.potential_multiplier[f] = mp[f].real();
    if (!coarse.unpaired(f)) {
      out.field_multiplier_x[f] = mx[f].imag();
      out.field_multiplier_y[f] = my[f].imag();
    }
  }
  return out;
}

PrecomputedKernels precompute_kernels(const ModeGrid& grid, const ShapeFunction& shape,
                                      const TruncatedGreen& green) {
  shape.validate();
  green.require_covers(shape.support_radius);
  if (green.dims != 2) throw InputError("kernel precomputation is implemented for d = 2");

  auto raw = restrict_kernel(grid, [&](double s) { return green(s) * shape.fourier(s); });
  auto mollified = restrict_kernel(grid, [&](double s) {
    const double sh = shape.fourier(s);
    return green(s) * sh * sh;
  });

  PrecomputedKernels k;
  k.grid = ModeGrid{grid.modes_per_dim, 2, grid.half_width};
  k.truncation_radius = green.truncation_radius;
  k.shape = shape.describe();
  k.potential_kernel = std::move(raw.potential);
  k.potential_multiplier = std::move(raw.potential_multiplier);
  k.mollified_kernel = std::move(mollified.potential);
  k.mollified_multiplier = std::move(mollified.potential_multiplier);
  k.field_kernel_x = std::move(mollified.field_x);
  k.field_kernel_y = std::move(mollified.field_y);
  k.field_multiplier_x = std::move(mollified.field_multiplier_x);
  k.field_multiplier_y = std::move(mollified.field_multiplier_y);
  return k;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "kernel cache I/O assumes a little-endian host");

constexpr char kMagic[8] = {'F', 'S', 'P', 'I', 'F', 'K', 'R', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw InputError("kernel cache truncated");
  return v;
}

void put_table(std::ostream& os, const std::vector<double>& t) {
  put<std::uint64_t>(os, t.size());
  os.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
}

std::vector<double> get_table(std::istream& is, std::size_t expected) {
  const auto n = get<std::uint64_t>(is);
  if (n != expected) throw InputError("kernel cache table has the wrong size");
  std::vector<double> t(n);
  is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw InputError("kernel cache truncated");
  return t;
}

}  // namespace

void save_kernels(const PrecomputedKernels& k, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open kernel cache for writing: " + path.string());
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, 2);
  put<double>(os, k.truncation_radius);
  put<std::uint32_t>(os, 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(k.grid.alpha));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(k.grid.modes_per_dim));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(k.shape.size()));
  os.write(k.shape.data(), static_cast<std::streamsize>(k.shape.size()));
  for (const auto* t : {&k.potential_kernel, &k.mollified_kernel, &k.field_kernel_x, &k.field_kernel_y,
                        &k.potential_multiplier, &k.mollified_multiplier, &k.field_multiplier_x,
                        &k.field_multiplier_y}) {
    put_table(os, *t);
  }
  if (!os) throw InputError("failed writing kernel cache: " + path.string());
}

PrecomputedKernels load_kernels(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open kernel cache: " + path.string());
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw InputError("not a kernel cache file");
  if (get<std::uint32_t>(is) != kVersion) throw InputError("unsupported kernel cache version");
  if (get<std::uint32_t>(is) != 2) throw InputError("kernel cache dimension must be 2");
  PrecomputedKernels k;
  k.truncation_radius = get<double>(is);
  if (get<std::uint32_t>(is) != 4) throw InputError("kernel cache source grid must be alpha = 4");
  k.grid.alpha = static_cast<int>(get<std::uint32_t>(is));
  k.grid.modes_per_dim = static_cast<int>(get<std::uint32_t>(is));
  k.grid.validate();
  const auto len = get<std::uint32_t>(is);
  k.shape.resize(len);
  is.read(k.shape.data(), len);
  const std::size_t n = k.grid.size();
  for (auto* t : {&k.potential_kernel, &k.mollified_kernel, &k.field_kernel_x, &k.field_kernel_y,
                  &k.potential_multiplier, &k.mollified_multiplier, &k.field_multiplier_x,
                  &k.field_multiplier_y}) {
    *t = get_table(is, n);
  }
  return k;
}

}  // namespace fspif
