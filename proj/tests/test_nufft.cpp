#include <doctest.h>

#include <algorithm>
#include <random>

#include "fspif/fft.hpp"
#include "fspif/nufft.hpp"
#include "fspif/parallel.hpp"

using namespace fspif;

namespace {

std::vector<Vec2> random_points(std::size_t n, std::uint64_t seed, double h = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-h, h);
  std::vector<Vec2> p(n);
  for (auto& x : p) {
    const double a = u(rng);
    x = {a, u(rng)};
  }
  return p;
}

std::vector<Complex> random_complex(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  for (auto& c : v) {
    const double re = g(rng);
    c = {re, g(rng)};
  }
  return v;
}

double max_abs(std::span<const Complex> v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

double max_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("mode grid indexing") {
  const ModeGrid g{8, 2, 0.5};
  CHECK(g.extent() == 16);
  CHECK(g.period() == doctest::Approx(2.0));
  CHECK(g.flat(-8, -8) == 0);
  CHECK(g.flat(0, 0) == 8 * 16 + 8);
  CHECK(g.nx_of(g.flat(3, -5)) == 3);
  CHECK(g.ny_of(g.flat(3, -5)) == -5);
  CHECK(g.unpaired(g.flat(-8, 2)));
  CHECK_FALSE(g.unpaired(g.flat(7, 7)));
  CHECK_THROWS_AS(ModeGrid({7, 2, 0.5}).validate(), InputError);
  CHECK_THROWS_AS(ModeGrid({8, 3, 0.5}).validate(), InputError);
}

TEST_CASE("type 1 and type 2 match direct sums") {
  const auto pts = random_points(1000, 11);
  const auto c = random_complex(pts.size(), 12);
  for (int alpha : {1, 2, 4}) {
    const ModeGrid grid{32 / alpha, alpha, 0.5};
    CAPTURE(alpha);
    for (double tol : {1e-12, 1e-8, 1e-6}) {
      CAPTURE(tol);
      const NufftPlan plan(grid, tol);
      const auto fast1 = plan.type1(pts, c);
      const auto ref1 = type1_direct(pts, c, grid);
      CHECK(max_diff(fast1, ref1) / max_abs(ref1) <= 10 * tol);

      const auto f = random_complex(grid.size(), 13);
      const auto fast2 = plan.type2(f, pts);
      const auto ref2 = type2_direct(f, pts, grid);
      CHECK(max_diff(fast2, ref2) / max_abs(ref2) <= 10 * tol);
    }
  }
}

TEST_CASE("type 1 with real strengths equals the complex path") {
  const ModeGrid grid{16, 2, 0.5};
  const auto pts = random_points(300, 3);
  std::vector<double> q(pts.size());
  std::vector<Complex> qc(pts.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = std::sin(1.0 + i);
    qc[i] = q[i];
  }
  const NufftPlan plan(grid, 1e-10);
  CHECK(max_diff(plan.type1(pts, std::span<const double>(q)), plan.type1(pts, qc)) == 0.0);
}

TEST_CASE("the zero mode is the plain sum of strengths") {
  const ModeGrid grid{32, 4, 0.5};
  const auto pts = random_points(5000, 5);
  const std::vector<double> ones(pts.size(), 1.0);
  const auto xhat = NufftPlan(grid, 1e-12).type1(pts, std::span<const double>(ones));
  CHECK(std::abs(xhat[grid.flat(0, 0)] - Complex(5000.0, 0.0)) / 5000.0 <= 1e-13);
}

TEST_CASE("type 2 is the adjoint of type 1") {
  const ModeGrid grid{16, 2, 0.5};
  const auto pts = random_points(400, 21);
  const auto c = random_complex(pts.size(), 22);
  const auto f = random_complex(grid.size(), 23);
  const NufftPlan plan(grid, 1e-12);
  const auto a = plan.type1(pts, c);
  const auto b = plan.type2(f, pts);
  Complex lhs{}, rhs{};
  for (std::size_t k = 0; k < f.size(); ++k) lhs += std::conj(f[k]) * a[k];
  for (std::size_t j = 0; j < c.size(); ++j) rhs += std::conj(b[j]) * c[j];
  CHECK(std::abs(lhs - rhs) / std::abs(lhs) <= 1e-11);
}

TEST_CASE("translation multiplies modes by a phase") {
  const ModeGrid grid{16, 4, 0.5};
  auto pts = random_points(200, 31, 0.4);
  const auto c = random_complex(pts.size(), 32);
  const Vec2 shift{0.05, -0.07};
  auto moved = pts;
  for (auto& p : moved) p += shift;
  const NufftPlan plan(grid, 1e-12);
  const auto a = plan.type1(pts, c);
  const auto b = plan.type1(moved, c);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Complex phase = std::exp(Complex(0.0, -dot(grid.wavevector(k), shift)));
    worst = std::max(worst, std::abs(b[k] - phase * a[k]));
  }
  CHECK(worst / max_abs(a) <= 1e-11);
}

TEST_CASE("real strengths give conjugate-symmetric modes") {
  const ModeGrid grid{16, 2, 0.5};
  const auto pts = random_points(500, 41);
  const std::vector<double> q(pts.size(), 0.3);
  const auto xhat = NufftPlan(grid, 1e-12).type1(pts, std::span<const double>(q));
  double worst = 0.0;
  const int h = grid.extent() / 2;
  for (int nx = -h + 1; nx < h; ++nx) {
    for (int ny = -h + 1; ny < h; ++ny) {
      worst = std::max(worst, std::abs(xhat[grid.flat(nx, ny)] - std::conj(xhat[grid.flat(-nx, -ny)])));
    }
  }
  CHECK(worst <= 1e-14 * max_abs(xhat));
}

TEST_CASE("linearity in the strengths") {
  const ModeGrid grid{16, 2, 0.5};
  const auto pts = random_points(300, 51);
  const auto c1 = random_complex(pts.size(), 52);
  const auto c2 = random_complex(pts.size(), 53);
  std::vector<Complex> mix(pts.size());
  const Complex a{0.7, -1.1};
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * c1[i] + c2[i];
  const NufftPlan plan(grid, 1e-12);
  const auto f1 = plan.type1(pts, c1);
  const auto f2 = plan.type1(pts, c2);
  const auto fm = plan.type1(pts, mix);
  double worst = 0.0;
  for (std::size_t k = 0; k < fm.size(); ++k) worst = std::max(worst, std::abs(fm[k] - a * f1[k] - f2[k]));
  CHECK(worst <= 1e-12 * max_abs(fm));
}

TEST_CASE("points outside the box are rejected") {
  const ModeGrid grid{16, 2, 0.5};
  std::vector<Vec2> pts{{0.1, 0.2}, {0.5000001, 0.0}};
  const std::vector<Complex> c(2, 1.0);
  CHECK_THROWS_AS(NufftPlan(grid, 1e-8).type1(pts, c), EscapedParticle);
  try {
    check_points(pts, grid);
  } catch (const EscapedParticle& e) {
    CHECK(e.index() == 1);
  }
  CHECK_THROWS_AS(NufftPlan(grid, 1e-20), InputError);
}

TEST_CASE("type 2 is independent of the thread count") {
  const ModeGrid grid{16, 4, 0.5};
  const auto pts = random_points(3000, 61);
  const auto f = random_complex(grid.size(), 62);
  const NufftPlan plan(grid, 1e-10);
  set_max_threads(1);
  const auto one = plan.type2(f, pts);
  set_max_threads(4);
  const auto four = plan.type2(f, pts);
  set_max_threads(1);
  CHECK(max_diff(one, four) == 0.0);
}

TEST_CASE("centered DFT matches its definition") {
  const int n = 6;
  auto data = random_complex(n * n, 71);
  const auto in = data;
  centered_dft2(data, n, -1);
  double worst = 0.0;
  for (int a = -n / 2; a < n / 2; ++a) {
    for (int b = -n / 2; b < n / 2; ++b) {
      Complex s{};
      for (int i = -n / 2; i < n / 2; ++i) {
        for (int j = -n / 2; j < n / 2; ++j) {
          s += in[(i + n / 2) * n + (j + n / 2)] * std::exp(Complex(0.0, -2.0 * kPi * (i * a + j * b) / n));
        }
      }
      worst = std::max(worst, std::abs(s - data[(a + n / 2) * n + (b + n / 2)]));
    }
  }
  CHECK(worst <= 1e-13);
}
