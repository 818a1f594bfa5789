#include <doctest.h>

#include "fspif/dirichlet.hpp"

using namespace fspif;

namespace {

std::vector<Vec2> interior_grid(double radius, int n) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 x{-radius + (i + 0.5) * 2.0 * radius / n, -radius + (j + 0.5) * 2.0 * radius / n};
      if (norm(x) <= kSafeRadiusFraction * radius) pts.push_back(x);
    }
  }
  return pts;
}

}  // namespace

TEST_CASE("boundary nodes are equispaced on the circle") {
  const auto b = DiskBoundary::sampled(0.5, 8, [](Vec2 z) { return z.x; });
  CHECK(b.node(0).x == doctest::Approx(0.5));
  CHECK(b.node(2).y == doctest::Approx(0.5));
  CHECK(b.data[4] == doctest::Approx(-0.5));
  CHECK_THROWS_AS(DiskBoundary::sampled(0.5, 4, [](Vec2) { return 0.0; }).validate(), InputError);
}

TEST_CASE("constant data gives a constant potential and no field") {
  const auto b = DiskBoundary::sampled(1.0, 256, [](Vec2) { return 3.0; });
  CHECK(harmonic_potential({0.0, 0.0}, b) == doctest::Approx(3.0).epsilon(1e-15));
  double pot = 0.0, field = 0.0;
  for (const auto& x : interior_grid(1.0, 64)) {
    pot = std::max(pot, std::abs(harmonic_potential(x, b) - 3.0));
    field = std::max(field, norm(harmonic_field(x, b)));
  }
  CHECK(pot <= 1e-10);
  // The field kernel aliases like N_B (|x| / r_b)^N_B, one power of N_B worse.
  CHECK(field <= 1e-8);
  // Fewer nodes: still exact at the centre, with an interior error that
  // decays like (|x| / r_b)^N_B.
  const auto coarse = DiskBoundary::sampled(1.0, 32, [](Vec2) { return 1.0; });
  CHECK(harmonic_potential({0.0, 0.0}, coarse) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(harmonic_potential({0.5, 0.0}, coarse) - 1.0) <= 1e-8);
}

TEST_CASE("linear data f = y gives E = (0, -1)") {
  // N_B = 256 leaves ~1e-9 in the field at |x| = 0.9; 512 nodes push it below 1e-10.
  const auto b = DiskBoundary::sampled(1.0, 512, [](Vec2 z) { return z.y; });
  double pot = 0.0, field = 0.0;
  for (const auto& x : interior_grid(1.0, 64)) {
    pot = std::max(pot, std::abs(harmonic_potential(x, b) - x.y));
    field = std::max(field, norm(harmonic_field(x, b) - Vec2{0.0, -1.0}));
  }
  CHECK(pot <= 1e-10);
  CHECK(field <= 1e-10);
}

TEST_CASE("field is minus the gradient of the potential") {
  const auto b = DiskBoundary::sampled(0.5, 64, [](Vec2 z) { return std::exp(4.0 * z.x) * std::cos(3.0 * z.y); });
  const double h = 1e-5;
  for (Vec2 x : {Vec2{0.1, 0.2}, Vec2{-0.3, 0.1}, Vec2{0.0, -0.4}}) {
    const double dx = (harmonic_potential(x + Vec2{h, 0}, b) - harmonic_potential(x - Vec2{h, 0}, b)) / (2 * h);
    const double dy = (harmonic_potential(x + Vec2{0, h}, b) - harmonic_potential(x - Vec2{0, h}, b)) / (2 * h);
    const Vec2 e = harmonic_field(x, b);
    CHECK(e.x == doctest::Approx(-dx).epsilon(1e-7));
    CHECK(e.y == doctest::Approx(-dy).epsilon(1e-7));
  }
}

TEST_CASE("targets near the boundary are refused") {
  const auto b = DiskBoundary::sampled(0.5, 64, [](Vec2) { return 0.0; });
  CHECK_NOTHROW(harmonic_potential({0.449, 0.0}, b));
  CHECK_THROWS_AS(harmonic_potential({0.46, 0.0}, b), NearBoundaryError);
  CHECK_THROWS_AS(harmonic_field({0.0, -0.47}, b), NearBoundaryError);
}

TEST_CASE("grounded disk: correction matches the image charge") {
  // Resolved Gaussian shape, so the free-space potential on the wall is
  // accurate to well below the tolerance used here.
  FieldSolveConfig c;
  c.modes_per_dim = 48;
  c.shape = ShapeFunction::truncated_gaussian(0.025, 0.15);
  c.green = TruncatedGreen{2, 1.75};
  const FreeSpaceSolver solver(c);
  const double a = 0.5;
  const double q = 0.7;
  const std::vector<Vec2> p{{0.1, 0.05}};
  const auto b = DiskBoundary::sampled(a, 128, [](Vec2) { return 0.0; });
  const auto corr = compose_dirichlet(solver, solver.deposit_modes(p), q, p, b);

  const Vec2 x0 = p[0];
  const Vec2 image = x0 * (a * a / norm2(x0));
  const Vec2 d = x0 - image;
  const Vec2 exact_field = d * (-q / (2.0 * kPi * norm2(d)));
  const double exact_phi = q / (2.0 * kPi) * std::log(norm(x0) * norm(d) / a);
  CHECK(norm(corr.field[0] - exact_field) <= 1e-6 * norm(exact_field));
  CHECK(corr.harmonic_energy == doctest::Approx(0.5 * q * exact_phi).epsilon(1e-6));
  CHECK(corr.margin_violations == 0);
  CHECK(corr.residual.size() == 128);

  const std::vector<Vec2> edge{{0.48, 0.0}};
  // Inside the safe disk but closer than 2R to the wall: counted, not fatal.
  const std::vector<Vec2> close{{0.44, 0.0}};
  CHECK(compose_dirichlet(solver, solver.deposit_modes(close), q, close, b).margin_violations == 1);
  CHECK_THROWS_AS(compose_dirichlet(solver, solver.deposit_modes(edge), q, edge, b), NearBoundaryError);
}
