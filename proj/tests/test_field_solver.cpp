#include <doctest.h>

#include <random>

#include "fspif/dynamics.hpp"
#include "fspif/field_solver.hpp"
#include "fspif/scenario.hpp"

using namespace fspif;

namespace {

std::vector<Vec2> cloud(std::size_t n, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, spread);
  std::vector<Vec2> p(n);
  for (auto& x : p) {
    do {
      const double a = g(rng);
      x = {a, g(rng)};
    } while (norm(x) > 0.4);
  }
  return p;
}

FieldSolveConfig config(int modes, SolverMode mode, double L = 1.5) {
  FieldSolveConfig c;
  c.modes_per_dim = modes;
  c.shape = ShapeFunction::radial_bspline(2, 1.0 / modes);
  c.green = TruncatedGreen{2, L};
  c.mode = mode;
  return c;
}

// A Gaussian shape wide enough that S^ has decayed to ~1e-9 by the last
// mode, so truncation of the mode sum is negligible and closed forms apply.
FieldSolveConfig resolved(SolverMode mode, double L = 2.05) {
  FieldSolveConfig c;
  c.modes_per_dim = 32;
  c.shape = ShapeFunction::truncated_gaussian(0.05, 0.3);
  c.green = TruncatedGreen{2, L};
  c.mode = mode;
  return c;
}

// Field of S * S for a unit charge at the origin, S an (untruncated) Gaussian.
Vec2 gaussian_pair_field(Vec2 x, double sigma) {
  const double r2 = norm2(x);
  return x * ((1.0 - std::exp(-r2 / (4.0 * sigma * sigma))) / (2.0 * kPi * r2));
}

double max_field_diff(std::span<const Vec2> a, std::span<const Vec2> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, norm(a[i] - b[i]));
  return m;
}

double max_field(std::span<const Vec2> a) {
  double m = 0.0;
  for (const auto& e : a) m = std::max(m, norm(e));
  return m;
}

}  // namespace

TEST_CASE("grid follows the solver mode") {
  CHECK(config(16, SolverMode::DirectAlpha4).grid().alpha == 4);
  CHECK(config(16, SolverMode::PrecomputedAlpha2).grid().alpha == 2);
  CHECK_THROWS_AS(config(16, SolverMode::DirectAlpha4, 1.3).validate(), InputError);
}

TEST_CASE("field and potential of a single particle match the closed form") {
  const double sigma = 0.05;
  {
    const FreeSpaceSolver solver(resolved(SolverMode::DirectAlpha4));
    const std::vector<Vec2> src{{0.1, -0.05}};
    const auto xhat = solver.deposit_modes(src);
    const std::vector<Vec2> targets{{0.3, 0.1}, {-0.4, -0.4}, {0.1, 0.4}, {0.45, -0.45}, {0.12, -0.06}};
    const auto e = solver.electric_field(xhat, 2.0, targets);
    const auto psi = solver.eval_potential(xhat, 1.0, targets, true);
    double field_err = 0.0, pot_err = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const Vec2 d = targets[i] - src[0];
      field_err = std::max(field_err, norm(e[i] - 2.0 * gaussian_pair_field(d, sigma)));
      // S * S is a Gaussian of width sigma sqrt 2.
      const std::vector<Vec2> origin{{0.0, 0.0}};
      pot_err = std::max(pot_err, std::abs(psi[i] - gaussian_potential(d, origin, sigma * std::sqrt(2.0))));
    }
    MESSAGE("single particle: field error " << field_err << ", potential error " << pot_err);
    CHECK(field_err <= 1e-7);
    CHECK(pot_err <= 1e-7);
  }
}

TEST_CASE("precomputed kernels are exact at the collocation points") {
  // A source at the centre has flat modes, so the alpha = 2 series evaluated
  // on the 2N_m grid reproduces the restricted kernel samples themselves.
  const int n = 32;
  const FreeSpaceSolver direct(config(n, SolverMode::DirectAlpha4, 1.6));
  const FreeSpaceSolver pre(config(n, SolverMode::PrecomputedAlpha2, 1.6));
  const std::vector<Vec2> src{{0.0, 0.0}};
  std::vector<Vec2> targets;
  for (int i = -n / 2 + 1; i < n / 2; ++i) {
    for (int j = -n / 2 + 1; j < n / 2; ++j) {
      if (i != 0 || j != 0) targets.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  const auto pd = direct.eval_potential(direct.deposit_modes(src), 1.0, targets, false);
  const auto pp = pre.eval_potential(pre.deposit_modes(src), 1.0, targets, false);
  const auto ed = direct.electric_field(direct.deposit_modes(src), 1.0, targets);
  const auto ep = pre.electric_field(pre.deposit_modes(src), 1.0, targets);
  double pot = 0.0, pot_size = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    pot = std::max(pot, std::abs(pd[i] - pp[i]));
    pot_size = std::max(pot_size, std::abs(pd[i]));
  }
  MESSAGE("collocation: potential " << pot / pot_size << ", field " << max_field_diff(ed, ep) / max_field(ed));
  CHECK(pot <= 1e-10 * pot_size);
  // The field multipliers drop the unpaired Nyquist row, which the odd
  // kernel does not need along its own axis but does along the other.
  CHECK(max_field_diff(ed, ep) <= 1e-2 * max_field(ed));

  // Off the collocation grid the restriction aliases.
  const std::vector<Vec2> off{{0.3 + 0.5 / n, 0.1 + 0.5 / n}};
  const double rel = std::abs(direct.eval_potential(direct.deposit_modes(src), 1.0, off, false)[0] -
                              pre.eval_potential(pre.deposit_modes(src), 1.0, off, false)[0]);
  MESSAGE("off-grid potential difference " << rel);
  CHECK(rel > 1e-10);
}

TEST_CASE("under-resolved shapes: the far field is still close to a point charge") {
  // R = 1/N_m: S^ is far from decayed at the last mode, which leaves a
  // percent-level Gibbs error in the field.
  const FreeSpaceSolver solver(config(32, SolverMode::DirectAlpha4));
  const std::vector<Vec2> src{{0.1, -0.05}};
  const std::vector<Vec2> targets{{0.3, 0.1}, {-0.4, -0.4}};
  const auto e = solver.electric_field(solver.deposit_modes(src), 1.0, targets);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Vec2 d = targets[i] - src[0];
    const Vec2 exact = d * (1.0 / (2.0 * kPi * norm2(d)));
    CHECK(norm(e[i] - exact) <= 0.1 * norm(exact));
  }
}

TEST_CASE("two particles push each other apart with equal and opposite forces") {
  const FreeSpaceSolver solver(config(32, SolverMode::DirectAlpha4));
  const std::vector<Vec2> p{{-0.1, 0.05}, {0.15, -0.02}};
  const auto e = solver.electric_field(solver.deposit_modes(p), 1.0, p);
  CHECK(norm(e[0] + e[1]) <= 1e-10 * norm(e[0]));
  CHECK(dot(e[1], p[1] - p[0]) > 0.0);
}

TEST_CASE("action and reaction: the total force vanishes") {
  for (auto mode : {SolverMode::DirectAlpha4, SolverMode::PrecomputedAlpha2}) {
    const FreeSpaceSolver solver(config(32, mode));
    const auto p = cloud(2000, 8, 0.08);
    const double q = 1.0 / p.size();
    const auto e = solver.electric_field(solver.deposit_modes(p), q, p);
    Vec2 total{};
    double scale = 0.0;
    for (const auto& f : e) {
      total += q * f;
      scale += q * norm(f);
    }
    CHECK(norm(total) <= 1e-10 * scale);
  }
}

TEST_CASE("charge invariant: the zero mode carries the total charge") {
  for (auto mode : {SolverMode::DirectAlpha4, SolverMode::PrecomputedAlpha2}) {
    const FreeSpaceSolver solver(config(32, mode));
    const auto p = cloud(3000, 9, 0.1);
    const double q = 1.0 / p.size();
    const auto rho = solver.charge_modes(solver.deposit_modes(p), q);
    const auto k0 = rho[solver.grid().flat(0, 0)];
    CHECK(std::abs(k0.real() - 1.0) <= 1e-13);
    CHECK(std::abs(k0.imag()) <= 1e-13);
  }
}

TEST_CASE("electrostatic energy: spectral form equals the charge-potential pairing") {
  const FreeSpaceSolver solver(config(32, SolverMode::DirectAlpha4));
  const auto p = cloud(1500, 10, 0.1);
  const double q = 1.0 / p.size();
  const auto xhat = solver.deposit_modes(p);
  const double direct = solver.potential_energy(xhat, q);
  const double dual =
      electrostatic_energy_dual(solver.grid(), solver.charge_modes(xhat, q), solver.potential_modes(xhat, q));
  const auto& c = solver.config();
  const double generic = electrostatic_energy(solver.grid(), xhat, q, c.shape, c.green);
  CHECK(std::abs(direct - dual) <= 1e-13 * std::abs(direct));
  CHECK(std::abs(direct - generic) <= 1e-13 * std::abs(direct));
}

TEST_CASE("electrostatic energy equals half the charge-weighted mollified potential") {
  // Only when the unpaired edge modes (left out of the energy) carry nothing.
  const FreeSpaceSolver solver(resolved(SolverMode::DirectAlpha4));
  const auto p = cloud(1500, 11, 0.1);
  const double q = 1.0 / p.size();
  const auto xhat = solver.deposit_modes(p);
  const double u = solver.potential_energy(xhat, q);
  const auto psi = solver.eval_potential(xhat, q, p, true);
  double pair = 0.0;
  for (double v : psi) pair += 0.5 * q * v;
  CHECK(std::abs(u - pair) <= 1e-10 * std::abs(u));
}

TEST_CASE("solutions do not depend on the truncation radius") {
  const auto p = cloud(1000, 12, 0.1);
  const double q = 1.0 / p.size();
  for (auto mode : {SolverMode::DirectAlpha4, SolverMode::PrecomputedAlpha2}) {
    const FreeSpaceSolver a(resolved(mode, 2.05));
    const FreeSpaceSolver b(resolved(mode, 2.25));
    const auto xa = a.deposit_modes(p);
    const auto xb = b.deposit_modes(p);
    const double rel = max_field_diff(a.electric_field(xa, q, p), b.electric_field(xb, q, p)) /
                       max_field(a.electric_field(xa, q, p));
    const auto pa = a.eval_potential(xa, q, p, true);
    const auto pb = b.eval_potential(xb, q, p, true);
    double worst = 0.0, size = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      worst = std::max(worst, std::abs(pa[i] - pb[i]));
      size = std::max(size, std::abs(pa[i]));
    }
    MESSAGE("L independence, mode " << static_cast<int>(mode) << ": field " << rel << ", potential "
                                    << worst / size);
    CHECK(rel <= 1e-8);
    CHECK(worst <= 1e-8 * size);
  }
}

TEST_CASE("precomputed and direct solvers agree at arbitrary targets to within aliasing") {
  const auto p = cloud(1000, 13, 0.1);
  const double q = 1.0 / p.size();
  const FreeSpaceSolver a(config(32, SolverMode::DirectAlpha4));
  const FreeSpaceSolver b(config(32, SolverMode::PrecomputedAlpha2));
  const auto ea = a.electric_field(a.deposit_modes(p), q, p);
  const auto eb = b.electric_field(b.deposit_modes(p), q, p);
  MESSAGE("direct vs precomputed: " << max_field_diff(ea, eb) / max_field(ea));
  CHECK(max_field_diff(ea, eb) / max_field(ea) <= 1e-2);
}

TEST_CASE("supplied kernels are used as is") {
  const auto c = config(16, SolverMode::PrecomputedAlpha2, 1.6);
  auto k = precompute_kernels(ModeGrid{16, 4, 0.5}, c.shape, c.green);
  const FreeSpaceSolver own(c);
  const FreeSpaceSolver given(c, k);
  CHECK(own.kernel().potential == given.kernel().potential);
  CHECK(given.precomputed().has_value());
}

TEST_CASE("a non-Hermitian spectrum trips the imaginary residue check") {
  const FreeSpaceSolver solver(config(16, SolverMode::DirectAlpha4, 1.6));
  std::vector<Complex> coeffs(solver.grid().size());
  coeffs[solver.grid().flat(3, 1)] = 1.0;
  const std::vector<Vec2> t{{0.1, 0.2}};
  CHECK_THROWS_AS(solver.eval_modes(coeffs, t), ConsistencyError);
  std::vector<Complex> ok(solver.grid().size());
  ok[solver.grid().flat(3, 1)] = 1.0;
  ok[solver.grid().flat(-3, -1)] = 1.0;
  CHECK_NOTHROW(solver.eval_modes(ok, t));
  CHECK(imaginary_residue(std::vector<Complex>{}, std::vector<Complex>{}) == 0.0);
}
