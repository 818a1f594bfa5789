#include <doctest.h>

#include <filesystem>

#include "fspif/io.hpp"
#include "fspif/parallel.hpp"
#include "fspif/scenario.hpp"

using namespace fspif;

namespace {

ScenarioConfig small_beam(const std::string& extra = "") {
  return ScenarioConfig::from_json_text(R"({"scenario":"beam_free_space","seed":5,"particles":400,"modes":16,
                                            "dt":1e-3,"steps":40)" +
                                        extra + "}");
}

}  // namespace

TEST_CASE("config parsing fills defaults") {
  const auto c = small_beam();
  CHECK(c.seed == 5);
  CHECK(c.particles == 400);
  CHECK(c.shape.kind == ShapeKind::RadialBSpline);
  CHECK(c.shape.order == 2);
  CHECK(c.shape.support_radius == doctest::Approx(1.0 / 16));
  CHECK(c.solver == SolverMode::DirectAlpha4);
  CHECK(c.method == Method::Pif);
  CHECK(c.uses_boris());
  CHECK(c.field_config().grid().alpha == 4);
}

TEST_CASE("config parsing rejects bad input") {
  CHECK_THROWS_AS(ScenarioConfig::from_json_text(R"({"scenario":"beam_free_space"})"), InputError);
  CHECK_THROWS_AS(small_beam(R"(,"colour":"red")"), InputError);
  CHECK_THROWS_AS(small_beam(R"(,"shape":{"kind":"bspline","wobble":1})"), InputError);
  CHECK_THROWS_AS(small_beam(R"(,"solver":"magic")"), InputError);
  CHECK_THROWS_AS(small_beam(R"(,"dt":"fast")"), InputError);
  CHECK_THROWS_AS(small_beam(R"(,"modes":15)"), InputError);
  CHECK_THROWS_AS(small_beam(R"(,"truncation_radius":1.2)"), InputError);
  CHECK_THROWS_AS(small_beam(R"(,"tolerance":1e-2)"), InputError);
  CHECK_THROWS_AS(small_beam(R"(,"pusher":"leapfrog")"), InputError);
  CHECK_THROWS_AS(ScenarioConfig::from_json_text("{not json"), InputError);
  CHECK_THROWS_AS(ScenarioConfig::load("/nonexistent/config.json"), InputError);
  CHECK_THROWS_AS(ScenarioConfig::from_json_text(
                      R"({"scenario":"beam_dirichlet","seed":1,"boundary":{"data":"tabulated","nodes":16,"values":[1,2]}})"),
                  InputError);
}

TEST_CASE("beam initialization is reproducible and has the requested moments") {
  auto c = small_beam();
  c.particles = 20000;
  const auto a = init_beam(c);
  const auto b = init_beam(c);
  CHECK(a.positions == b.positions);
  CHECK(a.velocities == b.velocities);
  CHECK(a.charge == doctest::Approx(1.0 / 20000));
  CHECK(a.mass == a.charge);
  c.seed = 6;
  CHECK(init_beam(c).positions != a.positions);

  double x2 = 0.0, y2 = 0.0, v2 = 0.0, rmax = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    x2 += a.positions[j].x * a.positions[j].x;
    y2 += a.positions[j].y * a.positions[j].y;
    v2 += norm2(a.velocities[j]);
    rmax = std::max(rmax, norm(a.positions[j]));
  }
  const double n = static_cast<double>(a.size());
  // n(x, y) ~ exp(-x^2 / sigma_x^2): variance sigma^2 / 2 per axis.
  CHECK(x2 / n == doctest::Approx(0.5 / 900.0).epsilon(0.05));
  CHECK(y2 / n == doctest::Approx(0.5 / 100.0).epsilon(0.05));
  CHECK(v2 / n == doctest::Approx(2.0).epsilon(0.05));
  CHECK(rmax <= 0.4);
}

TEST_CASE("without a magnetic field the total momentum is conserved") {
  const auto c = small_beam(R"(,"bz":0,"pusher":"leapfrog","diagnostic_every":10)");
  const auto out = run(c);
  REQUIRE(out.rows.size() == 5);
  for (const auto& r : out.rows) {
    CHECK(std::abs(r.momentum - out.rows.front().momentum) <= 1e-12);
    CHECK(r.charge_residual <= 1e-13);
  }
  CHECK(out.max_relative_energy_deviation() < 1e-3);
}

TEST_CASE("runs are independent of the thread count") {
  const auto c = small_beam(R"(,"steps":10)");
  set_max_threads(1);
  const auto one = run(c);
  set_max_threads(3);
  const auto three = run(c);
  set_max_threads(1);
  REQUIRE(one.rows.size() == three.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].total == three.rows[i].total);
    CHECK(one.rows[i].x2 == three.rows[i].x2);
  }
}

TEST_CASE("escape policy") {
  // Unconfined particles with unit thermal speed leave the box within a second.
  const auto abort = small_beam(R"(,"bz":0,"dt":0.02,"steps":100)");
  try {
    (void)run(abort);
    FAIL("expected RunError");
  } catch (const RunError& e) {
    CHECK(e.kind() == "escaped_particle");
    CHECK(e.step() > 0);
  }
  const auto freeze = small_beam(R"(,"bz":0,"dt":0.02,"steps":100,"escape_policy":"freeze")");
  const auto out = run(freeze);
  CHECK(out.rows.back().frozen > 0);
}

TEST_CASE("output files") {
  const auto dir = std::filesystem::temp_directory_path() / "fspif_test_run";
  std::filesystem::remove_all(dir);
  const auto c = small_beam(R"(,"steps":20,"diagnostic_every":5,"snapshot_every":10,"snapshot_resolution":32)");
  const auto out = run(c, dir);
  CHECK(std::filesystem::exists(dir / "diagnostics.csv"));
  CHECK(std::filesystem::exists(dir / "phi_0000010.bin"));
  CHECK(std::filesystem::exists(dir / "phi_0000020.csv"));
  const auto snap = read_snapshot(dir / "phi_0000010.bin");
  CHECK(snap.dims == std::vector<std::uint64_t>{32, 32});
  std::filesystem::remove_all(dir);
}

TEST_CASE("kernel cache is written once and reused") {
  const auto path = std::filesystem::temp_directory_path() / "fspif_test_cache.bin";
  std::filesystem::remove(path);
  const auto c = small_beam(R"(,"steps":5,"solver":"precomputed","kernel_cache":")" + path.string() + "\"");
  const auto first = run(c);
  REQUIRE(std::filesystem::exists(path));
  const auto second = run(c);
  CHECK(first.rows.back().total == second.rows.back().total);
  std::filesystem::remove(path);
}

TEST_CASE("Dirichlet and PIC runs") {
  const auto d = ScenarioConfig::from_json_text(R"({"scenario":"beam_dirichlet","seed":2,"particles":300,"modes":16,
      "dt":1e-3,"steps":10,"boundary":{"radius":0.5,"nodes":64,"data":"linear_y"}})");
  const auto out = run(d);
  CHECK(out.rows.back().harmonic != 0.0);
  CHECK(out.max_relative_energy_deviation() < 1e-2);

  auto p = small_beam(R"(,"method":"pic","steps":10)");
  const auto pic = run(p);
  CHECK(pic.rows.back().charge_residual <= 1e-13);
}

TEST_CASE("Fourier interpolation of a single cosine") {
  const ModeGrid g{8, 2, 0.5};
  std::vector<Complex> c(g.size());
  // w (c_k e^{ikx} + c_-k e^{-ikx}) with k = 2 pi / P * 3 along x.
  c[g.flat(3, 0)] = 0.5 / g.weight();
  c[g.flat(-3, 0)] = 0.5 / g.weight();
  const auto v = fourier_interpolate(g, c, 16);
  const double k = 3.0 * g.spacing();
  for (int i = 0; i < 16; ++i) {
    CHECK(v[static_cast<std::size_t>(i) * 16 + 5] == doctest::Approx(std::cos(k * (-0.5 + i / 16.0))));
  }
  CHECK_THROWS_AS(fourier_interpolate(g, c, 3), InputError);
}

TEST_CASE("Gaussian potential is continuous at the source and logarithmic far away") {
  const std::vector<Vec2> s{{0.0, 0.0}};
  const double sigma = 0.01;
  CHECK(gaussian_potential({1e-7, 0.0}, s, sigma) == doctest::Approx(gaussian_potential({0.0, 0.0}, s, sigma)));
  CHECK(gaussian_potential({0.3, 0.0}, s, sigma) == doctest::Approx(-std::log(0.3) / (2.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("log-log slope fit") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.5));
  CHECK(fit_loglog_slope(x, y) == doctest::Approx(-2.5));
  CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), InputError);
}

TEST_CASE("Laplace study converges") {
  auto c = ScenarioConfig::from_json_text(
      R"({"scenario":"laplace_manufactured","seed":0,"study":{"nodes":[16,32,64],"laplace_grid":32}})");
  const auto rows = laplace_convergence_study(c);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].max_error < rows[0].max_error);
  CHECK(rows[2].max_error < rows[1].max_error);
}

TEST_CASE("shipped configs parse") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(FSPIF_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(ScenarioConfig::load(entry.path()).validate());
    ++count;
  }
  CHECK(count > 0);
}
