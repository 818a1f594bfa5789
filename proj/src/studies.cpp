#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <random>

#include "fspif/fft.hpp"
#include "fspif/scenario.hpp"

namespace fspif {

std::vector<double> fourier_interpolate(const ModeGrid& grid, std::span<const Complex> coeffs, int resolution) {
  if (coeffs.size() != grid.size()) throw InputError("mode array does not match the grid");
  const double padded_real = grid.period() * resolution;
  const int padded = static_cast<int>(std::lround(padded_real));
  if (std::abs(padded - padded_real) > 1e-9 || padded % 2 != 0 || padded < grid.extent()) {
    throw InputError("resolution incompatible with the mode grid for Fourier interpolation");
  }
  const int m = grid.extent();
  const int shift = padded / 2 - m / 2;
  std::vector<Complex> buf(static_cast<std::size_t>(padded) * padded);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      buf[static_cast<std::size_t>(a + shift) * padded + (b + shift)] =
          grid.weight() * coeffs[static_cast<std::size_t>(a) * m + b];
    }
  }
  centered_dft2(buf, padded, +1);
  // x = -1/2 + i/resolution is centred index i - resolution/2 on the padded grid.
  std::vector<double> out(static_cast<std::size_t>(resolution) * resolution);
  const int first = padded / 2 - resolution / 2;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      out[static_cast<std::size_t>(i) * resolution + j] =
          buf[static_cast<std::size_t>(first + i) * padded + (first + j)].real();
    }
  }
  return out;
}

double gaussian_potential(Vec2 x, std::span<const Vec2> sources, double sigma) {
  double sum = 0.0;
  for (const auto& s : sources) {
    const double r2 = norm2(x - s);
    const double u = r2 / (2.0 * sigma * sigma);
    if (u == 0.0) {
      // log r^2 + E1(u) -> log(2 sigma^2) - gamma as r -> 0
      sum += std::log(2.0 * sigma * sigma) - 0.57721566490153286;
    } else if (u > 700.0) {
      sum += std::log(r2);
    } else {
      sum += std::log(r2) + boost::math::expint(1, u);
    }
  }
  return -sum / (4.0 * kPi);
}

std::vector<Vec2> poisson_sources(const ScenarioConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Vec2> p(static_cast<std::size_t>(config.study.particles));
  for (auto& x : p) {
    const double px = u(rng);
    x = {px, u(rng)};
  }
  return p;
}

std::vector<PoissonRow> poisson_convergence_study(const ScenarioConfig& config) {
  if (config.shape.kind != ShapeKind::TruncatedGaussian) {
    throw InputError("the Poisson study needs a Gaussian shape (its potential is known in closed form)");
  }
  const auto sources = poisson_sources(config);
  const int res = config.study.resolution;
  std::vector<double> exact(static_cast<std::size_t>(res) * res);
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const Vec2 x{-0.5 + static_cast<double>(i) / res, -0.5 + static_cast<double>(j) / res};
      exact[static_cast<std::size_t>(i) * res + j] = gaussian_potential(x, sources, config.shape.sigma);
    }
  }
  auto rms_error = [&](SolverMode mode, int modes) {
    ScenarioConfig c = config;
    c.modes = modes;
    c.solver = mode;
    const FreeSpaceSolver solver(c.field_config());
    const auto xhat = solver.deposit_modes(sources);
    const auto phi = fourier_interpolate(solver.grid(), solver.potential_modes(xhat, 1.0), res);
    double sum = 0.0;
    for (std::size_t f = 0; f < phi.size(); ++f) sum += (phi[f] - exact[f]) * (phi[f] - exact[f]);
    return std::sqrt(sum / static_cast<double>(phi.size()));
  };
  std::vector<PoissonRow> rows;
  for (int m : config.study.modes) {
    rows.push_back({m, rms_error(SolverMode::DirectAlpha4, m), rms_error(SolverMode::PrecomputedAlpha2, m)});
  }
  return rows;
}

std::vector<LaplaceRow> laplace_convergence_study(const ScenarioConfig& config) {
  const int n = config.study.laplace_grid;
  auto u = [](Vec2 x) { return x.x * x.x - x.y * x.y + 2.0; };
  std::vector<LaplaceRow> rows;
  for (int nodes : config.study.nodes) {
    const auto boundary = DiskBoundary::sampled(1.0, nodes, u);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec2 x{-1.0 + (i + 0.5) * 2.0 / n, -1.0 + (j + 0.5) * 2.0 / n};
        if (norm(x) > kSafeRadiusFraction) continue;
        worst = std::max(worst, std::abs(harmonic_potential(x, boundary) - u(x)));
      }
    }
    rows.push_back({nodes, worst});
  }
  return rows;
}

std::vector<EnergyRow> energy_convergence_study(const ScenarioConfig& config) {
  std::vector<EnergyRow> rows;
  for (SolverMode mode : config.study.solvers) {
    for (double dt : config.study.dts) {
      ScenarioConfig c = config;
      c.solver = mode;
      c.dt = dt;
      c.steps = static_cast<int>(std::lround(config.study.duration / dt));
      c.diagnostic_every = 1;
      c.snapshot_every = 0;
      rows.push_back({mode, dt, run(c).max_energy_deviation()});
    }
  }
  return rows;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("slope fit needs at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fspif
