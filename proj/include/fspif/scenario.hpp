#pragma once

// Scenario configuration, beam initialization, the time loop, and the
// convergence studies driven by the command-line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fspif/dirichlet.hpp"
#include "fspif/dynamics.hpp"
#include "fspif/field_solver.hpp"
#include "fspif/shapes.hpp"

namespace fspif {

enum class ScenarioKind { PoissonManufactured, BeamFreeSpace, BeamDirichlet, LaplaceManufactured };
enum class Method { Pif, Pic };
enum class BoundaryDataKind { Zero, LinearY, Tabulated };
enum class EscapePolicy { Abort, Freeze };
enum class Pusher { Auto, Boris, Leapfrog };

struct BeamSpec {
  double sigma_x = 1.0 / 30.0;
  double sigma_y = 1.0 / 10.0;
  // Samples beyond this radius are redrawn.
  double cut_radius = 0.4;
};

struct BoundarySpec {
  double radius = 0.5;
  int nodes = 128;
  BoundaryDataKind data = BoundaryDataKind::Zero;
  std::vector<double> values;  // tabulated f(theta_j)
};

struct StudySpec {
  std::vector<int> modes{16, 24, 32, 40};        // poisson
  int particles = 30;                            // poisson
  int resolution = 128;                          // poisson refined grid
  std::vector<int> nodes{16, 32, 64, 128};       // laplace
  int laplace_grid = 256;                        // laplace
  std::vector<double> dts{1e-3, 5e-4, 2.5e-4};   // energy
  double duration = 0.25;                        // energy
  std::vector<SolverMode> solvers{SolverMode::DirectAlpha4};  // energy
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::BeamFreeSpace;
  std::uint64_t seed = 0;
  std::size_t particles = 40000;
  int modes = 32;
  double dt = 5e-4;
  int steps = 1000;
  double bz = 300.0;
  ShapeFunction shape = ShapeFunction::radial_bspline(2, 1.0 / 32.0);
  double truncation_radius = 1.5;  // parsed default: max(1.5, sqrt(2) + 2R)
  SolverMode solver = SolverMode::DirectAlpha4;
  Method method = Method::Pif;
  int pic_nodes = 0;  // 0: same as modes
  double tolerance = kDefaultTolerance;
  Pusher pusher = Pusher::Auto;
  BoundarySpec boundary;
  EscapePolicy escape = EscapePolicy::Abort;
  int diagnostic_every = 1;
  int snapshot_every = 0;  // 0: no snapshots
  int snapshot_resolution = 128;
  BeamSpec beam;
  std::string kernel_cache;  // optional path for precomputed kernels
  std::string output_dir;
  StudySpec study;

  // Parses the JSON schema documented in the README. Unknown keys are
  // rejected; "seed" is mandatory.
  static ScenarioConfig from_json_text(const std::string& text);
  static ScenarioConfig load(const std::filesystem::path& path);

  void validate() const;
  bool uses_boris() const;
  FieldSolveConfig field_config() const;
};

// Failure inside the time loop, tagged with the step at which it happened.
class RunError : public std::runtime_error {
 public:
  RunError(std::string kind, int step, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)), step_(step) {}
  const std::string& kind() const { return kind_; }
  int step() const { return step_; }

 private:
  std::string kind_;
  int step_;
};

struct DiagnosticRow {
  int step = 0;
  double time = 0.0;
  double kinetic = 0.0;
  double electric = 0.0;
  double harmonic = 0.0;
  double total = 0.0;
  double momentum = 0.0;         // |sum m V|
  double charge_residual = 0.0;  // |rho^(0) / (q N_p S^(0)) - 1|
  double x_mean = 0.0;
  double y_mean = 0.0;
  double x2 = 0.0;  // <(x - x_mean)^2>
  double y2 = 0.0;
  std::size_t margin_violations = 0;
  std::size_t frozen = 0;
};

struct RunOutput {
  std::vector<DiagnosticRow> rows;
  std::vector<std::filesystem::path> files;

  // max_n |E_n - E_0| and the same divided by |E_0|.
  double max_energy_deviation() const;
  double max_relative_energy_deviation() const;
};

// Anisotropic Gaussian positions, unit Maxwellian velocities, total charge
// and mass 1 (q = m = 1/N_p). Deterministic per seed.
ParticleEnsemble init_beam(const ScenarioConfig& config);

// Runs a beam scenario. With an output directory, writes diagnostics.csv and
// any snapshots there.
RunOutput run(const ScenarioConfig& config,
              const std::optional<std::filesystem::path>& output_dir = std::nullopt);

// Values of w sum_k coeffs(k) e^{ik.x} on the resolution^2 grid
// x_i = -1/2 + i/resolution, by zero padding the spectrum and one inverse
// FFT. period * resolution must be an even integer no smaller than the
// grid extent.
std::vector<double> fourier_interpolate(const ModeGrid& grid, std::span<const Complex> coeffs,
                                        int resolution);

// Free-space potential of unit Gaussians of width sigma centred at the
// sources: -(1/4 pi) sum [log r^2 + E1(r^2 / 2 sigma^2)].
double gaussian_potential(Vec2 x, std::span<const Vec2> sources, double sigma);

struct PoissonRow {
  int modes = 0;
  double error_direct = 0.0;  // RMS error on the refined grid
  double error_precomputed = 0.0;
};
std::vector<PoissonRow> poisson_convergence_study(const ScenarioConfig& config);
std::vector<Vec2> poisson_sources(const ScenarioConfig& config);

struct LaplaceRow {
  int nodes = 0;
  double max_error = 0.0;  // over grid points with |x| <= 0.9
};
std::vector<LaplaceRow> laplace_convergence_study(const ScenarioConfig& config);

struct EnergyRow {
  SolverMode solver = SolverMode::DirectAlpha4;
  double dt = 0.0;
  double max_error = 0.0;
};
std::vector<EnergyRow> energy_convergence_study(const ScenarioConfig& config);

// Least-squares slope of log y against log x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

std::string to_string(SolverMode mode);
std::string to_string(Method method);

}  // namespace fspif
