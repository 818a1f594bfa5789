#include "fspif/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "fspif/io.hpp"
#include "fspif/pic.hpp"

namespace fspif {

using nlohmann::json;

std::string to_string(SolverMode mode) {
  return mode == SolverMode::DirectAlpha4 ? "direct" : "precomputed";
}

std::string to_string(Method method) { return method == Method::Pif ? "pif" : "pic"; }

namespace {

template <typename Enum>
Enum parse_enum(const json& j, const std::string& key, std::initializer_list<std::pair<const char*, Enum>> options) {
  const auto text = j.get<std::string>();
  for (const auto& [name, value] : options) {
    if (text == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : options) allowed += std::string(allowed.empty() ? "" : "|") + name;
  throw InputError("\"" + key + "\" must be one of " + allowed + ", got \"" + text + "\"");
}

SolverMode parse_solver(const json& j, const std::string& key) {
  return parse_enum<SolverMode>(j, key, {{"direct", SolverMode::DirectAlpha4},
                                         {"precomputed", SolverMode::PrecomputedAlpha2}});
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) throw InputError("unknown key \"" + item.key() + "\" in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ShapeFunction parse_shape(const json& j, int modes) {
  reject_unknown(j, {"kind", "order", "sigma", "radius"}, "shape");
  const auto kind = parse_enum<ShapeKind>(j.at("kind"), "shape.kind",
                                          {{"bspline", ShapeKind::RadialBSpline},
                                           {"gaussian", ShapeKind::TruncatedGaussian}});
  double radius = 1.0 / modes;
  read(j, "radius", radius);
  if (kind == ShapeKind::RadialBSpline) {
    int order = 2;
    read(j, "order", order);
    return ShapeFunction::radial_bspline(order, radius);
  }
  if (!j.contains("sigma")) throw InputError("gaussian shape needs \"sigma\"");
  return ShapeFunction::truncated_gaussian(j.at("sigma").get<double>(), radius);
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"scenario", "seed", "particles", "modes", "dt", "steps", "bz", "shape", "truncation_radius",
                  "solver", "method", "pic_nodes", "tolerance", "pusher", "boundary", "escape_policy",
                  "diagnostic_every", "snapshot_every", "snapshot_resolution", "beam", "kernel_cache",
                  "output_dir", "study", "description"},
                 "config");
  ScenarioConfig c;
  try {
    if (!j.contains("scenario")) throw InputError("config needs \"scenario\"");
    c.scenario = parse_enum<ScenarioKind>(j.at("scenario"), "scenario",
                                          {{"poisson_manufactured", ScenarioKind::PoissonManufactured},
                                           {"beam_free_space", ScenarioKind::BeamFreeSpace},
                                           {"beam_dirichlet", ScenarioKind::BeamDirichlet},
                                           {"laplace_manufactured", ScenarioKind::LaplaceManufactured}});
    if (!j.contains("seed")) throw InputError("config needs \"seed\" (runs must be reproducible)");
    c.seed = j.at("seed").get<std::uint64_t>();
    read(j, "particles", c.particles);
    read(j, "modes", c.modes);
    read(j, "dt", c.dt);
    read(j, "steps", c.steps);
    read(j, "bz", c.bz);
    c.shape = j.contains("shape") ? parse_shape(j.at("shape"), c.modes)
                                  : ShapeFunction::radial_bspline(2, 1.0 / c.modes);
    // Default: 1.5, or the smallest admissible L when the shape is too wide for it.
    c.truncation_radius = std::max(1.5, min_truncation_radius(2, c.shape.support_radius));
    read(j, "truncation_radius", c.truncation_radius);
    if (j.contains("solver")) c.solver = parse_solver(j.at("solver"), "solver");
    if (j.contains("method")) {
      c.method = parse_enum<Method>(j.at("method"), "method", {{"pif", Method::Pif}, {"pic", Method::Pic}});
    }
    read(j, "pic_nodes", c.pic_nodes);
    read(j, "tolerance", c.tolerance);
    if (j.contains("pusher")) {
      c.pusher = parse_enum<Pusher>(j.at("pusher"), "pusher",
                                    {{"auto", Pusher::Auto}, {"boris", Pusher::Boris}, {"leapfrog", Pusher::Leapfrog}});
    }
    if (j.contains("boundary")) {
      const auto& b = j.at("boundary");
      reject_unknown(b, {"radius", "nodes", "data", "values"}, "boundary");
      read(b, "radius", c.boundary.radius);
      read(b, "nodes", c.boundary.nodes);
      if (b.contains("data")) {
        c.boundary.data = parse_enum<BoundaryDataKind>(b.at("data"), "boundary.data",
                                                       {{"zero", BoundaryDataKind::Zero},
                                                        {"linear_y", BoundaryDataKind::LinearY},
                                                        {"tabulated", BoundaryDataKind::Tabulated}});
      }
      read(b, "values", c.boundary.values);
    }
    if (j.contains("escape_policy")) {
      c.escape = parse_enum<EscapePolicy>(j.at("escape_policy"), "escape_policy",
                                          {{"abort", EscapePolicy::Abort}, {"freeze", EscapePolicy::Freeze}});
    }
    read(j, "diagnostic_every", c.diagnostic_every);
    read(j, "snapshot_every", c.snapshot_every);
    read(j, "snapshot_resolution", c.snapshot_resolution);
    if (j.contains("beam")) {
      const auto& b = j.at("beam");
      reject_unknown(b, {"sigma_x", "sigma_y", "cut_radius"}, "beam");
      read(b, "sigma_x", c.beam.sigma_x);
      read(b, "sigma_y", c.beam.sigma_y);
      read(b, "cut_radius", c.beam.cut_radius);
    }
    read(j, "kernel_cache", c.kernel_cache);
    read(j, "output_dir", c.output_dir);
    if (j.contains("study")) {
      const auto& s = j.at("study");
      reject_unknown(s, {"modes", "particles", "resolution", "nodes", "laplace_grid", "dts", "duration", "solvers"},
                     "study");
      read(s, "modes", c.study.modes);
      read(s, "particles", c.study.particles);
      read(s, "resolution", c.study.resolution);
      read(s, "nodes", c.study.nodes);
      read(s, "laplace_grid", c.study.laplace_grid);
      read(s, "dts", c.study.dts);
      read(s, "duration", c.study.duration);
      if (s.contains("solvers")) {
        c.study.solvers.clear();
        for (const auto& v : s.at("solvers")) c.study.solvers.push_back(parse_solver(v, "study.solvers"));
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("config has a value of the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

bool ScenarioConfig::uses_boris() const {
  if (pusher == Pusher::Auto) return bz != 0.0;
  return pusher == Pusher::Boris;
}

FieldSolveConfig ScenarioConfig::field_config() const {
  FieldSolveConfig f;
  f.modes_per_dim = modes;
  f.shape = shape;
  f.green = TruncatedGreen{2, truncation_radius};
  f.mode = solver;
  f.tolerance = tolerance;
  return f;
}

void ScenarioConfig::validate() const {
  if (modes <= 0 || modes % 2 != 0) throw InputError("\"modes\" must be even and positive");
  shape.validate();
  if (!(truncation_radius > 0.0)) throw InputError("\"truncation_radius\" must be positive");
  if (!(tolerance >= kMinTolerance && tolerance <= kMaxTolerance)) {
    throw InputError("\"tolerance\" must lie in [1e-14, 1e-4]");
  }
  const bool is_beam = scenario == ScenarioKind::BeamFreeSpace || scenario == ScenarioKind::BeamDirichlet;
  if (is_beam) {
    if (particles == 0) throw InputError("\"particles\" must be positive");
    if (!(dt > 0.0)) throw InputError("\"dt\" must be positive");
    if (steps < 0) throw InputError("\"steps\" must be non-negative");
    if (diagnostic_every < 1) throw InputError("\"diagnostic_every\" must be at least 1");
    if (snapshot_every < 0) throw InputError("\"snapshot_every\" must be non-negative");
    if (!(beam.sigma_x > 0.0) || !(beam.sigma_y > 0.0) || !(beam.cut_radius > 0.0)) {
      throw InputError("beam widths and cut radius must be positive");
    }
    if (pusher == Pusher::Leapfrog && bz != 0.0) throw InputError("the leapfrog pusher needs bz = 0");
    if (method == Method::Pif) TruncatedGreen{2, truncation_radius}.require_covers(shape.support_radius);
  }
  if (scenario == ScenarioKind::BeamDirichlet) {
    if (method == Method::Pic) throw InputError("the PIC baseline has no Dirichlet boundary");
    if (!(boundary.radius > 0.0 && boundary.radius <= 0.5)) {
      throw InputError("boundary radius must lie in (0, 0.5] so the disk fits the unit box");
    }
    if (boundary.nodes < 8) throw InputError("boundary needs at least 8 nodes");
    if (boundary.data == BoundaryDataKind::Tabulated &&
        boundary.values.size() != static_cast<std::size_t>(boundary.nodes)) {
      throw InputError("tabulated boundary data needs one value per node");
    }
  }
}

double RunOutput::max_energy_deviation() const {
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r.total - rows.front().total));
  return worst;
}

double RunOutput::max_relative_energy_deviation() const {
  if (rows.empty()) return 0.0;
  return max_energy_deviation() / std::abs(rows.front().total);
}

ParticleEnsemble init_beam(const ScenarioConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gx(0.0, config.beam.sigma_x / std::sqrt(2.0));
  std::normal_distribution<double> gy(0.0, config.beam.sigma_y / std::sqrt(2.0));
  std::normal_distribution<double> gv(0.0, 1.0);
  ParticleEnsemble e;
  const std::size_t n = config.particles;
  e.positions.resize(n);
  e.velocities.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec2 x;
    do {
      x = {gx(rng), gy(rng)};
    } while (norm(x) > config.beam.cut_radius);
    e.positions[j] = x;
    const double vx = gv(rng);
    e.velocities[j] = {vx, gv(rng)};
  }
  e.charge = 1.0 / static_cast<double>(n);
  e.mass = 1.0 / static_cast<double>(n);
  return e;
}

namespace {

struct Evaluation {
  std::vector<Vec2> accel;
  double electric = 0.0;
  double harmonic = 0.0;
  double charge_residual = 0.0;
  std::size_t margin_violations = 0;
};

class Model {
 public:
  virtual ~Model() = default;
  virtual Evaluation evaluate(const ParticleEnsemble& e) = 0;
  virtual bool admissible(Vec2 x) const = 0;
  virtual Vec2 clamp(Vec2 x) const = 0;
  // Potential on a uniform grid over the unit box, with its metadata.
  virtual Snapshot snapshot(int resolution) const = 0;
};

constexpr double kInset = 1.0 - 1e-9;

class PifModel final : public Model {
 public:
  explicit PifModel(const ScenarioConfig& c) : solver_(c.field_config(), precomputed(c)) {
    if (c.scenario == ScenarioKind::BeamDirichlet) {
      const auto& b = c.boundary;
      std::function<double(Vec2)> f = [](Vec2) { return 0.0; };
      if (b.data == BoundaryDataKind::LinearY) f = [](Vec2 z) { return z.y; };
      boundary_ = DiskBoundary::sampled(b.radius, b.nodes, f);
      if (b.data == BoundaryDataKind::Tabulated) boundary_->data = b.values;
    }
  }

  Evaluation evaluate(const ParticleEnsemble& e) override {
    Evaluation ev;
    xhat_ = solver_.deposit_modes(e.positions);
    q_ = e.charge;
    auto field = solver_.electric_field(xhat_, e.charge, e.positions);
    ev.electric = solver_.potential_energy(xhat_, e.charge);
    if (boundary_) {
      const auto corr = compose_dirichlet(solver_, xhat_, e.charge, e.positions, *boundary_);
      for (std::size_t j = 0; j < field.size(); ++j) field[j] += corr.field[j];
      ev.harmonic = corr.harmonic_energy;
      ev.margin_violations = corr.margin_violations;
    }
    const double qm = e.charge_to_mass();
    ev.accel.resize(field.size());
    for (std::size_t j = 0; j < field.size(); ++j) ev.accel[j] = qm * field[j];
    const double zero_mode = xhat_[solver_.grid().flat(0, 0)].real();
    ev.charge_residual = e.size() == 0 ? 0.0 : std::abs(zero_mode / static_cast<double>(e.size()) - 1.0);
    return ev;
  }

  bool admissible(Vec2 x) const override {
    if (boundary_) return norm(x) <= kSafeRadiusFraction * boundary_->radius;
    return std::abs(x.x) <= 0.5 && std::abs(x.y) <= 0.5;
  }

  Vec2 clamp(Vec2 x) const override {
    if (boundary_) {
      const double limit = kSafeRadiusFraction * boundary_->radius * kInset;
      const double r = norm(x);
      return r > limit ? x * (limit / r) : x;
    }
    return {std::clamp(x.x, -0.5 * kInset, 0.5 * kInset), std::clamp(x.y, -0.5 * kInset, 0.5 * kInset)};
  }

  Snapshot snapshot(int resolution) const override {
    Snapshot s;
    const auto phi = solver_.potential_modes(xhat_, q_);
    s.values = fourier_interpolate(solver_.grid(), phi, resolution);
    s.dims = {static_cast<std::uint64_t>(resolution), static_cast<std::uint64_t>(resolution)};
    json meta{{"quantity", "phi"},
              {"method", "pif"},
              {"modes", solver_.grid().modes_per_dim},
              {"alpha", solver_.grid().alpha},
              {"resolution", resolution},
              {"origin", -0.5},
              {"spacing", 1.0 / resolution}};
    s.metadata = meta.dump();
    return s;
  }

 private:
  static std::optional<PrecomputedKernels> precomputed(const ScenarioConfig& c) {
    if (c.solver != SolverMode::PrecomputedAlpha2 || c.kernel_cache.empty()) return std::nullopt;
    const std::filesystem::path path = c.kernel_cache;
    const auto shape = c.shape.describe();
    if (std::filesystem::exists(path)) {
      auto k = load_kernels(path);
      if (k.grid.modes_per_dim == c.modes && k.truncation_radius == c.truncation_radius && k.shape == shape) {
        return k;
      }
    }
    auto k = precompute_kernels(ModeGrid{c.modes, 4, 0.5}, c.shape, TruncatedGreen{2, c.truncation_radius});
    save_kernels(k, path);
    return k;
  }

  FreeSpaceSolver solver_;
  std::optional<DiskBoundary> boundary_;
  std::vector<Complex> xhat_;
  double q_ = 0.0;
};

class PicModel final : public Model {
 public:
  explicit PicModel(const ScenarioConfig& c)
      : solver_(CollocatedGrid{c.pic_nodes > 0 ? c.pic_nodes : c.modes}, TruncatedGreen{2, c.truncation_radius}) {}

  Evaluation evaluate(const ParticleEnsemble& e) override {
    Evaluation ev;
    rho_ = solver_.spread(e.positions, e.charge);
    field_ = solver_.solve(rho_);
    const auto field = solver_.gather(field_, e.positions);
    ev.electric = solver_.energy(rho_, field_);
    const double qm = e.charge_to_mass();
    ev.accel.resize(field.size());
    for (std::size_t j = 0; j < field.size(); ++j) ev.accel[j] = qm * field[j];
    double total = 0.0;
    for (double r : rho_) total += r;
    const double h = solver_.grid().spacing();
    const double expected = e.charge * static_cast<double>(e.size());
    ev.charge_residual = expected == 0.0 ? 0.0 : std::abs(total * h * h / expected - 1.0);
    return ev;
  }

  bool admissible(Vec2 x) const override {
    try {
      quadratic_stencil(x.x, solver_.grid());
      quadratic_stencil(x.y, solver_.grid());
      return true;
    } catch (const InputError&) {
      return false;
    }
  }

  Vec2 clamp(Vec2 x) const override {
    const double limit = (0.5 - 1.01 * solver_.grid().spacing()) * kInset;
    return {std::clamp(x.x, -limit, limit), std::clamp(x.y, -limit, limit)};
  }

  Snapshot snapshot(int) const override {
    Snapshot s;
    const auto n = static_cast<std::uint64_t>(solver_.grid().nodes_per_dim);
    s.values = field_.potential;
    s.dims = {n, n};
    json meta{{"quantity", "phi"},
              {"method", "pic"},
              {"nodes", n},
              {"origin", solver_.grid().node(0)},
              {"spacing", solver_.grid().spacing()}};
    s.metadata = meta.dump();
    return s;
  }

 private:
  PicSolver solver_;
  std::vector<double> rho_;
  GridField field_;
};

std::unique_ptr<Model> make_model(const ScenarioConfig& c) {
  if (c.method == Method::Pic) return std::make_unique<PicModel>(c);
  return std::make_unique<PifModel>(c);
}

Evaluation evaluate_at(Model& model, const ParticleEnsemble& e, int step) {
  try {
    return model.evaluate(e);
  } catch (const EscapedParticle& ex) {
    throw RunError("escaped_particle", step, ex.what());
  } catch (const NearBoundaryError& ex) {
    throw RunError("near_boundary", step, ex.what());
  } catch (const ConsistencyError& ex) {
    throw RunError("consistency", step, ex.what());
  }
}

DiagnosticRow diagnose(int step, double time, const ParticleEnsemble& e, std::span<const Vec2> v_before,
                       const Evaluation& ev, std::size_t frozen) {
  DiagnosticRow r;
  r.step = step;
  r.time = time;
  r.kinetic = kinetic_energy(midpoint_velocities(v_before, e.velocities), e.mass);
  r.electric = ev.electric;
  r.harmonic = ev.harmonic;
  r.total = r.kinetic + r.electric + r.harmonic;
  r.momentum = norm(momentum(e));
  r.charge_residual = ev.charge_residual;
  r.margin_violations = ev.margin_violations;
  r.frozen = frozen;
  const double n = static_cast<double>(std::max<std::size_t>(e.size(), 1));
  for (const auto& x : e.positions) {
    r.x_mean += x.x;
    r.y_mean += x.y;
  }
  r.x_mean /= n;
  r.y_mean /= n;
  for (const auto& x : e.positions) {
    r.x2 += (x.x - r.x_mean) * (x.x - r.x_mean);
    r.y2 += (x.y - r.y_mean) * (x.y - r.y_mean);
  }
  r.x2 /= n;
  r.y2 /= n;
  return r;
}

const std::vector<std::string> kDiagnosticHeader{
    "step",     "time",     "kinetic", "electric", "harmonic", "total",        "momentum", "charge_residual",
    "x_mean",   "y_mean",   "x2",      "y2",       "margin_violations", "frozen"};

std::vector<double> row_values(const DiagnosticRow& r) {
  return {static_cast<double>(r.step), r.time,   r.kinetic, r.electric, r.harmonic,
          r.total,                     r.momentum, r.charge_residual, r.x_mean, r.y_mean,
          r.x2,                        r.y2,     static_cast<double>(r.margin_violations),
          static_cast<double>(r.frozen)};
}

}  // namespace

RunOutput run(const ScenarioConfig& config, const std::optional<std::filesystem::path>& output_dir) {
  config.validate();
  if (config.scenario != ScenarioKind::BeamFreeSpace && config.scenario != ScenarioKind::BeamDirichlet) {
    throw InputError("run handles the beam scenarios; use study for the manufactured solutions");
  }
  RunOutput out;
  std::optional<CsvWriter> csv;
  if (output_dir) {
    std::filesystem::create_directories(*output_dir);
    out.files.push_back(*output_dir / "diagnostics.csv");
    csv.emplace(out.files.back(), kDiagnosticHeader);
  }

  auto model = make_model(config);
  ParticleEnsemble e = init_beam(config);
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (!model->admissible(e.positions[j])) {
      throw RunError("escaped_particle", 0, "initial particle " + std::to_string(j) + " is outside the solver domain");
    }
  }
  const bool boris = config.uses_boris();
  const double bz = boris ? config.bz : 0.0;
  const double dt = config.dt;
  std::vector<bool> frozen(e.size(), false);
  std::size_t frozen_count = 0;

  Evaluation ev = evaluate_at(*model, e, 0);
  bootstrap_half_step(e, ev.accel, bz, dt);

  for (int n = 0; n <= config.steps; ++n) {
    if (n > 0) ev = evaluate_at(*model, e, n);
    const std::vector<Vec2> before = e.velocities;
    if (boris) {
      boris_kick(e, ev.accel, bz, dt);
    } else {
      kick(e, ev.accel, dt);
    }
    if (frozen_count > 0) {
      for (std::size_t j = 0; j < e.size(); ++j) {
        if (frozen[j]) e.velocities[j] = Vec2{};
      }
    }
    if (n % config.diagnostic_every == 0 || n == config.steps) {
      out.rows.push_back(diagnose(n, n * dt, e, before, ev, frozen_count));
      if (csv) {
        csv->row(row_values(out.rows.back()));
        csv->flush();
      }
    }
    if (output_dir && config.snapshot_every > 0 && n % config.snapshot_every == 0) {
      const auto snap = model->snapshot(config.snapshot_resolution);
      std::ostringstream name;
      name << "phi_" << std::setw(7) << std::setfill('0') << n;
      const auto base = *output_dir / name.str();
      write_snapshot(snap, base.string() + ".bin");
      write_snapshot_csv(snap, base.string() + ".csv");
      out.files.push_back(base.string() + ".bin");
      out.files.push_back(base.string() + ".csv");
    }
    if (n == config.steps) break;

    drift(e, dt);
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (model->admissible(e.positions[j])) continue;
      if (config.escape == EscapePolicy::Abort) {
        throw RunError("escaped_particle", n + 1,
                       EscapedParticle(j, e.positions[j]).what() + std::string(" (solver domain)"));
      }
      e.positions[j] = model->clamp(e.positions[j]);
      e.velocities[j] = Vec2{};
      if (!frozen[j]) {
        frozen[j] = true;
        ++frozen_count;
      }
    }
  }
  return out;
}

}  // namespace fspif
