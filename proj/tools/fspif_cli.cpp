// Command-line driver.
//
//   fspif run <config> [--out DIR] [--threads N] [--seed S] [--method pif|pic] [--precompute on|off]
//   fspif study poisson|laplace|energy <config> [--out DIR] [--threads N]
//
// Exit codes: 0 success, 2 bad input or configuration, 3 failure during a
// run, 4 anything else. Failures print one JSON object on stderr.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <json.hpp>

#include "fspif/io.hpp"
#include "fspif/parallel.hpp"
#include "fspif/scenario.hpp"

namespace {

using fspif::ScenarioConfig;
using nlohmann::json;

constexpr const char* kOutputEnv = "FSPIF_OUTPUT_DIR";

void report(const std::string& kind, const std::string& message, int step = -1) {
  json j{{"error", kind}, {"message", message}};
  if (step >= 0) j["step"] = step;
  std::cerr << j.dump() << '\n';
}

std::filesystem::path output_dir(const std::string& flag, const ScenarioConfig& config) {
  if (!flag.empty()) return flag;
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') return env;
  return "fspif_out";
}

std::string exact_text(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_summary(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  os << j.dump(2) << '\n';
}

int run_command(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed,
                const std::string& method, const std::string& precompute) {
  ScenarioConfig config = ScenarioConfig::load(config_path);
  if (seed) config.seed = *seed;
  if (!method.empty()) config.method = method == "pic" ? fspif::Method::Pic : fspif::Method::Pif;
  if (!precompute.empty()) {
    config.solver = precompute == "on" ? fspif::SolverMode::PrecomputedAlpha2 : fspif::SolverMode::DirectAlpha4;
  }
  config.validate();
  const auto dir = output_dir(out, config);
  const auto result = fspif::run(config, dir);
  const auto& last = result.rows.back();
  json summary{{"scenario", config_path},
               {"method", fspif::to_string(config.method)},
               {"solver", fspif::to_string(config.solver)},
               {"seed", config.seed},
               {"particles", config.particles},
               {"modes", config.modes},
               {"dt", config.dt},
               {"steps", config.steps},
               {"max_energy_deviation", result.max_energy_deviation()},
               {"max_relative_energy_deviation", result.max_relative_energy_deviation()},
               {"final_x2_over_y2", last.x2 / last.y2},
               {"final_center", {last.x_mean, last.y_mean}}};
  write_summary(dir / "summary.json", summary);
  std::cout << summary.dump() << '\n';
  return 0;
}

int study_command(const std::string& which, const std::string& config_path, const std::string& out) {
  const ScenarioConfig config = ScenarioConfig::load(config_path);
  const auto dir = output_dir(out, config);
  std::filesystem::create_directories(dir);
  json summary{{"study", which}, {"config", config_path}};
  if (which == "poisson") {
    const auto rows = fspif::poisson_convergence_study(config);
    fspif::CsvWriter csv(dir / "poisson_convergence.csv", {"modes", "error_direct", "error_precomputed"});
    std::vector<double> m, ed, ep;
    for (const auto& r : rows) {
      csv.row(std::vector<double>{static_cast<double>(r.modes), r.error_direct, r.error_precomputed});
      m.push_back(r.modes);
      ed.push_back(r.error_direct);
      ep.push_back(r.error_precomputed);
    }
    summary["direct_first_over_last"] = ed.front() / ed.back();
    summary["precomputed_slope"] = fspif::fit_loglog_slope(m, ep);
  } else if (which == "laplace") {
    const auto rows = fspif::laplace_convergence_study(config);
    fspif::CsvWriter csv(dir / "laplace_convergence.csv", {"nodes", "max_error"});
    for (const auto& r : rows) csv.row(std::vector<double>{static_cast<double>(r.nodes), r.max_error});
    summary["final_max_error"] = rows.back().max_error;
  } else if (which == "energy") {
    const auto rows = fspif::energy_convergence_study(config);
    fspif::CsvWriter csv(dir / "energy_convergence.csv", {"solver", "dt", "max_error"});
    for (auto mode : config.study.solvers) {
      std::vector<double> dts, errs;
      for (const auto& r : rows) {
        if (r.solver != mode) continue;
        csv.row(std::vector<std::string>{fspif::to_string(mode), exact_text(r.dt), exact_text(r.max_error)});
        dts.push_back(r.dt);
        errs.push_back(r.max_error);
      }
      summary["slope_" + fspif::to_string(mode)] = fspif::fit_loglog_slope(dts, errs);
    }
  } else {
    throw fspif::InputError("unknown study \"" + which + "\" (poisson|laplace|energy)");
  }
  write_summary(dir / ("study_" + which + ".json"), summary);
  std::cout << summary.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gridless free-space particle-in-Fourier simulator"};
  app.require_subcommand(1);

  std::string config_path, out, method, precompute, which;
  std::optional<std::uint64_t> seed;
  int threads = 1;

  auto* run = app.add_subcommand("run", "run a beam scenario");
  run->add_option("config", config_path, "scenario config (JSON)")->required();
  run->add_option("--out", out, "output directory");
  run->add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--method", method, "pif or pic")->check(CLI::IsMember({"pif", "pic"}));
  run->add_option("--precompute", precompute, "precomputed kernels on/off")->check(CLI::IsMember({"on", "off"}));

  auto* study = app.add_subcommand("study", "convergence studies");
  study->add_option("which", which, "poisson | laplace | energy")
      ->required()
      ->check(CLI::IsMember({"poisson", "laplace", "energy"}));
  study->add_option("config", config_path, "scenario config (JSON)")->required();
  study->add_option("--out", out, "output directory");
  study->add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("usage", e.what());
    return 2;
  }

  try {
    fspif::set_max_threads(threads);
    if (*run) return run_command(config_path, out, seed, method, precompute);
    return study_command(which, config_path, out);
  } catch (const fspif::RunError& e) {
    report(e.kind(), e.what(), e.step());
    return 3;
  } catch (const fspif::InputError& e) {
    report("input", e.what());
    return 2;
  } catch (const std::exception& e) {
    report("internal", e.what());
    return 4;
  }
}
