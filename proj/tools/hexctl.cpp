#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hexctl/design_optimizer.hpp"
#include "hexctl/scenario.hpp"
#include "hexctl/serialization.hpp"
#include "hexctl/wrench_model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitSingular = 2;
constexpr int kExitOptimizerFailure = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitAttitudeSingularity = 4;

int thread_cap_from_env() {
  const char* env = std::getenv("HEXCTL_THREADS");
  if (!env) return 0;
  const int n = std::atoi(env);
  return n > 0 ? n : 0;
}

void ensure_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".hexctl_probe";
  std::ofstream test(probe);
  if (!test) throw hexctl::Error("output directory not writable: " + dir.string());
  test.close();
  fs::remove(probe, ec);
}

std::vector<double> parse_lambda_list(const std::string& list) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < list.size()) {
    std::size_t next = list.find(',', pos);
    if (next == std::string::npos) next = list.size();
    out.push_back(std::stod(list.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

int cmd_design(const OptimizerSettingsArgs&);

struct DesignArgs {
  std::string config_path;
  std::string lambda_list;
  int n_starts = -1;
  std::int64_t seed = -1;
  double d = -1.0;
  double k_ratio = -1.0;
  double phi_max_deg = -1.0;
  int threads = 0;
  std::string out_dir;
};

int run_design(const DesignArgs& args) {
  hexctl::OptimizerSettings settings;
  try {
    if (!args.config_path.empty()) {
      std::ifstream in(args.config_path);
      if (!in) throw hexctl::Error("cannot open config: " + args.config_path);
      json j;
      in >> j;
      settings = hexctl::optimizer_settings_from_json(j);
    }
  } catch (const json::exception& e) {
    std::cerr << "error: config parse: " << e.what() << "\n";
    return kExitIo;
  } catch (const hexctl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  if (!args.lambda_list.empty()) {
    try {
      settings.lambda_grid = parse_lambda_list(args.lambda_list);
    } catch (const std::exception&) {
      std::cerr << "error: cannot parse --lambda list\n";
      return kExitIo;
    }
  }
  if (args.n_starts > 0) settings.n_starts = args.n_starts;
  if (args.seed >= 0) settings.seed = static_cast<std::uint64_t>(args.seed);
  if (args.d > 0.0) settings.d = args.d;
  if (args.k_ratio >= 0.0) settings.k_ratio = args.k_ratio;
  if (args.phi_max_deg > 0.0) settings.phi_max = args.phi_max_deg * M_PI / 180.0;
  settings.threads = args.threads;
  const int cap = thread_cap_from_env();
  if (cap > 0 && (settings.threads == 0 || settings.threads > cap)) {
    settings.threads = cap;
  }

  const fs::path out_dir(args.out_dir);
  try {
    ensure_writable_dir(out_dir);
  } catch (const hexctl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  hexctl::ParetoFront front;
  try {
    front = hexctl::pareto_front(settings);
  } catch (const hexctl::AllStartsFailed& e) {
    std::cerr << "error: optimizer failure: " << e.what() << "\n";
    return kExitOptimizerFailure;
  } catch (const hexctl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOptimizerFailure;
  }

  const hexctl::ParetoPoint* selected = nullptr;
  for (const auto& pp : front.points) {
    if (pp.converged) {
      selected = &pp;
      break;
    }
  }
  if (!selected) {
    std::cerr << "error: no converged Pareto point\n";
    return kExitOptimizerFailure;
  }

  // The paper's selection rule: prefer maximum force, i.e. the lowest-lambda
  // plateau point, with angles rounded to whole degrees.
  hexctl::DesignPoint rounded = selected->point;
  for (double& phi : rounded.phi) {
    phi = std::round(phi * 180.0 / M_PI) * M_PI / 180.0;
  }
  const hexctl::DesignConfig selected_design =
      hexctl::to_design_config(rounded, settings);

  try {
    hexctl::write_front_csv(out_dir / "pareto_front.csv", front);
    hexctl::save_design(out_dir / "selected_design.json", selected_design);
  } catch (const hexctl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  json summary = {
      {"p_star", front.shadow.p_star},
      {"q0", front.shadow.q0},
      {"p0", front.shadow.p0},
      {"q_star", front.shadow.q_star},
      {"selected_lambda", selected->lambda},
      {"selected_f_max", selected->point.f_max},
      {"selected_m_max", selected->point.m_max},
      {"front_csv", (out_dir / "pareto_front.csv").string()},
      {"selected_design", (out_dir / "selected_design.json").string()},
  };
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

struct LimitsArgs {
  std::string design_path;
  std::string direction;
};

int run_limits(const LimitsArgs& args) {
  hexctl::DesignConfig cfg;
  try {
    cfg = hexctl::load_design(args.design_path);
  } catch (const hexctl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  const hexctl::ActuationMatrix am = hexctl::build_actuation_matrix(cfg);
  if (!am.invertible()) {
    std::cerr << "error: singular design (rank " << am.rank() << ")\n";
    return kExitSingular;
  }

  const hexctl::WrenchLimits limits = hexctl::wrench_limits(am);
  json out = {{"f_max", limits.f_max},
              {"m_max", limits.m_max},
              {"rank", am.rank()},
              {"condition_number", am.condition_number()}};

  if (!args.direction.empty()) {
    std::vector<double> parts;
    try {
      parts = parse_lambda_list(args.direction);
    } catch (const std::exception&) {
      std::cerr << "error: cannot parse --direction\n";
      return kExitIo;
    }
    if (parts.size() != 3) {
      std::cerr << "error: --direction needs three components\n";
      return kExitIo;
    }
    hexctl::Vec3 e(parts[0], parts[1], parts[2]);
    if (e.norm() == 0.0) {
      std::cerr << "error: --direction must be nonzero\n";
      return kExitIo;
    }
    e.normalize();
    out["direction"] = {e.x(), e.y(), e.z()};
    out["f_limit_along"] =
        hexctl::wrench_limit_along(am, hexctl::WrenchKind::kForce, e);
    out["m_limit_along"] =
        hexctl::wrench_limit_along(am, hexctl::WrenchKind::kTorque, e);
  }

  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

struct SimulateArgs {
  std::string scenario_path;
  std::string out_dir;
};

int run_simulate(const SimulateArgs& args) {
  hexctl::Scenario sc;
  try {
    sc = hexctl::load_scenario(args.scenario_path);
  } catch (const hexctl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  const fs::path out_dir(args.out_dir);
  try {
    ensure_writable_dir(out_dir);
  } catch (const hexctl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  hexctl::ScenarioLog log;
  try {
    log = hexctl::run_scenario(sc);
  } catch (const hexctl::SingularDesign& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSingular;
  }

  try {
    hexctl::write_log_csv(out_dir / "log.csv", log);
    const hexctl::Metrics metrics = hexctl::summarize_metrics(log);
    const json jm = hexctl::metrics_to_json(metrics);
    std::ofstream mf(out_dir / "metrics.json");
    if (!mf) throw hexctl::Error("cannot write metrics.json");
    mf << jm.dump(2) << "\n";
    std::cout << jm.dump(2) << "\n";
  } catch (const hexctl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  if (log.failed && log.failure == "attitude_singularity") {
    std::cerr << "error: attitude singularity encountered\n";
    return kExitAttitudeSingularity;
  }
  if (!log.completed) {
    std::cerr << "error: t_max exceeded before all waypoints were achieved\n";
    return kExitTimeout;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holonomic hexrotor design optimization and simulation"};
  app.require_subcommand(1);

  DesignArgs design_args;
  auto* design = app.add_subcommand(
      "design", "optimize tilt angles and spin pattern; export the Pareto front");
  design->add_option("--config", design_args.config_path,
                     "optimizer settings JSON");
  design->add_option("--lambda", design_args.lambda_list,
                     "comma-separated lambda grid in [0,1]");
  design->add_option("--n-starts", design_args.n_starts,
                     "random starts per spin orbit");
  design->add_option("--seed", design_args.seed, "RNG seed");
  design->add_option("--d", design_args.d, "arm length [m]");
  design->add_option("--k-ratio", design_args.k_ratio, "K2/K1 ratio");
  design->add_option("--phi-max-deg", design_args.phi_max_deg,
                     "tilt bound [deg]");
  design->add_option("--threads", design_args.threads, "worker threads");
  design->add_option("--out", design_args.out_dir, "output directory")
      ->required();

  LimitsArgs limits_args;
  auto* limits = app.add_subcommand(
      "limits", "report force/torque limits of a design");
  limits->add_option("design", limits_args.design_path, "design JSON")
      ->required();
  limits->add_option("--direction", limits_args.direction,
                     "unit direction x,y,z for directional limits");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "run a closed-loop scenario");
  simulate->add_option("scenario", sim_args.scenario_path, "scenario JSON")
      ->required();
  simulate->add_option("--out", sim_args.out_dir, "output directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (design->parsed()) return run_design(design_args);
  if (limits->parsed()) return run_limits(limits_args);
  if (simulate->parsed()) return run_simulate(sim_args);
  return kExitIo;
}
