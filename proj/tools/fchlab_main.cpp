// fchlab: command-line driver for the spectral phase-field laboratory.
//
// Subcommands
//   simulate      run the evolution described by a config file and persist
//                 trajectory.csv / summary.json / manifest.json
//   limit         same, but force the relaxation-limit mode
//   sweep-sigma   viscous runs against the limit reference over a sigma list
//   sweep-lambda  Cauchy study of the regularization level lambda
//   contdep       continuous dependence on the forcing vs the Gronwall bound
//   verify        built-in self checks ([ ok ]/[FAIL] lines)
//
// Exit codes: 0 success, 1 run or assertion failure (incomplete trajectory,
// failed sweep, bound violation, failed self check), 2 usage/config errors.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fch/asymptotics.hpp"
#include "fch/config.hpp"
#include "fch/run_io.hpp"
#include "fch/solver.hpp"
#include "fch/spectral.hpp"
#include "fch/verify.hpp"

namespace fs = std::filesystem;

namespace {

fch::Scenario load_scenario(const std::string& path) {
  if (path.empty()) return fch::parse_config("");
  return fch::parse_config_file(path);
}

std::vector<double> parse_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(csv);
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos])))
      ++pos;
    if (pos != item.size() || item.empty())
      throw fch::ConfigError(std::string(what) + ": cannot parse '" + item +
                             "' as a number");
    out.push_back(value);
  }
  if (out.empty())
    throw fch::ConfigError(std::string(what) + ": empty list");
  return out;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

nlohmann::json sweep_json(const fch::ConvergenceReport& rep) {
  nlohmann::json j;
  j["parameter"] = rep.parameter;
  j["monotone_l2q"] = rep.monotone_l2q;
  j["monotone_bsigma"] = rep.monotone_bsigma;
  j["completed"] = rep.completed;
  j["note"] = rep.note;
  j["version"] = fch::kVersion;
  auto arr = nlohmann::json::array();
  for (const auto& en : rep.entries)
    arr.push_back({{"param", en.param},
                   {"err_l2q", en.err_l2q},
                   {"err_linf", en.err_linf},
                   {"err_bsigma", en.err_bsigma},
                   {"err_weighted", en.err_weighted},
                   {"violation", en.violation},
                   {"xi_residual", en.xi_residual},
                   {"runtime_s", en.runtime_s}});
  j["entries"] = arr;
  return j;
}

int run_simulation(const std::string& config_path, const std::string& out_dir,
                   bool force_limit) {
  fch::Scenario s = load_scenario(config_path);
  if (force_limit) {
    s.config.mode = fch::Mode::limit;
    s.keys["mode"] = "limit";
  }
  fs::create_directories(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  const fch::Trajectory traj = fch::run(s.config, s.phi0, s.forcing);
  const double runtime_s = seconds_since(t0);

  const fs::path dir(out_dir);
  fch::write_trajectory_csv(traj, (dir / "trajectory.csv").string());
  fch::write_text_file((dir / "summary.json").string(),
                       fch::summary_json(s, traj, runtime_s));
  const fch::RunManifest manifest = fch::make_manifest(
      s, runtime_s, {"trajectory.csv", "summary.json", "manifest.json"});
  fch::write_text_file((dir / "manifest.json").string(),
                       fch::manifest_to_json(manifest));
  std::cout << "wrote " << (dir / "trajectory.csv").string() << ", "
            << (dir / "summary.json").string() << ", "
            << (dir / "manifest.json").string() << "\n";

  if (!traj.completed) {
    std::cerr << "run failed: " << traj.failure_message << "\n";
    return 1;
  }
  const auto& d = traj.diagnostics.back();
  std::cout << "final: t = " << fch::format_double(d.time)
            << ", mean = " << fch::format_double(d.mean_phi)
            << ", energy = " << fch::format_double(d.energy) << "\n";
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir,
              const std::string& list_csv, bool sigma_sweep) {
  fch::Scenario s = load_scenario(config_path);
  const std::vector<double> list =
      parse_list(list_csv, sigma_sweep ? "--sigmas" : "--lambdas");
  fs::create_directories(out_dir);

  const fch::ConvergenceReport rep =
      sigma_sweep ? fch::sweep_sigma(s.config, s.phi0, s.forcing, list)
                  : fch::sweep_lambda(s.config, s.phi0, s.forcing, list);

  const fs::path dir(out_dir);
  const std::string stem = sigma_sweep ? "sweep_sigma" : "sweep_lambda";
  fch::write_report_csv(rep, (dir / (stem + ".csv")).string());
  fch::write_text_file((dir / (stem + ".json")).string(),
                       sweep_json(rep).dump(2) + "\n");
  std::cout << "wrote " << (dir / (stem + ".csv")).string() << ", "
            << (dir / (stem + ".json")).string() << "\n";

  if (!rep.completed) {
    std::cerr << "sweep failed: " << rep.note << "\n";
    return 1;
  }
  for (const auto& en : rep.entries)
    std::cout << rep.parameter << " = " << fch::format_double(en.param)
              << ": err_l2q = " << fch::format_double(en.err_l2q)
              << ", violation = " << fch::format_double(en.violation)
              << ", xi_residual = " << fch::format_double(en.xi_residual)
              << "\n";
  return 0;
}

int run_contdep(const std::string& config_path, const std::string& out_dir,
                int pairs) {
  if (pairs < 1) throw fch::ConfigError("--pairs must be at least 1");
  fch::Scenario s = load_scenario(config_path);
  s.config.mode = fch::Mode::limit;  // the bound concerns the limit system
  s.keys["mode"] = "limit";
  fs::create_directories(out_dir);

  std::mt19937 rng(s.seed);
  std::uniform_real_distribution<double> base(-0.5, 0.5);
  std::uniform_real_distribution<double> bump(-0.2, 0.2);
  const int n_modes = s.config.op_a->n_modes();
  const int active = std::min(6, n_modes);

  std::string csv =
      "pair,ratio,bound,numerator,denominator,degenerate,within_bound\n";
  auto arr = nlohmann::json::array();
  bool all_within = true;
  for (int p = 0; p < pairs; ++p) {
    std::vector<double> c1(static_cast<size_t>(n_modes), 0.0);
    std::vector<double> c2(static_cast<size_t>(n_modes), 0.0);
    for (int j = 0; j < active; ++j) {
      c1[j] = base(rng);
      c2[j] = c1[j] + bump(rng);
    }
    const fch::Field f1 = fch::make_field(s.config.op_a, c1);
    const fch::Field f2 = fch::make_field(s.config.op_a, c2);
    const fch::ContDepRecord rec = fch::continuous_dependence_experiment(
        s.config, s.phi0, fch::constant_forcing(f1), fch::constant_forcing(f2));
    all_within = all_within && (rec.degenerate || rec.within_bound);
    csv += std::to_string(p) + ',' + fch::format_double(rec.ratio) + ',' +
           fch::format_double(rec.bound) + ',' +
           fch::format_double(rec.numerator) + ',' +
           fch::format_double(rec.denominator) + ',' +
           (rec.degenerate ? "1" : "0") + ',' +
           (rec.within_bound ? "1" : "0") + '\n';
    arr.push_back({{"pair", p},
                   {"ratio", rec.ratio},
                   {"bound", rec.bound},
                   {"numerator", rec.numerator},
                   {"denominator", rec.denominator},
                   {"degenerate", rec.degenerate},
                   {"within_bound", rec.within_bound}});
    std::cout << "pair " << p << ": ratio = " << fch::format_double(rec.ratio)
              << " vs bound = " << fch::format_double(rec.bound) << "\n";
  }

  nlohmann::json j;
  j["pairs"] = arr;
  j["all_within_bound"] = all_within;
  j["version"] = fch::kVersion;
  const fs::path dir(out_dir);
  fch::write_text_file((dir / "contdep.csv").string(), csv);
  fch::write_text_file((dir / "contdep.json").string(), j.dump(2) + "\n");
  std::cout << "wrote " << (dir / "contdep.csv").string() << ", "
            << (dir / "contdep.json").string() << "\n";

  if (!all_within) {
    std::cerr << "continuous-dependence ratio exceeded the bound\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fchlab: spectral laboratory for conserved phase-field systems with "
      "relaxed monotone potentials"};
  app.set_version_flag("--version", std::string(fch::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string sigmas = "0.4,0.2,0.1,0.05";
  std::string lambdas = "0.1,0.01,0.001";
  std::string suite = "all";
  int pairs = 10;

  CLI::App* sim = app.add_subcommand(
      "simulate", "run the configured evolution and persist the results");
  CLI::App* lim = app.add_subcommand(
      "limit", "run the relaxation-limit evolution (forces mode = limit)");
  CLI::App* ssig = app.add_subcommand(
      "sweep-sigma", "viscous runs against the limit reference");
  CLI::App* slam = app.add_subcommand(
      "sweep-lambda", "Cauchy study of the regularization level");
  CLI::App* cdep = app.add_subcommand(
      "contdep", "continuous dependence on the forcing vs the Gronwall bound");
  CLI::App* ver =
      app.add_subcommand("verify", "run built-in self checks");

  for (CLI::App* sub : {sim, lim, ssig, slam, cdep}) {
    sub->add_option("--config", config_path,
                    "configuration file (key = value lines; optional)");
    sub->add_option("--out", out_dir, "output directory (created if missing)");
  }
  ssig->add_option("--sigmas", sigmas, "comma-separated sigma values");
  slam->add_option("--lambdas", lambdas, "comma-separated lambda values");
  cdep->add_option("--pairs", pairs, "number of random forcing pairs");
  ver->add_option(
      "--suite", suite,
      "spectral|potentials|solver|convex_vi|asymptotics|cli_io|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return run_simulation(config_path, out_dir, false);
    if (lim->parsed()) return run_simulation(config_path, out_dir, true);
    if (ssig->parsed()) return run_sweep(config_path, out_dir, sigmas, true);
    if (slam->parsed()) return run_sweep(config_path, out_dir, lambdas, false);
    if (cdep->parsed()) return run_contdep(config_path, out_dir, pairs);
    if (ver->parsed()) return fch::run_verify_suite(suite, std::cout) ? 1 : 0;
  } catch (const fch::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
