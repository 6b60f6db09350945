// Run persistence: trajectory and sweep CSVs, JSON summaries, and the run
// manifest.  All numeric text uses shortest round-trip formatting, so
// identical inputs produce byte-identical CSV files; wall-clock runtimes are
// reported in the JSON summary only, keeping the CSVs reproducible.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "fch/asymptotics.hpp"
#include "fch/config.hpp"
#include "fch/solver.hpp"

namespace fch {

// shortest decimal string that round-trips to the same double
std::string format_double(double x);

// columns: step,time,mean_phi,energy,norm_phi_H,norm_mu_H,norm_Ar_mu,
//          dtphi_H,K_phi_norm,newton_iters,vi_residual
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

// columns: param,err_l2q,err_linf,err_bsigma,err_weighted,violation,
//          xi_residual   (runtimes live in the JSON summary)
std::string report_csv(const ConvergenceReport& rep);
void write_report_csv(const ConvergenceReport& rep, const std::string& path);

// JSON summary {config, terminal_metrics, runtime_s, version}
std::string summary_json(const Scenario& s, const Trajectory& traj,
                         double runtime_s);

struct RunManifest {
  std::map<std::string, std::string> config_echo;  // all scenario keys
  std::string potential;   // descriptor, e.g. "regular quartic"
  std::string operator_a;  // descriptor incl. modes and domain
  std::string operator_b;
  std::string version;
  double runtime_s = 0.0;
  std::vector<std::string> outputs;  // file paths written by the run

  bool operator==(const RunManifest&) const = default;
};

RunManifest make_manifest(const Scenario& s, double runtime_s,
                          std::vector<std::string> outputs);
std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

// write with path context on failure
void write_text_file(const std::string& path, const std::string& content);

}  // namespace fch
