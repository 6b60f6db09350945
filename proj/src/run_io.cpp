// CSV/JSON persistence with reproducible formatting.

#include "fch/run_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fch {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::string describe_operator(const SpectralOperator& op) {
  std::ostringstream os;
  if (op.kind() == BasisKind::cosine_neumann_1d)
    os << "cosine_neumann_1d n_modes=" << op.n_modes()
       << " L=" << format_double(op.domain_length());
  else
    os << "custom n_modes=" << op.n_modes() << " n_nodes=" << op.n_nodes();
  return os.str();
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::string out =
      "step,time,mean_phi,energy,norm_phi_H,norm_mu_H,norm_Ar_mu,dtphi_H,"
      "K_phi_norm,newton_iters,vi_residual\n";
  for (const auto& d : traj.diagnostics) {
    out += std::to_string(d.step);
    out += ',';
    out += format_double(d.time);
    out += ',';
    out += format_double(d.mean_phi);
    out += ',';
    out += format_double(d.energy);
    out += ',';
    out += format_double(d.norm_phi_h);
    out += ',';
    out += format_double(d.norm_mu_h);
    out += ',';
    out += format_double(d.norm_ar_mu);
    out += ',';
    out += format_double(d.dtphi_h);
    out += ',';
    out += format_double(d.k_phi_norm);
    out += ',';
    out += std::to_string(d.newton_iters);
    out += ',';
    out += format_double(d.vi_residual);
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  write_text_file(path, trajectory_csv(traj));
}

std::string report_csv(const ConvergenceReport& rep) {
  std::string out =
      "param,err_l2q,err_linf,err_bsigma,err_weighted,violation,xi_residual\n";
  for (const auto& en : rep.entries) {
    out += format_double(en.param);
    out += ',';
    out += format_double(en.err_l2q);
    out += ',';
    out += format_double(en.err_linf);
    out += ',';
    out += format_double(en.err_bsigma);
    out += ',';
    out += format_double(en.err_weighted);
    out += ',';
    out += format_double(en.violation);
    out += ',';
    out += format_double(en.xi_residual);
    out += '\n';
  }
  return out;
}

void write_report_csv(const ConvergenceReport& rep, const std::string& path) {
  write_text_file(path, report_csv(rep));
}

std::string summary_json(const Scenario& s, const Trajectory& traj,
                         double runtime_s) {
  json j;
  j["config"] = s.keys;
  json tm;
  if (!traj.diagnostics.empty()) {
    const auto& d = traj.diagnostics.back();
    tm["time"] = d.time;
    tm["mean_phi"] = d.mean_phi;
    tm["energy"] = d.energy;
    tm["norm_phi_H"] = d.norm_phi_h;
    tm["norm_mu_H"] = d.norm_mu_h;
    tm["vi_residual"] = d.vi_residual;
    double drift = 0.0;
    for (const auto& row : traj.diagnostics)
      drift = std::max(drift, std::abs(row.mean_phi - traj.m0));
    tm["max_mean_drift"] = drift;
  }
  tm["completed"] = traj.completed;
  if (!traj.completed) tm["failure"] = traj.failure_message;
  j["terminal_metrics"] = tm;
  j["runtime_s"] = runtime_s;
  j["version"] = kVersion;
  return j.dump(2) + "\n";
}

RunManifest make_manifest(const Scenario& s, double runtime_s,
                          std::vector<std::string> outputs) {
  RunManifest m;
  m.config_echo = s.keys;
  m.potential = s.config.potential.describe();
  m.operator_a = describe_operator(*s.config.op_a);
  m.operator_b = describe_operator(*s.config.op_b);
  m.version = kVersion;
  m.runtime_s = runtime_s;
  m.outputs = std::move(outputs);
  return m;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["config"] = m.config_echo;
  j["potential"] = m.potential;
  j["operator_a"] = m.operator_a;
  j["operator_b"] = m.operator_b;
  j["version"] = m.version;
  j["runtime_s"] = m.runtime_s;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunManifest m;
  m.config_echo = j.at("config").get<std::map<std::string, std::string>>();
  m.potential = j.at("potential").get<std::string>();
  m.operator_a = j.at("operator_a").get<std::string>();
  m.operator_b = j.at("operator_b").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.runtime_s = j.at("runtime_s").get<double>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fch
