// Key-value scenario parsing: defaults, typing, admissibility validation,
// and the canonical serialization used for reproducibility checks.

#include "fch/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "fch/potential.hpp"

namespace fch {

namespace {

// canonical key order for serialization
const std::vector<std::string> kKeyOrder = {
    "domain_length", "n_modes",        "r",
    "sigma",         "sigma0",         "tau",
    "lambda",        "dt",             "t_final",
    "mode",          "potential.type", "potential.c1",
    "potential.c2",  "potential.slope", "phi0.kind",
    "phi0.value",    "phi0.mean",      "phi0.terms",
    "phi0.path",     "forcing.kind",   "forcing.value",
    "forcing.path",  "newton_tol",     "newton_max_iter",
    "seed"};

std::map<std::string, std::string> default_keys() {
  return {{"domain_length", "1"},
          {"n_modes", "32"},
          {"r", "0.5"},
          {"sigma", "0.25"},
          {"sigma0", "1"},
          {"tau", "1"},
          {"lambda", "0.01"},
          {"dt", "0.001"},
          {"t_final", "0.1"},
          {"mode", "viscous"},
          {"potential.type", "regular"},
          {"potential.c1", "2"},
          {"potential.c2", "1"},
          {"potential.slope", "0"},
          {"phi0.kind", "constant"},
          {"phi0.value", "0"},
          {"phi0.mean", "0"},
          {"phi0.terms", ""},
          {"phi0.path", ""},
          {"forcing.kind", "zero"},
          {"forcing.value", "0"},
          {"forcing.path", ""},
          {"newton_tol", "1e-10"},
          {"newton_max_iter", "50"},
          {"seed", "12345"}};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double as_double(const std::map<std::string, std::string>& kv,
                 const std::string& key) {
  const std::string& v = kv.at(key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("ill-typed value for key '" + key + "': '" + v + "'");
  }
}

long as_long(const std::map<std::string, std::string>& kv,
             const std::string& key) {
  const std::string& v = kv.at(key);
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("ill-typed value for key '" + key + "': '" + v + "'");
  }
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// "2:0.3,5:-0.1" -> sparse higher-mode amplitudes (1-based mode index)
std::vector<std::pair<int, double>> parse_terms(const std::string& spec) {
  std::vector<std::pair<int, double>> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("ill-typed phi0.terms entry '" + item +
                        "' (expected index:amplitude)");
    try {
      std::size_t u1 = 0, u2 = 0;
      const std::string is = trim(item.substr(0, colon));
      const std::string as = trim(item.substr(colon + 1));
      const int idx = std::stoi(is, &u1);
      const double amp = std::stod(as, &u2);
      if (u1 != is.size() || u2 != as.size())
        throw std::invalid_argument("");
      out.emplace_back(idx, amp);
    } catch (const std::exception&) {
      throw ConfigError("ill-typed phi0.terms entry '" + item + "'");
    }
  }
  return out;
}

std::vector<double> read_coefficient_file(const std::string& path,
                                          int expected) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open coefficient file '" + path + "'");
  std::vector<double> vals;
  double x;
  while (in >> x) vals.push_back(x);
  if (!in.eof())
    throw ConfigError("malformed coefficient file '" + path + "'");
  if (static_cast<int>(vals.size()) != expected)
    throw ConfigError("coefficient file '" + path + "' holds " +
                      std::to_string(vals.size()) + " values, expected " +
                      std::to_string(expected));
  return vals;
}

}  // namespace

Scenario parse_config(const std::string& text) {
  auto kv = default_keys();

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (kv.find(key) == kv.end())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": unknown configuration key '" + key + "'");
    kv[key] = value;
  }

  Scenario s;

  // scalars and ranges
  const double domain_length = as_double(kv, "domain_length");
  const long n_modes = as_long(kv, "n_modes");
  if (!(domain_length > 0)) throw ConfigError("domain_length must be positive");
  if (n_modes < 1 || n_modes > 4096)
    throw ConfigError("n_modes must lie in [1, 4096]");
  s.config.r = as_double(kv, "r");
  s.config.sigma = as_double(kv, "sigma");
  s.config.sigma0 = as_double(kv, "sigma0");
  s.config.tau = as_double(kv, "tau");
  s.config.lambda = as_double(kv, "lambda");
  s.config.dt = as_double(kv, "dt");
  s.config.t_final = as_double(kv, "t_final");
  s.config.newton_tol = as_double(kv, "newton_tol");
  s.config.newton_max_iter = static_cast<int>(as_long(kv, "newton_max_iter"));
  s.seed = static_cast<unsigned>(as_long(kv, "seed"));

  const std::string mode = kv.at("mode");
  if (mode == "viscous")
    s.config.mode = Mode::viscous_fractional;
  else if (mode == "limit")
    s.config.mode = Mode::limit;
  else
    throw ConfigError("mode must be 'viscous' or 'limit', got '" + mode + "'");

  if (!(s.config.r > 0))
    throw ConfigError("constraint (2.1) violated: r must be positive");
  if (!(s.config.tau > 0))
    throw ConfigError("constraint (2.1) violated: tau must be positive");
  if (!(s.config.sigma0 > 0))
    throw ConfigError("constraint (2.1) violated: sigma0 must be positive");
  if (s.config.mode == Mode::viscous_fractional &&
      !(s.config.sigma > 0 && s.config.sigma < s.config.sigma0))
    throw ConfigError(
        "constraint (2.1) violated: sigma must lie in (0, sigma0)");
  if (!(s.config.lambda > 0)) throw ConfigError("lambda must be positive");
  if (!(s.config.dt > 0)) throw ConfigError("dt must be positive");
  if (!(s.config.t_final >= s.config.dt))
    throw ConfigError("t_final must be at least dt");
  if (!(s.config.newton_tol > 0))
    throw ConfigError("newton_tol must be positive");
  if (s.config.newton_max_iter < 1)
    throw ConfigError("newton_max_iter must be at least 1");

  // potential; parameter violations carry the admissibility code
  const std::string pot_type = kv.at("potential.type");
  if (pot_type == "regular") {
    s.config.potential = Potential::regular();
  } else if (pot_type == "logarithmic") {
    const double c1 = as_double(kv, "potential.c1");
    if (!(c1 > 1))
      throw ConfigError(
          "constraint (2.14) violated: logarithmic potential requires c1 > 1");
    s.config.potential = Potential::logarithmic(c1);
  } else if (pot_type == "double_obstacle") {
    const double c2 = as_double(kv, "potential.c2");
    if (!(c2 > 0))
      throw ConfigError(
          "constraint (2.14) violated: double-obstacle potential requires "
          "c2 > 0");
    s.config.potential = Potential::double_obstacle(c2);
  } else if (pot_type == "unconstrained") {
    s.config.potential =
        Potential::unconstrained(as_double(kv, "potential.slope"));
  } else {
    throw ConfigError("unknown potential.type '" + pot_type + "'");
  }

  // operators: Neumann cosine family on (0, L) for both equations
  auto op = SpectralOperator::cosine_neumann(static_cast<int>(n_modes),
                                             domain_length);
  s.config.op_a = op;
  s.config.op_b = op;

  // initial state
  const std::string phi0_kind = kv.at("phi0.kind");
  if (phi0_kind == "constant") {
    s.phi0 = zero_field(op);
    s.phi0.coeffs[0] =
        as_double(kv, "phi0.value") * std::sqrt(op->domain_measure());
  } else if (phi0_kind == "mode_mix") {
    s.phi0 = zero_field(op);
    s.phi0.coeffs[0] =
        as_double(kv, "phi0.mean") * std::sqrt(op->domain_measure());
    for (const auto& [idx, amp] : parse_terms(kv.at("phi0.terms"))) {
      if (idx < 2 || idx > n_modes)
        throw ConfigError("phi0.terms index " + std::to_string(idx) +
                          " out of range [2, n_modes]");
      s.phi0.coeffs[idx - 1] = amp;
    }
  } else if (phi0_kind == "file") {
    s.phi0 = make_field(op, read_coefficient_file(kv.at("phi0.path"),
                                                  static_cast<int>(n_modes)));
  } else {
    throw ConfigError("unknown phi0.kind '" + phi0_kind + "'");
  }

  // forcing
  const std::string f_kind = kv.at("forcing.kind");
  if (f_kind == "zero") {
    s.forcing = zero_forcing(op);
  } else if (f_kind == "constant") {
    Field f = zero_field(op);
    f.coeffs[0] =
        as_double(kv, "forcing.value") * std::sqrt(op->domain_measure());
    s.forcing = constant_forcing(f);
  } else if (f_kind == "file") {
    Field f = make_field(op, read_coefficient_file(kv.at("forcing.path"),
                                                   static_cast<int>(n_modes)));
    s.forcing = constant_forcing(f);
  } else {
    throw ConfigError("unknown forcing.kind '" + f_kind + "'");
  }

  // initial-state admissibility
  if (!std::isfinite(beta_hat_integral(s.config.potential, s.phi0)))
    throw ConfigError(
        "constraint (2.21) violated: initial state has infinite convex "
        "energy");
  if (op->kernel_dim() > 0) {
    const double m0 = mean_value(s.phi0);
    if (!s.config.potential.in_domain_interior(m0))
      throw ConfigError(
          "constraint (2.22) violated: initial mean " + format_number(m0) +
          " must belong to the interior of the potential domain");
  }

  // normalized echo of the document
  s.keys = std::move(kv);
  for (const std::string& key :
       {"domain_length", "r", "sigma", "sigma0", "tau", "lambda", "dt",
        "t_final", "potential.c1", "potential.c2", "potential.slope",
        "phi0.value", "phi0.mean", "forcing.value", "newton_tol"})
    s.keys[key] = format_number(as_double(s.keys, key));
  return s;
}

Scenario parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const Scenario& s) {
  std::string out;
  for (const auto& key : kKeyOrder) {
    const auto it = s.keys.find(key);
    if (it == s.keys.end()) continue;
    out += key;
    out += " = ";
    out += it->second;
    out += '\n';
  }
  return out;
}

}  // namespace fch
