// Flat key-value configuration for the command-line tools.
//
// Documents are UTF-8 text, one `key = value` pair per line, '#' comments.
// Keys use dotted names (potential.type, phi0.kind, ...); every key has a
// default, so the empty document is valid.  Parsing materializes the full
// scenario: solver configuration, operators, initial state, and forcing.
// Admissibility violations are reported with the tool's validation codes
// ((2.1) exponent/viscosity ranges, (2.14) potential parameters, (2.21)
// finite initial convex energy, (2.22) interior initial mean).

#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "fch/solver.hpp"

namespace fch {

inline constexpr const char* kVersion = "fchlab 1.0.0";

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Scenario {
  SolverConfig config;   // operators and potential installed
  Field phi0;
  ForcingFn forcing;
  unsigned seed = 12345;
  // normalized key-value document (defaults materialized)
  std::map<std::string, std::string> keys;
};

// Parse a document (or a file) into a validated scenario.
Scenario parse_config(const std::string& text);
Scenario parse_config_file(const std::string& path);

// Canonical document: every effective key, fixed order, normalized values.
// parse(serialize(parse(text))) is key-equivalent to parse(text).
std::string serialize_config(const Scenario& s);

}  // namespace fch
