// Built-in self checks behind the `verify` subcommand.
//
// Each suite re-derives a handful of analytically known facts (orthonormality
// residuals, exact decay rates, closed-form norms, round-trip identities) and
// compares the library against them, printing one [ ok ]/[FAIL] line per
// check.  The suites are deliberately small and fast: they are a smoke test
// for an installed binary, not a replacement for the unit test executable.

#pragma once

#include <iosfwd>
#include <string>

namespace fch {

// suite: "spectral", "potentials", "solver", "convex_vi", "asymptotics",
// "cli_io", or "all".  Returns the number of failed checks; throws
// ConfigError for an unknown suite name.
int run_verify_suite(const std::string& suite, std::ostream& out);

}  // namespace fch
