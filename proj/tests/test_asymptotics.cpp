// Sweep metrics and experiments.  Oracles: closed-form integrals of constant
// and linear integrands (exact under the trapezoidal rule), hand-evaluated
// spectral factors, and the stationary balanced state shared by every
// operator exponent.

#include <cmath>
#include <random>

#include "doctest.h"
#include "fch/asymptotics.hpp"
#include "fch/potential.hpp"
#include "fch/solver.hpp"
#include "fch/spectral.hpp"

using namespace fch;

namespace {

const double kPi = std::acos(-1.0);

SolverConfig small_config(OperatorPtr op) {
  SolverConfig cfg;
  cfg.op_a = op;
  cfg.op_b = op;
  cfg.potential = Potential::regular();
  cfg.dt = 1e-3;
  cfg.t_final = 0.05;
  return cfg;
}

Field constant_field(const OperatorPtr& op, double value) {
  Field f = zero_field(op);
  f.coeffs[0] = value * std::sqrt(op->domain_measure());
  return f;
}

// hand-built trajectory with prescribed constant states (metrics oracles)
Trajectory manual_trajectory(const OperatorPtr& op, double dt, int steps,
                             const Field& value) {
  Trajectory t;
  t.config.op_a = op;
  t.config.op_b = op;
  t.config.dt = dt;
  t.config.t_final = dt * steps;
  for (int n = 0; n <= steps; ++n)
    t.states.push_back({n * dt, value, zero_field(op)});
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("asymptotics");

TEST_CASE("identical trajectories give vanishing metrics") {
  auto op = SpectralOperator::cosine_neumann(8, kPi);
  SolverConfig cfg = small_config(op);
  Field phi0 = constant_field(op, 0.2);
  phi0.coeffs[1] = 0.3;
  Trajectory t = run(cfg, phi0, zero_forcing(op));
  REQUIRE(t.completed);
  const TrajectoryMetrics m = trajectory_metrics(t, t, 1.0);
  CHECK(m.l2_q == 0.0);
  CHECK(m.linf_h == 0.0);
  CHECK(m.weighted_l2 == 0.0);
}

TEST_CASE("kappa = 0 reduces the weighted norm to the plain one") {
  auto op = SpectralOperator::cosine_neumann(8, kPi);
  Trajectory a = manual_trajectory(op, 0.1, 5, constant_field(op, 0.7));
  Trajectory b = manual_trajectory(op, 0.1, 5, constant_field(op, -0.1));
  const TrajectoryMetrics m = trajectory_metrics(a, b, 0.0);
  CHECK(m.weighted_l2 == m.l2_q);
}

TEST_CASE("constant-in-time difference integrates to |d| sqrt(T)") {
  auto op = SpectralOperator::cosine_neumann(8, 2.0);
  Field d = make_field(op, {0.4, -0.3, 0, 0, 0.1, 0, 0, 0});
  const double T = 0.8, dt = 0.05;
  Trajectory a = manual_trajectory(op, dt, 16, d);
  Trajectory b = manual_trajectory(op, dt, 16, zero_field(op));
  const TrajectoryMetrics m = trajectory_metrics(a, b, 0.0);
  CHECK(m.l2_q == doctest::Approx(norm_h(d) * std::sqrt(T)).epsilon(1e-13));
  CHECK(m.linf_h == doctest::Approx(norm_h(d)).epsilon(1e-14));
}

TEST_CASE("mesh mismatch is rejected") {
  auto op = SpectralOperator::cosine_neumann(8, kPi);
  Trajectory a = manual_trajectory(op, 0.1, 5, constant_field(op, 1.0));
  Trajectory b = manual_trajectory(op, 0.1, 4, constant_field(op, 1.0));
  Trajectory c = manual_trajectory(op, 0.2, 5, constant_field(op, 1.0));
  CHECK_THROWS_AS(trajectory_metrics(a, b, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(trajectory_metrics(a, c, 0.0), std::invalid_argument);
}

TEST_CASE("running time integral is exact on linear integrands") {
  const double dt = 0.25;
  std::vector<double> ones(9, 1.0), lin(9);
  for (int n = 0; n < 9; ++n) lin[n] = n * dt;
  const auto i1 = running_time_integral(ones, dt);
  const auto i2 = running_time_integral(lin, dt);
  for (int n = 0; n < 9; ++n) {
    CHECK(i1[n] == doctest::Approx(n * dt).epsilon(1e-14));
    const double t = n * dt;
    CHECK(i2[n] == doctest::Approx(0.5 * t * t).epsilon(1e-14));
  }
}

TEST_CASE("operator limit: single mode factor and exact per-mode errors") {
  auto op = SpectralOperator::cosine_neumann(8, kPi / 2.0);
  // second mode on (0, pi/2) has eigenvalue (pi / (pi/2))^2 = 4
  REQUIRE(op->eigenvalue(1) == doctest::Approx(4.0).epsilon(1e-14));
  Field v = zero_field(op);
  v.coeffs[1] = 0.6;
  auto rep = operator_limit_check(v, {0.1}, op);
  CHECK(rep.entries[0].err_bsigma ==
        doctest::Approx(0.1486983549970351 * 0.6).epsilon(1e-13));

  // kernel fields see zero error for every sigma
  Field c = constant_field(op, 3.0);
  for (const auto& en : operator_limit_check(c, {0.4, 0.1, 0.01}, op).entries)
    CHECK(en.err_bsigma == 0.0);

  // mixed field: strictly decreasing errors over a halving sequence, each
  // matching the coefficient formula
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Field w = zero_field(op);
  for (int j = 0; j < op->n_modes(); ++j) w.coeffs[j] = uni(rng);
  const std::vector<double> sigmas{0.4, 0.2, 0.1, 0.05, 0.025};
  auto mixed = operator_limit_check(w, sigmas, op);
  CHECK(mixed.monotone_bsigma);
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    double acc = 0.0;
    for (int j = 1; j < op->n_modes(); ++j) {
      const double e =
          (std::pow(op->eigenvalue(j), sigmas[i]) - 1.0) * w.coeffs[j];
      acc += e * e;
    }
    CHECK(std::abs(mixed.entries[i].err_bsigma - std::sqrt(acc)) <= 1e-13);
  }
}

TEST_CASE("sigma sweep: the balanced constant state is shared by all runs") {
  auto op = SpectralOperator::cosine_neumann(12, kPi);
  SolverConfig cfg = small_config(op);
  cfg.lambda = 0.05;
  const double bal =
      cfg.potential.yosida(cfg.lambda, 0.5) + cfg.potential.pi(0.5);
  Field phi0 = constant_field(op, 0.5);
  Field f = constant_field(op, bal);
  auto rep = sweep_sigma(cfg, phi0, constant_forcing(f), {0.4, 0.2, 0.1});
  REQUIRE(rep.completed);
  for (const auto& en : rep.entries) {
    CHECK(en.err_l2q <= 1e-8);
    CHECK(en.err_bsigma <= 1e-8);
    CHECK(en.err_linf <= 1e-8);
  }
}

TEST_CASE("sigma sweep: zero data gives exactly zero errors") {
  auto op = SpectralOperator::cosine_neumann(8, kPi);
  SolverConfig cfg = small_config(op);
  cfg.potential = Potential::unconstrained(0.0);
  auto rep = sweep_sigma(cfg, zero_field(op), zero_forcing(op), {0.3});
  REQUIRE(rep.completed);
  CHECK(rep.entries.size() == 1);
  CHECK(rep.entries[0].err_l2q == 0.0);
  CHECK(rep.entries[0].err_bsigma == 0.0);
}

TEST_CASE("sigma sweep: errors decrease as sigma shrinks") {
  auto op = SpectralOperator::cosine_neumann(32, kPi);
  SolverConfig cfg = small_config(op);
  cfg.lambda = 1e-2;
  cfg.t_final = 0.25;
  Field phi0 = constant_field(op, 0.2);
  phi0.coeffs[1] = 0.3;
  auto rep =
      sweep_sigma(cfg, phi0, zero_forcing(op), {0.4, 0.2, 0.1, 0.05});
  REQUIRE(rep.completed);
  CHECK(rep.monotone_l2q);
  CHECK(rep.monotone_bsigma);
  CHECK(rep.entries.back().err_l2q < rep.entries.front().err_l2q);
}

TEST_CASE("lambda sweep: potentials without a convex part ignore lambda") {
  auto op = SpectralOperator::cosine_neumann(12, kPi);
  SolverConfig cfg = small_config(op);
  cfg.potential = Potential::unconstrained(0.5);
  Field phi0 = constant_field(op, 0.2);
  phi0.coeffs[2] = 0.4;
  auto rep = sweep_lambda(cfg, phi0, zero_forcing(op), {1e-1, 1e-2, 1e-3});
  REQUIRE(rep.completed);
  for (std::size_t i = 1; i < rep.entries.size(); ++i)
    CHECK(rep.entries[i].err_l2q <= 1e-12);
}

TEST_CASE("lambda sweep: successive differences decrease for the quartic") {
  auto op = SpectralOperator::cosine_neumann(16, kPi);
  SolverConfig cfg = small_config(op);
  cfg.t_final = 0.1;
  Field phi0 = constant_field(op, 0.2);
  phi0.coeffs[1] = 0.3;
  auto rep = sweep_lambda(cfg, phi0, zero_forcing(op), {1e-1, 1e-2, 1e-3});
  REQUIRE(rep.completed);
  REQUIRE(rep.entries.size() == 3);
  CHECK(rep.entries[0].err_l2q == 0.0);  // no predecessor
  CHECK(rep.entries[2].err_l2q < rep.entries[1].err_l2q);
  CHECK(rep.monotone_l2q);
}

TEST_CASE("lambda sweep rejects non-decreasing parameter lists") {
  auto op = SpectralOperator::cosine_neumann(8, kPi);
  SolverConfig cfg = small_config(op);
  CHECK_THROWS_AS(
      sweep_lambda(cfg, zero_field(op), zero_forcing(op), {1e-2, 1e-1}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      sweep_lambda(cfg, zero_field(op), zero_forcing(op), {1e-2, -1.0}),
      std::invalid_argument);
}

TEST_CASE("continuous dependence: equal forcings are degenerate") {
  auto op = SpectralOperator::cosine_neumann(12, kPi);
  SolverConfig cfg = small_config(op);
  cfg.mode = Mode::limit;
  Field phi0 = constant_field(op, 0.2);
  phi0.coeffs[1] = 0.3;
  Field f = constant_field(op, 0.1);
  auto rec = continuous_dependence_experiment(cfg, phi0, constant_forcing(f),
                                              constant_forcing(f));
  CHECK(rec.degenerate);
  CHECK(rec.ratio == 0.0);
  CHECK(rec.numerator == 0.0);  // discrete solve is deterministic
}

TEST_CASE("continuous dependence: Gronwall constant and measured ratio") {
  auto op = SpectralOperator::cosine_neumann(16, kPi);
  SolverConfig cfg = small_config(op);
  cfg.mode = Mode::limit;
  cfg.t_final = 0.25;

  // frozen evaluation of (2 tau)^{-1/2} exp((1 + L_pi) T / tau) at
  // tau = 1, L_pi = 1:  T = 1 -> 5.2248516741216795, T = 0.25 -> 1.1658...
  {
    SolverConfig c1 = cfg;
    c1.t_final = 1.0;
    Field phi0 = constant_field(op, 0.1);
    auto rec = continuous_dependence_experiment(
        c1, phi0, zero_forcing(op), zero_forcing(op));
    CHECK(rec.bound == doctest::Approx(5.2248516741216795).epsilon(1e-12));
  }

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-0.5, 0.5);
  Field phi0 = constant_field(op, 0.2);
  phi0.coeffs[1] = 0.3;
  for (int pair = 0; pair < 2; ++pair) {
    Field f1 = zero_field(op), f2 = zero_field(op);
    for (int j = 0; j < 6; ++j) {
      f1.coeffs[j] = uni(rng);
      f2.coeffs[j] = f1.coeffs[j] + 0.4 * uni(rng);
    }
    auto rec = continuous_dependence_experiment(
        cfg, phi0, constant_forcing(f1), constant_forcing(f2));
    CHECK(rec.bound == doctest::Approx(1.165821990798562).epsilon(1e-12));
    CHECK_FALSE(rec.degenerate);
    CHECK(rec.ratio <= 1.05 * rec.bound);
  }
}

TEST_CASE("continuous dependence requires the limit mode") {
  auto op = SpectralOperator::cosine_neumann(8, kPi);
  SolverConfig cfg = small_config(op);  // viscous by default
  CHECK_THROWS_AS(
      continuous_dependence_experiment(cfg, zero_field(op), zero_forcing(op),
                                       zero_forcing(op)),
      std::invalid_argument);
}

TEST_SUITE_END();
