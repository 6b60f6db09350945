// Self-check suites: analytically known facts re-derived on the spot and
// compared against the library.  See include/fch/verify.hpp.

#include "fch/verify.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "fch/asymptotics.hpp"
#include "fch/config.hpp"
#include "fch/convex_vi.hpp"
#include "fch/potential.hpp"
#include "fch/run_io.hpp"
#include "fch/solver.hpp"
#include "fch/spectral.hpp"

namespace fch {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Harness {
  std::ostream& out;
  int failures = 0;

  void run(const std::string& name, const std::function<void()>& body) {
    try {
      body();
      out << "[ ok ] " << name << '\n';
    } catch (const std::exception& e) {
      ++failures;
      out << "[FAIL] " << name << ": " << e.what() << '\n';
    }
  }
};

void require(bool cond, const std::string& what) {
  if (!cond) throw std::runtime_error(what);
}

std::string num(double x) { return format_double(x); }

std::vector<double> random_coeffs(int n, unsigned seed, double amp = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<double> c(static_cast<size_t>(n));
  for (auto& x : c) x = u(rng);
  return c;
}

// phi0 with mean 0.2 plus small oscillations; admissible for every built-in
// potential (nodal values stay well inside (-1, 1)).
Field mixed_state(const OperatorPtr& op) {
  std::vector<double> c(static_cast<size_t>(op->n_modes()), 0.0);
  c[0] = 0.2 * std::sqrt(op->domain_measure());
  if (op->n_modes() > 1) c[1] = 0.3;
  if (op->n_modes() > 4) c[4] = 0.1;
  return make_field(op, c);
}

// ---------------------------------------------------------------------- //

void check_spectral(Harness& h) {
  h.run("spectral: cosine basis orthonormality (N=64)", [] {
    const auto op = SpectralOperator::cosine_neumann(64, kPi);
    const double res = op->orthonormality_residual();
    require(res <= 1e-10, "Gram residual " + num(res));
  });

  h.run("spectral: synthesis/analysis round trip", [] {
    const auto op = SpectralOperator::cosine_neumann(32, 2.0);
    const Field f = make_field(op, random_coeffs(32, 11));
    const Field g = to_modal(op, to_nodal(f));
    for (int j = 0; j < 32; ++j)
      require(std::abs(f.coeffs[j] - g.coeffs[j]) <= 1e-12,
              "coefficient " + std::to_string(j) + " drifted");
  });

  h.run("spectral: Parseval identity on the grid", [] {
    const auto op = SpectralOperator::cosine_neumann(24, 1.5);
    const Field f = make_field(op, random_coeffs(24, 12));
    const auto nodal = to_nodal(f);
    double quad = 0.0;
    for (int k = 0; k < op->n_nodes(); ++k)
      quad += op->weights()[k] * nodal[k] * nodal[k];
    const double par = norm_h(f) * norm_h(f);
    require(std::abs(quad - par) <= 1e-12 * std::max(1.0, par),
            "quadrature " + num(quad) + " vs Parseval " + num(par));
  });

  h.run("spectral: fractional powers compose (A^0.3 A^0.7 = A)", [] {
    const auto op = SpectralOperator::cosine_neumann(20, kPi);
    const Field f = make_field(op, random_coeffs(20, 13));
    const Field lhs = apply_power(apply_power(f, 0.3), 0.7);
    const Field rhs = apply_power(f, 1.0);
    const double d = norm_h(lhs - rhs);
    require(d <= 1e-10 * std::max(1.0, norm_h(rhs)),
            "composition residual " + num(d));
  });

  h.run("spectral: kernel projection idempotent, mean consistent", [] {
    const auto op = SpectralOperator::cosine_neumann(16, kPi);
    const Field f = make_field(op, random_coeffs(16, 14));
    const Field p1 = project_kernel(f);
    const Field p2 = project_kernel(p1);
    require(norm_h(p1 - p2) == 0.0, "projection not idempotent");
    const double mean = mean_value(f);
    const double expected = f.coeffs[0] / std::sqrt(op->domain_measure());
    require(std::abs(mean - expected) <= 1e-14, "mean " + num(mean));
  });

  h.run("spectral: Poincare-type bound |v - Pv| <= lambda_2^{-r} |A^r v|", [] {
    const auto op = SpectralOperator::cosine_neumann(16, kPi);
    const Field f = make_field(op, random_coeffs(16, 15));
    const double r = 0.5;
    const double lhs = norm_h(f - project_kernel(f));
    const double rhs =
        std::pow(op->eigenvalue(1), -r) * norm_h(apply_power(f, r));
    require(lhs <= rhs + 1e-12,
            "bound violated: " + num(lhs) + " > " + num(rhs));
  });
}

// ---------------------------------------------------------------------- //

void check_potentials(Harness& h) {
  struct Variant {
    std::string name;
    Potential p;
    double
        lo, hi;  // sampling window for beta_hat convexity (inside the domain)
  };
  const std::vector<Variant> variants = {
      {"regular", Potential::regular(), -2.0, 2.0},
      {"logarithmic(2)", Potential::logarithmic(2.0), -0.99, 0.99},
      {"double_obstacle(4)", Potential::double_obstacle(4.0), -1.0, 1.0},
      {"unconstrained(0.6)", Potential::unconstrained(0.6), -2.0, 2.0},
  };

  for (const auto& v : variants) {
    h.run("potentials: " + v.name + " resolvent laws", [&v] {
      std::mt19937 rng(31u);
      std::uniform_real_distribution<double> u(-2.5, 2.5);
      for (double lambda : {1e-1, 1e-2}) {
        require(v.p.yosida(lambda, 0.0) == 0.0, "beta_lambda(0) != 0");
        std::vector<double> s(500);
        for (auto& x : s) x = u(rng);
        std::sort(s.begin(), s.end());
        for (size_t i = 0; i + 1 < s.size(); ++i) {
          const double y0 = v.p.yosida(lambda, s[i]);
          const double y1 = v.p.yosida(lambda, s[i + 1]);
          require(y1 >= y0 - 1e-12, "beta_lambda not monotone at s=" +
                                        num(s[i]) + " (lambda=" + num(lambda) +
                                        ")");
          require(std::abs(y1 - y0) <=
                      (1.0 / lambda + 1e-9) * (s[i + 1] - s[i]) + 1e-12,
                  "beta_lambda not 1/lambda-Lipschitz at s=" + num(s[i]));
        }
        for (double x : s) {
          const double env = v.p.moreau(lambda, x);
          const double hat = v.p.beta_hat(x);
          if (std::isfinite(hat))
            require(env <= hat + 1e-12, "Moreau envelope above beta_hat");
          const double fd =
              (v.p.moreau(lambda, x + 1e-6) - v.p.moreau(lambda, x - 1e-6)) /
              2e-6;
          require(std::abs(fd - v.p.yosida(lambda, x)) <= 1e-4,
                  "envelope derivative != beta_lambda at s=" + num(x));
        }
      }
    });

    h.run("potentials: " + v.name + " midpoint convexity of beta_hat", [&v] {
      std::mt19937 rng(32u);
      std::uniform_real_distribution<double> u(v.lo, v.hi);
      for (int i = 0; i < 1000; ++i) {
        const double a = u(rng), b = u(rng);
        const double fa = v.p.beta_hat(a), fb = v.p.beta_hat(b);
        const double fm = v.p.beta_hat(0.5 * (a + b));
        require(fm <= 0.5 * (fa + fb) + 1e-12,
                "midpoint convexity fails at (" + num(a) + ", " + num(b) +
                    ")");
      }
    });
  }
}

// ---------------------------------------------------------------------- //

SolverConfig small_config(int n_modes, Mode mode) {
  SolverConfig cfg;
  cfg.op_a = SpectralOperator::cosine_neumann(n_modes, kPi);
  cfg.op_b = cfg.op_a;
  cfg.mode = mode;
  cfg.dt = 1e-3;
  cfg.t_final = 0.05;
  return cfg;
}

void check_solver(Harness& h) {
  h.run("solver: zero data is an exact fixed point", [] {
    SolverConfig cfg = small_config(16, Mode::viscous_fractional);
    cfg.t_final = 10 * cfg.dt;
    const Trajectory traj =
        fch::run(cfg, zero_field(cfg.op_a), zero_forcing(cfg.op_a));
    require(traj.completed, traj.failure_message);
    for (const auto& st : traj.states)
      for (double c : st.phi.coeffs)
        require(std::abs(c) <= 1e-14, "nonzero coefficient " + num(c));
  });

  h.run("solver: mean conserved to round-off", [] {
    SolverConfig cfg = small_config(16, Mode::viscous_fractional);
    const Trajectory traj =
        fch::run(cfg, mixed_state(cfg.op_a), zero_forcing(cfg.op_a));
    require(traj.completed, traj.failure_message);
    for (const auto& d : traj.diagnostics)
      require(std::abs(d.mean_phi - traj.m0) <= 1e-13,
              "mean drift " + num(d.mean_phi - traj.m0));
  });

  for (Mode mode : {Mode::viscous_fractional, Mode::limit}) {
    const std::string tag =
        mode == Mode::viscous_fractional ? "viscous" : "limit";
    h.run("solver: energy nonincreasing (" + tag + " mode)", [mode] {
      SolverConfig cfg = small_config(16, mode);
      const Trajectory traj =
          fch::run(cfg, mixed_state(cfg.op_a), zero_forcing(cfg.op_a));
      require(traj.completed, traj.failure_message);
      for (size_t n = 1; n < traj.diagnostics.size(); ++n) {
        const double inc =
            traj.diagnostics[n].energy - traj.diagnostics[n - 1].energy;
        require(inc <= 10 * cfg.newton_tol, "energy increment " + num(inc));
      }
    });
  }

  h.run("solver: auxiliary problem has exact geometric decay", [] {
    AuxConfig cfg;
    cfg.op = SpectralOperator::cosine_neumann(8, kPi);
    cfg.tau = 0.5;
    cfg.dt = 1e-3;
    cfg.t_final = 0.05;
    cfg.potential = Potential::unconstrained(0.0);
    std::vector<double> c(8, 0.0);
    c[1] = 0.8;
    const Trajectory traj =
        solve_aux(cfg, make_field(cfg.op, c), zero_forcing(cfg.op));
    require(traj.completed, traj.failure_message);
    const int n = traj.n_steps();
    const double expected = 0.8 * std::pow(1.0 + cfg.dt / cfg.tau, -n);
    const double got = traj.states.back().phi.coeffs[1];
    require(std::abs(got - expected) <= 1e-12 * std::abs(expected),
            "final coefficient " + num(got) + " vs " + num(expected));
  });
}

// ---------------------------------------------------------------------- //

void check_convex_vi(Harness& h) {
  h.run("convex_vi: randomized inequality forms agree (5 seeds)", [] {
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
      const auto rep = check_vi_equivalence(make_random_vi(seed));
      require(rep.conclusive && rep.equivalent,
              "seed " + std::to_string(seed) + ": " + rep.detail);
    }
  });

  h.run("convex_vi: density sequence contracts and converges", [] {
    const auto op = SpectralOperator::cosine_neumann(16, kPi);
    const Field v = make_field(op, random_coeffs(16, 99));
    const double nv = norm_h(v);
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {1, 10, 100}) {
      const Field vn = density_sequence(v, n, op);
      require(norm_h(vn) <= nv + 1e-12, "norm grew at n=" + std::to_string(n));
      const double err = norm_h(v - vn);
      require(err < prev, "error not decreasing at n=" + std::to_string(n));
      prev = err;
    }
  });

  h.run("convex_vi: stationary zero run satisfies the inequality", [] {
    SolverConfig cfg = small_config(12, Mode::viscous_fractional);
    cfg.t_final = 3 * cfg.dt;
    const Trajectory traj =
        fch::run(cfg, zero_field(cfg.op_a), zero_forcing(cfg.op_a));
    require(traj.completed, traj.failure_message);
    std::vector<Field> tests;
    for (unsigned seed : {5u, 6u, 7u})
      tests.push_back(make_field(cfg.op_a, random_coeffs(12, seed, 0.2)));
    for (double viol : vi_residual(traj, tests))
      require(viol <= 1e-10, "violation " + num(viol));
  });
}

// ---------------------------------------------------------------------- //

void check_asymptotics(Harness& h) {
  h.run("asymptotics: operator limit error is exact per mode", [] {
    const auto op = SpectralOperator::cosine_neumann(8, kPi / 2);  // lambda_2=4
    std::vector<double> c(8, 0.0);
    c[1] = 0.6;
    const auto rep = operator_limit_check(make_field(op, c), {0.1}, op);
    const double expected = (std::pow(4.0, 0.1) - 1.0) * 0.6;
    require(std::abs(rep.entries[0].err_bsigma - expected) <= 1e-13,
            "got " + num(rep.entries[0].err_bsigma) + " vs " + num(expected));
  });

  h.run("asymptotics: constant-shift metrics match closed forms", [] {
    SolverConfig cfg = small_config(8, Mode::viscous_fractional);
    cfg.t_final = 3 * cfg.dt;
    const Trajectory a =
        fch::run(cfg, mixed_state(cfg.op_a), zero_forcing(cfg.op_a));
    require(a.completed, a.failure_message);
    Trajectory b = a;
    for (auto& st : b.states) st.phi.coeffs[0] += 0.5;
    const TrajectoryMetrics m = trajectory_metrics(a, b, 0.0);
    require(m.weighted_l2 == m.l2_q, "kappa = 0 must leave weights at one");
    require(std::abs(m.linf_h - 0.5) <= 1e-14, "L^inf " + num(m.linf_h));
    const double expected = 0.5 * std::sqrt(cfg.dt * a.n_steps());
    require(std::abs(m.l2_q - expected) <= 1e-13, "L^2(Q) " + num(m.l2_q));
  });

  h.run("asymptotics: running integral exact on linear data", [] {
    const double dt = 0.25;
    std::vector<double> w(9);
    for (size_t n = 0; n < w.size(); ++n) w[n] = dt * static_cast<double>(n);
    const auto integral = running_time_integral(w, dt);
    for (size_t n = 0; n < w.size(); ++n) {
      const double t = dt * static_cast<double>(n);
      require(std::abs(integral[n] - 0.5 * t * t) <= 1e-13,
              "node " + std::to_string(n));
    }
  });
}

// ---------------------------------------------------------------------- //

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void check_cli_io(Harness& h) {
  h.run("cli_io: empty document yields the documented defaults", [] {
    const Scenario s = parse_config("");
    require(s.config.newton_tol == 1e-10, "newton_tol default");
    require(s.config.op_a->n_modes() == 32, "n_modes default");
    require(s.keys.at("potential.type") == "regular", "potential default");
    require(s.keys.at("mode") == "viscous", "mode default");
  });

  h.run("cli_io: serialize/parse round trip is key-equivalent", [] {
    const std::string doc =
        "n_modes = 24\nr = 0.75\npotential.type = logarithmic\n"
        "potential.c1 = 2\nphi0.kind = mode_mix\nphi0.mean = 0.1\n"
        "phi0.terms = 2:0.3,5:0.1\nt_final = 0.002\n";
    const Scenario s1 = parse_config(doc);
    const Scenario s2 = parse_config(serialize_config(s1));
    require(s1.keys == s2.keys, "normalized key maps differ");
  });

  h.run("cli_io: admissibility violations carry their codes", [] {
    const auto expect_code = [](const std::string& doc,
                                const std::string& code) {
      try {
        parse_config(doc);
      } catch (const ConfigError& e) {
        require(std::string(e.what()).find(code) != std::string::npos,
                std::string("wrong message: ") + e.what());
        return;
      }
      throw std::runtime_error("expected rejection with code " + code);
    };
    expect_code("sigma = 0.6\nsigma0 = 0.5\n", "(2.1)");
    expect_code("potential.type = logarithmic\npotential.c1 = 0.5\n",
                "(2.14)");
    expect_code(
        "potential.type = logarithmic\npotential.c1 = 2\n"
        "phi0.kind = constant\nphi0.value = 2\n",
        "(2.21)");
    expect_code(
        "potential.type = double_obstacle\nphi0.kind = constant\n"
        "phi0.value = 1\n",
        "(2.22)");
  });

  h.run("cli_io: trajectory CSV is byte-stable across reruns", [] {
    const Scenario s = parse_config(
        "n_modes = 12\ndt = 0.001\nt_final = 0.003\nphi0.kind = mode_mix\n"
        "phi0.mean = 0.1\nphi0.terms = 2:0.2\n");
    const Trajectory t1 = fch::run(s.config, s.phi0, s.forcing);
    const Trajectory t2 = fch::run(s.config, s.phi0, s.forcing);
    require(t1.completed && t2.completed, "runs did not complete");
    require(trajectory_csv(t1) == trajectory_csv(t2), "CSV bytes differ");
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path();
    const std::string p1 = (dir / "fchlab_verify_a.csv").string();
    const std::string p2 = (dir / "fchlab_verify_b.csv").string();
    write_trajectory_csv(t1, p1);
    write_trajectory_csv(t2, p2);
    const bool same = slurp(p1) == slurp(p2) && !slurp(p1).empty();
    fs::remove(p1);
    fs::remove(p2);
    require(same, "files on disk differ");
  });

  h.run("cli_io: manifest and summary round trips", [] {
    const Scenario s = parse_config("n_modes = 8\nt_final = 0.002\n");
    const RunManifest m =
        make_manifest(s, 0.125, {"trajectory.csv", "summary.json"});
    require(manifest_from_json(manifest_to_json(m)) == m,
            "manifest round trip changed fields");
    const Trajectory traj = fch::run(s.config, s.phi0, s.forcing);
    const auto j = nlohmann::json::parse(summary_json(s, traj, 0.125));
    for (const char* key :
         {"config", "terminal_metrics", "runtime_s", "version"})
      require(j.contains(key), std::string("summary missing ") + key);
    require(j.at("version").get<std::string>() == kVersion, "version string");
  });
}

}  // namespace

int run_verify_suite(const std::string& suite, std::ostream& out) {
  Harness h{out};
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "spectral") known = true, check_spectral(h);
  if (all || suite == "potentials") known = true, check_potentials(h);
  if (all || suite == "solver") known = true, check_solver(h);
  if (all || suite == "convex_vi") known = true, check_convex_vi(h);
  if (all || suite == "asymptotics") known = true, check_asymptotics(h);
  if (all || suite == "cli_io") known = true, check_cli_io(h);
  if (!known)
    throw ConfigError("unknown verify suite '" + suite +
                      "' (expected spectral, potentials, solver, convex_vi, "
                      "asymptotics, cli_io, or all)");
  if (h.failures == 0)
    out << "verify: all checks passed\n";
  else
    out << "verify: " << h.failures << " check(s) failed\n";
  return h.failures;
}

}  // namespace fch
