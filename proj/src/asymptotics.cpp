// Sweep orchestration and trajectory metrics.

#include "fch/asymptotics.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fch {

namespace {

double trapezoid(const std::vector<double>& values, double dt) {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * dt;
}

// sqrt of the trapezoidal time integral of squared H-norms
double l2q_of(const std::vector<double>& norms, double dt) {
  std::vector<double> sq(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) sq[i] = norms[i] * norms[i];
  return std::sqrt(trapezoid(sq, dt));
}

void require_same_mesh(const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size() || a.dt() != b.dt())
    throw std::invalid_argument("trajectories use different time meshes");
  if (!a.states.empty() &&
      !same_grid(*a.states[0].phi.op, *b.states[0].phi.op))
    throw std::invalid_argument("trajectories use different spatial grids");
}

double seconds_since(
    const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return v.size() >= 2;
}

double max_obstacle_violation(const Trajectory& traj) {
  double worst = 0.0;
  for (const auto& st : traj.states)
    for (double s : to_nodal(st.phi))
      worst = std::max(worst, std::abs(s) - 1.0);
  return std::max(worst, 0.0);
}

}  // namespace

TrajectoryMetrics trajectory_metrics(const Trajectory& a, const Trajectory& b,
                                     double kappa) {
  require_same_mesh(a, b);
  const double dt = a.dt();
  std::vector<double> diff(a.states.size()), wdiff(a.states.size());
  TrajectoryMetrics m;
  for (std::size_t n = 0; n < a.states.size(); ++n) {
    diff[n] = norm_h(a.states[n].phi - b.states[n].phi);
    wdiff[n] = std::exp(-kappa * a.states[n].time) * diff[n];
    m.linf_h = std::max(m.linf_h, diff[n]);
  }
  m.l2_q = l2q_of(diff, dt);
  m.weighted_l2 = l2q_of(wdiff, dt);
  return m;
}

std::vector<double> running_time_integral(const std::vector<double>& w,
                                          double dt) {
  std::vector<double> out(w.size(), 0.0);
  for (std::size_t n = 1; n < w.size(); ++n)
    out[n] = out[n - 1] + 0.5 * dt * (w[n - 1] + w[n]);
  return out;
}

ConvergenceReport operator_limit_check(const Field& v,
                                       const std::vector<double>& sigma_list,
                                       const OperatorPtr& op_b) {
  if (!same_basis(*v.op, *op_b))
    throw std::invalid_argument("field does not live on the given operator");
  ConvergenceReport rep;
  rep.parameter = "sigma";
  std::vector<double> errs;
  for (double sigma : sigma_list) {
    if (!(sigma > 0))
      throw std::invalid_argument("sigma values must be positive");
    double acc = 0.0;
    for (int j = 0; j < op_b->n_modes(); ++j) {
      const double lam = op_b->eigenvalue(j);
      if (lam == 0.0) continue;  // both B^sigma v and v - Pv drop the kernel
      const double e = (std::pow(lam, sigma) - 1.0) * v.coeffs[j];
      acc += e * e;
    }
    SweepEntry en;
    en.param = sigma;
    en.err_bsigma = std::sqrt(acc);
    rep.entries.push_back(en);
    errs.push_back(en.err_bsigma);
  }
  rep.monotone_bsigma = strictly_decreasing(errs);
  rep.completed = true;
  return rep;
}

ConvergenceReport sweep_sigma(const SolverConfig& base, const Field& phi0,
                              const ForcingFn& forcing,
                              const std::vector<double>& sigma_list) {
  ConvergenceReport rep;
  rep.parameter = "sigma";

  SolverConfig ref_cfg = base;
  ref_cfg.mode = Mode::limit;
  Trajectory ref = run(ref_cfg, phi0, forcing);
  if (!ref.completed) {
    rep.note = "reference limit run failed: " + ref.failure_message;
    return rep;
  }
  const double kappa = base.potential.lipschitz_pi() / base.tau;

  std::vector<double> l2qs, bsig;
  for (double sigma : sigma_list) {
    const auto t0 = std::chrono::steady_clock::now();
    SolverConfig cfg = base;
    cfg.mode = Mode::viscous_fractional;
    cfg.sigma = sigma;
    Trajectory traj = run(cfg, phi0, forcing);
    if (!traj.completed) {
      rep.note = "run at sigma = " + std::to_string(sigma) +
                 " failed: " + traj.failure_message;
      return rep;
    }
    const TrajectoryMetrics m = trajectory_metrics(traj, ref, kappa);
    std::vector<double> zdiff(traj.states.size());
    for (std::size_t n = 0; n < traj.states.size(); ++n)
      zdiff[n] = norm_h(traj.zeta_proxy[n] - ref.zeta_proxy[n]);
    SweepEntry en;
    en.param = sigma;
    en.err_l2q = m.l2_q;
    en.err_linf = m.linf_h;
    en.err_weighted = m.weighted_l2;
    en.err_bsigma = l2q_of(zdiff, traj.dt());
    en.runtime_s = seconds_since(t0);
    rep.entries.push_back(en);
    l2qs.push_back(en.err_l2q);
    bsig.push_back(en.err_bsigma);
  }
  rep.monotone_l2q = strictly_decreasing(l2qs);
  rep.monotone_bsigma = strictly_decreasing(bsig);
  rep.completed = true;
  return rep;
}

ConvergenceReport sweep_lambda(const SolverConfig& base, const Field& phi0,
                               const ForcingFn& forcing,
                               const std::vector<double>& lambda_list) {
  for (std::size_t i = 0; i < lambda_list.size(); ++i)
    if (!(lambda_list[i] > 0) ||
        (i > 0 && !(lambda_list[i] < lambda_list[i - 1])))
      throw std::invalid_argument("lambda values must be positive decreasing");

  ConvergenceReport rep;
  rep.parameter = "lambda";
  const double kappa = base.potential.lipschitz_pi() / base.tau;

  Trajectory prev;
  bool have_prev = false;
  std::vector<double> diffs;
  for (double lambda : lambda_list) {
    const auto t0 = std::chrono::steady_clock::now();
    SolverConfig cfg = base;
    cfg.lambda = lambda;
    Trajectory traj = run(cfg, phi0, forcing);
    if (!traj.completed) {
      rep.note = "run at lambda = " + std::to_string(lambda) +
                 " failed: " + traj.failure_message;
      return rep;
    }
    SweepEntry en;
    en.param = lambda;
    if (have_prev) {
      const TrajectoryMetrics m = trajectory_metrics(traj, prev, kappa);
      en.err_l2q = m.l2_q;  // Cauchy difference to the previous run
      en.err_linf = m.linf_h;
      en.err_weighted = m.weighted_l2;
      diffs.push_back(en.err_l2q);
    }
    if (base.potential.kind() == PotentialKind::double_obstacle)
      en.violation = max_obstacle_violation(traj);
    if (cfg.mode == Mode::limit) {
      const XiExtraction ext = extract_xi(traj);
      en.xi_residual = ext.residual_sup;
    }
    en.runtime_s = seconds_since(t0);
    rep.entries.push_back(en);
    prev = std::move(traj);
    have_prev = true;
  }
  rep.monotone_l2q = strictly_decreasing(diffs) || diffs.size() < 2;
  rep.completed = true;
  return rep;
}

ContDepRecord continuous_dependence_experiment(const SolverConfig& cfg,
                                               const Field& phi0,
                                               const ForcingFn& f1,
                                               const ForcingFn& f2) {
  if (cfg.mode != Mode::limit)
    throw std::invalid_argument(
        "continuous-dependence experiment requires the limit mode");
  Trajectory t1 = run(cfg, phi0, f1);
  Trajectory t2 = run(cfg, phi0, f2);
  if (!t1.completed || !t2.completed)
    throw SolverError("continuous-dependence run failed: " +
                          (t1.completed ? t2.failure_message
                                        : t1.failure_message),
                      0.0);

  ContDepRecord rec;
  rec.bound = std::pow(2.0 * cfg.tau, -0.5) *
              std::exp((1.0 + cfg.potential.lipschitz_pi()) * cfg.t_final /
                       cfg.tau);
  std::vector<double> fdiff(t1.states.size());
  for (std::size_t n = 0; n < t1.states.size(); ++n) {
    rec.numerator = std::max(
        rec.numerator, norm_h(t1.states[n].phi - t2.states[n].phi));
    fdiff[n] = norm_h(t1.forcing[n] - t2.forcing[n]);
  }
  rec.denominator = l2q_of(fdiff, t1.dt());
  rec.degenerate = rec.denominator == 0.0;
  rec.ratio = rec.degenerate ? 0.0 : rec.numerator / rec.denominator;
  rec.within_bound = rec.ratio <= 1.05 * rec.bound;
  return rec;
}

}  // namespace fch
