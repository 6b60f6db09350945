// Parameter sweeps and trajectory metrics.
//
// The laboratory side of the code: compare viscous runs against the
// relaxation limit as the operator exponent sigma shrinks, study the
// regularization parameter lambda by Cauchy differences, and measure the
// continuous-dependence ratio against its Gronwall bound.  All time
// integrals use the trapezoidal rule on the shared uniform mesh.

#pragma once

#include <string>
#include <vector>

#include "fch/solver.hpp"
#include "fch/spectral.hpp"

namespace fch {

struct TrajectoryMetrics {
  double l2_q = 0.0;         // || . ||_{L^2(0,T;H)} of the difference
  double linf_h = 0.0;       // max over time nodes of the H-norm
  double weighted_l2 = 0.0;  // (integral of e^{-2 kappa t} |.|_H^2)^{1/2}
};

// Difference metrics between two trajectories on the same grid and mesh.
TrajectoryMetrics trajectory_metrics(const Trajectory& a, const Trajectory& b,
                                     double kappa);

// Running time integral (1 * w)(t_n) of a sampled diagnostic channel.
std::vector<double> running_time_integral(const std::vector<double>& w,
                                          double dt);

struct SweepEntry {
  double param = 0.0;        // sigma or lambda
  double err_l2q = 0.0;      // L^2(Q) distance (to reference / previous run)
  double err_linf = 0.0;     // L^inf(0,T;H) distance
  double err_bsigma = 0.0;   // || B^sigma phi_sigma - (phi - P phi) ||_{L^2(Q)}
  double err_weighted = 0.0; // exponentially weighted L^2(Q), kappa = L_pi/tau
  double violation = 0.0;    // max nodal (|phi|-1)_+ (obstacle sweeps)
  double xi_residual = 0.0;  // sup_t L^2 graph residual of extracted xi
  double runtime_s = 0.0;
};

struct ConvergenceReport {
  std::string parameter;     // "sigma" or "lambda"
  std::vector<SweepEntry> entries;
  bool monotone_l2q = false;
  bool monotone_bsigma = false;
  bool completed = false;    // false when a run failed; entries are partial
  std::string note;
};

// Per-sigma error || B^sigma v - (v - P v) ||_H; strictly decreasing toward 0
// as sigma decreases (per-mode factor |lambda^sigma - 1|).
ConvergenceReport operator_limit_check(const Field& v,
                                       const std::vector<double>& sigma_list,
                                       const OperatorPtr& op_b);

// Viscous runs per sigma against the matched limit-mode reference run.
ConvergenceReport sweep_sigma(const SolverConfig& base, const Field& phi0,
                              const ForcingFn& forcing,
                              const std::vector<double>& sigma_list);

// Runs per lambda; err_l2q holds the Cauchy difference to the previous run
// (first entry zero).  Obstacle potentials also report the constraint
// violation; limit-mode runs report the extracted-xi graph residual.
ConvergenceReport sweep_lambda(const SolverConfig& base, const Field& phi0,
                               const ForcingFn& forcing,
                               const std::vector<double>& lambda_list);

struct ContDepRecord {
  double ratio = 0.0;        // ||phi1-phi2||_{L^inf(H)} / ||f1-f2||_{L^2(H)}
  double bound = 0.0;        // (2 tau)^{-1/2} exp((1 + L_pi) T / tau)
  double numerator = 0.0;
  double denominator = 0.0;
  bool degenerate = false;   // f1 == f2: ratio reported as 0
  bool within_bound = true;  // ratio <= 1.05 * bound (declared 5% slack)
};

// Continuous dependence on the forcing for the relaxation limit.
ContDepRecord continuous_dependence_experiment(const SolverConfig& cfg,
                                               const Field& phi0,
                                               const ForcingFn& f1,
                                               const ForcingFn& f2);

}  // namespace fch
