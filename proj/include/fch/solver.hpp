// Fully implicit time stepping for the conserved phase-field system with
// fractional operators,
//
//     d/dt phi + A^{2r} mu = 0
//     tau d/dt phi + K phi + beta_lambda(phi) + pi(phi) = mu + f
//
// where K = B^{2 sigma} in the viscous_fractional mode and K = I - P in the
// limit mode (P = orthogonal projection onto ker B).  The maximal monotone
// beta is replaced by its Yosida regularization at level lambda, so the
// second equation holds as an equality and the discrete system is smooth
// enough for a damped Newton iteration.
//
// Backward Euler in the eigenbasis of A: the first equation is diagonal there
// and determines mu mode-by-mode,
//
//     mu_j = -(c_j^{n+1} - c_j^n) / (dt lambda_j^{2r})        (lambda_j > 0),
//
// which is substituted into the second equation.  When lambda_1(A) = 0 the
// first coefficient is frozen instead (exact mean conservation) and the
// kernel-mode row of the second equation defines the kernel component of mu.
// Nonlinear terms are evaluated pseudo-spectrally (synthesize, apply
// pointwise, analyze) without dealiasing; the aliasing error is part of the
// measured consistency error.

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fch/potential.hpp"
#include "fch/spectral.hpp"

namespace fch {

enum class Mode { viscous_fractional, limit };
enum class TrajectoryKind { evolution, auxiliary };

struct SolverConfig {
  double r = 0.5;       // exponent of A (first equation uses A^{2r})
  double sigma = 0.25;  // exponent of B in viscous mode (uses B^{2 sigma})
  double sigma0 = 1.0;  // admissible upper bound for sigma
  double tau = 1.0;     // viscosity coefficient
  double lambda = 1e-2; // Yosida level
  double dt = 1e-3;
  double t_final = 0.1;
  Mode mode = Mode::viscous_fractional;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  OperatorPtr op_a;
  OperatorPtr op_b;
  Potential potential = Potential::regular();
};

struct StepDiagnostics {
  long step = 0;
  double time = 0.0;
  double mean_phi = 0.0;
  double energy = 0.0;
  double norm_phi_h = 0.0;
  double norm_mu_h = 0.0;
  double norm_ar_mu = 0.0;    // ||A^r mu||
  double dtphi_h = 0.0;       // ||(phi^n - phi^{n-1}) / dt||
  double k_phi_norm = 0.0;    // ||B^sigma phi|| or ||(I-P) phi||
  int newton_iters = 0;
  double vi_residual = 0.0;   // L^2 graph-complementarity residual of
                              // (phi, beta_lambda(phi))
};

struct EvolutionState {
  double time = 0.0;
  Field phi;
  Field mu;  // chemical potential; for auxiliary runs: xi = beta_lambda(phi)
};

struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::evolution;
  SolverConfig config;
  std::vector<EvolutionState> states;       // n_steps + 1 entries, t = n dt
  std::vector<Field> forcing;               // f at each state time
  std::vector<StepDiagnostics> diagnostics; // one row per state
  std::vector<Field> zeta_proxy;  // viscous: B^sigma phi; limit: (I-P) phi
  double m0 = 0.0;                // initial mean (conserved when ker A != 0)
  bool completed = true;
  std::string failure_message;

  double dt() const { return config.dt; }
  int n_steps() const { return static_cast<int>(states.size()) - 1; }
};

class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_ = 0.0;
};

using ForcingFn = std::function<Field(double)>;

ForcingFn zero_forcing(const OperatorPtr& op);
ForcingFn constant_forcing(const Field& f);

// One implicit step and whole-trajectory driver.  The solver validates the
// configuration (exponents, operator compatibility, admissible initial data)
// and throws std::invalid_argument naming the violated constraint tag.
class EvolutionSolver {
public:
  explicit EvolutionSolver(SolverConfig cfg);

  const SolverConfig& config() const { return cfg_; }

  // mu0 from the consistency solve (I + tau A^{2r}) mu0 = K phi0 +
  // beta_lambda(phi0) + pi(phi0) - f0, i.e. the second equation at t = 0 with
  // d/dt phi(0) supplied by the first.
  EvolutionState initial_state(const Field& phi0, const Field& f0) const;

  // advance one step; diag (optional) receives the step diagnostics
  EvolutionState step(const EvolutionState& state, const Field& f_next,
                      StepDiagnostics* diag = nullptr) const;

  Trajectory run(const Field& phi0, const ForcingFn& forcing) const;

  // E(phi) = 1/2 ||B^sigma phi||^2  (or 1/2 ((I-P)phi, phi) in limit mode)
  //        + integral of  moreau_lambda(phi) + pi_hat(phi)
  double energy(const Field& phi) const;

  // K phi as a field in the basis of A
  Field apply_k(const Field& phi) const;

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  SolverConfig cfg_;
};

// convenience wrapper
Trajectory run(const SolverConfig& cfg, const Field& phi0,
               const ForcingFn& forcing);
double compute_energy(const SolverConfig& cfg, const Field& phi);

// ---------------------------------------------------------------------------
// Auxiliary relaxation problem (no chemical potential, no conservation):
//
//     tau d/dt phi + (I - P) phi + beta_lambda(phi) + pi(phi) - pi(0) = g,
//
// discretized with the same backward Euler / Newton machinery.  The returned
// trajectory has kind = auxiliary and stores xi = beta_lambda(phi) in the mu
// slot of each state.
struct AuxConfig {
  double tau = 1.0;
  double lambda = 1e-2;
  double dt = 1e-3;
  double t_final = 0.1;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  OperatorPtr op;  // supplies the grid and the kernel projection P
  Potential potential = Potential::regular();
};

Trajectory solve_aux(const AuxConfig& cfg, const Field& phi0,
                     const ForcingFn& g);

// ---------------------------------------------------------------------------
// Lagrange-multiplier extraction for limit-mode trajectories:
//
//     xi^n = mu^n - tau (phi^n - phi^{n-1})/dt - phi^n + P phi^n
//            - pi(phi^n) + f^n                                   (n >= 1),
//
// together with the L^2 graph-complementarity residual of (phi^n, xi^n),
// which for Yosida runs equals the lambda-regularization gap.
struct XiExtraction {
  std::vector<double> time;       // t_n for n >= 1
  std::vector<Field> xi;
  std::vector<double> residual_l2;
  double residual_sup = 0.0;
};

XiExtraction extract_xi(const Trajectory& traj);

}  // namespace fch
