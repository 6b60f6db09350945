#include "fch/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

namespace fch {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<long>(v.size()));
}

std::vector<double> to_std(const VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline double power_or_zero(double lambda, double r) {
  return lambda == 0.0 ? 0.0 : std::pow(lambda, r);
}

long step_count(double t_final, double dt) {
  const long n = std::lround(t_final / dt);
  require(n >= 1 && std::abs(n * dt - t_final) <= 1e-6 * dt,
          "t_final must be a whole number of steps (t_final = n * dt)");
  return n;
}

double nodal_mean(const SpectralOperator& op, const VectorXd& nodal,
                  const VectorXd& w) {
  return w.dot(nodal) / op.domain_measure();
}

}  // namespace

ForcingFn zero_forcing(const OperatorPtr& op) {
  Field z = zero_field(op);
  return [z](double) { return z; };
}

ForcingFn constant_forcing(const Field& f) {
  return [f](double) { return f; };
}

// ---------------------------------------------------------------------------

struct EvolutionSolver::Impl {
  int n_modes = 0;
  int n_nodes = 0;
  bool kernel_a = false;  // lambda_1(A) == 0
  MatrixXd syn;           // n_nodes x n_modes, synthesis in the A basis
  VectorXd w;             // quadrature weights
  VectorXd a2r;           // lambda_j(A)^{2r}
  bool k_diagonal = false;
  VectorXd k_diag;        // K in the shared eigenbasis
  MatrixXd k_dense;       // K in the A basis otherwise
  MatrixXd b_analysis;    // A-coefficients -> B-coefficients (identity-free path)
  VectorXd b_sigma_fac;   // lambda_j(B)^{sigma}  (viscous energy/zeta)
  VectorXd k_b_fac;       // per-B-mode factor of K (2 sigma powers or 0/1)

  VectorXd nl_modal(const Potential& pot, double lambda,
                    const VectorXd& nodal) const {
    VectorXd vals(n_nodes);
    for (int k = 0; k < n_nodes; ++k)
      vals[k] = pot.yosida(lambda, nodal[k]) + pot.pi(nodal[k]);
    return syn.transpose() * (w.cwiseProduct(vals));
  }

  VectorXd apply_k_vec(const VectorXd& c) const {
    return k_diagonal ? VectorXd(k_diag.cwiseProduct(c))
                      : VectorXd(k_dense * c);
  }

  // B-coefficients of the field with A-coefficients c
  VectorXd b_coeffs(const VectorXd& c) const {
    return k_diagonal ? c : VectorXd(b_analysis * c);
  }
};

EvolutionSolver::EvolutionSolver(SolverConfig cfg) : cfg_(std::move(cfg)) {
  require(cfg_.op_a && cfg_.op_b, "solver: operators A and B are required");
  const auto& A = *cfg_.op_a;
  const auto& B = *cfg_.op_b;
  require(same_grid(A, B),
          "solver: operators A and B must share the quadrature grid");
  require(cfg_.r > 0.0, "constraint (2.1) violated: r must be positive");
  require(cfg_.tau > 0.0, "constraint (2.1) violated: tau must be positive");
  require(cfg_.sigma0 > 0.0,
          "constraint (2.1) violated: sigma0 must be positive");
  if (cfg_.mode == Mode::viscous_fractional)
    require(cfg_.sigma > 0.0 && cfg_.sigma < cfg_.sigma0,
            "constraint (2.1) violated: sigma must lie strictly between 0 "
            "and sigma0 in viscous_fractional mode");
  require(cfg_.lambda > 0.0, "solver: Yosida level lambda must be positive");
  require(cfg_.dt > 0.0, "solver: dt must be positive");
  require(cfg_.newton_tol > 0.0 && cfg_.newton_max_iter >= 1,
          "solver: Newton parameters out of range");
  require(A.kernel_dim() <= 1,
          "solver: operator A must have at most a one-dimensional kernel");

  auto impl = std::make_shared<Impl>();
  impl->n_modes = A.n_modes();
  impl->n_nodes = A.n_nodes();
  impl->kernel_a = A.kernel_dim() == 1;
  impl->w = to_vec(A.weights());
  impl->syn.resize(impl->n_nodes, impl->n_modes);
  for (int j = 0; j < impl->n_modes; ++j)
    for (int k = 0; k < impl->n_nodes; ++k)
      impl->syn(k, j) = A.basis_value(j, k);

  impl->a2r.resize(impl->n_modes);
  for (int j = 0; j < impl->n_modes; ++j)
    impl->a2r[j] = power_or_zero(A.eigenvalue(j), 2.0 * cfg_.r);

  // per-B-mode multipliers of K and of B^sigma
  const int nb = B.n_modes();
  impl->k_b_fac.resize(nb);
  impl->b_sigma_fac.resize(nb);
  for (int j = 0; j < nb; ++j) {
    const double lam = B.eigenvalue(j);
    impl->k_b_fac[j] = cfg_.mode == Mode::viscous_fractional
                           ? power_or_zero(lam, 2.0 * cfg_.sigma)
                           : (j < B.kernel_dim() ? 0.0 : 1.0);
    impl->b_sigma_fac[j] = cfg_.mode == Mode::viscous_fractional
                               ? power_or_zero(lam, cfg_.sigma)
                               : (j < B.kernel_dim() ? 0.0 : 1.0);
  }

  impl->k_diagonal = same_basis(A, B);
  if (impl->k_diagonal) {
    impl->k_diag = impl->k_b_fac;
  } else {
    MatrixXd syn_b(impl->n_nodes, nb);
    for (int j = 0; j < nb; ++j)
      for (int k = 0; k < impl->n_nodes; ++k)
        syn_b(k, j) = B.basis_value(j, k);
    // analysis against B of an A-synthesized field; K = M^T diag(fac) M
    impl->b_analysis = syn_b.transpose() * impl->w.asDiagonal() * impl->syn;
    impl->k_dense = impl->b_analysis.transpose() *
                    impl->k_b_fac.asDiagonal() * impl->b_analysis;
  }
  impl_ = std::move(impl);
}

Field EvolutionSolver::apply_k(const Field& phi) const {
  require(same_basis(*phi.op, *cfg_.op_a),
          "apply_k: field must live in the basis of A");
  return make_field(cfg_.op_a, to_std(impl_->apply_k_vec(to_vec(phi.coeffs))));
}

double EvolutionSolver::energy(const Field& phi) const {
  require(same_basis(*phi.op, *cfg_.op_a),
          "energy: field must live in the basis of A");
  const VectorXd c = to_vec(phi.coeffs);
  const VectorXd d = impl_->b_coeffs(c);
  double quad = 0.0;
  for (int j = 0; j < d.size(); ++j) {
    const double t = impl_->b_sigma_fac[j] * d[j];
    quad += t * t;
  }
  const VectorXd nodal = impl_->syn * c;
  double bulk = 0.0;
  for (int k = 0; k < impl_->n_nodes; ++k)
    bulk += impl_->w[k] * (cfg_.potential.moreau(cfg_.lambda, nodal[k]) +
                           cfg_.potential.pi_hat(nodal[k]));
  return 0.5 * quad + bulk;
}

EvolutionState EvolutionSolver::initial_state(const Field& phi0,
                                              const Field& f0) const {
  require(same_basis(*phi0.op, *cfg_.op_a),
          "initial_state: phi0 must live in the basis of A");
  const VectorXd c = to_vec(phi0.coeffs);
  const VectorXd nodal = impl_->syn * c;
  const VectorXd rhs = impl_->apply_k_vec(c) +
                       impl_->nl_modal(cfg_.potential, cfg_.lambda, nodal) -
                       to_vec(f0.coeffs);
  VectorXd mu(impl_->n_modes);
  for (int j = 0; j < impl_->n_modes; ++j)
    mu[j] = rhs[j] / (1.0 + cfg_.tau * impl_->a2r[j]);
  return EvolutionState{0.0, phi0, make_field(cfg_.op_a, to_std(mu))};
}

EvolutionState EvolutionSolver::step(const EvolutionState& state,
                                     const Field& f_next,
                                     StepDiagnostics* diag) const {
  const auto& impl = *impl_;
  const int n = impl.n_modes;
  const double dt = cfg_.dt, tau = cfg_.tau, lam = cfg_.lambda;
  const Potential& pot = cfg_.potential;
  const VectorXd cn = to_vec(state.phi.coeffs);
  const VectorXd f = to_vec(f_next.coeffs);

  // residual of the (mu-eliminated) second equation; the kernel row of A
  // enforces conservation of the first coefficient instead
  auto residual = [&](const VectorXd& c, VectorXd& nodal) -> VectorXd {
    nodal = impl.syn * c;
    VectorXd g = tau / dt * (c - cn) + impl.apply_k_vec(c) +
                 impl.nl_modal(pot, lam, nodal) - f;
    for (int j = 0; j < n; ++j)
      if (impl.a2r[j] > 0.0) g[j] += (c[j] - cn[j]) / (dt * impl.a2r[j]);
    if (impl.kernel_a) g[0] = c[0] - cn[0];
    return g;
  };

  VectorXd c = cn;
  VectorXd nodal(impl.n_nodes);
  VectorXd g = residual(c, nodal);
  double res = g.norm();
  int iters = 0;
  while (res > cfg_.newton_tol) {
    if (iters >= cfg_.newton_max_iter) {
      std::ostringstream msg;
      msg << "implicit step: Newton did not reach tolerance "
          << cfg_.newton_tol << " (residual " << res
          << "); consider a smaller dt";
      throw SolverError(msg.str(), res);
    }
    ++iters;

    VectorXd dw(impl.n_nodes);
    for (int k = 0; k < impl.n_nodes; ++k)
      dw[k] = impl.w[k] * (pot.yosida_derivative(lam, nodal[k]) +
                           pot.pi_derivative(nodal[k]));
    MatrixXd jac = impl.syn.transpose() * dw.asDiagonal() * impl.syn;
    if (impl.k_diagonal)
      jac += impl.k_diag.asDiagonal();
    else
      jac += impl.k_dense;
    jac.diagonal().array() += tau / dt;
    for (int j = 0; j < n; ++j)
      if (impl.a2r[j] > 0.0) jac(j, j) += 1.0 / (dt * impl.a2r[j]);
    if (impl.kernel_a) {
      jac.row(0).setZero();
      jac(0, 0) = 1.0;
    }

    const VectorXd delta = jac.partialPivLu().solve(g);
    double alpha = 1.0;
    VectorXd c_try, g_try, nodal_try(impl.n_nodes);
    double res_try = kInf;
    for (int cut = 0; cut < 9; ++cut) {
      c_try = c - alpha * delta;
      g_try = residual(c_try, nodal_try);
      res_try = g_try.norm();
      if (res_try <= (1.0 - 0.25 * alpha) * res) break;
      alpha *= 0.5;
    }
    c = c_try;
    g = g_try;
    nodal = nodal_try;
    res = res_try;
  }

  // chemical potential: off-kernel from the first equation, kernel component
  // from the kernel row of the second
  VectorXd mu(n);
  const VectorXd nl = impl.nl_modal(pot, lam, nodal);
  const VectorXd kc = impl.apply_k_vec(c);
  for (int j = 0; j < n; ++j) {
    if (impl.a2r[j] > 0.0)
      mu[j] = -(c[j] - cn[j]) / (dt * impl.a2r[j]);
    else
      mu[j] = tau / dt * (c[j] - cn[j]) + kc[j] + nl[j] - f[j];
  }

  EvolutionState next{state.time + dt, make_field(cfg_.op_a, to_std(c)),
                      make_field(cfg_.op_a, to_std(mu))};

  if (diag) {
    diag->time = next.time;
    diag->mean_phi = cfg_.op_a->constant_first_mode()
                         ? c[0] / std::sqrt(cfg_.op_a->domain_measure())
                         : nodal_mean(*cfg_.op_a, nodal, impl.w);
    diag->energy = energy(next.phi);
    diag->norm_phi_h = c.norm();
    diag->norm_mu_h = mu.norm();
    double armu = 0.0, kq = 0.0;
    for (int j = 0; j < n; ++j) armu += impl.a2r[j] * mu[j] * mu[j];
    const VectorXd d = impl.b_coeffs(c);
    for (int j = 0; j < d.size(); ++j) {
      const double t = impl.b_sigma_fac[j] * d[j];
      kq += t * t;
    }
    diag->norm_ar_mu = std::sqrt(armu);
    diag->k_phi_norm = std::sqrt(kq);
    diag->dtphi_h = (c - cn).norm() / dt;
    diag->newton_iters = iters;
    double vr = 0.0;
    for (int k = 0; k < impl.n_nodes; ++k) {
      const double gd = pot.graph_distance(nodal[k], pot.yosida(lam, nodal[k]));
      vr += impl.w[k] * gd * gd;
    }
    diag->vi_residual = std::sqrt(vr);
  }
  return next;
}

Trajectory EvolutionSolver::run(const Field& phi0,
                                const ForcingFn& forcing) const {
  require(same_basis(*phi0.op, *cfg_.op_a),
          "run: phi0 must live in the basis of A");
  require(beta_hat_integral(cfg_.potential, phi0) < kInf,
          "constraint (2.21) violated: the initial datum must have a finite "
          "beta_hat integral (values inside the effective domain)");
  const VectorXd c0 = to_vec(phi0.coeffs);
  const VectorXd nodal0 = impl_->syn * c0;
  const double m0 = cfg_.op_a->constant_first_mode()
                        ? c0[0] / std::sqrt(cfg_.op_a->domain_measure())
                        : nodal_mean(*cfg_.op_a, nodal0, impl_->w);
  if (impl_->kernel_a)
    require(cfg_.potential.in_domain_interior(m0),
            "constraint (2.22) violated: the initial mean must lie in the "
            "interior of D(beta) when A has a kernel");

  const long n_steps = step_count(cfg_.t_final, cfg_.dt);

  Trajectory traj;
  traj.kind = TrajectoryKind::evolution;
  traj.config = cfg_;
  traj.m0 = m0;
  traj.states.reserve(n_steps + 1);
  traj.forcing.reserve(n_steps + 1);
  traj.diagnostics.reserve(n_steps + 1);
  traj.zeta_proxy.reserve(n_steps + 1);

  auto zeta_of = [&](const Field& phi) {
    // B^sigma phi (viscous) or (I-P) phi (limit), as A-basis coefficients
    const VectorXd c = to_vec(phi.coeffs);
    if (impl_->k_diagonal)
      return make_field(cfg_.op_a,
                        to_std(impl_->b_sigma_fac.cwiseProduct(c)));
    const VectorXd d = impl_->b_sigma_fac.cwiseProduct(impl_->b_coeffs(c));
    // back to nodal, then analyze against A
    VectorXd nodal = VectorXd::Zero(impl_->n_nodes);
    for (int j = 0; j < d.size(); ++j)
      for (int k = 0; k < impl_->n_nodes; ++k)
        nodal[k] += d[j] * cfg_.op_b->basis_value(j, k);
    return make_field(cfg_.op_a,
                      to_std(impl_->syn.transpose() *
                             (impl_->w.cwiseProduct(nodal))));
  };

  Field f0 = forcing(0.0);
  EvolutionState state = initial_state(phi0, f0);
  traj.states.push_back(state);
  traj.forcing.push_back(f0);
  traj.zeta_proxy.push_back(zeta_of(state.phi));
  {
    StepDiagnostics d0;
    d0.step = 0;
    d0.time = 0.0;
    d0.mean_phi = m0;
    d0.energy = energy(state.phi);
    d0.norm_phi_h = norm_h(state.phi);
    d0.norm_mu_h = norm_h(state.mu);
    d0.norm_ar_mu = 0.0;
    for (int j = 0; j < impl_->n_modes; ++j)
      d0.norm_ar_mu += impl_->a2r[j] * state.mu.coeffs[j] * state.mu.coeffs[j];
    d0.norm_ar_mu = std::sqrt(d0.norm_ar_mu);
    d0.k_phi_norm = norm_h(traj.zeta_proxy.back());
    double vr = 0.0;
    for (int k = 0; k < impl_->n_nodes; ++k) {
      const double gd = cfg_.potential.graph_distance(
          nodal0[k], cfg_.potential.yosida(cfg_.lambda, nodal0[k]));
      vr += impl_->w[k] * gd * gd;
    }
    d0.vi_residual = std::sqrt(vr);
    traj.diagnostics.push_back(d0);
  }

  for (long nstep = 1; nstep <= n_steps; ++nstep) {
    const double t_next = static_cast<double>(nstep) * cfg_.dt;
    Field f_next = forcing(t_next);
    StepDiagnostics diag;
    diag.step = nstep;
    try {
      state = step(state, f_next, &diag);
    } catch (const SolverError& err) {
      traj.completed = false;
      traj.failure_message = err.what();
      break;
    }
    traj.states.push_back(state);
    traj.forcing.push_back(std::move(f_next));
    traj.zeta_proxy.push_back(zeta_of(state.phi));
    traj.diagnostics.push_back(diag);
  }
  return traj;
}

Trajectory run(const SolverConfig& cfg, const Field& phi0,
               const ForcingFn& forcing) {
  return EvolutionSolver(cfg).run(phi0, forcing);
}

double compute_energy(const SolverConfig& cfg, const Field& phi) {
  return EvolutionSolver(cfg).energy(phi);
}

// ---------------------------------------------------------------------------

Trajectory solve_aux(const AuxConfig& cfg, const Field& phi0,
                     const ForcingFn& g) {
  require(cfg.op != nullptr, "solve_aux: operator required");
  require(same_basis(*phi0.op, *cfg.op),
          "solve_aux: phi0 must live in the operator's basis");
  require(cfg.tau > 0.0 && cfg.lambda > 0.0 && cfg.dt > 0.0,
          "solve_aux: tau, lambda, dt must be positive");
  require(beta_hat_integral(cfg.potential, phi0) < kInf,
          "constraint (2.21) violated: the initial datum must have a finite "
          "beta_hat integral");

  const auto& op = *cfg.op;
  const int n = op.n_modes();
  const int nn = op.n_nodes();
  const double dt = cfg.dt, tau = cfg.tau, lam = cfg.lambda;
  const Potential& pot = cfg.potential;

  MatrixXd syn(nn, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < nn; ++k) syn(k, j) = op.basis_value(j, k);
  VectorXd w = to_vec(op.weights());

  VectorXd ip_diag(n);  // I - P in the operator's own basis
  for (int j = 0; j < n; ++j) ip_diag[j] = j < op.kernel_dim() ? 0.0 : 1.0;

  // pi(0) as a constant function, analyzed once
  VectorXd pi0_modal =
      syn.transpose() * (w * pot.pi(0.0));

  auto nl_modal = [&](const VectorXd& nodal) {
    VectorXd vals(nn);
    for (int k = 0; k < nn; ++k)
      vals[k] = pot.yosida(lam, nodal[k]) + pot.pi(nodal[k]);
    return VectorXd(syn.transpose() * (w.cwiseProduct(vals)));
  };
  auto xi_modal = [&](const VectorXd& nodal) {
    VectorXd vals(nn);
    for (int k = 0; k < nn; ++k) vals[k] = pot.yosida(lam, nodal[k]);
    return VectorXd(syn.transpose() * (w.cwiseProduct(vals)));
  };

  const long n_steps = step_count(cfg.t_final, cfg.dt);

  SolverConfig echo;  // carried for downstream tooling (metrics, persistence)
  echo.r = 0.0;
  echo.sigma = 0.0;
  echo.tau = tau;
  echo.lambda = lam;
  echo.dt = dt;
  echo.t_final = cfg.t_final;
  echo.mode = Mode::limit;
  echo.newton_tol = cfg.newton_tol;
  echo.newton_max_iter = cfg.newton_max_iter;
  echo.op_a = cfg.op;
  echo.op_b = cfg.op;
  echo.potential = pot;

  Trajectory traj;
  traj.kind = TrajectoryKind::auxiliary;
  traj.config = echo;

  auto push_state = [&](long nstep, const VectorXd& c, const Field& f,
                        int iters, const VectorXd& prev) {
    const VectorXd nodal = syn * c;
    EvolutionState st{static_cast<double>(nstep) * dt,
                      make_field(cfg.op, to_std(c)),
                      make_field(cfg.op, to_std(xi_modal(nodal)))};
    StepDiagnostics d;
    d.step = nstep;
    d.time = st.time;
    d.mean_phi = op.constant_first_mode()
                     ? c[0] / std::sqrt(op.domain_measure())
                     : nodal_mean(op, nodal, w);
    double quad = 0.0;
    for (int j = 0; j < n; ++j) quad += ip_diag[j] * c[j] * c[j];
    double bulk = 0.0;
    for (int k = 0; k < nn; ++k)
      bulk += w[k] * (pot.moreau(lam, nodal[k]) + pot.pi_hat(nodal[k]));
    d.energy = 0.5 * quad + bulk;
    d.norm_phi_h = c.norm();
    d.norm_mu_h = norm_h(st.mu);
    d.norm_ar_mu = 0.0;
    d.k_phi_norm = std::sqrt(quad);
    d.dtphi_h = nstep == 0 ? 0.0 : (c - prev).norm() / dt;
    d.newton_iters = iters;
    double vr = 0.0;
    for (int k = 0; k < nn; ++k) {
      const double gd = pot.graph_distance(nodal[k], pot.yosida(lam, nodal[k]));
      vr += w[k] * gd * gd;
    }
    d.vi_residual = std::sqrt(vr);
    traj.states.push_back(std::move(st));
    traj.forcing.push_back(f);
    traj.diagnostics.push_back(d);
  };

  VectorXd c = to_vec(phi0.coeffs);
  traj.m0 = op.constant_first_mode()
                ? c[0] / std::sqrt(op.domain_measure())
                : nodal_mean(op, VectorXd(syn * c), w);
  push_state(0, c, g(0.0), 0, c);

  for (long nstep = 1; nstep <= n_steps; ++nstep) {
    const Field f_next = g(static_cast<double>(nstep) * dt);
    const VectorXd f = to_vec(f_next.coeffs);
    const VectorXd cn = c;

    auto residual = [&](const VectorXd& cc, VectorXd& nodal) -> VectorXd {
      nodal = syn * cc;
      return VectorXd(tau / dt * (cc - cn) + ip_diag.cwiseProduct(cc) +
                      nl_modal(nodal) - pi0_modal - f);
    };

    VectorXd nodal(nn);
    VectorXd gres = residual(c, nodal);
    double res = gres.norm();
    int iters = 0;
    bool ok = true;
    while (res > cfg.newton_tol) {
      if (iters >= cfg.newton_max_iter) {
        std::ostringstream msg;
        msg << "auxiliary step: Newton did not reach tolerance (residual "
            << res << ")";
        traj.completed = false;
        traj.failure_message = msg.str();
        ok = false;
        break;
      }
      ++iters;
      VectorXd dw(nn);
      for (int k = 0; k < nn; ++k)
        dw[k] = w[k] * (pot.yosida_derivative(lam, nodal[k]) +
                        pot.pi_derivative(nodal[k]));
      MatrixXd jac = syn.transpose() * dw.asDiagonal() * syn;
      jac += ip_diag.asDiagonal();
      jac.diagonal().array() += tau / dt;
      const VectorXd delta = jac.partialPivLu().solve(gres);
      double alpha = 1.0;
      VectorXd c_try, g_try, nodal_try(nn);
      double res_try = kInf;
      for (int cut = 0; cut < 9; ++cut) {
        c_try = c - alpha * delta;
        g_try = residual(c_try, nodal_try);
        res_try = g_try.norm();
        if (res_try <= (1.0 - 0.25 * alpha) * res) break;
        alpha *= 0.5;
      }
      c = c_try;
      gres = g_try;
      nodal = nodal_try;
      res = res_try;
    }
    if (!ok) break;
    push_state(nstep, c, f_next, iters, cn);
  }
  return traj;
}

// ---------------------------------------------------------------------------

XiExtraction extract_xi(const Trajectory& traj) {
  require(traj.kind == TrajectoryKind::evolution,
          "extract_xi: defined for evolution trajectories");
  require(traj.config.mode == Mode::limit,
          "extract_xi: the multiplier identity is defined only for the limit "
          "system (run in limit mode)");
  require(traj.states.size() >= 2, "extract_xi: trajectory has no steps");
  require(traj.forcing.size() == traj.states.size(),
          "extract_xi: trajectory lacks forcing history");

  EvolutionSolver solver(traj.config);
  const Potential& pot = traj.config.potential;
  const double dt = traj.config.dt, tau = traj.config.tau;
  const auto& op = traj.states.front().phi.op;
  const auto& wts = op->weights();

  XiExtraction out;
  for (size_t nidx = 1; nidx < traj.states.size(); ++nidx) {
    const Field& phi = traj.states[nidx].phi;
    const Field& prev = traj.states[nidx - 1].phi;
    const Field& mu = traj.states[nidx].mu;
    const Field& f = traj.forcing[nidx];

    const auto nodal = to_nodal(phi);
    std::vector<double> pw(nodal.size());
    for (size_t k = 0; k < nodal.size(); ++k) pw[k] = pot.pi(nodal[k]);
    const Field pi_modal = to_modal(op, pw);

    Field xi = mu - (tau / dt) * (phi - prev) - solver.apply_k(phi) -
               pi_modal + f;

    const auto xi_nodal = to_nodal(xi);
    double vr = 0.0;
    for (size_t k = 0; k < nodal.size(); ++k) {
      const double gd = pot.graph_distance(nodal[k], xi_nodal[k]);
      vr += wts[k] * gd * gd;
    }
    const double res = std::sqrt(vr);
    out.time.push_back(traj.states[nidx].time);
    out.xi.push_back(std::move(xi));
    out.residual_l2.push_back(res);
    out.residual_sup = std::max(out.residual_sup, res);
  }
  return out;
}

}  // namespace fch
