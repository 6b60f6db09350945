// Lattice verification of the two variational-inequality forms, trajectory
// inequality residuals, and the resolvent density construction.

#include "fch/convex_vi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Enumerate the lattice lo + h * (i1,...,in), axis-major.
std::vector<Eigen::VectorXd> enumerate_lattice(const FiniteVI& vi,
                                               std::size_t cap) {
  const int n = vi.dimension();
  std::vector<int> counts(n);
  std::size_t total = 1;
  for (int d = 0; d < n; ++d) {
    if (!(vi.hi[d] >= vi.lo[d]) || !(vi.h > 0))
      throw std::invalid_argument("search box is empty or spacing invalid");
    counts[d] = static_cast<int>(std::llround((vi.hi[d] - vi.lo[d]) / vi.h)) + 1;
    total *= static_cast<std::size_t>(counts[d]);
    if (total > cap) throw std::invalid_argument("lattice exceeds size cap");
  }
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(total);
  std::vector<int> idx(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Eigen::VectorXd p(n);
    for (int d = 0; d < n; ++d) p[d] = vi.lo[d] + vi.h * idx[d];
    pts.push_back(std::move(p));
    for (int d = 0; d < n; ++d) {
      if (++idx[d] < counts[d]) break;
      idx[d] = 0;
    }
  }
  return pts;
}

// Spot-check convexity and the gradient inequality of gamma2_hat on random
// segments between lattice points.  A violation invalidates the instance.
void spot_check_gamma2(const FiniteVI& vi,
                       const std::vector<Eigen::VectorXd>& pts) {
  std::mt19937 rng(0x5eedu);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  for (int trial = 0; trial < 64; ++trial) {
    const Eigen::VectorXd& x = pts[pick(rng)];
    const Eigen::VectorXd& y = pts[pick(rng)];
    const double fx = vi.gamma2_hat(x), fy = vi.gamma2_hat(y);
    const double fm = vi.gamma2_hat(0.5 * (x + y));
    if (fm > 0.5 * (fx + fy) + 1e-10)
      throw std::invalid_argument("gamma2_hat fails midpoint convexity");
    const Eigen::VectorXd gx = vi.gamma2_grad(x);
    if (fy < fx + gx.dot(y - x) - 1e-10)
      throw std::invalid_argument("gamma2_grad fails the gradient inequality");
  }
}

}  // namespace

ViEquivalenceReport check_vi_equivalence(const FiniteVI& vi) {
  const auto pts = enumerate_lattice(vi, 400000);
  const std::size_t nn = pts.size();
  spot_check_gamma2(vi, pts);

  std::vector<double> g1(nn), g2(nn);
  std::vector<char> finite(nn);
  bool any_finite = false;
  for (std::size_t i = 0; i < nn; ++i) {
    g1[i] = vi.gamma1_hat(pts[i]);
    g2[i] = vi.gamma2_hat(pts[i]);
    finite[i] = std::isfinite(g1[i]);
    any_finite |= (finite[i] != 0);
  }

  ViEquivalenceReport rep;
  rep.n_grid = nn;
  if (!any_finite) {
    rep.detail = "gamma1_hat is +inf on the whole lattice; grid too coarse "
                 "or misplaced";
    return rep;
  }

  // Worst inequality defect of each candidate u, for both forms.  Using
  //   V(u,v) = <s_u, u - v> + psi(v) - psi(u)  with  s_u as below,
  // the candidate's worst violation is  max_v (<s_u,v> - psi(v)) - base_u.
  auto worst_defects = [&](bool gradient_form) {
    std::vector<double> worst(nn, kInf);
    for (std::size_t u = 0; u < nn; ++u) {
      if (!finite[u]) continue;  // cannot satisfy either inequality
      Eigen::VectorXd s = vi.g - vi.a.transpose() * pts[u];
      double psi_u = g1[u];
      if (gradient_form) {
        s -= vi.gamma2_grad(pts[u]);
      } else {
        psi_u += g2[u];
      }
      const double base = s.dot(pts[u]) - psi_u;
      double m = -kInf;
      for (std::size_t v = 0; v < nn; ++v) {
        if (!finite[v]) continue;  // infinite right-hand side: no constraint
        const double psi_v = gradient_form ? g1[v] : g1[v] + g2[v];
        m = std::max(m, s.dot(pts[v]) - psi_v);
      }
      worst[u] = m - base;
    }
    return worst;
  };

  const std::vector<double> worst_old = worst_defects(true);
  const std::vector<double> worst_new = worst_defects(false);

  // Adaptive slack, separately per form: twice the defect of the best lattice
  // candidate.  The continuum solution rarely sits on the lattice, and the
  // nearest node violates the gradient form by O(h) but the function form by
  // O(h^2) (its test structure carries a quadratic slack), so a shared slack
  // would inflate one set relative to the other.  Doubling each form's own
  // best defect keeps both sets one-to-two cells wide around the solution.
  const double best_old =
      *std::min_element(worst_old.begin(), worst_old.end());
  const double best_new =
      *std::min_element(worst_new.begin(), worst_new.end());
  const double tol_old = 2.0 * std::max(best_old, 0.0) + 1e-12;
  const double tol_new = 2.0 * std::max(best_new, 0.0) + 1e-12;
  rep.tol = tol_old;

  for (std::size_t i = 0; i < nn; ++i) {
    if (worst_old[i] <= tol_old) rep.old_points.push_back(pts[i]);
    if (worst_new[i] <= tol_new) rep.new_points.push_back(pts[i]);
  }
  rep.n_old = rep.old_points.size();
  rep.n_new = rep.new_points.size();
  rep.conclusive = rep.n_old > 0 && rep.n_new > 0;
  if (!rep.conclusive) {
    rep.detail = "empty candidate set; grid too coarse";
    return rep;
  }

  // The gradient form implies the function form exactly at any shared slack
  // (their defects differ by a nonnegative Bregman divergence); then the two
  // sets must agree up to a one-cell dilation in both directions.
  const double cell = vi.h * (1.0 + 1e-9);
  auto within_cell_of = [&](const Eigen::VectorXd& p,
                            const std::vector<Eigen::VectorXd>& set) {
    for (const auto& q : set)
      if ((p - q).lpNorm<Eigen::Infinity>() <= cell) return true;
    return false;
  };
  bool bregman = true;
  for (std::size_t i = 0; i < nn; ++i)
    if (worst_new[i] > worst_old[i] + 1e-12) bregman = false;
  bool fwd = true, bwd = true;
  for (const auto& p : rep.old_points)
    if (!within_cell_of(p, rep.new_points)) fwd = false;
  for (const auto& p : rep.new_points)
    if (!within_cell_of(p, rep.old_points)) bwd = false;
  rep.equivalent = bregman && fwd && bwd;
  if (!rep.equivalent) {
    std::ostringstream os;
    os << "set mismatch: Bregman ordering " << (bregman ? "ok" : "VIOLATED")
       << ", old-in-new dilation " << (fwd ? "ok" : "VIOLATED")
       << ", new-in-old dilation " << (bwd ? "ok" : "VIOLATED");
    rep.detail = os.str();
  }
  return rep;
}

FiniteVI make_random_vi(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dim_pick(1, 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  const int n = dim_pick(rng);
  auto random_spd = [&](double shift) {
    Eigen::MatrixXd r(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) = gauss(rng) / std::sqrt(double(n));
    return Eigen::MatrixXd(r.transpose() * r +
                           shift * Eigen::MatrixXd::Identity(n, n));
  };

  FiniteVI vi;
  vi.a = random_spd(0.5);
  const Eigen::MatrixXd q = random_spd(0.3);
  const double ch = 0.15 * (uni(rng) + 1.0);  // cosh weight in [0, 0.3]
  vi.gamma2_hat = [q, ch, n](const Eigen::VectorXd& v) {
    double s = 0.5 * v.dot(q * v);
    for (int i = 0; i < n; ++i) s += ch * (std::cosh(v[i]) - 1.0);
    return s;
  };
  vi.gamma2_grad = [q, ch, n](const Eigen::VectorXd& v) {
    Eigen::VectorXd g = q * v;
    for (int i = 0; i < n; ++i) g[i] += ch * std::sinh(v[i]);
    return g;
  };

  // Nonsmooth part: plain, box indicator, or weighted 1-norm.
  const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
  Eigen::VectorXd wts =
      Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) {
        return 0.2 + 0.4 * (uni(rng) + 1.0);
      });
  if (kind == 0) {
    vi.gamma1_hat = [](const Eigen::VectorXd&) { return 0.0; };
  } else if (kind == 1) {
    vi.gamma1_hat = [n](const Eigen::VectorXd& v) {
      for (int i = 0; i < n; ++i)
        if (std::abs(v[i]) > 1.0 + 1e-12) return kInf;
      return 0.0;
    };
  } else {
    vi.gamma1_hat = [wts, n](const Eigen::VectorXd& v) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += wts[i] * std::abs(v[i]);
      return s;
    };
  }

  // Manufacture a lattice-aligned solution u*: draw it on the grid (boundary
  // contacts and exact zeros included), draw a subgradient rho of the
  // nonsmooth part at u*, and let g = a u* + grad gamma2(u*) + rho, which is
  // precisely the optimality condition of both inequality forms.
  vi.h = 1e-2;
  std::uniform_int_distribution<int> cell_pick(-60, 60);
  Eigen::VectorXd ustar(n), rho = Eigen::VectorXd::Zero(n);
  for (int d = 0; d < n; ++d) {
    ustar[d] = vi.h * cell_pick(rng);
    if (kind == 1 && uni(rng) > 0.4) ustar[d] = std::copysign(1.0, uni(rng));
    if (kind == 2 && uni(rng) > 0.4) ustar[d] = 0.0;
  }
  for (int d = 0; d < n; ++d) {
    if (kind == 1 && std::abs(ustar[d]) == 1.0)
      rho[d] = std::copysign(0.5 * (uni(rng) + 1.0), ustar[d]);
    else if (kind == 2)
      rho[d] = ustar[d] != 0.0 ? wts[d] * (ustar[d] > 0 ? 1.0 : -1.0)
                               : wts[d] * 0.9 * uni(rng);
  }
  vi.g = vi.a * ustar + vi.gamma2_grad(ustar) + rho;

  vi.lo.resize(n);
  vi.hi.resize(n);
  for (int d = 0; d < n; ++d) {
    vi.lo[d] = (std::llround(ustar[d] / vi.h) - 8) * vi.h;
    vi.hi[d] = vi.lo[d] + 16 * vi.h;
  }
  return vi;
}

std::vector<double> vi_residual(const Trajectory& traj,
                                const std::vector<Field>& test_fields) {
  if (traj.kind != TrajectoryKind::evolution)
    throw std::invalid_argument("vi_residual expects an evolution trajectory");
  if (traj.states.size() < 2 || traj.forcing.size() != traj.states.size())
    throw std::invalid_argument("trajectory lacks states or forcing history");
  const SolverConfig& cfg = traj.config;
  EvolutionSolver solver(cfg);
  const Potential& pot = cfg.potential;
  const auto& w = cfg.op_b->weights();

  // Nodal convex-integral difference with the both-sides-equal rule, so
  // testing a state against itself cancels exactly even at +inf.
  auto beta_integral_diff = [&](const std::vector<double>& a,
                                const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double ba = pot.beta_hat(a[k]), bb = pot.beta_hat(b[k]);
      if (ba == bb) continue;
      s += w[k] * (ba - bb);
    }
    return s;
  };

  std::vector<double> out;
  out.reserve(traj.states.size() - 1);
  for (std::size_t n = 1; n < traj.states.size(); ++n) {
    const Field& phi = traj.states[n].phi;
    const Field& mu = traj.states[n].mu;
    const Field dphi = (1.0 / traj.dt()) * (phi - traj.states[n - 1].phi);
    const Field kphi = solver.apply_k(phi);
    const auto nodal = to_nodal(phi);
    std::vector<double> pi_vals(nodal.size());
    for (std::size_t k = 0; k < nodal.size(); ++k)
      pi_vals[k] = pot.pi(nodal[k]);
    const Field pi_field = to_modal(cfg.op_b, pi_vals);
    const Field& f = traj.forcing[n];

    double worst = -kInf;
    for (const Field& v : test_fields) {
      const auto v_nodal = to_nodal(v);
      bool admissible = true;
      for (double s : v_nodal)
        if (!std::isfinite(pot.beta_hat(s))) { admissible = false; break; }
      if (!admissible) continue;  // infinite right-hand side: no constraint
      const Field d = phi - v;
      const double lhs = cfg.tau * inner(dphi, d) + inner(kphi, d) +
                         beta_integral_diff(nodal, v_nodal) +
                         inner(pi_field - f, d) - inner(mu, d);
      worst = std::max(worst, lhs);
    }
    out.push_back(worst);
  }
  return out;
}

Field density_sequence(const Field& v, int n, const OperatorPtr& laplace_op) {
  if (n < 1) throw std::invalid_argument("density index must be positive");
  if (laplace_op->kind() != BasisKind::cosine_neumann_1d)
    throw std::invalid_argument("density construction requires the cosine basis");
  if (!same_basis(*v.op, *laplace_op))
    throw std::invalid_argument("field does not live on the given operator");
  Field out = v;
  for (int j = 0; j < laplace_op->n_modes(); ++j)
    out.coeffs[j] = v.coeffs[j] / (1.0 + laplace_op->eigenvalue(j) / double(n));
  return out;
}

}  // namespace fch
