// Convex-analytic verification tools.
//
// Three independent facilities live here:
//
//  1. Finite-dimensional variational inequalities.  For a continuous bilinear
//     form a, a convex extended-real gamma1_hat, a convex differentiable
//     gamma2_hat with gradient gamma2_grad, and a right-hand side g, the two
//     inequalities
//
//       (old)  a(u,u-v) + gamma1(u) + <grad gamma2(u), u-v>
//                  <= <g,u-v> + gamma1(v)                 for all v,
//       (new)  a(u,u-v) + gamma1(u) + gamma2(u)
//                  <= <g,u-v> + gamma1(v) + gamma2(v)     for all v,
//
//     have identical solution sets.  check_vi_equivalence verifies this by
//     exhaustive search over a lattice: the two candidate sets must agree up
//     to one grid cell.  The forward inclusion (old => new) is exact at any
//     tolerance because the two left-minus-right gaps differ by a Bregman
//     divergence of gamma2_hat, which is nonnegative; the reverse inclusion
//     is checked up to one-cell dilation.
//
//  2. The variational-inequality residual of computed trajectories: the
//     left-minus-right of the weak inequality satisfied by the order
//     parameter, evaluated with backward time differences against a family
//     of test fields.  Regularized runs satisfy it up to O(lambda + dt).
//
//  3. The density construction v -> v_n with coefficients c_j/(1+lambda_j/n)
//     (the exact spectral solve of (I + Laplacian/n) v_n = v with Neumann
//     conditions), which contracts the H-norm coefficientwise and does not
//     increase the convex integral of any of the shipped potentials.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "fch/potential.hpp"
#include "fch/solver.hpp"
#include "fch/spectral.hpp"

namespace fch {

struct FiniteVI {
  Eigen::MatrixXd a;   // bilinear form, n x n
  Eigen::VectorXd g;   // right-hand side, n
  std::function<double(const Eigen::VectorXd&)> gamma1_hat;   // may be +inf
  std::function<double(const Eigen::VectorXd&)> gamma2_hat;   // finite convex
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gamma2_grad;
  Eigen::VectorXd lo, hi;  // search box, lattice spans [lo, hi] per axis
  double h = 1e-2;         // lattice spacing

  int dimension() const { return static_cast<int>(g.size()); }
};

struct ViEquivalenceReport {
  bool conclusive = false;   // false when a candidate set came out empty
  bool equivalent = false;   // sets agree within one grid cell
  std::size_t n_grid = 0;    // lattice size
  std::size_t n_old = 0;     // solutions of the gradient-form inequality
  std::size_t n_new = 0;     // solutions of the function-form inequality
  double tol = 0.0;          // inequality slack used for both sets
  std::vector<Eigen::VectorXd> old_points, new_points;
  std::string detail;
};

// Exhaustive lattice comparison of the two inequality forms.
ViEquivalenceReport check_vi_equivalence(const FiniteVI& vi);

// Randomized instance with n <= 3, a symmetric positive definite form, one of
// three convex nonsmooth parts (zero, box indicator, weighted 1-norm), and a
// smooth convex part.  The instance is manufactured around a lattice-aligned
// solution: u* is drawn on the grid (including boundary-pinned and sparse
// patterns), a subgradient of the nonsmooth part is drawn at u*, and g is
// assembled from the optimality condition, so u* solves both inequality
// forms exactly and the lattice comparison has a sharp oracle.
FiniteVI make_random_vi(unsigned seed);

// Left-minus-right of the weak inequality for each snapshot n >= 1, maximized
// over the given test fields (backward differences in time).  Entries can be
// +inf when the state itself has an infinite convex integral.  Test fields
// with infinite integral impose no constraint and are skipped.
std::vector<double> vi_residual(const Trajectory& traj,
                                const std::vector<Field>& test_fields);

// v_n with coefficients c_j / (1 + lambda_j / n); requires the cosine basis.
Field density_sequence(const Field& v, int n, const OperatorPtr& laplace_op);

}  // namespace fch
