// Double-well free energies F = beta_hat + pi_hat split into a convex,
// possibly nonsmooth part beta_hat (with maximal monotone subdifferential
// beta) and a smooth concave perturbation pi_hat with Lipschitz derivative pi.
//
// Built-in variants:
//   regular          beta_hat = s^4/4,             pi_hat = -s^2/2 + 1/4
//   logarithmic(c1)  beta_hat = (1+s)ln(1+s)+(1-s)ln(1-s) on [-1,1], c1 > 1,
//                    pi_hat = -c1 s^2
//   double_obstacle(c2)  beta_hat = indicator of [-1,1], c2 > 0,
//                    pi_hat = -c2 s^2
//   unconstrained(a) beta_hat = 0,                  pi_hat = -a s^2/2
//
// The proximal map prox_lambda(s) = argmin_p { beta_hat(p) + (p-s)^2/(2 lambda) }
// induces the Yosida regularization beta_lambda(s) = (s - prox)/lambda and the
// Moreau envelope  B_lambda(s) = beta_hat(prox) + (s - prox)^2/(2 lambda),
// a smooth convex under-approximation of beta_hat increasing as lambda -> 0.

#pragma once

#include <limits>
#include <string>
#include <utility>

#include "fch/spectral.hpp"

namespace fch {

enum class PotentialKind { regular, logarithmic, double_obstacle, unconstrained };

class Potential {
public:
  static Potential regular();
  static Potential logarithmic(double c1);       // requires c1 > 1
  static Potential double_obstacle(double c2);   // requires c2 > 0
  static Potential unconstrained(double pi_slope = 0.0);  // beta == 0

  PotentialKind kind() const { return kind_; }
  double c1() const { return c_; }
  double c2() const { return c_; }

  // convex part; +infinity outside its effective domain
  double beta_hat(double s) const;
  // minimal section of the subdifferential beta (0 from inside at obstacle
  // endpoints); throws std::domain_error outside D(beta)
  double beta_min_section(double s) const;
  bool in_domain(double s) const;           // s in D(beta_hat)
  bool in_domain_interior(double s) const;  // s in int D(beta)
  // distance from s to D(beta_hat) (constraint-violation measure)
  double domain_violation(double s) const;

  // smooth perturbation and its derivative
  double pi_hat(double s) const;
  double pi(double s) const;
  double pi_derivative(double s) const;
  double lipschitz_pi() const { return l_pi_; }

  // full free energy F = beta_hat + pi_hat
  double f_total(double s) const { return beta_hat(s) + pi_hat(s); }

  // resolvent machinery; lambda > 0 required
  double prox(double lambda, double s) const;
  double yosida(double lambda, double s) const;
  double yosida_derivative(double lambda, double s) const;
  double moreau(double lambda, double s) const;

  // Euclidean distance from the point (s, xi) to the graph of beta in R^2;
  // zero exactly on the graph, finite everywhere (see README on how
  // complementarity is measured for relaxed runs).
  double graph_distance(double s, double xi) const;

  std::string describe() const;

private:
  explicit Potential(PotentialKind k, double c, double l_pi)
      : kind_(k), c_(c), l_pi_(l_pi) {}
  PotentialKind kind_;
  double c_;     // c1, c2, or pi slope depending on the variant
  double l_pi_;  // Lipschitz constant of pi
};

// Nodal quadrature of beta_hat over the field's grid; may return +infinity.
double beta_hat_integral(const Potential& p, const Field& f);

// (pi_hat(s), pi(s)) in one call.
std::pair<double, double> pi_eval(const Potential& p, double s);

}  // namespace fch
