#include "fch/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Boundary fuzz for the obstacle indicator: clamped prox values and smoothed
// fields land at 1 +- a few ulp, which must still count as admissible.
constexpr double kEdgeTol = 1e-12;

// t ln t extended by continuity to t = 0.
inline double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

// beta for the logarithmic well: ln((1+s)/(1-s)), stable near the endpoints.
inline double log_beta(double s) { return std::log1p(s) - std::log1p(-s); }

}  // namespace

Potential Potential::regular() {
  return Potential(PotentialKind::regular, 0.0, 1.0);
}

Potential Potential::logarithmic(double c1) {
  if (!(c1 > 1.0))
    throw std::invalid_argument(
        "logarithmic potential: c1 > 1 is required for a double well");
  return Potential(PotentialKind::logarithmic, c1, 2.0 * c1);
}

Potential Potential::double_obstacle(double c2) {
  if (!(c2 > 0.0))
    throw std::invalid_argument("double obstacle potential: c2 > 0 required");
  return Potential(PotentialKind::double_obstacle, c2, 2.0 * c2);
}

Potential Potential::unconstrained(double pi_slope) {
  if (!(pi_slope >= 0.0))
    throw std::invalid_argument("unconstrained potential: slope must be >= 0");
  return Potential(PotentialKind::unconstrained, pi_slope, pi_slope);
}

double Potential::beta_hat(double s) const {
  switch (kind_) {
    case PotentialKind::regular:
      return 0.25 * s * s * s * s;
    case PotentialKind::logarithmic: {
      const double a = std::abs(s);
      if (a > 1.0) return kInf;
      if (a == 1.0) return 2.0 * std::log(2.0);
      return xlogx(1.0 + s) + xlogx(1.0 - s);
    }
    case PotentialKind::double_obstacle:
      return std::abs(s) <= 1.0 + kEdgeTol ? 0.0 : kInf;
    case PotentialKind::unconstrained:
      return 0.0;
  }
  return 0.0;
}

double Potential::beta_min_section(double s) const {
  switch (kind_) {
    case PotentialKind::regular:
      return s * s * s;
    case PotentialKind::logarithmic:
      if (std::abs(s) >= 1.0)
        throw std::domain_error(
            "logarithmic potential: beta is only defined on (-1, 1)");
      return log_beta(s);
    case PotentialKind::double_obstacle:
      // inside and at the endpoints the minimal section is 0 (from inside)
      if (std::abs(s) > 1.0 + kEdgeTol)
        throw std::domain_error(
            "double obstacle potential: beta is only defined on [-1, 1]");
      return 0.0;
    case PotentialKind::unconstrained:
      return 0.0;
  }
  return 0.0;
}

bool Potential::in_domain(double s) const {
  switch (kind_) {
    case PotentialKind::regular:
    case PotentialKind::unconstrained:
      return true;
    case PotentialKind::logarithmic:
    case PotentialKind::double_obstacle:
      return std::abs(s) <= 1.0 + kEdgeTol;
  }
  return true;
}

bool Potential::in_domain_interior(double s) const {
  switch (kind_) {
    case PotentialKind::regular:
    case PotentialKind::unconstrained:
      return true;
    case PotentialKind::logarithmic:
    case PotentialKind::double_obstacle:
      return std::abs(s) < 1.0;
  }
  return true;
}

double Potential::domain_violation(double s) const {
  switch (kind_) {
    case PotentialKind::regular:
    case PotentialKind::unconstrained:
      return 0.0;
    case PotentialKind::logarithmic:
    case PotentialKind::double_obstacle:
      return std::max(std::abs(s) - 1.0, 0.0);
  }
  return 0.0;
}

double Potential::pi_hat(double s) const {
  switch (kind_) {
    case PotentialKind::regular:
      return -0.5 * s * s + 0.25;
    case PotentialKind::logarithmic:
    case PotentialKind::double_obstacle:
      return -c_ * s * s;
    case PotentialKind::unconstrained:
      return -0.5 * c_ * s * s;
  }
  return 0.0;
}

double Potential::pi(double s) const {
  switch (kind_) {
    case PotentialKind::regular:
      return -s;
    case PotentialKind::logarithmic:
    case PotentialKind::double_obstacle:
      return -2.0 * c_ * s;
    case PotentialKind::unconstrained:
      return -c_ * s;
  }
  return 0.0;
}

double Potential::pi_derivative(double) const {
  switch (kind_) {
    case PotentialKind::regular:
      return -1.0;
    case PotentialKind::logarithmic:
    case PotentialKind::double_obstacle:
      return -2.0 * c_;
    case PotentialKind::unconstrained:
      return -c_;
  }
  return 0.0;
}

double Potential::prox(double lambda, double s) const {
  if (!(lambda > 0.0))
    throw std::invalid_argument("prox: lambda must be positive");
  switch (kind_) {
    case PotentialKind::unconstrained:
      return s;
    case PotentialKind::double_obstacle:
      return std::clamp(s, -1.0, 1.0);
    case PotentialKind::regular: {
      // root of p + lambda p^3 = s; Newton from p = s with a bisection
      // bracket [0, s] (the root has the sign of s and smaller magnitude)
      double lo = std::min(0.0, s), hi = std::max(0.0, s);
      double p = s;
      for (int it = 0; it < 100; ++it) {
        const double g = p + lambda * p * p * p - s;
        if (std::abs(g) <= 1e-15 * (1.0 + std::abs(s))) break;
        (g > 0.0 ? hi : lo) = p;
        const double step = g / (1.0 + 3.0 * lambda * p * p);
        p -= step;
        if (p <= lo || p >= hi) p = 0.5 * (lo + hi);
      }
      return p;
    }
    case PotentialKind::logarithmic: {
      // root of p + lambda ln((1+p)/(1-p)) = s inside (-1, 1)
      double lo = -1.0, hi = 1.0;
      double p = std::clamp(s, -1.0 + 1e-12, 1.0 - 1e-12);
      for (int it = 0; it < 200; ++it) {
        const double g = p + lambda * log_beta(p) - s;
        if (std::abs(g) <= 1e-15 * (1.0 + std::abs(s))) break;
        (g > 0.0 ? hi : lo) = p;
        const double dg = 1.0 + 2.0 * lambda / ((1.0 - p) * (1.0 + p));
        double next = p - g / dg;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == p) break;
        p = next;
      }
      return p;
    }
  }
  return s;
}

double Potential::yosida(double lambda, double s) const {
  return (s - prox(lambda, s)) / lambda;
}

double Potential::yosida_derivative(double lambda, double s) const {
  if (!(lambda > 0.0))
    throw std::invalid_argument("yosida_derivative: lambda must be positive");
  switch (kind_) {
    case PotentialKind::unconstrained:
      return 0.0;
    case PotentialKind::double_obstacle:
      return std::abs(s) <= 1.0 ? 0.0 : 1.0 / lambda;
    case PotentialKind::regular: {
      const double p = prox(lambda, s);
      return 3.0 * p * p / (1.0 + 3.0 * lambda * p * p);
    }
    case PotentialKind::logarithmic: {
      const double p = prox(lambda, s);
      return 2.0 / ((1.0 - p) * (1.0 + p) + 2.0 * lambda);
    }
  }
  return 0.0;
}

double Potential::moreau(double lambda, double s) const {
  const double p = prox(lambda, s);
  const double d = s - p;
  return beta_hat(p) + d * d / (2.0 * lambda);
}

namespace {

// Distance from (s, xi) to a smooth curve (p, beta(p)) for p in (lo, hi):
// coarse scan, then ternary refinement of the squared distance.
template <typename BetaFn>
double curve_distance(double s, double xi, double lo, double hi, BetaFn beta) {
  const int kScan = 256;
  auto d2 = [&](double p) {
    const double dx = s - p, dy = xi - beta(p);
    return dx * dx + dy * dy;
  };
  double best_p = lo, best = d2(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double p = lo + (hi - lo) * i / kScan;
    const double v = d2(p);
    if (v < best) { best = v; best_p = p; }
  }
  double a = std::max(lo, best_p - (hi - lo) / kScan);
  double b = std::min(hi, best_p + (hi - lo) / kScan);
  for (int it = 0; it < 80; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (d2(m1) < d2(m2)) b = m2; else a = m1;
  }
  return std::sqrt(d2(0.5 * (a + b)));
}

}  // namespace

double Potential::graph_distance(double s, double xi) const {
  switch (kind_) {
    case PotentialKind::unconstrained:
      // graph is the horizontal axis
      return std::abs(xi);
    case PotentialKind::double_obstacle: {
      // three pieces: [-1,1] x {0}, {1} x [0,inf), {-1} x (-inf,0]
      const double d1 = std::hypot(std::max(std::abs(s) - 1.0, 0.0), xi);
      const double d2 = std::hypot(s - 1.0, std::min(xi, 0.0));
      const double d3 = std::hypot(s + 1.0, std::max(xi, 0.0));
      return std::min({d1, d2, d3});
    }
    case PotentialKind::regular: {
      const double reach =
          std::max({2.0, std::abs(s), std::cbrt(std::abs(xi))}) + 1.0;
      return curve_distance(s, xi, -reach, reach,
                            [](double p) { return p * p * p; });
    }
    case PotentialKind::logarithmic: {
      // the curve is vertical at the endpoints, so parametrize by ordinate:
      // graph = { (tanh(y/2), y) : y real } and minimize over y
      const double y_near_s =
          log_beta(std::clamp(s, -1.0 + 1e-12, 1.0 - 1e-12));
      const double lo = std::min(xi, y_near_s) - 1.0;
      const double hi = std::max(xi, y_near_s) + 1.0;
      const int kScan = 512;
      auto d2 = [&](double y) {
        const double dx = s - std::tanh(0.5 * y), dy = xi - y;
        return dx * dx + dy * dy;
      };
      double best_y = lo, best = d2(lo);
      for (int i = 1; i <= kScan; ++i) {
        const double y = lo + (hi - lo) * i / kScan;
        const double v = d2(y);
        if (v < best) { best = v; best_y = y; }
      }
      double a = best_y - (hi - lo) / kScan, b = best_y + (hi - lo) / kScan;
      for (int it = 0; it < 80; ++it) {
        const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (d2(m1) < d2(m2)) b = m2; else a = m1;
      }
      return std::sqrt(d2(0.5 * (a + b)));
    }
  }
  return std::abs(xi);
}

std::string Potential::describe() const {
  switch (kind_) {
    case PotentialKind::regular:
      return "regular";
    case PotentialKind::logarithmic:
      return "logarithmic(c1=" + std::to_string(c_) + ")";
    case PotentialKind::double_obstacle:
      return "double_obstacle(c2=" + std::to_string(c_) + ")";
    case PotentialKind::unconstrained:
      return "unconstrained(pi_slope=" + std::to_string(c_) + ")";
  }
  return "unknown";
}

double beta_hat_integral(const Potential& p, const Field& f) {
  const auto nodal = to_nodal(f);
  const auto& w = f.op->weights();
  double s = 0.0;
  for (size_t k = 0; k < nodal.size(); ++k) {
    const double b = p.beta_hat(nodal[k]);
    if (b == kInf) return kInf;
    s += w[k] * b;
  }
  return s;
}

std::pair<double, double> pi_eval(const Potential& p, double s) {
  return {p.pi_hat(s), p.pi(s)};
}

}  // namespace fch
