// Free-energy splits, proximal maps, Yosida regularization, Moreau envelopes.
//
// The proximal oracle used here is an independent pure-bisection solve of the
// optimality condition p - s + lambda * beta(p) = 0, so agreement is evidence
// and not self-confirmation.

#include <cmath>
#include <random>

#include "doctest.h"
#include "fch/potential.hpp"
#include "fch/spectral.hpp"

using namespace fch;

namespace {

const double kPi = std::acos(-1.0);
const double kInf = std::numeric_limits<double>::infinity();

// Bisection on g(p) = p + lambda*beta(p) - s over a sign-changing bracket.
template <typename BetaFn>
double bisect_prox(double lambda, double s, double lo, double hi, BetaFn beta) {
  auto g = [&](double p) { return p + lambda * beta(p) - s; };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE_BEGIN("potential");

TEST_CASE("regular well: F(1) = 0, F(0) = 1/4, and the split is exact") {
  auto p = Potential::regular();
  CHECK(p.f_total(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.f_total(0.0) == doctest::Approx(0.25).epsilon(1e-15));
  // beta_hat + pi_hat == (s^2 - 1)^2 / 4 identically
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double s = u(rng);
    const double well = 0.25 * (s * s - 1.0) * (s * s - 1.0);
    CHECK(p.f_total(s) == doctest::Approx(well).epsilon(1e-13));
  }
  CHECK(p.lipschitz_pi() == 1.0);
}

TEST_CASE("logarithmic well: endpoint values and domain") {
  auto p = Potential::logarithmic(2.0);
  const double expect = 2.0 * std::log(2.0) - 2.0;
  CHECK(p.f_total(1.0) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(p.f_total(-1.0) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(p.beta_hat(0.0) == 0.0);
  CHECK(p.beta_hat(1.5) == kInf);
  CHECK(p.lipschitz_pi() == 4.0);
  CHECK_THROWS_AS(Potential::logarithmic(0.5), std::invalid_argument);
  CHECK_THROWS_AS(Potential::logarithmic(1.0), std::invalid_argument);
}

TEST_CASE("double obstacle: indicator and minimal section") {
  auto p = Potential::double_obstacle(1.0);
  CHECK(p.beta_hat(0.3) == 0.0);
  CHECK(p.beta_hat(1.0) == 0.0);
  CHECK(p.beta_hat(1.2) == kInf);
  CHECK(p.beta_min_section(1.0) == 0.0);
  CHECK(p.beta_min_section(-1.0) == 0.0);
  CHECK_THROWS_AS(p.beta_min_section(1.5), std::domain_error);
  CHECK_THROWS_AS(Potential::double_obstacle(0.0), std::invalid_argument);
}

TEST_CASE("pi evaluations") {
  auto reg = Potential::regular();
  CHECK(pi_eval(reg, 2.0).second == doctest::Approx(-2.0).epsilon(1e-15));
  auto log2 = Potential::logarithmic(2.0);
  CHECK(pi_eval(log2, 0.5).second == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(pi_eval(log2, 0.5).first == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("prox closed cases: regular lambda=1 s=2 gives 1; obstacle clamps") {
  auto reg = Potential::regular();
  CHECK(reg.prox(1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  auto obs = Potential::double_obstacle(1.0);
  CHECK(obs.prox(0.5, 2.0) == 1.0);
  CHECK(obs.yosida(0.5, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(obs.prox(0.5, 0.3) == 0.3);
}

TEST_CASE("prox agrees with an independent bisection oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> su(-4.0, 4.0);
  std::uniform_real_distribution<double> lu(0.01, 10.0);
  auto reg = Potential::regular();
  auto logp = Potential::logarithmic(1.5);
  for (int i = 0; i < 200; ++i) {
    const double s = su(rng), lam = lu(rng);
    const double oracle_reg =
        bisect_prox(lam, s, std::min(0.0, s) - 1.0, std::max(0.0, s) + 1.0,
                    [](double p) { return p * p * p; });
    CHECK(reg.prox(lam, s) == doctest::Approx(oracle_reg).epsilon(1e-10));

    const double oracle_log =
        bisect_prox(lam, s, -1.0 + 1e-16, 1.0 - 1e-16,
                    [](double p) { return std::log1p(p) - std::log1p(-p); });
    CHECK(logp.prox(lam, s) == doctest::Approx(oracle_log).epsilon(1e-10));
  }
}

TEST_CASE("prox is nonexpansive and fixes 0") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> su(-3.0, 3.0);
  for (auto p : {Potential::regular(), Potential::logarithmic(2.0),
                 Potential::double_obstacle(0.5)}) {
    CHECK(p.prox(0.7, 0.0) == 0.0);
    for (int i = 0; i < 100; ++i) {
      const double a = su(rng), b = su(rng);
      CHECK(std::abs(p.prox(0.7, a) - p.prox(0.7, b)) <=
            std::abs(a - b) + 1e-12);
    }
  }
}

TEST_CASE("yosida is monotone, 1/lambda-Lipschitz, and vanishes at 0") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> su(-3.0, 3.0);
  for (auto p : {Potential::regular(), Potential::logarithmic(2.0),
                 Potential::double_obstacle(0.5)}) {
    const double lam = 0.2;
    CHECK(p.yosida(lam, 0.0) == 0.0);
    for (int i = 0; i < 200; ++i) {
      double a = su(rng), b = su(rng);
      if (a == b) continue;
      if (a < b) std::swap(a, b);
      const double slope = (p.yosida(lam, a) - p.yosida(lam, b)) / (a - b);
      CHECK(slope >= -1e-12);
      CHECK(slope <= 1.0 / lam + 1e-9);
    }
  }
}

TEST_CASE("yosida converges to the minimal section as lambda -> 0") {
  auto reg = Potential::regular();
  for (double s : {-1.7, -0.3, 0.0, 0.8, 2.4}) {
    CHECK(reg.yosida(1e-8, s) ==
          doctest::Approx(s * s * s).epsilon(1e-5));
  }
  auto obs = Potential::double_obstacle(1.0);
  CHECK(obs.yosida(1e-8, 0.7) == 0.0);
}

TEST_CASE("moreau envelope under-approximates beta_hat and grows as lambda drops") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> su(-2.5, 2.5);
  for (auto p : {Potential::regular(), Potential::logarithmic(2.0),
                 Potential::double_obstacle(0.5)}) {
    for (int i = 0; i < 200; ++i) {
      const double s = su(rng);
      const double big = p.moreau(0.5, s);
      const double small = p.moreau(0.05, s);
      CHECK(big <= small + 1e-12);
      const double bh = p.beta_hat(s);
      if (bh < kInf) CHECK(small <= bh + 1e-12);
      CHECK(p.moreau(0.5, 0.0) == 0.0);
    }
  }
}

TEST_CASE("moreau derivative is the yosida map (finite differences)") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> su(-2.0, 2.0);
  const double h = 1e-6, lam = 0.3;
  for (auto p : {Potential::regular(), Potential::logarithmic(2.0)}) {
    for (int i = 0; i < 100; ++i) {
      const double s = su(rng);
      const double fd = (p.moreau(lam, s + h) - p.moreau(lam, s - h)) / (2 * h);
      CHECK(fd == doctest::Approx(p.yosida(lam, s)).epsilon(1e-6));
    }
  }
  // obstacle: identical away from the kinks at +-1
  auto obs = Potential::double_obstacle(1.0);
  for (double s : {-1.7, -0.4, 0.2, 1.9}) {
    const double fd =
        (obs.moreau(lam, s + h) - obs.moreau(lam, s - h)) / (2 * h);
    CHECK(fd == doctest::Approx(obs.yosida(lam, s)).epsilon(1e-6));
  }
}

TEST_CASE("yosida_derivative matches finite differences of yosida") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> su(-2.0, 2.0);
  const double h = 1e-6, lam = 0.25;
  for (auto p : {Potential::regular(), Potential::logarithmic(1.8)}) {
    for (int i = 0; i < 50; ++i) {
      const double s = su(rng);
      const double fd = (p.yosida(lam, s + h) - p.yosida(lam, s - h)) / (2 * h);
      CHECK(p.yosida_derivative(lam, s) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("beta_hat integral: quartic of the unit constant on (0,pi) is pi/4") {
  auto op = SpectralOperator::cosine_neumann(16, kPi);
  auto reg = Potential::regular();
  Field one = zero_field(op);
  one.coeffs[0] = std::sqrt(kPi);  // the constant 1
  CHECK(beta_hat_integral(reg, one) == doctest::Approx(kPi / 4).epsilon(1e-12));

  // obstacle: a nodal excursion outside [-1, 1] makes the integral infinite
  auto obs = Potential::double_obstacle(1.0);
  Field bad = zero_field(op);
  bad.coeffs[0] = 1.2 * std::sqrt(kPi);  // constant 1.2
  CHECK(beta_hat_integral(obs, bad) == kInf);
  CHECK(beta_hat_integral(obs, one) == 0.0);
}

TEST_CASE("graph distance: zero on the graph, lambda-gap for yosida pairs") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> su(-2.0, 2.0);
  auto reg = Potential::regular();
  auto obs = Potential::double_obstacle(1.0);
  auto logp = Potential::logarithmic(2.0);

  for (int i = 0; i < 50; ++i) {
    const double s = su(rng);
    CHECK(reg.graph_distance(s, s * s * s) <= 1e-9);
  }
  CHECK(obs.graph_distance(0.4, 0.0) == 0.0);
  CHECK(obs.graph_distance(1.0, 5.0) == 0.0);
  CHECK(obs.graph_distance(-1.0, -2.0) == 0.0);
  CHECK(obs.graph_distance(1.5, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(logp.graph_distance(0.0, 0.0) <= 1e-9);

  // for (s, beta_lambda(s)) the distance is at most lambda * |beta_lambda(s)|
  const double lam = 1e-2;
  for (auto p : {reg, logp, obs}) {
    for (int i = 0; i < 50; ++i) {
      const double s = su(rng);
      const double y = p.yosida(lam, s);
      CHECK(p.graph_distance(s, y) <= lam * std::abs(y) + 1e-9);
    }
  }
}

TEST_CASE("unconstrained variant has no convex part") {
  auto p = Potential::unconstrained(1.0);
  CHECK(p.beta_hat(3.0) == 0.0);
  CHECK(p.prox(0.5, 3.0) == 3.0);
  CHECK(p.yosida(0.5, 3.0) == 0.0);
  CHECK(p.pi(2.0) == doctest::Approx(-2.0));
  CHECK(p.graph_distance(1.0, 0.3) == doctest::Approx(0.3));
}

TEST_SUITE_END();
