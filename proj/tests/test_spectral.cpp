// Eigenbasis, transforms, fractional powers, and the equivalent-norm family.
// Expected values are frozen from hand calculations: cosine eigenvalues on
// (0, L) are ((j-1) pi / L)^2, analysis of a constant picks out the first
// coefficient, powers scale coefficients by lambda^r with 0^r = 0.

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fch/spectral.hpp"

using namespace fch;

namespace {
const double kPi = std::acos(-1.0);

Field random_field(const OperatorPtr& op, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<double> c(op->n_modes());
  for (double& x : c) x = u(rng);
  return make_field(op, std::move(c));
}
}  // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("cosine eigenvalues on (0,pi) and (0,2pi)") {
  auto a = SpectralOperator::cosine_neumann(4, kPi);
  REQUIRE(a->n_modes() == 4);
  CHECK(a->eigenvalue(0) == 0.0);
  CHECK(a->eigenvalue(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a->eigenvalue(2) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(a->eigenvalue(3) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(a->kernel_dim() == 1);

  auto b = SpectralOperator::cosine_neumann(2, 2.0 * kPi);
  CHECK(b->eigenvalue(0) == 0.0);
  CHECK(b->eigenvalue(1) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("midpoint cosine basis is discretely orthonormal at N=64") {
  auto op = SpectralOperator::cosine_neumann(64, kPi);
  CHECK(op->orthonormality_residual() <= 1e-10);
}

TEST_CASE("analysis of a constant hits only the first mode") {
  auto op = SpectralOperator::cosine_neumann(8, kPi);
  std::vector<double> nodal(op->n_nodes(), 3.0);
  Field f = to_modal(op, nodal);
  CHECK(f.coeffs[0] == doctest::Approx(3.0 * std::sqrt(kPi)).epsilon(1e-14));
  for (int j = 1; j < op->n_modes(); ++j)
    CHECK(std::abs(f.coeffs[j]) <= 1e-12);
}

TEST_CASE("round trip to_nodal then to_modal is the identity") {
  auto op = SpectralOperator::cosine_neumann(64, 2.5);
  std::mt19937_64 rng(101);
  Field f = random_field(op, rng);
  Field g = to_modal(op, to_nodal(f));
  for (int j = 0; j < op->n_modes(); ++j)
    CHECK(g.coeffs[j] == doctest::Approx(f.coeffs[j]).epsilon(1e-10));
}

TEST_CASE("apply_power scales by lambda^r and kills kernel modes") {
  auto op = SpectralOperator::custom(
      {0.0, 1.0, 4.0},
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
      {1.0, 1.0, 1.0});
  Field f = make_field(op, {2.0, 3.0, 5.0});
  Field g = apply_power(f, 0.5);
  CHECK(g.coeffs[0] == 0.0);
  CHECK(g.coeffs[1] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(g.coeffs[2] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK_THROWS_AS(apply_power(f, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_power(f, -1.0), std::invalid_argument);
}

TEST_CASE("apply_power obeys the semigroup property") {
  auto op = SpectralOperator::cosine_neumann(32, kPi);
  std::mt19937_64 rng(7);
  Field f = random_field(op, rng);
  Field a = apply_power(apply_power(f, 0.3), 0.45);
  Field b = apply_power(f, 0.75);
  for (int j = 0; j < op->n_modes(); ++j)
    CHECK(std::abs(a.coeffs[j] - b.coeffs[j]) <=
          1e-12 * (1.0 + std::abs(b.coeffs[j])));
}

TEST_CASE("two-case equivalent norm") {
  // kernel present: |c_1|^2 + |lambda_2^r c_2|^2
  auto a = SpectralOperator::custom({0.0, 4.0}, {{1, 0}, {0, 1}}, {1.0, 1.0});
  Field f = make_field(a, {2.0, 3.0});
  CHECK(frac_norm(f, 1.0) == doctest::Approx(std::sqrt(148.0)).epsilon(1e-14));

  // strictly positive spectrum: plain ||A^r v||
  auto b = SpectralOperator::custom({1.0, 2.0}, {{1, 0}, {0, 1}}, {1.0, 1.0});
  Field g = make_field(b, {1.0, 1.0});
  CHECK(frac_norm(g, 1.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("dual-scale norm and its strict mode") {
  auto op = SpectralOperator::custom({0.0, 4.0}, {{1, 0}, {0, 1}}, {1.0, 1.0});
  Field f = make_field(op, {0.0, 6.0});
  CHECK(dual_norm(f, 0.5) == doctest::Approx(3.0).epsilon(1e-14));

  Field g = make_field(op, {1.0, 6.0});
  CHECK(dual_norm(g, 0.5) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
  CHECK_THROWS_AS(dual_norm(g, 0.5, /*strict=*/true), std::invalid_argument);
}

TEST_CASE("duality pairing: dual_norm(A^{2r} v) equals frac_norm(v) off the kernel") {
  auto op = SpectralOperator::cosine_neumann(16, kPi);
  std::mt19937_64 rng(21);
  Field v = random_field(op, rng);
  v.coeffs[0] = 0.0;  // zero-mean representative
  const double r = 0.35;
  Field av = apply_power(v, 2.0 * r);
  CHECK(dual_norm(av, r) == doctest::Approx(frac_norm(v, r)).epsilon(1e-12));
}

TEST_CASE("projection onto the kernel") {
  auto op = SpectralOperator::custom(
      {0.0, 0.0, 2.0},
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
      {1.0, 1.0, 1.0});
  CHECK(op->kernel_dim() == 2);
  Field f = make_field(op, {1.0, 2.0, 3.0});
  Field p = project_kernel(f);
  CHECK(p.coeffs == std::vector<double>{1.0, 2.0, 0.0});
  // idempotent and orthogonal: (Pv, v - Pv) = 0
  Field pp = project_kernel(p);
  CHECK(pp.coeffs == p.coeffs);
  CHECK(inner(p, f - p) == 0.0);
}

TEST_CASE("mean value from the first coefficient") {
  auto op = SpectralOperator::cosine_neumann(3, kPi);
  Field f = make_field(op, {2.0 * std::sqrt(kPi), 1.0, 0.0});
  CHECK(mean_value(f) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mean value rejects bases without a constant first mode") {
  auto op = SpectralOperator::custom({1.0, 2.0}, {{1, 0}, {0, 1}}, {1.0, 1.0});
  Field f = make_field(op, {1.0, 1.0});
  CHECK_THROWS_AS(mean_value(f), std::invalid_argument);
}

TEST_CASE("Poincare-type inequality with constant lambda_2^{-r}, equality on mode 2") {
  auto op = SpectralOperator::cosine_neumann(24, kPi);
  const double r = 0.4;
  const double cp = std::pow(op->eigenvalue(1), -r);

  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    Field v = random_field(op, rng);
    v.coeffs[0] = 0.0;  // remove the mean
    CHECK(norm_h(v) <= cp * frac_norm(v, r) + 1e-13);
  }

  Field pure = zero_field(op);
  pure.coeffs[1] = 2.0;
  CHECK(norm_h(pure) ==
        doctest::Approx(cp * frac_norm(pure, r)).epsilon(1e-13));
}

TEST_CASE("Parseval: coefficient inner product equals nodal quadrature") {
  auto op = SpectralOperator::cosine_neumann(32, 1.7);
  std::mt19937_64 rng(55);
  Field f = random_field(op, rng);
  Field g = random_field(op, rng);
  auto fv = to_nodal(f);
  auto gv = to_nodal(g);
  double quad = 0.0;
  for (int k = 0; k < op->n_nodes(); ++k)
    quad += op->weights()[k] * fv[k] * gv[k];
  CHECK(inner(f, g) == doctest::Approx(quad).epsilon(1e-11));
}

TEST_CASE("custom operator validation") {
  CHECK_THROWS_AS(SpectralOperator::custom({-1.0}, {{1.0}}, {1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SpectralOperator::custom({2.0, 1.0}, {{1, 0}, {0, 1}},
                                           {1.0, 1.0}),
                  std::invalid_argument);
  // not orthonormal
  CHECK_THROWS_AS(
      SpectralOperator::custom({1.0, 2.0}, {{1, 0}, {1, 0}}, {1.0, 1.0}),
      std::invalid_argument);
  // weighted orthonormality: e = 1/sqrt(w_total) constants
  auto op = SpectralOperator::custom({3.0}, {{0.5, 0.5}}, {2.0, 2.0});
  CHECK(op->domain_measure() == doctest::Approx(4.0));
}

TEST_SUITE_END();
