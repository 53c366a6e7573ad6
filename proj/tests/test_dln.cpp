#include <doctest.h>

#include <cmath>
#include <random>

#include "tdaf/dln.hpp"
#include "tdaf/errors.hpp"
#include "oracles.hpp"

using namespace tdaf;
using namespace oracles;

namespace {

// Direct transcription of the coefficient table, written independently of the library.
Triple beta_oracle(double th, double e) {
  const double d = (1 + e * th) * (1 + e * th);
  const double b2 = 0.25 * (1 + (1 - th * th) / d + e * e * th * (1 - th * th) / d + th);
  const double b1 = 0.5 * (1 - (1 - th * th) / d);
  const double b0 = 0.25 * (1 + (1 - th * th) / d - e * e * th * (1 - th * th) / d - th);
  return {b0, b1, b2};
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("theta = 1 is the one-step midpoint rule") {
  for (double eps : {-0.5, 0.0, 0.3}) {
    const DlnCoefficients c = dln_coefficients(1.0, eps);
    CHECK(c.alpha[0] == doctest::Approx(0.0));
    CHECK(c.alpha[1] == doctest::Approx(-1.0));
    CHECK(c.alpha[2] == doctest::Approx(1.0));
    CHECK(c.beta[0] == doctest::Approx(0.0));
    CHECK(c.beta[1] == doctest::Approx(0.5));
    CHECK(c.beta[2] == doctest::Approx(0.5));
  }
}

TEST_CASE("theta = 0 with constant steps is the two-step midpoint rule") {
  const DlnCoefficients c = dln_coefficients(0.0, 0.0);
  CHECK(c.alpha[0] == doctest::Approx(-0.5));
  CHECK(c.alpha[1] == doctest::Approx(0.0));
  CHECK(c.alpha[2] == doctest::Approx(0.5));
  CHECK(c.beta[0] == doctest::Approx(0.5));
  CHECK(c.beta[1] == doctest::Approx(0.0));
  CHECK(c.beta[2] == doctest::Approx(0.5));
}

TEST_CASE("beta agrees with an independent transcription") {
  const Triple o = beta_oracle(0.3, 0.25);
  const DlnCoefficients c = dln_coefficients(0.3, 0.25);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(c.beta[i] - o[i]) <= 1e-15);
  CHECK(c.beta[0] + c.beta[1] + c.beta[2] == doctest::Approx(1.0).epsilon(1e-15));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(0.0, 1.0), ep(-0.99, 0.99);
  for (int k = 0; k < 200; ++k) {
    const double a = th(rng), e = ep(rng);
    const Triple b = beta_oracle(a, e);
    const DlnCoefficients d = dln_coefficients(a, e);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(d.beta[i] - b[i]) <= 1e-14);
    CHECK(d.alpha[0] + d.alpha[1] + d.alpha[2] == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("coefficient argument checks") {
  CHECK_THROWS_AS(dln_coefficients(-0.1, 0.0), ParameterError);
  CHECK_THROWS_AS(dln_coefficients(1.1, 0.0), ParameterError);
  CHECK_THROWS_AS(dln_coefficients(0.5, 1.0), ParameterError);
  CHECK_THROWS_AS(dln_coefficients(0.5, -1.0), ParameterError);
  CHECK_THROWS_AS(step_variability(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(step_variability(1.0, -1.0), ParameterError);
}

TEST_CASE("weighted step") {
  CHECK(weighted_step(0.3, 0.1, 0.1) == doctest::Approx(0.1));
  CHECK(weighted_step(1.0, 0.2, 5.0) == doctest::Approx(0.2));
  CHECK(weighted_step(0.5, 2.0, 1.0) == doctest::Approx(1.75));
  for (double th : {0.0, 0.4, 1.0}) CHECK(weighted_step(th, 0.01, 0.03) > 0.0);
}

TEST_CASE("combine") {
  const Vector c = vec({1.5, -2.0, 3.0});
  const DlnCoefficients d = dln_coefficients(0.3, 0.2);
  CHECK((combine(c, c, c, d.beta) - c).norm() < 1e-15);
  CHECK(combine(c, c, c, d.alpha).norm() < 1e-15);
  CHECK_THROWS_AS(combine(c, c, vec({1.0}), d.alpha), StructuralError);

  const TimeGrid g({0.0, 0.1, 0.25});
  CHECK(g.beta_time(1.0, 1) == doctest::Approx(0.175));
  const DlnCoefficients e = dln_coefficients(0.3, g.variability(1));
  CHECK(g.beta_time(0.3, 1) == doctest::Approx(combine(0.0, 0.1, 0.25, e.beta)));
  // The alpha combination of the time levels is the weighted step.
  CHECK(combine(0.0, 0.1, 0.25, e.alpha) == doctest::Approx(g.weighted_step(0.3, 1)));
  CHECK_THROWS_AS(TimeGrid({0.0, 0.0}), ConfigError);
}

TEST_CASE("G-norm") {
  const Vector u = vec({2.0, 0.0}), v = vec({0.0, 2.0});
  CHECK(g_norm_sq(1.0, u, v) == doctest::Approx(2.0));
  CHECK(g_norm_sq(0.0, u, v) == doctest::Approx(2.0));
  const Vector a = vec({0.3, -1.2, 0.7}), b = vec({1.1, 0.4, -0.5});
  CHECK(g_norm_sq(0.3, a, b) == doctest::Approx(0.325 * a.squaredNorm() + 0.175 * b.squaredNorm()));
  CHECK(g_norm_sq(1.0, Vector::Zero(3), b) == 0.0);
  CHECK(g_norm_sq(0.5, Vector::Zero(3), b) > 0.0);
}

TEST_CASE("G-stability identity") {
  const Vector z = Vector::Zero(4);
  CHECK(check_g_stability_identity(0.3, 0.1, z, z, z).residual == 0.0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0), th(0.0, 1.0), ep(-0.999, 0.999);
  for (int s = 0; s < 50; ++s) {
    const Vector a = vec({u(rng)}), b = vec({u(rng)}), c = vec({u(rng)});
    const GStabilityCheck r = check_g_stability_identity(1.0, ep(rng), a, b, c);
    CHECK(r.residual <= 1e-13);
  }
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    Vector a(8), b(8), c(8);
    for (int i = 0; i < 8; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = u(rng);
    }
    const GStabilityCheck r = check_g_stability_identity(th(rng), ep(rng), a, b, c);
    worst = std::max(worst, r.residual / r.scale);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("G-stability identity with a weighted inner product") {
  const Vector w = vec({1.0, 2.0, 0.5});
  const InnerProduct ip = [&](const Vector& x, const Vector& y) { return (x.array() * w.array() * y.array()).sum(); };
  const GStabilityCheck r =
      check_g_stability_identity(0.6, -0.4, vec({1.0, -1.0, 2.0}), vec({0.3, 0.2, 0.1}), vec({-2.0, 0.5, 1.0}), ip);
  CHECK(r.residual <= 1e-13 * r.scale);
}

TEST_CASE("DLN is second order on variable grids") {
  const std::vector<Ode> battery = ode_battery();
  for (double theta : {0.0, 0.3, 0.8, 1.0}) {
    for (size_t i = 0; i < battery.size(); ++i) {
      std::vector<double> grid = random_grid(20, 2.0, 7 + static_cast<unsigned>(i));
      double prev = dln_error(battery[i], theta, grid);
      for (int level = 0; level < 3; ++level) {
        grid = bisect(grid);
        const double e = dln_error(battery[i], theta, grid);
        const double order = std::log2(prev / e);
        CAPTURE(theta);
        CAPTURE(i);
        CHECK(order > 1.8);
        CHECK(order < 2.3);
        prev = e;
      }
    }
  }
}
