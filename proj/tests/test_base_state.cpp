#include <doctest.h>

#include <cmath>
#include <random>

#include "lortz/base_state.hpp"
#include "lortz/errors.hpp"

using namespace lortz;

namespace {

// Independent quadrature oracle: composite Simpson, refined until stable.
double simpson_oracle(const std::function<double(double)>& f, double a, double b) {
  double prev = 0.0;
  for (int n = 64; n <= 1 << 20; n *= 2) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    const double val = acc * h / 3.0;
    if (n > 64 && std::abs(val - prev) < 1e-13) return val;
    prev = val;
  }
  return prev;
}

Profile default_profile() { return Profile{}; }  // Omega = 1 + r^2

}  // namespace

TEST_CASE("pressure integral matches the quadrature oracle") {
  const BaseState base(default_profile());
  const double oracle = simpson_oracle(
      [](double r) { return r * std::pow(1.0 + r * r, 2); }, 0.0, 1.0);
  CHECK(oracle == doctest::Approx(7.0 / 6.0).epsilon(1e-12));
  CHECK(base.pressure(1.0) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(base.pressure(0.0) == doctest::Approx(0.0));

  // d/dr p = r Omega^2 by central differences.
  for (double r : {0.3, 0.7, 1.2}) {
    const double h = 1e-5;
    const double num = (base.pressure(r + h) - base.pressure(r - h)) / (2.0 * h);
    const double w = 1.0 + r * r;
    CHECK(num == doctest::Approx(r * w * w).epsilon(1e-8));
  }
}

TEST_CASE("bernoulli function and its radial derivative identity") {
  const BaseState base(default_profile());
  CHECK(base.bernoulli(0.0) == doctest::Approx(0.0));
  CHECK(base.bernoulli(1.0) == doctest::Approx(19.0 / 6.0).epsilon(1e-12));
  // H'(r) = [r Omega' + 2 Omega] r Omega
  for (double r : {0.2, 0.5, 0.9, 1.3}) {
    const double h = 1e-5;
    const double num = (base.bernoulli(r + h) - base.bernoulli(r - h)) / (2.0 * h);
    const double w = 1.0 + r * r, wp = 2.0 * r;
    CHECK(num == doctest::Approx((r * wp + 2.0 * w) * r * w).epsilon(1e-8));
  }
}

TEST_CASE("orbit period and its inverse") {
  const BaseState base(default_profile());
  CHECK(base.orbit_period(0.0) == doctest::Approx(2.0 * EIGEN_PI));
  CHECK(base.orbit_period(1.0) == doctest::Approx(EIGEN_PI));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ur(0.0, 1.5);
  for (int n = 0; n < 50; ++n) {
    const double r = ur(rng);
    CHECK(base.radius_of_period(base.orbit_period(r)) ==
          doctest::Approx(r).epsilon(1e-10));
  }
  CHECK_THROWS_AS(base.radius_of_period(7.0), PeriodOutOfRange);
  CHECK_THROWS_AS(base.radius_of_period(1.0), PeriodOutOfRange);
}

TEST_CASE("bernoulli of period and the chain-rule derivative") {
  const BaseState base(default_profile());
  CHECK(base.bernoulli_of_period(EIGEN_PI) == doctest::Approx(19.0 / 6.0).epsilon(1e-12));
  CHECK(base.bernoulli_of_period_derivative(EIGEN_PI) ==
        doctest::Approx(-12.0 / EIGEN_PI).epsilon(1e-12));

  // Derivative consistency against central differences over the window.
  const double lo = base.orbit_period(1.45), hi = base.orbit_period(0.05);
  for (int n = 0; n < 50; ++n) {
    const double T = lo + (hi - lo) * (n + 0.5) / 50;
    const double h = 1e-6 * T;
    const double num =
        (base.bernoulli_of_period(T + h) - base.bernoulli_of_period(T - h)) /
        (2.0 * h);
    CHECK(std::abs(base.bernoulli_of_period_derivative(T) - num) <= 1e-6 *
          std::max(1.0, std::abs(num)));
  }
}

TEST_CASE("period map extends smoothly past the axis value") {
  const BaseState base(default_profile());
  // Slightly longer periods than the axis orbit stay evaluable (negative rho).
  const double t_axis = base.orbit_period(0.0);
  CHECK_NOTHROW(base.bernoulli_of_period(1.02 * t_axis));
  CHECK(base.bernoulli_of_period(t_axis) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS(base.bernoulli_of_period(2.0 * t_axis), PeriodOutOfRange);
}

TEST_CASE("base velocity and parity") {
  const BaseState base(default_profile());
  CHECK(base.velocity(Vec3(0.0, 0.0, 0.3)).norm() == doctest::Approx(0.0));
  CHECK(base.velocity(Vec3(1.0, 0.0, 0.0)).isApprox(Vec3(0.0, 2.0, 0.0), 1e-14));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    const Vec3 x(u(rng), u(rng), u(rng));
    const Vec3 rx(x[0], -x[1], x[2]);
    const Vec3 v = base.velocity(x), vr = base.velocity(rx);
    // odd: u(Rx) = -R u(x)
    CHECK(vr[0] == doctest::Approx(-v[0]).epsilon(1e-13));
    CHECK(vr[1] == doctest::Approx(v[1]).epsilon(1e-13));
    CHECK(vr[2] == doctest::Approx(-v[2]).epsilon(1e-13));
  }
}

TEST_CASE("hypothesis checks") {
  const HypothesisReport good = check_hypotheses(default_profile());
  CHECK(good.pass());
  CHECK(good.omega_second_at_axis == doctest::Approx(2.0));
  CHECK(good.increasing);

  Profile constant;
  constant.omega_rho_coeffs = Eigen::VectorXd::Ones(1);
  const HypothesisReport flat = check_hypotheses(constant);
  CHECK_FALSE(flat.monotone);
  CHECK_FALSE(flat.curvature_ok);
  CHECK(flat.sign_constant);
  CHECK_FALSE(flat.pass());

  Profile decreasing;  // Omega = 1 - r^2 on [0, 0.9]
  decreasing.omega_rho_coeffs = (Eigen::VectorXd(2) << 1.0, -1.0).finished();
  decreasing.r_max = 0.9;
  const HypothesisReport down = check_hypotheses(decreasing);
  CHECK(down.pass());
  CHECK_FALSE(down.increasing);
  CHECK(down.omega_second_at_axis == doctest::Approx(-2.0));
}
