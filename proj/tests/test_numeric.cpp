#include <doctest.h>

#include <cmath>

#include "lortz/numeric.hpp"

using namespace lortz;

TEST_CASE("finite difference weights differentiate polynomials exactly") {
  Eigen::VectorXd nodes(5);
  for (int i = 0; i < 5; ++i) nodes[i] = 0.1 * i;
  const Eigen::VectorXd w = numeric::fd_weights(0.2, nodes, 1);
  // d/dx (x^3) at 0.2 = 0.12
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += w[i] * nodes[i] * nodes[i] * nodes[i];
  CHECK(acc == doctest::Approx(0.12).epsilon(1e-12));
  // one-sided stencil
  const Eigen::VectorXd w0 = numeric::fd_weights(0.0, nodes, 1);
  double acc0 = 0.0;
  for (int i = 0; i < 5; ++i) acc0 += w0[i] * std::pow(nodes[i], 4);
  CHECK(acc0 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("adaptive quadrature reaches the requested tolerance") {
  const double v = numeric::integrate([](double x) { return x * x * x; }, 0.0, 1.0);
  CHECK(v == doctest::Approx(0.25).epsilon(1e-13));
  // Oscillatory integrand with known value.
  const double w =
      numeric::integrate([](double x) { return std::sin(10.0 * x); }, 0.0, EIGEN_PI);
  CHECK(w == doctest::Approx((1.0 - std::cos(10.0 * EIGEN_PI)) / 10.0).epsilon(1e-11));
}

TEST_CASE("monotone root solve") {
  const double root = numeric::solve_monotone(
      [](double x) { return x * x * x - 2.0; },
      [](double x) { return 3.0 * x * x; }, 0.0, 2.0);
  CHECK(root == doctest::Approx(std::cbrt(2.0)).epsilon(1e-13));
}

TEST_CASE("line fit recovers slope and r^2") {
  Eigen::VectorXd x(5), y(5);
  for (int i = 0; i < 5; ++i) {
    x[i] = i;
    y[i] = 3.0 - 0.5 * i;
  }
  const auto fit = numeric::fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(-0.5));
  CHECK(fit.intercept == doctest::Approx(3.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("lagrange weights interpolate exactly") {
  Eigen::VectorXd nodes(4);
  nodes << 0.0, 1.0, 2.0, 3.0;
  const Eigen::VectorXd w = numeric::lagrange_weights(1.5, nodes);
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) acc += w[i] * (nodes[i] * nodes[i]);
  CHECK(acc == doctest::Approx(2.25).epsilon(1e-13));
}

TEST_CASE("catmull-rom weights sum to one and hit nodes") {
  const Eigen::Vector4d w0 = numeric::catmull_rom_weights(0.0);
  CHECK(w0[1] == doctest::Approx(1.0));
  CHECK(w0.sum() == doctest::Approx(1.0));
  const Eigen::Vector4d w = numeric::catmull_rom_weights(0.37);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-14));
}
