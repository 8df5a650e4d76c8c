#include <doctest.h>

#include <cmath>
#include <random>

#include "lortz/base_state.hpp"
#include "lortz/errors.hpp"
#include "lortz/fields.hpp"

using namespace lortz;

namespace {

std::shared_ptr<MappedGrid> wavy_grid(double eps = 0.1, int ns = 16, int nt = 32,
                                      int nz = 12, int order = 4) {
  return std::make_shared<MappedGrid>(make_default_domain(eps, 8, GridSpec{ns, nt, nz}),
                                      order);
}

// Random polynomial field in (x, y, z-trig): smooth through the axis and
// resolved exactly by the discretization, so operator identities hold to
// roundoff even on the perturbed domain.
ScalarField random_poly_scalar(std::shared_ptr<const MappedGrid> g,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng);
  const double kz = 2.0 * EIGEN_PI / g->domain().axial_period;
  return sample_scalar(g, [=](const Vec3& p) {
    return a * p[0] + b * (p[0] * p[0] - p[1] * p[1]) +
           c * p[0] * p[1] * std::cos(kz * p[2]) + d * p[1] +
           e * (p[0] * p[0] + p[1] * p[1]) * std::sin(kz * p[2]);
  });
}

VectorField random_poly_vector(std::shared_ptr<const MappedGrid> g,
                               std::mt19937_64& rng) {
  VectorField v(g);
  for (int c = 0; c < 3; ++c) v.comp(c) = random_poly_scalar(g, rng).values;
  return v;
}

}  // namespace

TEST_CASE("grid geometry sanity") {
  auto g = wavy_grid();
  CHECK(g->s(g->ns() - 1) == doctest::Approx(1.0));
  CHECK(g->weights().minCoeff() > 0.0);  // positive Jacobian
  // Volume of the eps = 0 cylinder is pi * L.
  auto g0 = wavy_grid(0.0);
  CHECK(g0->volume() ==
        doctest::Approx(EIGEN_PI * g0->domain().axial_period).epsilon(1e-3));
}

TEST_CASE("gradient of a constant vanishes exactly") {
  auto g = wavy_grid();
  ScalarField f(g);
  f.values.setConstant(3.7);
  const VectorField grad = gradient(f);
  CHECK(norm(grad, NormKind::Sup) <= 1e-12);
}

TEST_CASE("gradient matches analytic fields to roundoff on polynomials") {
  // n_theta large enough that the wall-shape coupling stays under Nyquist.
  auto g = wavy_grid(0.1, 16, 64, 12);
  const double kz = 2.0 * EIGEN_PI / g->domain().axial_period;
  const ScalarField f = sample_scalar(g, [kz](const Vec3& p) {
    return p[0] * p[0] - p[1] * p[1] + 0.5 * std::sin(kz * p[2]);
  });
  const VectorField grad = gradient(f);
  const VectorField expect = sample_vector(g, [kz](const Vec3& p) {
    return Vec3(2.0 * p[0], -2.0 * p[1], 0.5 * kz * std::cos(kz * p[2]));
  });
  CHECK(sup_difference(grad, expect) <= 1e-11);
}

TEST_CASE("curl of the base flow") {
  auto g = wavy_grid(0.0);
  const BaseState base{Profile{}};
  const VectorField u = sample_base_velocity(g, base);
  const VectorField w = curl(u);
  // curl = (2 Omega + r Omega') e_z = (2 + 4 r^2) e_z; equals 6 e_z at r = 1.
  const VectorField expect = sample_vector(g, [](const Vec3& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    return Vec3(0.0, 0.0, 2.0 + 4.0 * r2);
  });
  CHECK(sup_difference(w, expect) <= 1e-10);
  const Eigen::Index wall = g->idx(g->ns() - 1, 0, 0);
  CHECK(w.z[wall] == doctest::Approx(6.0).epsilon(1e-11));
}

TEST_CASE("vector identities hold to roundoff on resolved fields") {
  auto g = wavy_grid(0.1, 16, 64, 12);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const ScalarField f = random_poly_scalar(g, rng);
    CHECK(norm(curl(gradient(f)), NormKind::Sup) <= 1e-10);
    const VectorField v = random_poly_vector(g, rng);
    CHECK(norm(divergence(curl(v)), NormKind::Sup) <= 1e-10);
  }
}

TEST_CASE("pencil derivative adjoints satisfy the dot-product identity") {
  auto g = wavy_grid();
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  Eigen::ArrayXd x(g->size()), y(g->size());
  for (Eigen::Index i = 0; i < g->size(); ++i) {
    x[i] = gauss(rng);
    y[i] = gauss(rng);
  }
  auto check_pair = [&](const Eigen::ArrayXd& ax, const Eigen::ArrayXd& aty) {
    const double lhs = (ax * y).sum();
    const double rhs = (x * aty).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  };
  check_pair(g->d_s(x, true), g->d_s_adjoint(y, true));
  check_pair(g->d_s(x, false), g->d_s_adjoint(y, false));
  check_pair(g->d_theta(x), g->d_theta_adjoint(y));
  check_pair(g->d_z(x), g->d_z_adjoint(y));
  for (int c = 0; c < 3; ++c)
    check_pair(g->cartesian_deriv(x, c), g->cartesian_deriv_adjoint(y, c));
}

TEST_CASE("radial convergence order of the gradient") {
  // Non-polynomial radial profile: error should drop at 4th order in n_s.
  const double kz = 1.0;
  auto field = [kz](const Vec3& p) { return std::cos(p[0]) * std::cos(kz * p[2]); };
  auto dfield = [kz](const Vec3& p) {
    return Vec3(-std::sin(p[0]) * std::cos(kz * p[2]), 0.0,
                -kz * std::cos(p[0]) * std::sin(kz * p[2]));
  };
  double err[2];
  const int ns[2] = {12, 24};
  for (int c = 0; c < 2; ++c) {
    auto g = wavy_grid(0.0, ns[c], 32, 12);
    const VectorField grad = gradient(sample_scalar(g, field));
    const VectorField expect = sample_vector(g, dfield);
    err[c] = sup_difference(grad, expect);
  }
  CHECK(err[0] / err[1] >= 8.0);
}

TEST_CASE("reflection pullback and parity residuals") {
  auto g = wavy_grid();
  const BaseState base{Profile{}};
  const VectorField u = sample_base_velocity(g, base);
  CHECK(parity_residual(u, Parity::Odd) == 0.0);  // index-exact

  VectorField ez(g);
  ez.z.setConstant(1.0);
  CHECK(parity_residual(ez, Parity::Even) == 0.0);

  std::mt19937_64 rng(23);
  const VectorField v = random_poly_vector(g, rng);
  const VectorField vrr = reflect(reflect(v));
  CHECK(sup_difference(vrr, v) == 0.0);  // involution
}

TEST_CASE("m-fold symmetrization is a projection") {
  auto g = wavy_grid();
  const int m = g->domain().m;
  const BaseState base{Profile{}};
  const VectorField u = sample_base_velocity(g, base);
  // Axisymmetric input is unchanged.
  CHECK(sup_difference(symmetrize_mfold(u, m), u) <= 1e-14);

  std::mt19937_64 rng(31);
  const VectorField v = random_poly_vector(g, rng);
  const VectorField sym = symmetrize_mfold(v, m);
  // Invariant under rotation by 2 pi / m ...
  const VectorField rot = rotate_pullback(sym, g->ntheta() / m);
  CHECK(sup_difference(rot, sym) <= 1e-14);
  // ... and idempotent.
  CHECK(sup_difference(symmetrize_mfold(sym, m), sym) <= 1e-14);
}

TEST_CASE("norms") {
  auto g = wavy_grid(0.0);
  const BaseState base{Profile{}};
  const VectorField u = sample_base_velocity(g, base);
  CHECK(norm(u, NormKind::Sup) == doctest::Approx(2.0).epsilon(1e-12));

  VectorField zero(g);
  CHECK(norm(zero, NormKind::Sup) == 0.0);
  CHECK(norm(zero, NormKind::L2) == 0.0);
  CHECK(norm(zero, NormKind::C1) == 0.0);

  std::mt19937_64 rng(41);
  const VectorField a = random_poly_vector(g, rng);
  const VectorField b = random_poly_vector(g, rng);
  VectorField sum(g);
  sum.x = a.x + b.x;
  sum.y = a.y + b.y;
  sum.z = a.z + b.z;
  for (NormKind kind : {NormKind::Sup, NormKind::L2, NormKind::C1})
    CHECK(norm(sum, kind) <= norm(a, kind) + norm(b, kind) + 1e-12);
}

TEST_CASE("cut fields refuse the plain gradient") {
  auto g = wavy_grid();
  ScalarField f(g, true);
  CHECK_THROWS_AS(gradient(f), CutFieldRequiresJump);
}
