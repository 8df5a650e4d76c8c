#include <doctest.h>

#include <cmath>
#include <random>

#include "lortz/errors.hpp"
#include "lortz/geometry.hpp"

using namespace lortz;

namespace {
DomainSpec wavy_domain(double eps = 0.1) {
  return make_default_domain(eps, 8, GridSpec{16, 32, 12});
}
}  // namespace

TEST_CASE("mapping basics") {
  DomainSpec d0 = make_default_domain(0.0, 8, GridSpec{16, 32, 12});
  const Vec3 x = to_cartesian({1.0, 0.0, 0.0}, d0);
  CHECK(x.isApprox(Vec3(1.0, 0.0, 0.0), 1e-15));
  const Vec3 axis = to_cartesian({0.0, 1.234, 0.7}, d0);
  CHECK(axis[0] == doctest::Approx(0.0));
  CHECK(axis[1] == doctest::Approx(0.0));
  CHECK(axis[2] == doctest::Approx(0.7));

  DomainSpec d = wavy_domain();
  // g = cos(8 theta) cos(z) equals 1 at (0, 0).
  const Vec3 wall = to_cartesian({1.0, 0.0, 0.0}, d);
  CHECK(wall[0] == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(wall[1] == doctest::Approx(0.0));
}

TEST_CASE("inverse mapping against a root-solve oracle") {
  DomainSpec d = wavy_domain();
  // Bisection oracle for s in r = s (1 + eps g(theta, z)) at theta=0, z=1.
  const double r = 0.55, z = 1.0;
  double lo = 0.0, hi = 1.0;
  auto f = [&](double s) {
    return s * d.wall_radius(0.0, z) - r;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  const double s_oracle = 0.5 * (lo + hi);
  const MappedPoint p = from_cartesian(Vec3(0.55, 0.0, 1.0), d);
  CHECK(p.s == doctest::Approx(s_oracle).epsilon(1e-12));
  CHECK(p.theta == doctest::Approx(0.0));
  CHECK(p.z == doctest::Approx(1.0));

  const MappedPoint q = from_cartesian(Vec3(1.0, 0.0, 0.0),
                                       make_default_domain(0.0, 8, d.grid));
  CHECK(q.s == doctest::Approx(1.0));
}

TEST_CASE("round trip is the identity") {
  DomainSpec d = wavy_domain();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> us(0.05, 1.0), ut(0.0, 2.0 * EIGEN_PI),
      uz(0.0, d.axial_period);
  for (int n = 0; n < 100; ++n) {
    const MappedPoint p{us(rng), ut(rng), uz(rng)};
    const Vec3 x = to_cartesian(p, d);
    const MappedPoint q = from_cartesian(x, d);
    const Vec3 x2 = to_cartesian(q, d);
    CHECK((x2 - x).norm() <= 1e-10);
  }
}

TEST_CASE("outside points are rejected") {
  DomainSpec d = wavy_domain();
  CHECK_THROWS_AS(from_cartesian(Vec3(1.5, 0.0, 0.0), d), PointOutsideDomain);
}

TEST_CASE("boundary normal") {
  DomainSpec d0 = make_default_domain(0.0, 8, GridSpec{16, 32, 12});
  const Vec3 n0 = boundary_normal(0.6, 1.0, d0);
  CHECK(n0.isApprox(Vec3(std::cos(0.6), std::sin(0.6), 0.0), 1e-13));

  DomainSpec d = wavy_domain();
  // Critical point of g at theta = 0, z = 0: normal is radial there.
  const Vec3 n = boundary_normal(0.0, 0.0, d);
  CHECK(n.isApprox(Vec3(1.0, 0.0, 0.0), 1e-13));

  // Unit length and reflection parity everywhere.
  for (int j = 0; j < 20; ++j) {
    const double th = 0.31 * j, z = 0.17 * j;
    const Vec3 a = boundary_normal(th, z, d);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-13));
    const Vec3 b = boundary_normal(-th, z, d);
    CHECK(b[0] == doctest::Approx(a[0]).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(-a[1]).epsilon(1e-12));
    CHECK(b[2] == doctest::Approx(a[2]).epsilon(1e-12));
  }
}

TEST_CASE("wall shape symmetry is exact") {
  DomainSpec d = wavy_domain();
  for (int j = 0; j < 32; ++j) {
    const double th = 2.0 * EIGEN_PI * j / 32;
    for (int k = 0; k < 6; ++k) {
      const double z = d.axial_period * k / 6;
      CHECK(d.wall_radius(th + 2.0 * EIGEN_PI / d.m, z) ==
            doctest::Approx(d.wall_radius(th, z)).epsilon(1e-15));
      CHECK(d.wall_radius(-th, z) == doctest::Approx(d.wall_radius(th, z)).epsilon(1e-15));
    }
  }
}

TEST_CASE("invariant violations are rejected") {
  DomainSpec d = wavy_domain();
  d.shape.modes[0].theta_harmonic = 7;  // not a multiple of m
  CHECK_THROWS_AS(d.validate(), ConfigError);

  DomainSpec d2 = wavy_domain();
  d2.grid.n_theta = 36;  // not a multiple of 2m = 16
  CHECK_THROWS_AS(d2.validate(), ConfigError);

  DomainSpec d3 = wavy_domain();
  d3.epsilon = 1.2;  // wall collapses
  CHECK_THROWS_AS(d3.validate(), ConfigError);
}

TEST_CASE("domain hash tracks the definition") {
  DomainSpec a = wavy_domain();
  DomainSpec b = wavy_domain();
  CHECK(a.hash() == b.hash());
  b.grid.n_s = 20;
  CHECK(a.hash() != b.hash());
}
