#include "lortz/geometry.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "lortz/errors.hpp"

namespace lortz {

namespace {
constexpr double kTwoPi = 2.0 * EIGEN_PI;
}

double BoundaryShape::value(double theta, double z, double axial_period) const {
  double g = 0.0;
  for (const auto& mode : modes) {
    const double kz = kTwoPi * mode.z_harmonic / axial_period;
    g += std::cos(mode.theta_harmonic * theta) *
         (mode.cos_amp * std::cos(kz * z) + mode.sin_amp * std::sin(kz * z));
  }
  return g;
}

double BoundaryShape::dtheta(double theta, double z, double axial_period) const {
  double g = 0.0;
  for (const auto& mode : modes) {
    const double kz = kTwoPi * mode.z_harmonic / axial_period;
    g += -mode.theta_harmonic * std::sin(mode.theta_harmonic * theta) *
         (mode.cos_amp * std::cos(kz * z) + mode.sin_amp * std::sin(kz * z));
  }
  return g;
}

double BoundaryShape::dz(double theta, double z, double axial_period) const {
  double g = 0.0;
  for (const auto& mode : modes) {
    const double kz = kTwoPi * mode.z_harmonic / axial_period;
    g += std::cos(mode.theta_harmonic * theta) * kz *
         (-mode.cos_amp * std::sin(kz * z) + mode.sin_amp * std::cos(kz * z));
  }
  return g;
}

double BoundaryShape::max_abs() const {
  double b = 0.0;
  for (const auto& mode : modes)
    b += std::abs(mode.cos_amp) + std::abs(mode.sin_amp);
  return b;
}

void DomainSpec::validate() const {
  if (epsilon < 0.0)
    throw ConfigError("geometry: epsilon must be nonnegative, got " +
                      std::to_string(epsilon));
  if (m < 1) throw ConfigError("geometry: symmetry order m must be positive");
  if (axial_period <= 0.0)
    throw ConfigError("geometry: axial_period must be positive");
  if (grid.n_s < 8 || grid.n_theta < 4 || grid.n_z < 4)
    throw ConfigError("geometry: grid too small (need n_s >= 8, n_theta >= 4, n_z >= 4)");
  if (grid.n_theta % (2 * m) != 0)
    throw ConfigError("geometry: n_theta = " + std::to_string(grid.n_theta) +
                      " must be a multiple of 2m = " + std::to_string(2 * m));
  if (grid.n_z % 2 != 0)
    throw ConfigError("geometry: n_z must be even");
  for (const auto& mode : shape.modes) {
    if (mode.theta_harmonic < 0 || mode.theta_harmonic % m != 0)
      throw ConfigError(
          "geometry: shape theta harmonic " + std::to_string(mode.theta_harmonic) +
          " is not a nonnegative multiple of m = " + std::to_string(m));
    if (2 * mode.theta_harmonic >= grid.n_theta ||
        2 * std::abs(mode.z_harmonic) >= grid.n_z)
      throw ConfigError("geometry: shape mode not resolvable on the grid");
  }
  if (epsilon * shape.max_abs() >= 1.0)
    throw ConfigError("geometry: wall collapses, need eps * max|g| < 1, got " +
                      std::to_string(epsilon * shape.max_abs()));
}

std::uint64_t DomainSpec::hash() const {
  // FNV-1a over the raw bytes of every defining number.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffull;
      h *= 1099511628211ull;
    }
  };
  auto mixd = [&mix](double x) {
    std::uint64_t v;
    static_assert(sizeof(v) == sizeof(x));
    std::memcpy(&v, &x, sizeof(v));
    mix(v);
  };
  mixd(epsilon);
  mix(static_cast<std::uint64_t>(m));
  mixd(axial_period);
  mix(static_cast<std::uint64_t>(grid.n_s));
  mix(static_cast<std::uint64_t>(grid.n_theta));
  mix(static_cast<std::uint64_t>(grid.n_z));
  for (const auto& mode : shape.modes) {
    mix(static_cast<std::uint64_t>(mode.theta_harmonic));
    mix(static_cast<std::uint64_t>(mode.z_harmonic + 1000));
    mixd(mode.cos_amp);
    mixd(mode.sin_amp);
  }
  return h;
}

DomainSpec make_default_domain(double epsilon, int m, const GridSpec& grid,
                               double axial_period) {
  DomainSpec d;
  d.epsilon = epsilon;
  d.m = m;
  d.axial_period = axial_period;
  d.grid = grid;
  d.shape.modes = {ShapeMode{m, 1, 1.0, 0.0}};
  d.validate();
  return d;
}

Vec3 to_cartesian(const MappedPoint& p, const DomainSpec& d) {
  const double r = p.s * d.wall_radius(p.theta, p.z);
  return {r * std::cos(p.theta), r * std::sin(p.theta), p.z};
}

MappedPoint from_cartesian(const Vec3& x, const DomainSpec& d, double tol) {
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0)
    throw PointOutsideDomain("geometry.from_cartesian: point on the axis");
  double theta = std::atan2(x[1], x[0]);
  if (theta < 0.0) theta += kTwoPi;
  double z = std::fmod(x[2], d.axial_period);
  if (z < 0.0) z += d.axial_period;
  // The wall shape depends on (theta, z) only, so s follows directly from
  // r = s (1 + eps g).
  const double wall = d.wall_radius(theta, z);
  const double s = r / wall;
  if (s > 1.0 + tol)
    throw PointOutsideDomain(
        "geometry.from_cartesian: point outside the wall, r = " + std::to_string(r) +
        " > " + std::to_string(wall));
  return {s, theta, z};
}

Vec3 boundary_normal(double theta, double z, const DomainSpec& d) {
  // Gradient of F = r - 1 - eps g(theta, z) evaluated on the wall.
  const double wall = d.wall_radius(theta, z);
  const double gt = d.wall_radius_dtheta(theta, z);
  const double gz = d.wall_radius_dz(theta, z);
  const double c = std::cos(theta), s = std::sin(theta);
  const Vec3 e_r{c, s, 0.0};
  const Vec3 e_t{-s, c, 0.0};
  Vec3 n = e_r - (gt / wall) * e_t - gz * Vec3::UnitZ();
  return n.normalized();
}

}  // namespace lortz
