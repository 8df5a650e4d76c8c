#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace lortz {

using Vec3 = Eigen::Vector3d;

struct GridSpec {
  int n_s = 24;
  int n_theta = 64;
  int n_z = 24;
};

// One Fourier mode of the wall shape:
//   cos(a theta) * (cos_amp * cos(2 pi b z / L) + sin_amp * sin(2 pi b z / L)).
// Only cos(a theta) factors are admissible: the wall must be even across the
// symmetry plane {x2 = 0}.
struct ShapeMode {
  int theta_harmonic = 0;
  int z_harmonic = 0;
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

struct BoundaryShape {
  std::vector<ShapeMode> modes;

  double value(double theta, double z, double axial_period) const;
  double dtheta(double theta, double z, double axial_period) const;
  double dz(double theta, double z, double axial_period) const;
  double max_abs() const;  // sum of |amplitudes|, bounds |g|
};

// The perturbed periodic cylinder {r <= 1 + eps g(theta, z)} with an m-fold
// discrete rotation symmetry and reflection symmetry across {x2 = 0}.
struct DomainSpec {
  double epsilon = 0.1;
  BoundaryShape shape;
  int m = 8;
  double axial_period = 2.0 * EIGEN_PI;
  GridSpec grid;

  // Throws ConfigError when an invariant fails (wall collapse, theta
  // harmonics not multiples of m, n_theta not a multiple of 2m, ...).
  void validate() const;

  double wall_radius(double theta, double z) const {
    return 1.0 + epsilon * shape.value(theta, z, axial_period);
  }
  double wall_radius_dtheta(double theta, double z) const {
    return epsilon * shape.dtheta(theta, z, axial_period);
  }
  double wall_radius_dz(double theta, double z) const {
    return epsilon * shape.dz(theta, z, axial_period);
  }
  double max_wall_radius() const { return 1.0 + epsilon * shape.max_abs(); }

  // Hash over every number that defines the domain and its grid; saved field
  // files carry it so a field cannot be loaded onto the wrong domain.
  std::uint64_t hash() const;
};

// Convenience: the default wall g = cos(m theta) cos(2 pi z / L).
DomainSpec make_default_domain(double epsilon, int m, const GridSpec& grid,
                               double axial_period = 2.0 * EIGEN_PI);

struct MappedPoint {
  double s = 0.0;      // radial fraction in [0, 1]
  double theta = 0.0;  // [0, 2 pi)
  double z = 0.0;      // [0, axial_period)
};

Vec3 to_cartesian(const MappedPoint& p, const DomainSpec& d);

// Inverse map; throws PointOutsideDomain if x lies outside the wall beyond
// `tol`. Not defined on the axis (theta is ambiguous there).
MappedPoint from_cartesian(const Vec3& x, const DomainSpec& d, double tol = 1e-9);

// Outward unit normal of the wall surface r = 1 + eps g(theta, z).
Vec3 boundary_normal(double theta, double z, const DomainSpec& d);

}  // namespace lortz
