#pragma once

#include <Eigen/Dense>
#include <memory>

#include "lortz/fields.hpp"

namespace lortz {

class BaseState;

// Off-grid evaluation of the velocity perturbation u' = u - u_base by
// tricubic (Catmull-Rom, C1) interpolation in mapped coordinates. The base
// flow is evaluated analytically by the caller, so interpolation error only
// ever touches the perturbation; in particular the unperturbed state is
// reproduced exactly.
//
// Radial stencils reaching below the innermost node continue across the axis
// through the theta + pi column; stencils reaching past the wall shift inward
// (cubic extrapolation within a small margin, LeftDomain beyond it).
class PerturbationInterpolant {
public:
  PerturbationInterpolant(std::shared_ptr<const MappedGrid> grid,
                          const BaseState& base, const VectorField& u);

  bool trivial() const { return trivial_; }
  double max_abs() const { return max_abs_; }
  const MappedGrid& grid() const { return *grid_; }

  // Perturbation velocity at a Cartesian point (components in the fixed
  // Cartesian frame). Throws LeftDomain outside the wall margin.
  Vec3 eval(const Vec3& x) const;

private:
  std::shared_ptr<const MappedGrid> grid_;
  Eigen::ArrayXd du_[3];
  bool trivial_ = false;
  double max_abs_ = 0.0;
  double out_margin_ = 0.02;
};

// High-accuracy sampler for continuous scalar fields, used by diagnostics:
// exact Fourier evaluation in theta and z, 6-point Lagrange in s. Far more
// accurate than the tracer's tricubic and far slower; only diagnostic code
// paths should touch it.
class SpectralSampler {
public:
  explicit SpectralSampler(const ScalarField& f);

  double eval(const Vec3& x) const;
  double eval_mapped(double s, double theta, double z) const;

private:
  std::shared_ptr<const MappedGrid> grid_;
  // Per-s-level 2D Fourier coefficients, frequency-indexed.
  std::vector<Eigen::MatrixXcd> coeffs_;
  double plane_value(int level, double theta, double z) const;
};

}  // namespace lortz
