#pragma once

#include <memory>

#include "lortz/fields.hpp"

namespace lortz {

// L2-normalized harmonic field of the domain: curl-free, divergence-free,
// tangent to the wall. One-dimensional on this topology; the sign convention
// keeps the mean axial component positive.
struct HarmonicField {
  VectorField field;
  double curl_residual = 0.0;
  double div_residual = 0.0;
  double boundary_flux = 0.0;
  int iterations = 0;
};

struct HarmonicOptions {
  double tol = 1e-10;           // relative residual of the Neumann system
  double iter_cap_factor = 50.0;
};

// Solves the scalar Neumann problem (Laplace psi = 0, d psi / dn = -e_z . n)
// by conjugate gradients on the normal equations with the constant mode
// pinned, then normalizes e_z + grad psi.
HarmonicField compute_harmonic(std::shared_ptr<const MappedGrid> grid,
                               const HarmonicOptions& opts = {});

struct DivCurlOptions {
  double tol = 1e-8;             // relative normal-equations residual target
  double iter_cap_factor = 10.0; // cap = factor * sqrt(total unknowns)
  double compat_div_tol = 1e-4;  // relative interior div(omega) pre-check
  double compat_flux_tol = 1e-4; // relative wall flux pre-check
};

struct DivCurlStats {
  int iterations = 0;
  double joint_residual_rel = 0.0;  // sqrt(|curl u - w|^2 + |div u|^2) / |w|, weighted
  double grad_residual_rel = 0.0;
  bool converged = false;
};

// Weighted least squares for curl u = omega, div u = 0 over wall-tangent
// grid fields (tangency eliminated at boundary nodes), with the harmonic
// projection appended as an extra row and enforced exactly afterwards.
// Matrix-free CGLS with a diagonal column scaling; solutions can be reused
// as warm starts across iteration steps.
class DivCurlSolver {
public:
  DivCurlSolver(std::shared_ptr<const MappedGrid> grid, HarmonicField harmonic,
                DivCurlOptions opts = {});

  const HarmonicField& harmonic() const { return harmonic_; }
  const DivCurlOptions& options() const { return opts_; }

  // Throws IncompatibleData when omega fails the compatibility pre-checks.
  void check_compatibility(const VectorField& omega) const;

  VectorField solve(const VectorField& omega, DivCurlStats* stats = nullptr);

  void set_warm_start(const VectorField& u);
  void clear_warm_start() { have_warm_ = false; }

private:
  std::shared_ptr<const MappedGrid> grid_;
  HarmonicField harmonic_;
  DivCurlOptions opts_;
  Eigen::ArrayXd scale_;      // diagonal column scaling (3N)
  Eigen::ArrayXd sqrt_w_;     // per-node row weights
  Eigen::ArrayXd warm_;       // last solution in scaled variables
  bool have_warm_ = false;

  Eigen::Index nn() const { return grid_->size(); }
  void project_tangent(Eigen::ArrayXd& flat) const;
  // r (6N+1) = A(D x); x is in scaled variables.
  Eigen::ArrayXd apply(const Eigen::ArrayXd& x) const;
  Eigen::ArrayXd apply_adjoint(const Eigen::ArrayXd& r) const;
};

// Convenience wrapper matching the one-shot use.
VectorField solve_divcurl(const VectorField& omega, const HarmonicField& h,
                          DivCurlOptions opts = {}, DivCurlStats* stats = nullptr);

}  // namespace lortz
