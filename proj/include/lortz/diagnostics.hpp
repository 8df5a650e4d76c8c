#pragma once

#include <random>

#include "lortz/base_state.hpp"
#include "lortz/clebsch.hpp"
#include "lortz/fieldline.hpp"
#include "lortz/fields.hpp"

namespace lortz {

struct SolutionReport {
  double euler_residual_rel = 0.0;
  double div_residual = 0.0;       // relative to sup|curl u|
  double tangency_residual = 0.0;  // relative to sup|u|
  double bernoulli_orbit_variation = 0.0;
  double omega_jump = 0.0;  // relative to sup|omega|
  double parity_residual_odd = 0.0;
  double mfold_residual = 0.0;
  double fibration_margin = 0.0;
  bool fibration_monotone = false;
  double closure_error = 0.0;
  double mode_energy_ratio = 0.0;  // m-th theta mode over axisymmetric
  unsigned long long seed = 0;
};

// sup |u x curl(u) - grad(H)| over the interior, relative to sup |grad H|.
double euler_residual(const VectorField& u, const ScalarField& H);

struct FibrationReport {
  bool monotone = false;
  double min_margin = 0.0;  // min |dH/ds| over interior rays
  int violations = 0;
};

// Strict monotonicity of H along radial rays outside the axis collar; the
// levels of a nondegenerate Bernoulli function must be nested cylinders.
FibrationReport fibration_check(const ScalarField& H);

// Max over traced orbits of (max H - min H) / (domain range of H).
double bernoulli_on_orbits(const VectorField& u, const ScalarField& H,
                           const BaseState& base, int n_orbits,
                           std::mt19937_64& rng, TraceOptions opts = {});

// theta-Fourier energy of the cylindrical velocity components, per mode.
Eigen::VectorXd theta_mode_energy(const VectorField& u);

double max_boundary_flux(const VectorField& u);  // sup |u . n| on the wall

SolutionReport full_report(const VectorField& u, const ClebschData& clebsch,
                           const BaseState& base, int n_orbits,
                           unsigned long long seed, TraceOptions opts = {});

}  // namespace lortz
