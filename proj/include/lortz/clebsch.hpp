#pragma once

#include "lortz/base_state.hpp"
#include "lortz/fieldline.hpp"
#include "lortz/fields.hpp"

namespace lortz {

// Clebsch data of one iteration step: travel time (base part analytic, the
// correction solved by orbit integrals in the mean-zero gauge), orbit period,
// Bernoulli pressure, and the vorticity assembled from them.
struct ClebschData {
  ScalarField tau_prime;  // cut field, jumps by T - T_base(r) across the cut
  ScalarField tau;        // base travel time + correction (cut field)
  ScalarField T;          // orbit period (continuous)
  ScalarField H;          // Bernoulli pressure (continuous)
  ScalarField jump;       // branch shift J = T - T_base(r) (continuous)
  VectorField omega;

  double cut_mismatch = 0.0;            // sup |omega_+ - omega_-| on the cut
  double interior_error_estimate = 0.0; // sup |div omega| in the interior
  double max_closure_error = 0.0;
  double sup_integrand = 0.0;   // sup |(u_base - u) . grad tau_base|
  double sup_tau_prime = 0.0;
};

struct ClebschOptions {
  TraceOptions trace;
  double cut_mismatch_factor = 100.0;
};

// Base travel time tau = theta / Omega(r) from the cut {theta = 0, x1 > 0}.
double base_travel_time(const MappedPoint& p, const BaseState& base,
                        const DomainSpec& d);

// Travel-time correction: solves u . grad tau' = (u_base - u) . grad tau_base
// along each orbit with the arclength mean-zero gauge.
ScalarField solve_tau_prime(const VectorField& u, const BaseState& base,
                            const ClebschOptions& opts = {});

// Pointwise composition H = (Bernoulli of period)(T).
ScalarField assemble_bernoulli(const ScalarField& T, const BaseState& base);

// omega = H'(T) grad(tau) x grad(T) with the travel-time gradient split into
// the analytic base part plus one-sided stencils for the correction near the
// cut. Asserts continuity across the cut, averages the one-sided limits, and
// blends to the analytic base vorticity inside the axis collar.
struct VorticityResult {
  VectorField omega;
  double cut_mismatch = 0.0;
  double interior_error_estimate = 0.0;
};
VorticityResult assemble_vorticity(const ScalarField& tau_prime,
                                   const ScalarField& T, const BaseState& base,
                                   double cut_mismatch_factor = 100.0);

// Full per-step assembly (one orbit trace per grid node, shared between the
// period and the travel-time correction).
ClebschData build_clebsch(const VectorField& u, const BaseState& base,
                          const ClebschOptions& opts = {});

}  // namespace lortz
