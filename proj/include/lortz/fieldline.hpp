#pragma once

#include <Eigen/Dense>
#include <memory>
#include <random>
#include <vector>

#include "lortz/base_state.hpp"
#include "lortz/fields.hpp"
#include "lortz/interp.hpp"

namespace lortz {

// One traced closed trajectory.
struct Orbit {
  Vec3 seed = Vec3::Zero();
  std::vector<std::pair<double, Vec3>> samples;  // time-ordered (t, point)
  double period = 0.0;
  double closure_error = 0.0;
  bool crossed_theta0 = false, crossed_theta_pi = false;
  Vec3 crossing_theta0 = Vec3::Zero(), crossing_theta_pi = Vec3::Zero();
  double time_theta0 = 0.0, time_theta_pi = 0.0;
};

struct TraceOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_time_factor = 4.0;  // times the widest base period
  bool record_samples = false;
  bool time_gauge = false;  // mean-zero gauge in time instead of arclength
  int threads = 1;          // per-node traces are independent
};

// travel-time / period data deposited at one grid node
struct ClebschSample {
  double period = 0.0;
  double tau_prime = 0.0;
  double closure_error = 0.0;
  double sup_integrand = 0.0;  // sup |(u_base - u) . grad tau_base| on the orbit
  double arc_length = 0.0;
};

struct ClosureReport {
  int n_orbits = 0;
  double max_closure_error = 0.0;
  double max_mirror_residual = 0.0;
  bool all_crossed_both = true;
  std::vector<double> closure_errors;
  std::vector<double> mirror_residuals;
};

// Integrates trajectories of u = u_base (analytic) + u' (tricubic) with an
// embedded Dormand-Prince 5(4) pair; section events are landed by switching
// the independent variable to the winding angle (one short Runge-Kutta step
// in the angle, iterated to ~1e-12).
class OrbitTracer {
public:
  OrbitTracer(std::shared_ptr<const MappedGrid> grid, const BaseState& base,
              const VectorField& u, TraceOptions opts = {});

  const MappedGrid& grid() const { return *grid_; }
  std::shared_ptr<const MappedGrid> grid_ptr() const { return grid_; }
  const BaseState& base() const { return *base_; }
  const TraceOptions& options() const { return opts_; }

  Vec3 velocity(const Vec3& x) const;

  Orbit trace_orbit(const Vec3& seed) const;
  Orbit trace_orbit(const Vec3& seed, bool record_samples) const;
  Vec3 advance(const Vec3& seed, double time) const;  // flow map
  ClebschSample trace_clebsch(int i, int j, int k) const;

  // Traces n random-seed orbits, checks closure, both-half-plane crossings,
  // and the mirror symmetry of the second half-orbit.
  ClosureReport verify_closure(int n_samples, std::mt19937_64& rng) const;

private:
  std::shared_ptr<const MappedGrid> grid_;
  const BaseState* base_;
  PerturbationInterpolant pert_;
  TraceOptions opts_;
  double max_time_ = 0.0;

  struct State;
  struct StepResult;
  void rhs(const State& y, bool accumulate_mean, State& dy) const;
  StepResult step(const State& y, double h, bool accumulate_mean) const;
  State land_on_angle(const State& y, double phi_target, bool accumulate_mean) const;
};

// Orbit period of u through every grid node, deposited as a scalar field.
// Inside the axis collar (s < 2 ds) the period is the base-state value
// corrected by quadratic-in-s extrapolation of the measured offset.
ScalarField period_field(const VectorField& u, const BaseState& base,
                         TraceOptions opts = {});

// Shared engine: per-node traces for the period and, optionally, the travel
// time correction. Collar rings are filled by extrapolation as above.
struct NodeTraceResult {
  ScalarField period;        // continuous
  ScalarField tau_prime;     // cut field
  double max_closure_error = 0.0;
  double sup_integrand = 0.0;
  double sup_tau_prime = 0.0;
};
NodeTraceResult trace_all_nodes(const OrbitTracer& tracer, bool with_tau);

}  // namespace lortz
