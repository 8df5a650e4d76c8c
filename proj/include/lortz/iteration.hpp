#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lortz/clebsch.hpp"
#include "lortz/divcurl.hpp"
#include "lortz/errors.hpp"

namespace lortz {

struct NumericsConfig {
  int radial_order = 4;
  TraceOptions trace;
  DivCurlOptions divcurl;
  HarmonicOptions harmonic;
  double cut_mismatch_factor = 100.0;
};

struct RunConfig {
  DomainSpec domain;
  Profile profile;
  int max_iters = 50;
  double tol = 1e-9;  // on sup|u_N - u_{N-1}| relative to sup|u_base|
  NumericsConfig numerics;
  int diagnostics_orbits = 50;
  unsigned long long seed = 12345;
};

struct ConvergenceReport {
  std::vector<double> deltas;      // sup differences per step
  std::vector<double> deltas_l2;
  std::vector<double> ratios;
  bool converged = false;
  int iterations = 0;
  double tol_abs = 0.0;
  double decay_r_squared = 0.0;  // of log(delta) vs step
  double decay_rate = 0.0;       // fitted geometric ratio
  double poincare_ratio = 0.0;   // sup|tau'| / sup|source| of the last step
};

// Thrown when the loop hits max_iters; carries the history.
class NotConverged : public LortzError {
public:
  NotConverged(const std::string& what, ConvergenceReport rep)
      : LortzError(what), report(std::move(rep)) {}
  ConvergenceReport report;
};

struct IterationState {
  int n = 0;
  VectorField u;
  ClebschData clebsch;
  double delta = 0.0;     // sup |u_n - u_{n-1}|
  double delta_l2 = 0.0;
  double ratio = 0.0;
  DivCurlStats solve_stats;
};

struct Solution {
  VectorField u;
  ClebschData clebsch;
  HarmonicField harmonic;
  ConvergenceReport report;
};

// One Lortz step: orbit trace -> travel time and period -> Bernoulli ->
// vorticity -> div-curl solve -> symmetry projections.
class LortzIterator {
public:
  LortzIterator(const RunConfig& cfg);

  std::shared_ptr<const MappedGrid> grid() const { return grid_; }
  const BaseState& base() const { return base_; }
  const HarmonicField& harmonic() const { return solver_.harmonic(); }
  const VectorField& base_velocity() const { return u_base_; }
  double base_sup() const { return base_sup_; }

  IterationState initial_state() const;
  IterationState step(const IterationState& s);
  Solution run(std::optional<VectorField> init = std::nullopt);

private:
  RunConfig cfg_;
  std::shared_ptr<const MappedGrid> grid_;
  BaseState base_;
  VectorField u_base_;
  DivCurlSolver solver_;
  double base_sup_ = 0.0;
};

Solution run(const RunConfig& cfg);

struct ContractionEntry {
  int m = 0;
  bool converged = false;
  double rho = 0.0;  // asymptotic contraction ratio (geometric mean, late steps)
  int steps_used = 0;
  std::string error;
  ConvergenceReport report;
};

struct ContractionReport {
  std::vector<ContractionEntry> entries;
};

// Runs the iteration for each symmetry order with the same amplitude and
// profile (wall pattern re-generated per m) and extracts the asymptotic
// contraction ratio of each run. Failures are recorded and skipped.
ContractionReport contraction_vs_m(const RunConfig& base_cfg,
                                   const std::vector<int>& m_list);

// Asymptotic ratio from a delta history: geometric mean of the late-stage
// ratios, ignoring burn-in and floor-limited tail steps.
double asymptotic_ratio(const ConvergenceReport& rep);

}  // namespace lortz
