#include "lortz/iteration.hpp"

#include <cmath>

#include "lortz/numeric.hpp"

namespace lortz {

LortzIterator::LortzIterator(const RunConfig& cfg)
    : cfg_(cfg),
      grid_(std::make_shared<MappedGrid>(cfg.domain, cfg.numerics.radial_order)),
      base_(cfg.profile),
      u_base_(sample_base_velocity(grid_, base_)),
      solver_(grid_, compute_harmonic(grid_, cfg.numerics.harmonic),
              cfg.numerics.divcurl) {
  const HypothesisReport hyp = check_hypotheses(cfg.profile);
  if (!hyp.pass())
    throw ConfigError(
        "iteration: rotation profile fails the nondegeneracy hypotheses "
        "(monotone/sign-constant/curved at the axis)");
  if (cfg.profile.omega_rho(0.0) <= 0.0)
    throw ConfigError("iteration: rotation profile must be positive");
  if (cfg.profile.r_max < cfg.domain.max_wall_radius())
    throw ConfigError("iteration: profile r_max smaller than the wall radius");
  base_sup_ = norm(u_base_, NormKind::Sup);
}

IterationState LortzIterator::initial_state() const {
  IterationState s;
  s.n = 0;
  s.u = u_base_;
  return s;
}

IterationState LortzIterator::step(const IterationState& s) {
  ClebschOptions copts;
  copts.trace = cfg_.numerics.trace;
  copts.cut_mismatch_factor = cfg_.numerics.cut_mismatch_factor;

  IterationState next;
  next.n = s.n + 1;
  next.clebsch = build_clebsch(s.u, base_, copts);

  DivCurlStats stats;
  VectorField u_new = solver_.solve(next.clebsch.omega, &stats);
  next.solve_stats = stats;

  // Keep the iterate exactly in the odd, m-fold symmetric class.
  const VectorField refl = reflect(u_new);
  VectorField odd(grid_);
  odd.x = 0.5 * (u_new.x - refl.x);
  odd.y = 0.5 * (u_new.y - refl.y);
  odd.z = 0.5 * (u_new.z - refl.z);
  next.u = symmetrize_mfold(odd, cfg_.domain.m);

  next.delta = sup_difference(next.u, s.u);
  VectorField diff(grid_);
  diff.x = next.u.x - s.u.x;
  diff.y = next.u.y - s.u.y;
  diff.z = next.u.z - s.u.z;
  next.delta_l2 = norm(diff, NormKind::L2);
  next.ratio = s.delta > 0.0 ? next.delta / s.delta : 0.0;
  return next;
}

Solution LortzIterator::run(std::optional<VectorField> init) {
  ConvergenceReport rep;
  rep.tol_abs = cfg_.tol * base_sup_;

  IterationState state = initial_state();
  if (init) {
    state.u = std::move(*init);
    solver_.set_warm_start(state.u);
  }

  int growth_streak = 0;
  double last_poincare = 0.0;
  for (int n = 0; n < cfg_.max_iters; ++n) {
    IterationState next = step(state);
    rep.deltas.push_back(next.delta);
    rep.deltas_l2.push_back(next.delta_l2);
    if (n > 0) rep.ratios.push_back(next.ratio);
    rep.iterations = n + 1;
    if (next.clebsch.sup_integrand > 0.0)
      last_poincare = next.clebsch.sup_tau_prime / next.clebsch.sup_integrand;

    if (n > 0 && next.delta > rep.deltas[n - 1]) {
      if (++growth_streak >= 3)
        throw DivergenceDetected(
            "iteration: step size grew for 3 consecutive steps, delta = " +
            std::to_string(next.delta));
    } else {
      growth_streak = 0;
    }

    state = std::move(next);
    if (state.delta <= rep.tol_abs) {
      rep.converged = true;
      break;
    }
  }
  rep.poincare_ratio = last_poincare;

  // Geometric-decay fit of the recorded history.
  const int nfit = static_cast<int>(rep.deltas.size());
  if (nfit >= 3) {
    std::vector<double> xs, ys;
    for (int i = 0; i < nfit; ++i) {
      if (rep.deltas[i] <= 0.0) continue;
      xs.push_back(i);
      ys.push_back(std::log(rep.deltas[i]));
    }
    if (xs.size() >= 3) {
      const auto fit = numeric::fit_line(
          Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size()),
          Eigen::Map<const Eigen::VectorXd>(ys.data(), ys.size()));
      rep.decay_r_squared = fit.r_squared;
      rep.decay_rate = std::exp(fit.slope);
    }
  }

  if (!rep.converged)
    throw NotConverged("iteration: no convergence within " +
                           std::to_string(cfg_.max_iters) + " steps, last delta = " +
                           std::to_string(rep.deltas.empty() ? 0.0 : rep.deltas.back()),
                       rep);

  Solution sol;
  sol.u = state.u;
  sol.clebsch = std::move(state.clebsch);
  sol.harmonic = solver_.harmonic();
  sol.report = std::move(rep);
  return sol;
}

Solution run(const RunConfig& cfg) { return LortzIterator(cfg).run(); }

double asymptotic_ratio(const ConvergenceReport& rep) {
  // Geometric mean of the late-half ratios, skipping floor-limited steps.
  const auto& d = rep.deltas;
  if (d.size() < 4) return 0.0;
  const double floor = 50.0 * rep.tol_abs;
  std::vector<double> ratios;
  for (size_t i = d.size() / 2; i < d.size(); ++i) {
    if (d[i - 1] > floor && d[i] > 0.0) ratios.push_back(d[i] / d[i - 1]);
  }
  if (ratios.empty()) {
    for (size_t i = 1; i < d.size(); ++i)
      if (d[i - 1] > 0.0 && d[i] > 0.0) ratios.push_back(d[i] / d[i - 1]);
  }
  if (ratios.empty()) return 0.0;
  double logsum = 0.0;
  for (double r : ratios) logsum += std::log(r);
  return std::exp(logsum / ratios.size());
}

ContractionReport contraction_vs_m(const RunConfig& base_cfg,
                                   const std::vector<int>& m_list) {
  ContractionReport out;
  for (int m : m_list) {
    ContractionEntry entry;
    entry.m = m;
    RunConfig cfg = base_cfg;
    cfg.domain = make_default_domain(base_cfg.domain.epsilon, m,
                                     base_cfg.domain.grid,
                                     base_cfg.domain.axial_period);
    try {
      Solution sol = run(cfg);
      entry.converged = true;
      entry.report = sol.report;
    } catch (const NotConverged& err) {
      entry.report = err.report;  // ratios are still usable
      entry.error = err.what();
    } catch (const LortzError& err) {
      entry.error = err.what();
      out.entries.push_back(entry);
      continue;
    }
    entry.rho = asymptotic_ratio(entry.report);
    entry.steps_used = entry.report.iterations;
    out.entries.push_back(entry);
  }
  return out;
}

}  // namespace lortz
