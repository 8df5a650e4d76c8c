#include "lortz/diagnostics.hpp"

#include <cmath>
#include <complex>

#include "lortz/interp.hpp"

namespace lortz {

namespace {
constexpr double kTwoPi = 2.0 * EIGEN_PI;
}

double euler_residual(const VectorField& u, const ScalarField& H) {
  const auto& g = *u.grid;
  const VectorField w = curl(u);
  const VectorField gh = gradient(H);
  double res = 0.0, scale = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        if (!g.interior_ring(i)) continue;
        const Eigen::Index n = g.idx(i, j, k);
        const Vec3 uv = u.at(n), wv = w.at(n), gv = gh.at(n);
        res = std::max(res, (uv.cross(wv) - gv).norm());
        scale = std::max(scale, gv.norm());
      }
  return scale > 0.0 ? res / scale : res;
}

FibrationReport fibration_check(const ScalarField& H) {
  const auto& g = *H.grid;
  FibrationReport rep;
  const Eigen::ArrayXd dHds = g.d_s(H.values, true);
  double margin = std::numeric_limits<double>::max();
  int sign_votes = 0;
  int violations = 0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        if (g.s(i) < g.s_axis()) continue;
        const double d = dHds[g.idx(i, j, k)];
        sign_votes += d > 0.0 ? 1 : -1;
      }
  const double want = sign_votes >= 0 ? 1.0 : -1.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        if (g.s(i) < g.s_axis()) continue;
        const double d = want * dHds[g.idx(i, j, k)];
        if (d <= 0.0) ++violations;
        margin = std::min(margin, d);
      }
  rep.violations = violations;
  rep.monotone = violations == 0 && margin > 0.0;
  rep.min_margin = margin == std::numeric_limits<double>::max() ? 0.0 : margin;
  return rep;
}

double bernoulli_on_orbits(const VectorField& u, const ScalarField& H,
                           const BaseState& base, int n_orbits,
                           std::mt19937_64& rng, TraceOptions opts) {
  const auto& g = *u.grid;
  opts.record_samples = true;
  OrbitTracer tracer(u.grid, base, u, opts);
  const SpectralSampler sampler(H);
  const double lo = H.values.minCoeff(), hi = H.values.maxCoeff();
  const double range = std::max(hi - lo, 1e-300);

  std::uniform_real_distribution<double> us(0.15, 0.9), uang(0.0, kTwoPi),
      uz(0.0, g.domain().axial_period);
  double worst = 0.0;
  for (int n = 0; n < n_orbits; ++n) {
    const Vec3 seed = to_cartesian({us(rng), uang(rng), uz(rng)}, g.domain());
    const Orbit orbit = tracer.trace_orbit(seed, true);
    double hmin = std::numeric_limits<double>::max(), hmax = -hmin;
    for (const auto& [t, pos] : orbit.samples) {
      const double h = sampler.eval(pos);
      hmin = std::min(hmin, h);
      hmax = std::max(hmax, h);
    }
    worst = std::max(worst, (hmax - hmin) / range);
  }
  return worst;
}

Eigen::VectorXd theta_mode_energy(const VectorField& u) {
  const auto& g = *u.grid;
  const int nt = g.ntheta();
  Eigen::VectorXd energy = Eigen::VectorXd::Zero(nt / 2 + 1);
  // Cylindrical components are the right basis: the axisymmetric part of the
  // velocity is their zeroth theta mode.
  for (int k = 0; k < g.nz(); ++k)
    for (int i = 0; i < g.ns(); ++i) {
      std::vector<std::complex<double>> comp(3);
      for (int mode = 0; mode <= nt / 2; ++mode) {
        comp[0] = comp[1] = comp[2] = 0.0;
        double wsum = 0.0;
        for (int j = 0; j < nt; ++j) {
          const Eigen::Index n = g.idx(i, j, k);
          const double th = g.theta(j);
          const double c = std::cos(th), sn = std::sin(th);
          const double ur = c * u.x[n] + sn * u.y[n];
          const double ut = -sn * u.x[n] + c * u.y[n];
          const std::complex<double> ph = std::polar(1.0, -mode * th);
          comp[0] += ur * ph;
          comp[1] += ut * ph;
          comp[2] += u.z[n] * ph;
          wsum += g.weights()[n];
        }
        const double scale = wsum / (nt * nt);
        energy[mode] +=
            scale * (std::norm(comp[0]) + std::norm(comp[1]) + std::norm(comp[2]));
      }
    }
  return energy;
}

double max_boundary_flux(const VectorField& u) {
  const auto& g = *u.grid;
  const int ns = g.ns(), nt = g.ntheta();
  double flux = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < nt; ++j) {
      const Eigen::Index b = g.idx(ns - 1, j, k);
      const Vec3 n = g.wall_normals()[j + static_cast<size_t>(nt) * k];
      flux = std::max(flux, std::abs(n[0] * u.x[b] + n[1] * u.y[b] + n[2] * u.z[b]));
    }
  return flux;
}

SolutionReport full_report(const VectorField& u, const ClebschData& clebsch,
                           const BaseState& base, int n_orbits,
                           unsigned long long seed, TraceOptions opts) {
  SolutionReport rep;
  rep.seed = seed;
  rep.euler_residual_rel = euler_residual(u, clebsch.H);

  const VectorField w = curl(u);
  const double wsup = norm(w, NormKind::Sup);
  const ScalarField dv = divergence(u);
  const auto& g = *u.grid;
  double div_int = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j)
      for (int i = 0; i < g.ns(); ++i)
        if (g.interior_ring(i))
          div_int = std::max(div_int, std::abs(dv.values[g.idx(i, j, k)]));
  rep.div_residual = wsup > 0.0 ? div_int / wsup : div_int;

  const double usup = norm(u, NormKind::Sup);
  rep.tangency_residual = usup > 0.0 ? max_boundary_flux(u) / usup : 0.0;

  const double osup = norm(clebsch.omega, NormKind::Sup);
  rep.omega_jump = osup > 0.0 ? clebsch.cut_mismatch / osup : 0.0;

  rep.parity_residual_odd =
      usup > 0.0 ? parity_residual(u, Parity::Odd) / usup : 0.0;
  const VectorField rot = rotate_pullback(u, g.ntheta() / g.domain().m);
  rep.mfold_residual = usup > 0.0 ? sup_difference(u, rot) / usup : 0.0;

  const FibrationReport fib = fibration_check(clebsch.H);
  rep.fibration_monotone = fib.monotone;
  rep.fibration_margin = fib.min_margin;

  std::mt19937_64 rng(seed);
  rep.bernoulli_orbit_variation =
      bernoulli_on_orbits(u, clebsch.H, base, n_orbits, rng, opts);
  rep.closure_error = clebsch.max_closure_error;

  const Eigen::VectorXd energy = theta_mode_energy(u);
  const int m = g.domain().m;
  if (m < energy.size() && energy[0] > 0.0)
    rep.mode_energy_ratio = energy[m] / energy[0];
  return rep;
}

}  // namespace lortz
