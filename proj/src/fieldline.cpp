#include "lortz/fieldline.hpp"

#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "lortz/errors.hpp"
#include "lortz/numeric.hpp"

namespace lortz {

namespace {
constexpr double kTwoPi = 2.0 * EIGEN_PI;
constexpr int kMaxSteps = 200000;

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 35.0 / 384 - 5179.0 / 57600,
                 kE3 = 500.0 / 1113 - 7571.0 / 16695,
                 kE4 = 125.0 / 192 - 393.0 / 640,
                 kE5 = -2187.0 / 6784 + 92097.0 / 339200,
                 kE6 = 11.0 / 84 - 187.0 / 2100, kE7 = -1.0 / 40;
}  // namespace

using Vec7 = Eigen::Matrix<double, 7, 1>;

struct OrbitTracer::State {
  Vec7 v = Vec7::Zero();
  double t = 0.0;
};

struct OrbitTracer::StepResult {
  State next;
  double error = 0.0;
  bool accepted = false;
};

OrbitTracer::OrbitTracer(std::shared_ptr<const MappedGrid> grid,
                         const BaseState& base, const VectorField& u,
                         TraceOptions opts)
    : grid_(grid), base_(&base), pert_(grid, base, u), opts_(opts) {
  max_time_ = opts_.max_time_factor *
              std::max(base.period_strict_hi(), base.period_strict_lo());
}

Vec3 OrbitTracer::velocity(const Vec3& x) const {
  return base_->velocity(x) + pert_.eval(x);
}

void OrbitTracer::rhs(const State& y, bool accumulate_mean, State& dy) const {
  const Vec3 x = y.v.head<3>();
  const Vec3 up = pert_.eval(x);
  const Vec3 u = base_->velocity(x) + up;
  const double r2 = x[0] * x[0] + x[1] * x[1];
  const double speed = u.norm();
  dy.v[0] = u[0];
  dy.v[1] = u[1];
  dy.v[2] = u[2];
  dy.v[3] = (x[0] * u[1] - x[1] * u[0]) / r2;  // winding angle
  // Travel-time source (u_base - u) . grad tau_base = -u' . grad tau_base,
  // with the branch angle carried by the winding coordinate.
  dy.v[4] = up.isZero() ? 0.0 : -up.dot(base_->travel_time_gradient(y.v[3], x));
  dy.v[5] = accumulate_mean ? y.v[4] * (opts_.time_gauge ? 1.0 : speed) : 0.0;
  dy.v[6] = speed;
}

OrbitTracer::StepResult OrbitTracer::step(const State& y, double h,
                                          bool accumulate_mean) const {
  State k1, k2, k3, k4, k5, k6, k7;
  State tmp;
  rhs(y, accumulate_mean, k1);
  tmp.v = y.v + h * kA21 * k1.v;
  rhs(tmp, accumulate_mean, k2);
  tmp.v = y.v + h * (kA31 * k1.v + kA32 * k2.v);
  rhs(tmp, accumulate_mean, k3);
  tmp.v = y.v + h * (kA41 * k1.v + kA42 * k2.v + kA43 * k3.v);
  rhs(tmp, accumulate_mean, k4);
  tmp.v = y.v + h * (kA51 * k1.v + kA52 * k2.v + kA53 * k3.v + kA54 * k4.v);
  rhs(tmp, accumulate_mean, k5);
  tmp.v = y.v + h * (kA61 * k1.v + kA62 * k2.v + kA63 * k3.v + kA64 * k4.v +
                     kA65 * k5.v);
  rhs(tmp, accumulate_mean, k6);
  StepResult out;
  out.next.v =
      y.v + h * (kB1 * k1.v + kB3 * k3.v + kB4 * k4.v + kB5 * k5.v + kB6 * k6.v);
  out.next.t = y.t + h;
  rhs(out.next, accumulate_mean, k7);
  const Vec7 err = h * (kE1 * k1.v + kE3 * k3.v + kE4 * k4.v + kE5 * k5.v +
                        kE6 * k6.v + kE7 * k7.v);
  double e = 0.0;
  for (int c = 0; c < 7; ++c) {
    const double scale =
        opts_.abs_tol +
        opts_.rel_tol * std::max(std::abs(y.v[c]), std::abs(out.next.v[c]));
    e = std::max(e, std::abs(err[c]) / scale);
  }
  out.error = e;
  out.accepted = e <= 1.0;
  return out;
}

OrbitTracer::State OrbitTracer::land_on_angle(const State& y, double phi_target,
                                              bool accumulate_mean) const {
  // Henon's trick: switch the independent variable to the winding angle and
  // take short classical Runge-Kutta steps of exactly the remaining angle.
  State cur = y;
  for (int it = 0; it < 6; ++it) {
    const double dphi = phi_target - cur.v[3];
    if (std::abs(dphi) < 1e-13) break;
    auto rhs_phi = [this, accumulate_mean](const State& s, State& out) {
      State dy;
      rhs(s, accumulate_mean, dy);
      if (std::abs(dy.v[3]) < 1e-14)
        throw OrbitNotClosed("fieldline: winding angle stalled during event landing");
      out.v = dy.v / dy.v[3];
      out.t = 1.0 / dy.v[3];  // dt/dphi rides along
    };
    State d1, d2, d3, d4, tmp;
    rhs_phi(cur, d1);
    tmp.v = cur.v + 0.5 * dphi * d1.v;
    rhs_phi(tmp, d2);
    tmp.v = cur.v + 0.5 * dphi * d2.v;
    rhs_phi(tmp, d3);
    tmp.v = cur.v + dphi * d3.v;
    rhs_phi(tmp, d4);
    cur.t += dphi / 6.0 * (d1.t + 2.0 * d2.t + 2.0 * d3.t + d4.t);
    cur.v += dphi / 6.0 * (d1.v + 2.0 * d2.v + 2.0 * d3.v + d4.v);
  }
  cur.v[3] = phi_target;
  return cur;
}

Orbit OrbitTracer::trace_orbit(const Vec3& seed) const {
  return trace_orbit(seed, opts_.record_samples);
}

Orbit OrbitTracer::trace_orbit(const Vec3& seed, bool record_samples) const {
  Orbit orbit;
  orbit.seed = seed;
  const double r0 = std::hypot(seed[0], seed[1]);
  if (r0 <= 0.0)
    throw OrbitNotClosed("fieldline.trace_orbit: seed on the axis");

  State y;
  y.v.head<3>() = seed;
  double phi0 = std::atan2(seed[1], seed[0]);
  if (phi0 < 0.0) phi0 += kTwoPi;
  y.v[3] = phi0;

  State dy;
  rhs(y, false, dy);
  if (dy.v[3] == 0.0)
    throw OrbitNotClosed("fieldline.trace_orbit: zero winding rate at the seed");
  const double dir = dy.v[3] > 0.0 ? 1.0 : -1.0;
  const double phi_end = phi0 + dir * kTwoPi;

  // Half-plane events at multiples of pi between phi0 and phi_end. A seed
  // sitting on a half-plane counts as its own first crossing.
  const double k0 = std::round(phi0 / EIGEN_PI);
  if (std::abs(phi0 - k0 * EIGEN_PI) < 1e-12) {
    if (std::lround(k0) % 2 == 0) {
      orbit.crossed_theta0 = true;
      orbit.crossing_theta0 = seed;
      orbit.time_theta0 = 0.0;
    } else {
      orbit.crossed_theta_pi = true;
      orbit.crossing_theta_pi = seed;
      orbit.time_theta_pi = 0.0;
    }
  }
  double next_half = dir > 0 ? EIGEN_PI * std::floor(phi0 / EIGEN_PI + 1.0)
                             : EIGEN_PI * std::ceil(phi0 / EIGEN_PI - 1.0);

  double h = dir * 0.02 * base_->orbit_period(std::min(r0, base_->profile().r_max));
  if (record_samples) orbit.samples.emplace_back(0.0, seed);

  int steps = 0;
  while (true) {
    if (++steps > kMaxSteps)
      throw OrbitNotClosed("fieldline.trace_orbit: step limit exceeded");
    StepResult res = step(y, h, false);
    if (!res.accepted) {
      h *= std::max(0.2, 0.9 * std::pow(res.error, -0.2));
      continue;
    }
    const double grow = std::min(5.0, 0.9 * std::pow(std::max(res.error, 1e-10), -0.2));

    // Events inside the accepted step, innermost first.
    while ((res.next.v[3] - next_half) * dir >= 0.0 &&
           (next_half - phi_end) * dir < 0.0) {
      const State hit = land_on_angle(y, next_half, false);
      const long k = std::lround(next_half / EIGEN_PI);
      const Vec3 pos = hit.v.head<3>();
      if (k % 2 == 0) {
        if (!orbit.crossed_theta0) {
          orbit.crossed_theta0 = true;
          orbit.crossing_theta0 = pos;
          orbit.time_theta0 = hit.t;
        }
      } else if (!orbit.crossed_theta_pi) {
        orbit.crossed_theta_pi = true;
        orbit.crossing_theta_pi = pos;
        orbit.time_theta_pi = hit.t;
      }
      next_half += dir * EIGEN_PI;
    }

    if ((res.next.v[3] - phi_end) * dir >= 0.0) {
      const State end = land_on_angle(y, phi_end, false);
      orbit.period = end.t;
      orbit.closure_error = (end.v.head<3>() - seed).norm();
      if (record_samples) orbit.samples.emplace_back(end.t, end.v.head<3>());
      break;
    }

    y = res.next;
    if (record_samples) orbit.samples.emplace_back(y.t, y.v.head<3>());
    if (std::abs(y.t) > max_time_)
      throw OrbitNotClosed("fieldline.trace_orbit: no return within " +
                           std::to_string(max_time_) + " time units");
    h *= grow;
  }
  if (orbit.period < 0.0) orbit.period = std::abs(orbit.period);
  return orbit;
}

Vec3 OrbitTracer::advance(const Vec3& seed, double time) const {
  State y;
  y.v.head<3>() = seed;
  double phi0 = std::atan2(seed[1], seed[0]);
  if (phi0 < 0.0) phi0 += kTwoPi;
  y.v[3] = phi0;
  if (time == 0.0) return seed;
  const double dir = time > 0.0 ? 1.0 : -1.0;
  double h = dir * std::min(0.02 * base_->period_strict_hi(), std::abs(time));
  int steps = 0;
  while (true) {
    if (++steps > kMaxSteps)
      throw OrbitNotClosed("fieldline.advance: step limit exceeded");
    if ((y.t + h - time) * dir > 0.0) h = time - y.t;
    StepResult res = step(y, h, false);
    if (!res.accepted) {
      h *= std::max(0.2, 0.9 * std::pow(res.error, -0.2));
      continue;
    }
    y = res.next;
    if (std::abs(y.t - time) < 1e-15 * std::max(1.0, std::abs(time))) break;
    h *= std::min(5.0, 0.9 * std::pow(std::max(res.error, 1e-10), -0.2));
  }
  return y.v.head<3>();
}

ClebschSample OrbitTracer::trace_clebsch(int i, int j, int k) const {
  const auto& g = *grid_;
  const Vec3 seed = g.node_cartesian(g.idx(i, j, k));
  const bool on_cut = (j == 0);

  auto march = [this](State y, double phi_end, bool accumulate_mean,
                      double* sup_f) -> State {
    double h = 0.02 * base_->orbit_period(
                          std::min(std::hypot(y.v[0], y.v[1]), base_->profile().r_max));
    int steps = 0;
    while (true) {
      if (++steps > kMaxSteps)
        throw OrbitNotClosed("fieldline.trace_clebsch: step limit exceeded");
      StepResult res = step(y, h, accumulate_mean);
      if (!res.accepted) {
        h *= std::max(0.2, 0.9 * std::pow(res.error, -0.2));
        continue;
      }
      if (sup_f) {
        State dy;
        rhs(res.next, accumulate_mean, dy);
        *sup_f = std::max(*sup_f, std::abs(dy.v[4]));
      }
      if (res.next.v[3] >= phi_end) return land_on_angle(y, phi_end, accumulate_mean);
      y = res.next;
      if (y.t > max_time_)
        throw OrbitNotClosed("fieldline.trace_clebsch: no cut return within " +
                             std::to_string(max_time_) + " time units");
      h *= std::min(5.0, 0.9 * std::pow(std::max(res.error, 1e-10), -0.2));
    }
  };

  ClebschSample out;
  double f1 = 0.0;
  State start;
  if (on_cut) {
    start.v.head<3>() = seed;
    start.v[3] = 0.0;
  } else {
    State y;
    y.v.head<3>() = seed;
    y.v[3] = g.theta(j);
    const State cut_hit = march(y, kTwoPi, false, &out.sup_integrand);
    f1 = cut_hit.v[4];
    start.v.head<3>() = cut_hit.v.head<3>();
    start.v[3] = 0.0;
  }

  State y2 = start;
  y2.t = 0.0;
  const State end = march(y2, kTwoPi, true, &out.sup_integrand);
  out.period = end.t;
  out.arc_length = end.v[6];
  if (out.arc_length < 10.0 * g.ds_spacing())
    throw GaugeDegenerate("clebsch: orbit length " + std::to_string(out.arc_length) +
                          " too short for the mean-zero gauge at node (" +
                          std::to_string(i) + "," + std::to_string(j) + "," +
                          std::to_string(k) + ")");
  const double tau_at_cut =
      -end.v[5] / (opts_.time_gauge ? end.t : end.v[6]);  // mean-zero gauge
  const double f2 = end.v[4];
  out.tau_prime = on_cut ? tau_at_cut : tau_at_cut + f2 - f1;
  out.closure_error = (end.v.head<3>() - start.v.head<3>()).norm();
  return out;
}

ClosureReport OrbitTracer::verify_closure(int n_samples, std::mt19937_64& rng) const {
  ClosureReport rep;
  rep.n_orbits = n_samples;
  std::uniform_real_distribution<double> us(0.15, 0.85), uang(0.0, kTwoPi),
      uz(0.0, grid_->domain().axial_period);
  const Eigen::Matrix3d refl = Eigen::Vector3d(1.0, -1.0, 1.0).asDiagonal();
  for (int n = 0; n < n_samples; ++n) {
    const MappedPoint mp{us(rng), uang(rng), uz(rng)};
    const Vec3 seed = to_cartesian(mp, grid_->domain());
    const Orbit orbit = trace_orbit(seed, false);
    rep.closure_errors.push_back(orbit.closure_error);
    rep.max_closure_error = std::max(rep.max_closure_error, orbit.closure_error);
    if (!(orbit.crossed_theta0 && orbit.crossed_theta_pi)) rep.all_crossed_both = false;

    // Mirror property about the theta = pi crossing: the forward half-orbit
    // must be the reflection of the backward one.
    if (orbit.crossed_theta_pi) {
      const int kOffsets = 8;
      const double dt = 0.45 * orbit.period / kOffsets;
      Vec3 fwd = orbit.crossing_theta_pi, bwd = orbit.crossing_theta_pi;
      double mirror = 0.0;
      for (int q = 1; q <= kOffsets; ++q) {
        fwd = advance(fwd, dt);
        bwd = advance(bwd, -dt);
        mirror = std::max(mirror, (fwd - refl * bwd).norm());
      }
      rep.mirror_residuals.push_back(mirror);
      rep.max_mirror_residual = std::max(rep.max_mirror_residual, mirror);
    }
  }
  return rep;
}

NodeTraceResult trace_all_nodes(const OrbitTracer& tracer, bool with_tau) {
  const auto& g = tracer.grid();
  const auto& base = tracer.base();
  NodeTraceResult out;
  out.period = ScalarField(tracer.grid_ptr());
  out.tau_prime = ScalarField(tracer.grid_ptr(), true);

  const int i0 = g.first_traced_ring();
  const int n_threads = std::max(1, tracer.options().threads);

  std::vector<double> closure_by_k(g.nz(), 0.0), supf_by_k(g.nz(), 0.0);
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto work = [&](int k_begin, int k_end) {
    try {
      for (int k = k_begin; k < k_end; ++k)
        for (int j = 0; j < g.ntheta(); ++j)
          for (int i = i0; i < g.ns(); ++i) {
            ClebschSample sample;
            try {
              sample = tracer.trace_clebsch(i, j, k);
            } catch (const LortzError& err) {
              throw OrbitNotClosed(std::string(err.what()) + " [node (" +
                                   std::to_string(i) + "," + std::to_string(j) +
                                   "," + std::to_string(k) + ")]");
            }
            const Eigen::Index n = g.idx(i, j, k);
            out.period.values[n] = sample.period;
            if (with_tau) out.tau_prime.values[n] = sample.tau_prime;
            closure_by_k[k] = std::max(closure_by_k[k], sample.closure_error);
            supf_by_k[k] = std::max(supf_by_k[k], sample.sup_integrand);
          }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (n_threads == 1 || g.nz() < 2) {
    work(0, g.nz());
  } else {
    std::vector<std::thread> pool;
    const int slabs = std::min(n_threads, g.nz());
    for (int t = 0; t < slabs; ++t) {
      const int k_begin = g.nz() * t / slabs;
      const int k_end = g.nz() * (t + 1) / slabs;
      pool.emplace_back(work, k_begin, k_end);
    }
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  for (int k = 0; k < g.nz(); ++k) {
    out.max_closure_error = std::max(out.max_closure_error, closure_by_k[k]);
    out.sup_integrand = std::max(out.sup_integrand, supf_by_k[k]);
  }

  // Collar rings: quadratic-in-s extrapolation of the period offset from the
  // base value, and of the travel-time correction directly.
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j) {
      Eigen::VectorXd nodes(3), doff(3), tau(3);
      for (int q = 0; q < 3; ++q) {
        const int i_src = i0 + q;
        const Eigen::Index n = g.idx(i_src, j, k);
        nodes[q] = g.s(i_src);
        doff[q] = out.period.values[n] - base.orbit_period(g.cyl_radius()[n]);
        tau[q] = out.tau_prime.values[n];
      }
      for (int i = 0; i < i0; ++i) {
        const Eigen::Index n = g.idx(i, j, k);
        const Eigen::VectorXd w = numeric::lagrange_weights(g.s(i), nodes);
        out.period.values[n] =
            base.orbit_period(g.cyl_radius()[n]) + w.dot(doff);
        if (with_tau) out.tau_prime.values[n] = w.dot(tau);
      }
    }
  if (with_tau) out.sup_tau_prime = out.tau_prime.values.abs().maxCoeff();
  return out;
}

ScalarField period_field(const VectorField& u, const BaseState& base,
                         TraceOptions opts) {
  OrbitTracer tracer(u.grid, base, u, opts);
  return trace_all_nodes(tracer, false).period;
}

}  // namespace lortz
