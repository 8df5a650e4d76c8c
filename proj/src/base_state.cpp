#include "lortz/base_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lortz/errors.hpp"
#include "lortz/numeric.hpp"

namespace lortz {

namespace {
constexpr double kTwoPi = 2.0 * EIGEN_PI;
}

double Profile::omega_rho(double rho) const {
  return numeric::poly_eval(omega_rho_coeffs, rho);
}

double Profile::omega_rho_deriv(double rho) const {
  return numeric::poly_eval(numeric::poly_derivative(omega_rho_coeffs), rho);
}

HypothesisReport check_hypotheses(const Profile& p, int n_samples) {
  HypothesisReport rep;
  // Omega''(0) = 2 * d Omega / d rho at rho = 0 for even profiles.
  rep.omega_second_at_axis = 2.0 * p.omega_rho_deriv(0.0);
  rep.curvature_ok = std::abs(rep.omega_second_at_axis) > 0.0;

  const double rho_max = p.r_max * p.r_max;
  double sign0 = 0.0;
  bool sign_ok = true, up = true, down = true;
  double prev = p.omega_rho(0.0);
  for (int i = 0; i <= n_samples; ++i) {
    const double rho = rho_max * i / n_samples;
    const double w = p.omega_rho(rho);
    if (w == 0.0) sign_ok = false;
    if (sign0 == 0.0 && w != 0.0) sign0 = w > 0.0 ? 1.0 : -1.0;
    if (w * sign0 < 0.0) sign_ok = false;
    if (i > 0) {
      if (w <= prev) up = false;
      if (w >= prev) down = false;
      prev = w;
    }
  }
  rep.sign_constant = sign_ok;
  rep.monotone = up || down;
  rep.increasing = up;
  return rep;
}

BaseState::BaseState(const Profile& p) : profile_(p) {
  rho_max_ = p.r_max * p.r_max;

  // Extend the rho window a little below zero, as far as Omega stays monotone
  // and sign-constant: the period map remains invertible there, so periods
  // marginally above the axis value stay evaluable without letting genuinely
  // escaped iterates through.
  const double probe_limit = -0.05 * rho_max_;
  const double w0 = p.omega_rho(0.0);
  const double d0 = p.omega_rho_deriv(0.0);
  double rho_lo = 0.0;
  if (d0 != 0.0) {
    const int steps = 64;
    for (int i = 1; i <= steps; ++i) {
      const double rho = probe_limit * i / steps;
      const double w = p.omega_rho(rho);
      const double d = p.omega_rho_deriv(rho);
      if (w * w0 <= 0.0 || d * d0 <= 0.0) break;
      rho_lo = rho;
    }
  }
  rho_min_ = 0.9 * rho_lo;

  // Pressure anchors on [min(rho_min, 0), rho_max].
  anchors_ = 512;
  anchor_step_ = (rho_max_ - rho_min_) / anchors_;
  pressure_cache_.resize(anchors_ + 1);
  // Index of rho = 0 among the anchors is not needed explicitly: integrate
  // cumulatively from rho_min and subtract the value at 0 afterwards.
  Eigen::VectorXd cum(anchors_ + 1);
  cum[0] = 0.0;
  for (int i = 1; i <= anchors_; ++i) {
    const double a = rho_min_ + (i - 1) * anchor_step_;
    const double b = rho_min_ + i * anchor_step_;
    cum[i] = cum[i - 1] +
             0.5 * numeric::integrate([this](double rho) { return omega_sq(rho); },
                                      a, b, 1e-14);
  }
  // Shift so that the anchor interpolation of p at rho = 0 vanishes.
  const double at_zero =
      cum[0] + 0.5 * numeric::integrate([this](double rho) { return omega_sq(rho); },
                                        rho_min_, 0.0, 1e-14);
  pressure_cache_ = cum.array() - at_zero;

  const double t_at_min = kTwoPi / p.omega_rho(rho_min_);
  const double t_at_max = kTwoPi / p.omega_rho(rho_max_);
  period_lo_ = std::min(t_at_min, t_at_max);
  period_hi_ = std::max(t_at_min, t_at_max);
  const double t0 = kTwoPi / p.omega_rho(0.0);
  strict_lo_ = std::min(t0, t_at_max);
  strict_hi_ = std::max(t0, t_at_max);
}

Vec3 BaseState::velocity(const Vec3& x) const {
  const double rho = x[0] * x[0] + x[1] * x[1];
  const double w = profile_.omega_rho(rho);
  return {-w * x[1], w * x[0], 0.0};
}

double BaseState::vorticity_z_rho(double rho) const {
  return 2.0 * profile_.omega_rho(rho) + 2.0 * rho * profile_.omega_rho_deriv(rho);
}

double BaseState::pressure_rho(double rho) const {
  if (rho < rho_min_ - 1e-12 || rho > rho_max_ + 1e-12)
    throw PeriodOutOfRange("base_state.pressure: rho = " + std::to_string(rho) +
                           " outside [" + std::to_string(rho_min_) + ", " +
                           std::to_string(rho_max_) + "]");
  const int i = std::clamp(
      static_cast<int>(std::floor((rho - rho_min_) / anchor_step_)), 0, anchors_);
  const double rho_i = rho_min_ + i * anchor_step_;
  return pressure_cache_[i] +
         0.5 * numeric::integrate([this](double t) { return omega_sq(t); }, rho_i,
                                  rho, 1e-13);
}

double BaseState::bernoulli_rho(double rho) const {
  return 0.5 * rho * omega_sq(rho) + pressure_rho(rho);
}

double BaseState::bernoulli_rho_deriv(double rho) const {
  const double w = profile_.omega_rho(rho);
  return w * w + rho * w * profile_.omega_rho_deriv(rho);
}

double BaseState::orbit_period(double r) const {
  return kTwoPi / profile_.omega(r);
}

double BaseState::rho_of_period(double T) const {
  const double lo = period_lo_, hi = period_hi_;
  if (!(T >= lo && T <= hi))
    throw PeriodOutOfRange("base_state: period " + std::to_string(T) +
                           " outside the invertible window [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]");
  const double target = kTwoPi / T;
  return numeric::solve_monotone(
      [this, target](double rho) { return profile_.omega_rho(rho) - target; },
      [this](double rho) { return profile_.omega_rho_deriv(rho); }, rho_min_,
      rho_max_, 1e-15);
}

double BaseState::radius_of_period(double T) const {
  if (!(T >= strict_lo_ && T <= strict_hi_))
    throw PeriodOutOfRange("base_state.radius_of_period: period " +
                           std::to_string(T) + " outside [" +
                           std::to_string(strict_lo_) + ", " +
                           std::to_string(strict_hi_) + "]");
  const double rho = rho_of_period(T);
  return std::sqrt(std::max(rho, 0.0));
}

double BaseState::bernoulli_of_period(double T) const {
  return bernoulli_rho(rho_of_period(T));
}

double BaseState::bernoulli_of_period_derivative(double T) const {
  const double rho = rho_of_period(T);
  const double dod = profile_.omega_rho_deriv(rho);
  if (dod == 0.0)
    throw PeriodOutOfRange("base_state: period map not invertible at rho = " +
                           std::to_string(rho));
  // Chain rule through rho(T): drho/dT = -(2 pi / T^2) / (d Omega / d rho).
  const double drho_dT = -(kTwoPi / (T * T)) / dod;
  return bernoulli_rho_deriv(rho) * drho_dT;
}

Vec3 BaseState::travel_time_gradient(double theta_branch, const Vec3& x) const {
  const double r2 = x[0] * x[0] + x[1] * x[1];
  const double r = std::sqrt(r2);
  const double w = profile_.omega_rho(r2);
  const double wp = profile_.omega_prime(r);
  // grad(theta / Omega) = grad(theta)/Omega - theta Omega'/Omega^2 grad(r).
  const Vec3 grad_theta{-x[1] / r2, x[0] / r2, 0.0};
  const Vec3 e_r{x[0] / r, x[1] / r, 0.0};
  return grad_theta / w - (theta_branch * wp / (w * w)) * e_r;
}

}  // namespace lortz
