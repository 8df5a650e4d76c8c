#pragma once

#include <Eigen/Dense>

#include "lortz/geometry.hpp"

namespace lortz {

// Rotation profile Omega, supplied as a polynomial in rho = r^2 so that all
// odd r-derivatives vanish at the axis automatically.
struct Profile {
  Eigen::VectorXd omega_rho_coeffs = (Eigen::VectorXd(2) << 1.0, 1.0).finished();
  double r_max = 1.5;

  double omega_rho(double rho) const;        // Omega as a function of rho
  double omega_rho_deriv(double rho) const;  // d Omega / d rho
  double omega(double r) const { return omega_rho(r * r); }
  double omega_prime(double r) const { return 2.0 * r * omega_rho_deriv(r * r); }
};

struct HypothesisReport {
  bool monotone = false;        // (H1) Omega invertible on [0, r_max]
  bool sign_constant = false;   // (H1) Omega does not change sign
  bool curvature_ok = false;    // (H2) |Omega''(0)| > 0
  double omega_second_at_axis = 0.0;
  bool increasing = false;
  bool pass() const { return monotone && sign_constant && curvature_ok; }
};

HypothesisReport check_hypotheses(const Profile& p, int n_samples = 2048);

// The axisymmetric rotational equilibrium u = Omega(r) r e_theta together
// with everything derived from it: pressure and Bernoulli integrals, the
// orbit period, and the Bernoulli-of-period map and its derivative.
//
// Internally everything is parametrized by rho = r^2. For a nondegenerate
// profile the period map extends smoothly through the axis value to slightly
// negative rho; the Bernoulli-of-period map is defined on that extended
// window so that near-axis periods marginally above the axis period remain
// evaluable.
class BaseState {
public:
  explicit BaseState(const Profile& p);

  const Profile& profile() const { return profile_; }

  Vec3 velocity(const Vec3& x) const;
  // Axial vorticity of the base flow, 2*Omega + r*Omega', as a function of rho.
  double vorticity_z_rho(double rho) const;

  // p(r) = int_0^r rho' Omega(rho')^2 drho'; adaptive quadrature anchored on
  // a cached fine grid, absolute tolerance 1e-12.
  double pressure(double r) const { return pressure_rho(r * r); }
  double bernoulli(double r) const { return bernoulli_rho(r * r); }
  double pressure_rho(double rho) const;
  double bernoulli_rho(double rho) const;
  // d bernoulli / d rho = Omega^2 + rho Omega Omega'.
  double bernoulli_rho_deriv(double rho) const;

  double orbit_period(double r) const;
  // Strict inverse of orbit_period on [0, r_max]; throws PeriodOutOfRange.
  double radius_of_period(double T) const;

  // Bernoulli pressure as a function of the orbit period, on the extended
  // window (rho may dip below zero); throws PeriodOutOfRange outside it.
  double bernoulli_of_period(double T) const;
  double bernoulli_of_period_derivative(double T) const;

  // Travel time of the base flow from the cut {theta = 0, x1 > 0}:
  // tau = theta / Omega(r), with theta the unwrapped branch angle.
  double travel_time(double theta_branch, double r) const {
    return theta_branch / profile_.omega(r);
  }
  // Cartesian gradient of the travel time at x (branch angle supplied by the
  // caller; the formula is single-valued once the branch is fixed).
  Vec3 travel_time_gradient(double theta_branch, const Vec3& x) const;

  double rho_min() const { return rho_min_; }
  double rho_max() const { return rho_max_; }
  // Period window on the extended rho interval (sorted).
  double period_window_lo() const { return period_lo_; }
  double period_window_hi() const { return period_hi_; }
  // Strict period range taken on r in [0, r_max] (sorted).
  double period_strict_lo() const { return strict_lo_; }
  double period_strict_hi() const { return strict_hi_; }

  double rho_of_period(double T) const;  // root-solve on the extended window

private:
  Profile profile_;
  double rho_min_ = 0.0;  // extension below the axis (negative when allowed)
  double rho_max_ = 0.0;
  double period_lo_ = 0.0, period_hi_ = 0.0;
  double strict_lo_ = 0.0, strict_hi_ = 0.0;
  // Anchors for the pressure quadrature: pressure_cache_[i] = p(rho_anchor(i)).
  Eigen::VectorXd pressure_cache_;
  double anchor_step_ = 0.0;
  int anchors_ = 0;

  double omega_sq(double rho) const {
    const double w = profile_.omega_rho(rho);
    return w * w;
  }
};

}  // namespace lortz
