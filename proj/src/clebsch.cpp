#include "lortz/clebsch.hpp"

#include <cmath>
#include <string>

#include "lortz/errors.hpp"
#include "lortz/numeric.hpp"

namespace lortz {

namespace {
constexpr double kTwoPi = 2.0 * EIGEN_PI;

// Index rotation of a scalar array in theta by `shift` grid cells.
Eigen::ArrayXd rotate_theta(const MappedGrid& g, const Eigen::ArrayXd& f, int shift) {
  Eigen::ArrayXd out(f.size());
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j) {
      const int js = g.rotate_j(j, shift);
      for (int i = 0; i < g.ns(); ++i)
        out[g.idx(i, j, k)] = f[g.idx(i, js, k)];
    }
  return out;
}

// Analytic gradient of the base travel time at every node, branch angle
// theta_j + extra (extra = 2 pi selects the below-cut branch on the cut row).
VectorField base_tau_gradient(std::shared_ptr<const MappedGrid> grid,
                              const BaseState& base, double extra_branch) {
  const auto& g = *grid;
  VectorField out(grid);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j) {
      const double branch = g.theta(j) + extra_branch;
      for (int i = 0; i < g.ns(); ++i) {
        const Eigen::Index n = g.idx(i, j, k);
        const Vec3 grad = base.travel_time_gradient(branch, g.node_cartesian(n));
        out.x[n] = grad[0];
        out.y[n] = grad[1];
        out.z[n] = grad[2];
      }
    }
  return out;
}

}  // namespace

double base_travel_time(const MappedPoint& p, const BaseState& base,
                        const DomainSpec& d) {
  const double r = p.s * d.wall_radius(p.theta, p.z);
  return base.travel_time(p.theta, r);
}

ScalarField solve_tau_prime(const VectorField& u, const BaseState& base,
                            const ClebschOptions& opts) {
  OrbitTracer tracer(u.grid, base, u, opts.trace);
  return trace_all_nodes(tracer, true).tau_prime;
}

ScalarField assemble_bernoulli(const ScalarField& T, const BaseState& base) {
  ScalarField H(T.grid);
  for (Eigen::Index n = 0; n < T.values.size(); ++n)
    H.values[n] = base.bernoulli_of_period(T.values[n]);
  return H;
}

VorticityResult assemble_vorticity(const ScalarField& tau_prime,
                                   const ScalarField& T, const BaseState& base,
                                   double cut_mismatch_factor) {
  const auto grid = T.grid;
  const auto& g = *grid;
  if (!tau_prime.cut)
    throw CutFieldRequiresJump("clebsch.assemble_vorticity: tau_prime must be a cut field");

  // H'(T) factor and the regular gradient of the (continuous) period.
  Eigen::ArrayXd hprime(g.size());
  for (Eigen::Index n = 0; n < g.size(); ++n)
    hprime[n] = base.bernoulli_of_period_derivative(T.values[n]);
  const VectorField gradT = gradient(T);

  // Correction gradient: one-sided theta stencils near the cut.
  const VectorField grad_tp = gradient_cut(tau_prime);
  const VectorField grad_tb = base_tau_gradient(grid, base, 0.0);

  VectorField omega(grid);
  auto cross_assemble = [&](const VectorField& a, VectorField& out) {
    out.x = hprime * (a.y * gradT.z - a.z * gradT.y);
    out.y = hprime * (a.z * gradT.x - a.x * gradT.z);
    out.z = hprime * (a.x * gradT.y - a.y * gradT.x);
  };
  VectorField grad_tau(grid);
  grad_tau.x = grad_tb.x + grad_tp.x;
  grad_tau.y = grad_tb.y + grad_tp.y;
  grad_tau.z = grad_tb.z + grad_tp.z;
  cross_assemble(grad_tau, omega);

  // Below-cut limit on the cut row: move the branch seam to theta = pi by
  // adding the known branch shift J on the lower half, differentiate with the
  // seam there, and use the analytic base gradient at branch angle 2 pi.
  ScalarField jump(grid);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        const Eigen::Index n = g.idx(i, j, k);
        jump.values[n] =
            T.values[n] - base.orbit_period(g.cyl_radius()[n]);
      }
  ScalarField shifted(grid, true);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j) {
      const bool lower = g.theta(j) < EIGEN_PI;
      for (int i = 0; i < g.ns(); ++i) {
        const Eigen::Index n = g.idx(i, j, k);
        shifted.values[n] = tau_prime.values[n] + (lower ? jump.values[n] : 0.0);
      }
    }
  const int half = g.ntheta() / 2;
  ScalarField shifted_rot(grid, true);
  shifted_rot.values = rotate_theta(g, shifted.values, half);
  const VectorField grad_shift_rot = gradient_cut(shifted_rot);
  // Rotate back only the cut row values we need.
  const VectorField grad_tb_below = base_tau_gradient(grid, base, kTwoPi);

  VorticityResult out;
  double mismatch = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int i = 0; i < g.ns(); ++i) {
      const Eigen::Index n = g.idx(i, 0, k);
      const Eigen::Index nr = g.idx(i, half, k);  // cut row in rotated indexing
      const Vec3 gtp_minus{grad_shift_rot.x[nr], grad_shift_rot.y[nr],
                           grad_shift_rot.z[nr]};
      const Vec3 gtau_minus =
          Vec3{grad_tb_below.x[n], grad_tb_below.y[n], grad_tb_below.z[n]} +
          gtp_minus;
      const Vec3 gT{gradT.x[n], gradT.y[n], gradT.z[n]};
      const Vec3 omega_minus = hprime[n] * gtau_minus.cross(gT);
      const Vec3 omega_plus{omega.x[n], omega.y[n], omega.z[n]};
      if (g.interior_ring(i))
        mismatch = std::max(mismatch, (omega_plus - omega_minus).norm());
      const Vec3 avg = 0.5 * (omega_plus + omega_minus);
      omega.x[n] = avg[0];
      omega.y[n] = avg[1];
      omega.z[n] = avg[2];
    }
  out.cut_mismatch = mismatch;

  // Axis collar: replace by the analytic base vorticity, blending over one
  // cell at the collar edge.
  const double s_axis = g.s_axis(), h = g.ds_spacing();
  for (int i = 0; i <= std::min(3, g.ns() - 1); ++i) {
    const double beta = numeric::smoothstep((g.s(i) - s_axis) / h);
    if (beta >= 1.0) continue;
    for (int k = 0; k < g.nz(); ++k)
      for (int j = 0; j < g.ntheta(); ++j) {
        const Eigen::Index n = g.idx(i, j, k);
        const double r = g.cyl_radius()[n];
        const double wz = base.vorticity_z_rho(r * r);
        omega.x[n] = beta * omega.x[n];
        omega.y[n] = beta * omega.y[n];
        omega.z[n] = beta * omega.z[n] + (1.0 - beta) * wz;
      }
  }

  // Interior consistency yardstick: div of a cross product of gradients
  // vanishes analytically, so its discrete size measures the assembly error.
  const ScalarField div_omega = divergence(omega);
  double est = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j)
      for (int i = 0; i < g.ns(); ++i)
        if (g.interior_ring(i))
          est = std::max(est, std::abs(div_omega.values[g.idx(i, j, k)]));
  out.interior_error_estimate = est;

  if (mismatch > cut_mismatch_factor * std::max(est, 1e-14))
    throw CutMismatch("clebsch.assemble_vorticity: vorticity jump across the cut " +
                      std::to_string(mismatch) + " exceeds " +
                      std::to_string(cut_mismatch_factor) +
                      " x interior estimate " + std::to_string(est));

  out.omega = std::move(omega);
  return out;
}

ClebschData build_clebsch(const VectorField& u, const BaseState& base,
                          const ClebschOptions& opts) {
  OrbitTracer tracer(u.grid, base, u, opts.trace);
  NodeTraceResult traced = trace_all_nodes(tracer, true);

  ClebschData out;
  out.T = std::move(traced.period);
  out.tau_prime = std::move(traced.tau_prime);
  out.max_closure_error = traced.max_closure_error;
  out.sup_integrand = traced.sup_integrand;
  out.sup_tau_prime = traced.sup_tau_prime;

  const auto& g = *u.grid;
  out.tau = ScalarField(u.grid, true);
  out.jump = ScalarField(u.grid);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        const Eigen::Index n = g.idx(i, j, k);
        const double r = g.cyl_radius()[n];
        out.tau.values[n] = base.travel_time(g.theta(j), r) + out.tau_prime.values[n];
        out.jump.values[n] = out.T.values[n] - base.orbit_period(r);
      }

  out.H = assemble_bernoulli(out.T, base);
  VorticityResult vort =
      assemble_vorticity(out.tau_prime, out.T, base, opts.cut_mismatch_factor);
  out.omega = std::move(vort.omega);
  out.cut_mismatch = vort.cut_mismatch;
  out.interior_error_estimate = vort.interior_error_estimate;
  return out;
}

}  // namespace lortz
