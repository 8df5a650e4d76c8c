#include "lortz/divcurl.hpp"

#include <cmath>
#include <string>

#include "lortz/errors.hpp"

namespace lortz {

namespace {

VectorField unflatten(std::shared_ptr<const MappedGrid> g, const Eigen::ArrayXd& flat) {
  VectorField v(g);
  const Eigen::Index n = g->size();
  v.x = flat.segment(0, n);
  v.y = flat.segment(n, n);
  v.z = flat.segment(2 * n, n);
  return v;
}

Eigen::ArrayXd flatten(const VectorField& v) {
  const Eigen::Index n = v.grid->size();
  Eigen::ArrayXd flat(3 * n);
  flat.segment(0, n) = v.x;
  flat.segment(n, n) = v.y;
  flat.segment(2 * n, n) = v.z;
  return flat;
}

}  // namespace

HarmonicField compute_harmonic(std::shared_ptr<const MappedGrid> grid,
                               const HarmonicOptions& opts) {
  const auto& g = *grid;
  const Eigen::Index n = g.size();
  const int ns = g.ns(), nt = g.ntheta(), nz = g.nz();

  // Row masks and weights: PDE rows off the wall, Neumann rows on it, plus
  // one mean-pinning row.
  Eigen::ArrayXd pde_mask = Eigen::ArrayXd::Ones(n);
  Eigen::ArrayXd bc_weight = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd normal[3];
  for (auto& a : normal) a = Eigen::ArrayXd::Zero(n);
  const double mu = 1.0 / g.ds_spacing();
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < nt; ++j) {
      const Eigen::Index b = g.idx(ns - 1, j, k);
      pde_mask[b] = 0.0;
      const Vec3 nrm = g.wall_normals()[j + static_cast<size_t>(nt) * k];
      bc_weight[b] = mu * std::sqrt(g.weights()[b]);
      for (int c = 0; c < 3; ++c) normal[c][b] = nrm[c];
    }
  const Eigen::ArrayXd sqrt_w = g.weights().sqrt();
  const Eigen::ArrayXd pde_w = pde_mask * sqrt_w;
  const double pin = 1.0 / g.volume();

  // Column scaling: second-order operator magnitudes per node.
  Eigen::ArrayXd scale(n);
  {
    const double ct = 0.5 * nt, cz = EIGEN_PI * nz / g.domain().axial_period;
    for (Eigen::Index i = 0; i < n; ++i) {
      double gs = 0.0, gt = 0.0, gz = 0.0;
      for (int c = 0; c < 3; ++c) {
        gs += g.grad_coord(0, c)[i] * g.grad_coord(0, c)[i];
        gt += g.grad_coord(1, c)[i] * g.grad_coord(1, c)[i];
        gz += g.grad_coord(2, c)[i] * g.grad_coord(2, c)[i];
      }
      const double mag = gs / (g.ds_spacing() * g.ds_spacing()) + gt * ct * ct +
                         gz * cz * cz;
      scale[i] = 1.0 / (std::sqrt(g.weights()[i]) * std::max(mag, 1e-30));
    }
  }

  auto laplacian = [&g](const Eigen::ArrayXd& f) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(f.size());
    for (int c = 0; c < 3; ++c)
      out += g.cartesian_deriv(g.cartesian_deriv(f, c), c);
    return out;
  };
  auto laplacian_adj = [&g](const Eigen::ArrayXd& f) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(f.size());
    for (int c = 0; c < 3; ++c)
      out += g.cartesian_deriv_adjoint(g.cartesian_deriv_adjoint(f, c), c);
    return out;
  };
  auto bc_rows = [&](const Eigen::ArrayXd& f) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
    for (int c = 0; c < 3; ++c) out += normal[c] * g.cartesian_deriv(f, c);
    return (bc_weight * out).eval();
  };
  auto bc_rows_adj = [&](const Eigen::ArrayXd& r) {
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
    const Eigen::ArrayXd rw = bc_weight * r;
    for (int c = 0; c < 3; ++c)
      out += g.cartesian_deriv_adjoint((normal[c] * rw).eval(), c);
    return out;
  };

  // Rows stacked as [PDE (n); BC (n); pin (1)].
  auto apply = [&](const Eigen::ArrayXd& p) {
    const Eigen::ArrayXd f = scale * p;
    Eigen::ArrayXd r(2 * n + 1);
    r.segment(0, n) = pde_w * laplacian(f);
    r.segment(n, n) = bc_rows(f);
    r[2 * n] = pin * (g.weights() * f).sum();
    return r;
  };
  auto apply_adj = [&](const Eigen::ArrayXd& r) {
    Eigen::ArrayXd out = laplacian_adj((pde_w * r.segment(0, n)).eval());
    out += bc_rows_adj(r.segment(n, n));
    out += r[2 * n] * pin * g.weights();
    return (scale * out).eval();
  };

  Eigen::ArrayXd b = Eigen::ArrayXd::Zero(2 * n + 1);
  b.segment(n, n) = -bc_weight * normal[2];  // d psi / dn = -e_z . n

  HarmonicField out;
  Eigen::ArrayXd psi_scaled = Eigen::ArrayXd::Zero(n);
  const double bnorm = std::sqrt((b * b).sum());
  if (bnorm > 0.0) {
    // CGLS on the scaled system.
    Eigen::ArrayXd r = b;
    Eigen::ArrayXd s = apply_adj(r);
    Eigen::ArrayXd p = s;
    double gamma = (s * s).sum();
    const int cap = static_cast<int>(opts.iter_cap_factor * std::sqrt(double(n))) + 10;
    int it = 0;
    for (; it < cap; ++it) {
      if (std::sqrt((r * r).sum()) <= opts.tol * bnorm) break;
      const Eigen::ArrayXd q = apply(p);
      const double alpha = gamma / (q * q).sum();
      psi_scaled += alpha * p;
      r -= alpha * q;
      s = apply_adj(r);
      const double gamma_new = (s * s).sum();
      p = s + (gamma_new / gamma) * p;
      gamma = gamma_new;
      if (std::sqrt(gamma) <= 1e-15 * bnorm) break;
    }
    out.iterations = it;
    const double rel = std::sqrt((apply(psi_scaled) - b).square().sum()) / bnorm;
    if (rel > opts.tol && std::sqrt(gamma) > 1e-13 * bnorm)
      throw SolverDiverged("divcurl.compute_harmonic: relative residual " +
                           std::to_string(rel) + " did not reach " +
                           std::to_string(opts.tol) + " within " +
                           std::to_string(out.iterations) + " iterations");
  }

  ScalarField psi(grid);
  psi.values = scale * psi_scaled;
  VectorField u = gradient(psi);
  u.z += 1.0;

  // Sign and normalization.
  const double mean_axial = (grid->weights() * u.z).sum();
  const double nrm = std::sqrt(weighted_dot(u, u)) * (mean_axial >= 0.0 ? 1.0 : -1.0);
  u.x /= nrm;
  u.y /= nrm;
  u.z /= nrm;

  out.field = u;
  out.curl_residual = norm(curl(u), NormKind::Sup);
  out.div_residual = norm(divergence(u), NormKind::Sup);
  double flux = 0.0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < nt; ++j) {
      const Eigen::Index bidx = g.idx(ns - 1, j, k);
      const Vec3 nrm3 = g.wall_normals()[j + static_cast<size_t>(nt) * k];
      flux = std::max(flux, std::abs(nrm3[0] * u.x[bidx] + nrm3[1] * u.y[bidx] +
                                     nrm3[2] * u.z[bidx]));
    }
  out.boundary_flux = flux;
  return out;
}

DivCurlSolver::DivCurlSolver(std::shared_ptr<const MappedGrid> grid,
                             HarmonicField harmonic, DivCurlOptions opts)
    : grid_(std::move(grid)), harmonic_(std::move(harmonic)), opts_(opts) {
  const auto& g = *grid_;
  const Eigen::Index n = nn();
  sqrt_w_ = g.weights().sqrt();
  scale_.resize(3 * n);
  const double ct = 0.5 * g.ntheta();
  const double cz = EIGEN_PI * g.nz() / g.domain().axial_period;
  for (Eigen::Index i = 0; i < n; ++i) {
    double gs = 0.0, gt = 0.0, gz = 0.0;
    for (int c = 0; c < 3; ++c) {
      gs += g.grad_coord(0, c)[i] * g.grad_coord(0, c)[i];
      gt += g.grad_coord(1, c)[i] * g.grad_coord(1, c)[i];
      gz += g.grad_coord(2, c)[i] * g.grad_coord(2, c)[i];
    }
    const double mag = std::sqrt(gs / (g.ds_spacing() * g.ds_spacing()) +
                                 gt * ct * ct + gz * cz * cz);
    const double d = 1.0 / (sqrt_w_[i] * std::max(mag, 1e-30));
    scale_[i] = d;
    scale_[n + i] = d;
    scale_[2 * n + i] = d;
  }
}

void DivCurlSolver::project_tangent(Eigen::ArrayXd& flat) const {
  const auto& g = *grid_;
  const Eigen::Index n = nn();
  const int ns = g.ns(), nt = g.ntheta(), nz = g.nz();
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < nt; ++j) {
      const Eigen::Index b = g.idx(ns - 1, j, k);
      const Vec3 nrm = g.wall_normals()[j + static_cast<size_t>(nt) * k];
      const double un =
          nrm[0] * flat[b] + nrm[1] * flat[n + b] + nrm[2] * flat[2 * n + b];
      flat[b] -= un * nrm[0];
      flat[n + b] -= un * nrm[1];
      flat[2 * n + b] -= un * nrm[2];
    }
}

Eigen::ArrayXd DivCurlSolver::apply(const Eigen::ArrayXd& x) const {
  const Eigen::Index n = nn();
  Eigen::ArrayXd flat = scale_ * x;
  project_tangent(flat);
  const VectorField u = unflatten(grid_, flat);
  const VectorField cu = curl(u);
  const ScalarField du = divergence(u);
  Eigen::ArrayXd r(4 * n + 1);
  for (int c = 0; c < 3; ++c) r.segment(c * n, n) = sqrt_w_ * cu.comp(c);
  r.segment(3 * n, n) = sqrt_w_ * du.values;
  r[4 * n] = weighted_dot(u, harmonic_.field);
  return r;
}

Eigen::ArrayXd DivCurlSolver::apply_adjoint(const Eigen::ArrayXd& r) const {
  const auto& g = *grid_;
  const Eigen::Index n = nn();
  // curl^T
  Eigen::ArrayXd rx = sqrt_w_ * r.segment(0, n);
  Eigen::ArrayXd ry = sqrt_w_ * r.segment(n, n);
  Eigen::ArrayXd rz = sqrt_w_ * r.segment(2 * n, n);
  Eigen::ArrayXd ux = Eigen::ArrayXd::Zero(n), uy = ux, uz = ux;
  uz += g.cartesian_deriv_adjoint(rx, 1);
  uy -= g.cartesian_deriv_adjoint(rx, 2);
  ux += g.cartesian_deriv_adjoint(ry, 2);
  uz -= g.cartesian_deriv_adjoint(ry, 0);
  uy += g.cartesian_deriv_adjoint(rz, 0);
  ux -= g.cartesian_deriv_adjoint(rz, 1);
  // div^T
  const Eigen::ArrayXd rd = sqrt_w_ * r.segment(3 * n, n);
  ux += g.cartesian_deriv_adjoint(rd, 0);
  uy += g.cartesian_deriv_adjoint(rd, 1);
  uz += g.cartesian_deriv_adjoint(rd, 2);
  // projection row
  const double rp = r[4 * n];
  ux += rp * grid_->weights() * harmonic_.field.x;
  uy += rp * grid_->weights() * harmonic_.field.y;
  uz += rp * grid_->weights() * harmonic_.field.z;

  Eigen::ArrayXd flat(3 * n);
  flat.segment(0, n) = ux;
  flat.segment(n, n) = uy;
  flat.segment(2 * n, n) = uz;
  project_tangent(flat);
  return (scale_ * flat).eval();
}

void DivCurlSolver::check_compatibility(const VectorField& omega) const {
  const auto& g = *grid_;
  const double wsup = norm(omega, NormKind::Sup);
  if (wsup == 0.0) return;
  const ScalarField div_w = divergence(omega);
  double interior = 0.0;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j)
      for (int i = 0; i < g.ns(); ++i)
        if (g.interior_ring(i))
          interior = std::max(interior, std::abs(div_w.values[g.idx(i, j, k)]));
  if (interior > opts_.compat_div_tol * wsup)
    throw IncompatibleData("divcurl: interior div(omega) = " + std::to_string(interior) +
                           " exceeds " + std::to_string(opts_.compat_div_tol) +
                           " x sup|omega| = " + std::to_string(opts_.compat_div_tol * wsup));
  double flux = 0.0, area = 0.0;
  const int ns = g.ns();
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j) {
      const Eigen::Index b = g.idx(ns - 1, j, k);
      const Vec3 nrm = g.wall_normals()[j + static_cast<size_t>(g.ntheta()) * k];
      const double da = g.weights()[b] / (0.5 * g.ds_spacing());  // area element
      flux += da * (nrm[0] * omega.x[b] + nrm[1] * omega.y[b] + nrm[2] * omega.z[b]);
      area += da;
    }
  if (std::abs(flux) > opts_.compat_flux_tol * wsup * area)
    throw IncompatibleData("divcurl: net wall flux of omega = " + std::to_string(flux) +
                           " fails the compatibility pre-check");
}

VectorField DivCurlSolver::solve(const VectorField& omega, DivCurlStats* stats) {
  check_compatibility(omega);
  const Eigen::Index n = nn();
  Eigen::ArrayXd b(4 * n + 1);
  for (int c = 0; c < 3; ++c) b.segment(c * n, n) = sqrt_w_ * omega.comp(c);
  b.segment(3 * n, n).setZero();
  b[4 * n] = 0.0;

  Eigen::ArrayXd x =
      have_warm_ ? warm_ : Eigen::ArrayXd::Zero(3 * n).eval();
  Eigen::ArrayXd r = b - apply(x);
  Eigen::ArrayXd s = apply_adjoint(r);
  const double grad0 = std::sqrt((apply_adjoint(b).square()).sum());
  Eigen::ArrayXd p = s;
  double gamma = (s * s).sum();
  const int cap =
      static_cast<int>(opts_.iter_cap_factor * std::sqrt(3.0 * double(n))) + 10;
  int it = 0;
  for (; it < cap; ++it) {
    if (std::sqrt(gamma) <= opts_.tol * grad0) break;
    const Eigen::ArrayXd q = apply(p);
    const double qq = (q * q).sum();
    if (qq == 0.0) break;
    const double alpha = gamma / qq;
    x += alpha * p;
    r -= alpha * q;
    s = apply_adjoint(r);
    const double gamma_new = (s * s).sum();
    p = s + (gamma_new / gamma) * p;
    gamma = gamma_new;
  }
  const double grad_rel = grad0 > 0.0 ? std::sqrt(gamma) / grad0 : 0.0;
  if (grad_rel > opts_.tol && it >= cap)
    throw SolverDiverged("divcurl.solve: normal-equations residual " +
                         std::to_string(grad_rel) + " did not reach " +
                         std::to_string(opts_.tol) + " in " + std::to_string(cap) +
                         " iterations");
  warm_ = x;
  have_warm_ = true;

  Eigen::ArrayXd flat = scale_ * x;
  project_tangent(flat);
  VectorField u = unflatten(grid_, flat);
  // Exact harmonic projection on top of the appended row.
  const double proj = weighted_dot(u, harmonic_.field);
  u = axpy(-proj, harmonic_.field, u);

  if (stats) {
    stats->iterations = it;
    stats->grad_residual_rel = grad_rel;
    const double bn = std::sqrt(b.square().sum());
    stats->joint_residual_rel =
        bn > 0.0 ? std::sqrt((b - apply(x)).square().sum()) / bn : 0.0;
    stats->converged = grad_rel <= opts_.tol;
  }
  return u;
}

void DivCurlSolver::set_warm_start(const VectorField& u) {
  Eigen::ArrayXd flat = flatten(u);
  project_tangent(flat);
  warm_ = flat / scale_;
  have_warm_ = true;
}

VectorField solve_divcurl(const VectorField& omega, const HarmonicField& h,
                          DivCurlOptions opts, DivCurlStats* stats) {
  DivCurlSolver solver(omega.grid, h, opts);
  return solver.solve(omega, stats);
}

}  // namespace lortz
