#include "lortz/fields.hpp"

#include <cmath>

#include "lortz/base_state.hpp"
#include "lortz/errors.hpp"
#include "lortz/numeric.hpp"

namespace lortz {

namespace {
constexpr double kTwoPi = 2.0 * EIGEN_PI;

// Spectral differentiation matrix for n equispaced nodes over a period P.
Eigen::MatrixXd spectral_matrix(int n, double period) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  const double scale = kTwoPi / period;
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      if (j == l) continue;
      const int d = j - l;
      const double sgn = (d % 2 == 0) ? 1.0 : -1.0;
      D(j, l) = scale * 0.5 * sgn / std::tan(EIGEN_PI * d / n);
    }
  }
  return D;
}

// Periodic finite-difference matrix of the given order, with the rows within
// order/2 cells of the seam using one-sided stencils instead of wrapping.
// This is the theta derivative for fields that jump across the cut.
Eigen::MatrixXd fd_matrix_cut(int n, double period, int order) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  const double h = period / n;
  const int p = order / 2;
  const int width = order + 1;
  for (int j = 0; j < n; ++j) {
    int lo = j - p;
    if (lo < 0) lo = 0;
    if (lo + width > n) lo = n - width;
    Eigen::VectorXd nodes(width);
    for (int q = 0; q < width; ++q) nodes[q] = (lo + q) * h;
    const Eigen::VectorXd w = numeric::fd_weights(j * h, nodes, 1);
    for (int q = 0; q < width; ++q) D(j, lo + q) = w[q];
  }
  return D;
}

}  // namespace

MappedGrid::MappedGrid(const DomainSpec& d, int radial_order)
    : domain_(d), radial_order_(radial_order) {
  domain_.validate();
  if (radial_order_ != 4 && radial_order_ != 6 && radial_order_ != 8)
    throw ConfigError("fields: radial_order must be 4, 6 or 8");
  const int ns = d.grid.n_s, nt = d.grid.n_theta, nz = d.grid.n_z;
  if (ns < radial_order_ + 1)
    throw ConfigError("fields: n_s too small for the radial stencil order");

  h_s_ = 2.0 / (2.0 * ns - 1.0);
  s_.resize(ns);
  for (int i = 0; i < ns; ++i) s_[i] = (i + 0.5) * h_s_;
  theta_.resize(nt);
  for (int j = 0; j < nt; ++j) theta_[j] = kTwoPi * j / nt;
  z_.resize(nz);
  for (int k = 0; k < nz; ++k) z_[k] = d.axial_period * k / nz;

  // Trig tables with bitwise reflection symmetry, so index-level parity
  // operations commute exactly with sampling.
  cos_t_.resize(nt);
  sin_t_.resize(nt);
  for (int j = 0; j <= nt / 2; ++j) {
    cos_t_[j] = std::cos(theta_[j]);
    sin_t_[j] = std::sin(theta_[j]);
  }
  cos_t_[nt / 2] = -1.0;  // nodes on the symmetry plane are exact
  sin_t_[nt / 2] = 0.0;
  for (int j = nt / 2 + 1; j < nt; ++j) {
    cos_t_[j] = cos_t_[nt - j];
    sin_t_[j] = -sin_t_[nt - j];
  }

  const Eigen::Index total = size();
  x_.resize(total);
  y_.resize(total);
  z_node_.resize(total);
  r_.resize(total);
  w_.resize(total);
  for (auto& row : grad_coord_)
    for (auto& a : row) a.resize(total);

  // Wall radius tables, mirrored across the symmetry plane so the even shape
  // is bitwise even on the grid (its theta derivative is bitwise odd).
  Eigen::MatrixXd wallR(nt, nz), wallRt(nt, nz), wallRz(nt, nz);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j <= nt / 2; ++j) {
      wallR(j, k) = d.wall_radius(theta_[j], z_[k]);
      wallRt(j, k) = d.wall_radius_dtheta(theta_[j], z_[k]);
      wallRz(j, k) = d.wall_radius_dz(theta_[j], z_[k]);
    }
    wallRt(0, k) = 0.0;
    wallRt(nt / 2, k) = 0.0;
    for (int j = nt / 2 + 1; j < nt; ++j) {
      wallR(j, k) = wallR(nt - j, k);
      wallRt(j, k) = -wallRt(nt - j, k);
      wallRz(j, k) = wallRz(nt - j, k);
    }
  }

  const double dtheta = kTwoPi / nt;
  const double dz = d.axial_period / nz;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < nt; ++j) {
      const double zz = z_[k];
      const double R = wallR(j, k);
      const double Rt = wallRt(j, k);
      const double Rz = wallRz(j, k);
      const double c = cos_t_[j], sn = sin_t_[j];
      for (int i = 0; i < ns; ++i) {
        const Eigen::Index n = idx(i, j, k);
        const double sv = s_[i];
        const double r = sv * R;
        x_[n] = r * c;
        y_[n] = r * sn;
        z_node_[n] = zz;
        r_[n] = r;
        double wt = sv * R * R * h_s_ * dtheta * dz;
        if (i == ns - 1) wt *= 0.5;  // half cell against the wall
        w_[n] = wt;
        // grad s = e_r / R - (R_theta / R^2) e_theta - (s R_z / R) e_z
        grad_coord_[0][0][n] = c / R - (Rt / (R * R)) * (-sn);
        grad_coord_[0][1][n] = sn / R - (Rt / (R * R)) * c;
        grad_coord_[0][2][n] = -sv * Rz / R;
        // grad theta = e_theta / r
        grad_coord_[1][0][n] = -sn / r;
        grad_coord_[1][1][n] = c / r;
        grad_coord_[1][2][n] = 0.0;
        // grad z = e_z
        grad_coord_[2][0][n] = 0.0;
        grad_coord_[2][1][n] = 0.0;
        grad_coord_[2][2][n] = 1.0;
      }
    }
  }

  wall_normal_.resize(static_cast<size_t>(nt) * nz);
  wall_t1_.resize(wall_normal_.size());
  wall_t2_.resize(wall_normal_.size());
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < nt; ++j) {
      const Vec3 n = boundary_normal(theta_[j], z_[k], d);
      Vec3 t1 = n.cross(Vec3::UnitZ());
      t1.normalize();
      const Vec3 t2 = n.cross(t1);
      const size_t b = j + static_cast<size_t>(nt) * k;
      wall_normal_[b] = n;
      wall_t1_[b] = t1;
      wall_t2_[b] = t2;
    }
  }

  // Radial differentiation matrices.
  const int p = radial_order_ / 2;
  const int width = radial_order_ + 1;
  Ds_main_ = Eigen::MatrixXd::Zero(ns, ns);
  Ds_ghost_ = Eigen::MatrixXd::Zero(ns, p);
  Ds_onesided_ = Eigen::MatrixXd::Zero(ns, ns);
  for (int i = 0; i < ns; ++i) {
    // Centered stencil, pulled inward at the wall.
    int lo = i - p;
    if (lo + width > ns) lo = ns - width;
    Eigen::VectorXd nodes(width);
    for (int q = 0; q < width; ++q) {
      const int t = lo + q;
      nodes[q] = (t + 0.5) * h_s_;  // t < 0 encodes the cross-axis ghost
    }
    const Eigen::VectorXd wgt = numeric::fd_weights(s_[i], nodes, 1);
    for (int q = 0; q < width; ++q) {
      const int t = lo + q;
      if (t >= 0)
        Ds_main_(i, t) = wgt[q];
      else
        Ds_ghost_(i, -t - 1) = wgt[q];
    }
    // One-sided variant: shift the stencil into [0, ns).
    int lo2 = std::clamp(i - p, 0, ns - width);
    Eigen::VectorXd nodes2(width);
    for (int q = 0; q < width; ++q) nodes2[q] = (lo2 + q + 0.5) * h_s_;
    const Eigen::VectorXd wgt2 = numeric::fd_weights(s_[i], nodes2, 1);
    for (int q = 0; q < width; ++q) Ds_onesided_(i, lo2 + q) = wgt2[q];
  }

  Dtheta_ = spectral_matrix(nt, kTwoPi);
  Dtheta_onesided_ = fd_matrix_cut(nt, kTwoPi, 4);
  Dz_ = spectral_matrix(nz, d.axial_period);
}

Eigen::ArrayXd MappedGrid::d_s(const Eigen::ArrayXd& f, bool mirror_axis) const {
  const int ns_ = ns();
  const Eigen::Index cols = static_cast<Eigen::Index>(ntheta()) * nz();
  Eigen::Map<const Eigen::MatrixXd> F(f.data(), ns_, cols);
  Eigen::ArrayXd out(f.size());
  Eigen::Map<Eigen::MatrixXd> Y(out.data(), ns_, cols);
  if (!mirror_axis) {
    Y.noalias() = Ds_onesided_ * F;
    return out;
  }
  Y.noalias() = Ds_main_ * F;
  // Ghost contribution: leading rows of the theta + pi pencil.
  const int p = static_cast<int>(Ds_ghost_.cols());
  const int nt = ntheta(), nzv = nz();
  Eigen::MatrixXd Fg(p, cols);
  for (int k = 0; k < nzv; ++k)
    for (int j = 0; j < nt; ++j)
      Fg.col(j + static_cast<Eigen::Index>(nt) * k) =
          F.col(mirror_j(j) + static_cast<Eigen::Index>(nt) * k).head(p);
  Y.noalias() += Ds_ghost_ * Fg;
  return out;
}

Eigen::ArrayXd MappedGrid::d_s_adjoint(const Eigen::ArrayXd& f, bool mirror_axis) const {
  const int ns_ = ns();
  const Eigen::Index cols = static_cast<Eigen::Index>(ntheta()) * nz();
  Eigen::Map<const Eigen::MatrixXd> F(f.data(), ns_, cols);
  Eigen::ArrayXd out(f.size());
  Eigen::Map<Eigen::MatrixXd> Y(out.data(), ns_, cols);
  if (!mirror_axis) {
    Y.noalias() = Ds_onesided_.transpose() * F;
    return out;
  }
  Y.noalias() = Ds_main_.transpose() * F;
  Eigen::MatrixXd Xg = Ds_ghost_.transpose() * F;  // p x cols
  const int p = static_cast<int>(Ds_ghost_.cols());
  const int nt = ntheta(), nzv = nz();
  for (int k = 0; k < nzv; ++k)
    for (int j = 0; j < nt; ++j)
      Y.col(mirror_j(j) + static_cast<Eigen::Index>(nt) * k).head(p) +=
          Xg.col(j + static_cast<Eigen::Index>(nt) * k);
  return out;
}

Eigen::ArrayXd MappedGrid::apply_theta(const Eigen::ArrayXd& f,
                                       const Eigen::MatrixXd& D) const {
  const int ns_ = ns(), nt = ntheta(), nzv = nz();
  Eigen::ArrayXd out(f.size());
  const Eigen::Index plane = static_cast<Eigen::Index>(ns_) * nt;
  for (int k = 0; k < nzv; ++k) {
    Eigen::Map<const Eigen::MatrixXd> F(f.data() + k * plane, ns_, nt);
    Eigen::Map<Eigen::MatrixXd> Y(out.data() + k * plane, ns_, nt);
    Y.noalias() = F * D.transpose();
  }
  return out;
}

Eigen::ArrayXd MappedGrid::d_theta(const Eigen::ArrayXd& f) const {
  return apply_theta(f, Dtheta_);
}

Eigen::ArrayXd MappedGrid::d_theta_onesided(const Eigen::ArrayXd& f) const {
  return apply_theta(f, Dtheta_onesided_);
}

Eigen::ArrayXd MappedGrid::d_theta_adjoint(const Eigen::ArrayXd& f) const {
  // Spectral D is antisymmetric but go through the generic path anyway.
  const int ns_ = ns(), nt = ntheta(), nzv = nz();
  Eigen::ArrayXd out(f.size());
  const Eigen::Index plane = static_cast<Eigen::Index>(ns_) * nt;
  for (int k = 0; k < nzv; ++k) {
    Eigen::Map<const Eigen::MatrixXd> F(f.data() + k * plane, ns_, nt);
    Eigen::Map<Eigen::MatrixXd> Y(out.data() + k * plane, ns_, nt);
    Y.noalias() = F * Dtheta_;
  }
  return out;
}

Eigen::ArrayXd MappedGrid::d_z(const Eigen::ArrayXd& f) const {
  const Eigen::Index rows = static_cast<Eigen::Index>(ns()) * ntheta();
  Eigen::Map<const Eigen::MatrixXd> F(f.data(), rows, nz());
  Eigen::ArrayXd out(f.size());
  Eigen::Map<Eigen::MatrixXd> Y(out.data(), rows, nz());
  Y.noalias() = F * Dz_.transpose();
  return out;
}

Eigen::ArrayXd MappedGrid::d_z_adjoint(const Eigen::ArrayXd& f) const {
  const Eigen::Index rows = static_cast<Eigen::Index>(ns()) * ntheta();
  Eigen::Map<const Eigen::MatrixXd> F(f.data(), rows, nz());
  Eigen::ArrayXd out(f.size());
  Eigen::Map<Eigen::MatrixXd> Y(out.data(), rows, nz());
  Y.noalias() = F * Dz_;
  return out;
}

Eigen::ArrayXd MappedGrid::cartesian_deriv(const Eigen::ArrayXd& f, int comp) const {
  Eigen::ArrayXd out = grad_coord_[0][comp] * d_s(f, true);
  out += grad_coord_[1][comp] * d_theta(f);
  out += grad_coord_[2][comp] * d_z(f);
  return out;
}

Eigen::ArrayXd MappedGrid::cartesian_deriv_adjoint(const Eigen::ArrayXd& f,
                                                   int comp) const {
  Eigen::ArrayXd out = d_s_adjoint((grad_coord_[0][comp] * f).eval(), true);
  out += d_theta_adjoint((grad_coord_[1][comp] * f).eval());
  out += d_z_adjoint((grad_coord_[2][comp] * f).eval());
  return out;
}

ScalarField sample_scalar(std::shared_ptr<const MappedGrid> g,
                          const std::function<double(const Vec3&)>& f) {
  ScalarField out(g);
  for (Eigen::Index n = 0; n < g->size(); ++n) out.values[n] = f(g->node_cartesian(n));
  return out;
}

VectorField sample_vector(std::shared_ptr<const MappedGrid> g,
                          const std::function<Vec3(const Vec3&)>& f) {
  VectorField out(g);
  for (Eigen::Index n = 0; n < g->size(); ++n) {
    const Vec3 v = f(g->node_cartesian(n));
    out.x[n] = v[0];
    out.y[n] = v[1];
    out.z[n] = v[2];
  }
  return out;
}

VectorField sample_base_velocity(std::shared_ptr<const MappedGrid> g,
                                 const BaseState& base) {
  return sample_vector(std::move(g), [&base](const Vec3& x) { return base.velocity(x); });
}

VectorField gradient(const ScalarField& f) {
  if (f.cut)
    throw CutFieldRequiresJump(
        "fields.gradient: cut field differentiated without jump data; use "
        "gradient_cut");
  VectorField out(f.grid);
  for (int c = 0; c < 3; ++c) out.comp(c) = f.grid->cartesian_deriv(f.values, c);
  return out;
}

VectorField gradient_cut(const ScalarField& f) {
  const auto& g = *f.grid;
  const Eigen::ArrayXd fs = g.d_s(f.values, true);
  const Eigen::ArrayXd ft = g.d_theta_onesided(f.values);
  const Eigen::ArrayXd fz = g.d_z(f.values);
  VectorField out(f.grid);
  for (int c = 0; c < 3; ++c)
    out.comp(c) = g.grad_coord(0, c) * fs + g.grad_coord(1, c) * ft +
                  g.grad_coord(2, c) * fz;
  return out;
}

ScalarField divergence(const VectorField& v) {
  ScalarField out(v.grid);
  out.values = v.grid->cartesian_deriv(v.x, 0);
  out.values += v.grid->cartesian_deriv(v.y, 1);
  out.values += v.grid->cartesian_deriv(v.z, 2);
  return out;
}

VectorField curl(const VectorField& v) {
  const auto& g = *v.grid;
  VectorField out(v.grid);
  out.x = g.cartesian_deriv(v.z, 1) - g.cartesian_deriv(v.y, 2);
  out.y = g.cartesian_deriv(v.x, 2) - g.cartesian_deriv(v.z, 0);
  out.z = g.cartesian_deriv(v.y, 0) - g.cartesian_deriv(v.x, 1);
  return out;
}

VectorField reflect(const VectorField& v) {
  const auto& g = *v.grid;
  VectorField out(v.grid);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j) {
      const int jr = g.reflect_j(j);
      for (int i = 0; i < g.ns(); ++i) {
        const Eigen::Index a = g.idx(i, j, k), b = g.idx(i, jr, k);
        out.x[a] = v.x[b];
        out.y[a] = -v.y[b];
        out.z[a] = v.z[b];
      }
    }
  return out;
}

ScalarField reflect(const ScalarField& f) {
  const auto& g = *f.grid;
  ScalarField out(f.grid, f.cut);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j) {
      const int jr = g.reflect_j(j);
      for (int i = 0; i < g.ns(); ++i)
        out.values[g.idx(i, j, k)] = f.values[g.idx(i, jr, k)];
    }
  return out;
}

double parity_residual(const VectorField& v, Parity p) {
  if (p == Parity::None) return 0.0;
  const VectorField r = reflect(v);
  const double sgn = (p == Parity::Odd) ? 1.0 : -1.0;
  double m = 0.0;
  for (int c = 0; c < 3; ++c)
    m = std::max(m, (v.comp(c) + sgn * r.comp(c)).abs().maxCoeff());
  return m;
}

double parity_residual(const ScalarField& f, Parity p) {
  if (p == Parity::None) return 0.0;
  const ScalarField r = reflect(f);
  const double sgn = (p == Parity::Odd) ? 1.0 : -1.0;
  return (f.values + sgn * r.values).abs().maxCoeff();
}

VectorField rotate_pullback(const VectorField& v, int steps) {
  const auto& g = *v.grid;
  const double alpha = kTwoPi * steps / g.ntheta();
  const double c = std::cos(alpha), sn = std::sin(alpha);
  VectorField out(v.grid);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j) {
      const int js = g.rotate_j(j, steps);
      for (int i = 0; i < g.ns(); ++i) {
        const Eigen::Index a = g.idx(i, j, k), b = g.idx(i, js, k);
        // Components rotate back by alpha under the pullback.
        out.x[a] = c * v.x[b] + sn * v.y[b];
        out.y[a] = -sn * v.x[b] + c * v.y[b];
        out.z[a] = v.z[b];
      }
    }
  return out;
}

VectorField symmetrize_mfold(const VectorField& v, int m) {
  const auto& g = *v.grid;
  if (g.ntheta() % m != 0)
    throw ConfigError("fields.symmetrize_mfold: n_theta not a multiple of m");
  const int shift = g.ntheta() / m;
  VectorField acc = v;
  for (int a = 1; a < m; ++a) {
    const VectorField r = rotate_pullback(v, a * shift);
    acc.x += r.x;
    acc.y += r.y;
    acc.z += r.z;
  }
  acc.x /= m;
  acc.y /= m;
  acc.z /= m;
  return acc;
}

ScalarField symmetrize_mfold(const ScalarField& f, int m) {
  const auto& g = *f.grid;
  if (g.ntheta() % m != 0)
    throw ConfigError("fields.symmetrize_mfold: n_theta not a multiple of m");
  const int shift = g.ntheta() / m;
  ScalarField out(f.grid, f.cut);
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ntheta(); ++j)
      for (int i = 0; i < g.ns(); ++i) {
        double acc = 0.0;
        for (int a = 0; a < m; ++a)
          acc += f.values[g.idx(i, g.rotate_j(j, a * shift), k)];
        out.values[g.idx(i, j, k)] = acc / m;
      }
  return out;
}

double norm(const VectorField& v, NormKind kind) {
  const auto& g = *v.grid;
  switch (kind) {
    case NormKind::Sup: {
      double m = 0.0;
      for (int c = 0; c < 3; ++c) m = std::max(m, v.comp(c).abs().maxCoeff());
      return m;
    }
    case NormKind::L2: {
      const Eigen::ArrayXd sq = v.x.square() + v.y.square() + v.z.square();
      return std::sqrt((g.weights() * sq).sum());
    }
    case NormKind::C1: {
      double m = norm(v, NormKind::Sup);
      double dm = 0.0;
      for (int c = 0; c < 3; ++c)
        for (int cc = 0; cc < 3; ++cc)
          dm = std::max(dm, g.cartesian_deriv(v.comp(c), cc).abs().maxCoeff());
      return m + dm;
    }
  }
  return 0.0;
}

double norm(const ScalarField& f, NormKind kind) {
  const auto& g = *f.grid;
  switch (kind) {
    case NormKind::Sup:
      return f.values.abs().maxCoeff();
    case NormKind::L2:
      return std::sqrt((g.weights() * f.values.square()).sum());
    case NormKind::C1: {
      double dm = 0.0;
      for (int c = 0; c < 3; ++c)
        dm = std::max(dm, g.cartesian_deriv(f.values, c).abs().maxCoeff());
      return f.values.abs().maxCoeff() + dm;
    }
  }
  return 0.0;
}

double weighted_dot(const VectorField& a, const VectorField& b) {
  const Eigen::ArrayXd dot = a.x * b.x + a.y * b.y + a.z * b.z;
  return (a.grid->weights() * dot).sum();
}

VectorField axpy(double alpha, const VectorField& x, const VectorField& y) {
  VectorField out(y.grid);
  out.x = alpha * x.x + y.x;
  out.y = alpha * x.y + y.y;
  out.z = alpha * x.z + y.z;
  return out;
}

double sup_difference(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c)
    m = std::max(m, (a.comp(c) - b.comp(c)).abs().maxCoeff());
  return m;
}

}  // namespace lortz
