#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <memory>
#include <vector>

#include "lortz/geometry.hpp"

namespace lortz {

class BaseState;

enum class Parity { Odd, Even, None };
enum class NormKind { Sup, L2, C1 };

// Structured grid on the mapped cube (s, theta, z) in (0,1] x [0,2pi) x [0,L).
// Radial nodes sit at s_i = (i + 1/2) h with h = 2/(2 n_s - 1), so the first
// node keeps half a spacing away from the coordinate singularity at the axis
// and the last node lies exactly on the wall.
//
// Derivatives: Fourier differentiation matrices in theta and z (exact for
// resolvable modes), centered finite differences of configurable order in s.
// Radial stencils that reach below the first node pull values from the
// theta + pi column instead (the smooth continuation across the axis; exact
// whenever the wall has even symmetry order, which validate() guarantees for
// the default even-m setups). The wall end always uses one-sided stencils.
class MappedGrid {
public:
  MappedGrid(const DomainSpec& d, int radial_order = 4);

  const DomainSpec& domain() const { return domain_; }
  int radial_order() const { return radial_order_; }
  int ns() const { return domain_.grid.n_s; }
  int ntheta() const { return domain_.grid.n_theta; }
  int nz() const { return domain_.grid.n_z; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(ns()) * ntheta() * nz(); }

  Eigen::Index idx(int i, int j, int k) const {
    return i + static_cast<Eigen::Index>(ns()) * (j + static_cast<Eigen::Index>(ntheta()) * k);
  }
  double s(int i) const { return s_[i]; }
  double theta(int j) const { return theta_[j]; }
  double z(int k) const { return z_[k]; }
  double ds_spacing() const { return h_s_; }

  MappedPoint node(int i, int j, int k) const { return {s_[i], theta_[j], z_[k]}; }
  Vec3 node_cartesian(Eigen::Index n) const {
    return {x_[n], y_[n], z_node_[n]};
  }

  // Per-node geometry (flat arrays of length size()).
  const Eigen::ArrayXd& cyl_radius() const { return r_; }
  const Eigen::ArrayXd& weights() const { return w_; }  // volume weights
  double volume() const { return w_.sum(); }
  // Cartesian gradients of the mapped coordinates at every node.
  const Eigen::ArrayXd& grad_coord(int coord, int comp) const {
    return grad_coord_[coord][comp];
  }

  // Wall data at boundary nodes (i = ns-1), indexed by j + ntheta * k.
  const std::vector<Vec3>& wall_normals() const { return wall_normal_; }
  const std::vector<Vec3>& wall_tangent1() const { return wall_t1_; }
  const std::vector<Vec3>& wall_tangent2() const { return wall_t2_; }

  // Index maps for the discrete symmetries.
  int reflect_j(int j) const { return (ntheta() - j) % ntheta(); }
  int mirror_j(int j) const { return (j + ntheta() / 2) % ntheta(); }
  int rotate_j(int j, int steps) const {
    return (j + steps % ntheta() + ntheta()) % ntheta();
  }

  // Axis collar: nodes with s < 2 h (always the innermost two rings).
  double s_axis() const { return 2.0 * h_s_; }
  int first_traced_ring() const { return 2; }

  // Interior mask for residual diagnostics: excludes the collar, the blend
  // ring, and the one-sided rows near the wall.
  bool interior_ring(int i) const {
    return i >= 3 && i <= ns() - 1 - std::max(2, radial_order_ / 2);
  }

  // Pencil derivative drivers. `mirror_axis` selects the cross-axis
  // continuation for the innermost stencils (one-sided rows otherwise).
  Eigen::ArrayXd d_s(const Eigen::ArrayXd& f, bool mirror_axis) const;
  Eigen::ArrayXd d_theta(const Eigen::ArrayXd& f) const;           // spectral
  Eigen::ArrayXd d_theta_onesided(const Eigen::ArrayXd& f) const;  // cut fields
  Eigen::ArrayXd d_z(const Eigen::ArrayXd& f) const;               // spectral
  // Adjoints with respect to the plain (unweighted) dot product.
  Eigen::ArrayXd d_s_adjoint(const Eigen::ArrayXd& f, bool mirror_axis) const;
  Eigen::ArrayXd d_theta_adjoint(const Eigen::ArrayXd& f) const;
  Eigen::ArrayXd d_z_adjoint(const Eigen::ArrayXd& f) const;

  // Cartesian partial d/dx_c of a single-valued scalar sample array.
  Eigen::ArrayXd cartesian_deriv(const Eigen::ArrayXd& f, int comp) const;
  Eigen::ArrayXd cartesian_deriv_adjoint(const Eigen::ArrayXd& f, int comp) const;

private:
  DomainSpec domain_;
  int radial_order_;
  double h_s_ = 0.0;
  Eigen::VectorXd s_, theta_, z_;
  Eigen::VectorXd cos_t_, sin_t_;
  Eigen::ArrayXd x_, y_, z_node_, r_, w_;
  Eigen::ArrayXd grad_coord_[3][3];
  std::vector<Vec3> wall_normal_, wall_t1_, wall_t2_;

  // Radial differentiation: Ds_main acts on the pencil itself, Ds_ghost on
  // the leading values of the theta + pi pencil (cross-axis continuation).
  Eigen::MatrixXd Ds_main_, Ds_ghost_, Ds_onesided_;
  Eigen::MatrixXd Dtheta_, Dtheta_onesided_, Dz_;

  Eigen::ArrayXd apply_theta(const Eigen::ArrayXd& f, const Eigen::MatrixXd& D) const;
  Eigen::ArrayXd apply_z(const Eigen::ArrayXd& f, const Eigen::MatrixXd& D) const;
};

struct ScalarField {
  std::shared_ptr<const MappedGrid> grid;
  Eigen::ArrayXd values;
  bool cut = false;  // lives on the cut domain, jumps across {theta = 0, x1 > 0}

  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const MappedGrid> g, bool cut_flag = false)
      : grid(std::move(g)), values(Eigen::ArrayXd::Zero(grid->size())), cut(cut_flag) {}
};

struct VectorField {
  std::shared_ptr<const MappedGrid> grid;
  Eigen::ArrayXd x, y, z;  // Cartesian components on the mapped grid

  VectorField() = default;
  explicit VectorField(std::shared_ptr<const MappedGrid> g)
      : grid(std::move(g)),
        x(Eigen::ArrayXd::Zero(grid->size())),
        y(Eigen::ArrayXd::Zero(grid->size())),
        z(Eigen::ArrayXd::Zero(grid->size())) {}

  Eigen::ArrayXd& comp(int c) { return c == 0 ? x : (c == 1 ? y : z); }
  const Eigen::ArrayXd& comp(int c) const { return c == 0 ? x : (c == 1 ? y : z); }
  Vec3 at(Eigen::Index n) const { return {x[n], y[n], z[n]}; }
};

// Sampling helpers.
ScalarField sample_scalar(std::shared_ptr<const MappedGrid> g,
                          const std::function<double(const Vec3&)>& f);
VectorField sample_vector(std::shared_ptr<const MappedGrid> g,
                          const std::function<Vec3(const Vec3&)>& f);
VectorField sample_base_velocity(std::shared_ptr<const MappedGrid> g,
                                 const BaseState& base);

// Differential operators (throw CutFieldRequiresJump on cut scalar fields).
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
VectorField curl(const VectorField& v);
// Gradient of a cut field: one-sided theta stencils within two cells of the
// cut, regular stencils elsewhere.
VectorField gradient_cut(const ScalarField& f);

// Pullback by the reflection across {x2 = 0} and parity measures.
VectorField reflect(const VectorField& v);
ScalarField reflect(const ScalarField& f);
double parity_residual(const VectorField& v, Parity p);
double parity_residual(const ScalarField& f, Parity p);

// Average of the m rotated copies (a projection onto the m-fold class).
VectorField symmetrize_mfold(const VectorField& v, int m);
ScalarField symmetrize_mfold(const ScalarField& f, int m);
// Pullback by rotation about the axis by `steps` grid increments.
VectorField rotate_pullback(const VectorField& v, int steps);

double norm(const VectorField& v, NormKind kind);
double norm(const ScalarField& f, NormKind kind);
double weighted_dot(const VectorField& a, const VectorField& b);

// Field arithmetic used by the iteration.
VectorField axpy(double alpha, const VectorField& x, const VectorField& y);
double sup_difference(const VectorField& a, const VectorField& b);

}  // namespace lortz
