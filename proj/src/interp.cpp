#include "lortz/interp.hpp"

#include <cmath>
#include <complex>

#include "lortz/base_state.hpp"
#include "lortz/errors.hpp"
#include "lortz/numeric.hpp"

namespace lortz {

namespace {
constexpr double kTwoPi = 2.0 * EIGEN_PI;
}

PerturbationInterpolant::PerturbationInterpolant(
    std::shared_ptr<const MappedGrid> grid, const BaseState& base,
    const VectorField& u)
    : grid_(std::move(grid)) {
  const VectorField ub = sample_base_velocity(grid_, base);
  for (int c = 0; c < 3; ++c) du_[c] = u.comp(c) - ub.comp(c);
  max_abs_ = 0.0;
  for (const auto& a : du_) max_abs_ = std::max(max_abs_, a.abs().maxCoeff());
  trivial_ = max_abs_ == 0.0;
  out_margin_ = 0.5 * grid_->ds_spacing();
}

Vec3 PerturbationInterpolant::eval(const Vec3& x) const {
  if (trivial_) return Vec3::Zero();
  const auto& g = *grid_;
  const auto& d = g.domain();
  const int ns = g.ns(), nt = g.ntheta(), nz = g.nz();

  const double r = std::hypot(x[0], x[1]);
  double theta = std::atan2(x[1], x[0]);
  if (theta < 0.0) theta += kTwoPi;
  double z = std::fmod(x[2], d.axial_period);
  if (z < 0.0) z += d.axial_period;
  const double s = r / d.wall_radius(theta, z);
  if (s > 1.0 + out_margin_)
    throw LeftDomain("fieldline: trajectory left the domain, s = " +
                     std::to_string(s));

  // theta and z stencils (periodic).
  const double ut = theta * nt / kTwoPi;
  int j0 = static_cast<int>(std::floor(ut));
  const double ft = ut - j0;
  const double uz = z * nz / d.axial_period;
  int k0 = static_cast<int>(std::floor(uz));
  const double fz = uz - k0;
  const Eigen::Vector4d wt = numeric::catmull_rom_weights(ft);
  const Eigen::Vector4d wz = numeric::catmull_rom_weights(fz);
  int js[4], ks[4];
  for (int q = 0; q < 4; ++q) {
    js[q] = ((j0 - 1 + q) % nt + nt) % nt;
    ks[q] = ((k0 - 1 + q) % nz + nz) % nz;
  }

  // Radial stencil: canonical Catmull-Rom when it fits, Lagrange on the
  // shifted stencil against the wall.
  const double us = s / g.ds_spacing() - 0.5;
  int i0 = static_cast<int>(std::floor(us));
  Eigen::Vector4d ws;
  int is[4];
  bool mirrored[4] = {false, false, false, false};
  if (i0 + 2 <= ns - 1) {
    ws = numeric::catmull_rom_weights(us - i0);
    for (int q = 0; q < 4; ++q) {
      int i = i0 - 1 + q;
      if (i < 0) {
        is[q] = -i - 1;
        mirrored[q] = true;
      } else {
        is[q] = i;
      }
    }
  } else {
    Eigen::Vector4d nodes;
    for (int q = 0; q < 4; ++q) {
      is[q] = ns - 4 + q;
      nodes[q] = g.s(is[q]);
    }
    const Eigen::VectorXd lw = numeric::lagrange_weights(s, nodes);
    ws = lw.head<4>();
  }

  Vec3 out = Vec3::Zero();
  for (int c = 0; c < 3; ++c) {
    const Eigen::ArrayXd& a = du_[c];
    double acc = 0.0;
    for (int qk = 0; qk < 4; ++qk) {
      double acc_j = 0.0;
      for (int qj = 0; qj < 4; ++qj) {
        double acc_i = 0.0;
        for (int qi = 0; qi < 4; ++qi) {
          const int j = mirrored[qi] ? g.mirror_j(js[qj]) : js[qj];
          acc_i += ws[qi] * a[g.idx(is[qi], j, ks[qk])];
        }
        acc_j += wt[qj] * acc_i;
      }
      acc += wz[qk] * acc_j;
    }
    out[c] = acc;
  }
  return out;
}

SpectralSampler::SpectralSampler(const ScalarField& f) : grid_(f.grid) {
  const auto& g = *grid_;
  const int ns = g.ns(), nt = g.ntheta(), nz = g.nz();
  using Cplx = std::complex<double>;
  Eigen::MatrixXcd Wt(nt, nt), Wz(nz, nz);
  for (int j = 0; j < nt; ++j)
    for (int kt = 0; kt < nt; ++kt)
      Wt(j, kt) = std::polar(1.0, -kTwoPi * j * kt / nt);
  for (int k = 0; k < nz; ++k)
    for (int kz = 0; kz < nz; ++kz)
      Wz(k, kz) = std::polar(1.0, -kTwoPi * k * kz / nz);
  coeffs_.resize(ns);
  Eigen::MatrixXcd plane(nt, nz);
  for (int i = 0; i < ns; ++i) {
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < nt; ++j)
        plane(j, k) = Cplx(f.values[g.idx(i, j, k)], 0.0);
    coeffs_[i] = (Wt.transpose() * plane * Wz) / (static_cast<double>(nt) * nz);
  }
}

double SpectralSampler::plane_value(int level, double theta, double z) const {
  const auto& g = *grid_;
  const int nt = g.ntheta(), nz = g.nz();
  const double zeta = kTwoPi * z / g.domain().axial_period;
  const Eigen::MatrixXcd& C = coeffs_[level];
  // Sum over z frequencies first, then theta frequencies.
  Eigen::VectorXcd zsum = Eigen::VectorXcd::Zero(nt);
  for (int kz = 0; kz < nz; ++kz) {
    const int fz = kz <= nz / 2 ? kz : kz - nz;
    // Nyquist mode evaluated as a cosine to keep the interpolant real.
    const std::complex<double> ph =
        (kz == nz / 2) ? std::complex<double>(std::cos(fz * zeta), 0.0)
                       : std::polar(1.0, fz * zeta);
    zsum += C.col(kz) * ph;
  }
  std::complex<double> acc(0.0, 0.0);
  for (int kt = 0; kt < nt; ++kt) {
    const int ft = kt <= nt / 2 ? kt : kt - nt;
    const std::complex<double> ph =
        (kt == nt / 2) ? std::complex<double>(std::cos(ft * theta), 0.0)
                       : std::polar(1.0, ft * theta);
    acc += zsum[kt] * ph;
  }
  return acc.real();
}

double SpectralSampler::eval(const Vec3& x) const {
  const auto& g = *grid_;
  const auto& d = g.domain();
  const double r = std::hypot(x[0], x[1]);
  double theta = std::atan2(x[1], x[0]);
  if (theta < 0.0) theta += kTwoPi;
  double z = std::fmod(x[2], d.axial_period);
  if (z < 0.0) z += d.axial_period;
  return eval_mapped(r / d.wall_radius(theta, z), theta, z);
}

double SpectralSampler::eval_mapped(double s, double theta, double z) const {
  const auto& g = *grid_;
  const int ns = g.ns();
  constexpr int kWidth = 6;
  const double us = s / g.ds_spacing() - 0.5;
  int lo = static_cast<int>(std::floor(us)) - kWidth / 2 + 1;
  if (lo + kWidth > ns) lo = ns - kWidth;
  if (lo < -2) lo = -2;  // at most two cross-axis levels
  Eigen::VectorXd nodes(kWidth);
  for (int q = 0; q < kWidth; ++q) nodes[q] = (lo + q + 0.5) * g.ds_spacing();
  const Eigen::VectorXd w = numeric::lagrange_weights(s, nodes);
  double acc = 0.0;
  for (int q = 0; q < kWidth; ++q) {
    const int i = lo + q;
    const double v = (i < 0) ? plane_value(-i - 1, theta + EIGEN_PI, z)
                             : plane_value(i, theta, z);
    acc += w[q] * v;
  }
  return acc;
}

}  // namespace lortz
