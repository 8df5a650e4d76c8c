#include "lortz/numeric.hpp"

#include <cmath>
#include <stdexcept>

#include "lortz/errors.hpp"

namespace lortz::numeric {

Eigen::VectorXd fd_weights(double x0, const Eigen::VectorXd& nodes, int m) {
  // B. Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const int n = static_cast<int>(nodes.size()) - 1;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n + 1, m + 1);
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j <= i - 1; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

namespace {

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss rule.
constexpr double kKronrodNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kKronrodWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kGaussWeights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct GK {
  double kronrod;
  double error;
};

GK gk15(const std::function<double(double)>& f, double a, double b) {
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double v = f(c + h * kKronrodNodes[i]);
    k += kKronrodWeights[i] * v;
    if (i % 2 == 1) g += kGaussWeights[i / 2] * v;
  }
  return {k * h, std::abs((k - g) * h)};
}

double integrate_rec(const std::function<double(double)>& f, double a, double b,
                     double tol, const GK& whole, int depth) {
  if (depth > 60)
    throw SolverDiverged("numeric.integrate: adaptive quadrature failed to converge");
  const double c = 0.5 * (a + b);
  const GK left = gk15(f, a, c);
  const GK right = gk15(f, c, b);
  if (left.error + right.error <= tol || whole.error <= tol)
    return left.kronrod + right.kronrod;
  return integrate_rec(f, a, c, 0.5 * tol, left, depth + 1) +
         integrate_rec(f, c, b, 0.5 * tol, right, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  if (a == b) return 0.0;
  const GK whole = gk15(f, a, b);
  if (whole.error <= abs_tol) return whole.kronrod;
  return integrate_rec(f, a, b, abs_tol, whole, 0);
}

double solve_monotone(const std::function<double(double)>& f,
                      const std::function<double(double)>& fprime, double lo,
                      double hi, double tol) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    throw SolverDiverged("numeric.solve_monotone: root not bracketed");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double fx = f(x);
    if (fx == 0.0) return x;
    if (fx * flo < 0.0) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    double next = 0.0;
    bool newton_ok = false;
    if (fprime) {
      const double d = fprime(x);
      if (d != 0.0) {
        next = x - fx / d;
        newton_ok = next > lo && next < hi;
      }
    }
    if (!newton_ok) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= tol * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

double poly_eval(const Eigen::VectorXd& c, double x) {
  double v = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) v = v * x + c[i];
  return v;
}

Eigen::VectorXd poly_derivative(const Eigen::VectorXd& c) {
  if (c.size() <= 1) return Eigen::VectorXd::Zero(1);
  Eigen::VectorXd d(c.size() - 1);
  for (int i = 1; i < c.size(); ++i) d[i - 1] = i * c[i];
  return d;
}

LineFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  LineFit out;
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2 || x.size() != y.size()) return out;
  const double mx = x.mean(), my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  const double syy = (y.array() - my).square().sum();
  if (sxx == 0.0) return out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  (void)n;
  return out;
}

Eigen::VectorXd lagrange_weights(double x, const Eigen::VectorXd& nodes) {
  const int n = static_cast<int>(nodes.size());
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      p *= (x - nodes[j]) / (nodes[i] - nodes[j]);
    }
    w[i] = p;
  }
  return w;
}

}  // namespace lortz::numeric
