#pragma once

#include <Eigen/Dense>
#include <functional>

namespace lortz::numeric {

// Finite-difference weights for the m-th derivative at x0 from arbitrary
// nodes (Fornberg's recurrence). Returns one weight per node.
Eigen::VectorXd fd_weights(double x0, const Eigen::VectorXd& nodes, int deriv_order);

// Adaptive Gauss-Kronrod (G7,K15) quadrature to an absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12);

// Root of a continuous monotone function on [lo, hi] by safeguarded
// Newton/bisection. fprime may be empty (pure bisection then).
double solve_monotone(const std::function<double(double)>& f,
                      const std::function<double(double)>& fprime, double lo,
                      double hi, double tol = 1e-14);

// Polynomial helpers on coefficient vectors c0 + c1 x + c2 x^2 + ...
double poly_eval(const Eigen::VectorXd& c, double x);
Eigen::VectorXd poly_derivative(const Eigen::VectorXd& c);

// Least-squares line fit y ~ a + b x; returns {a, b, r_squared}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};
LineFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Catmull-Rom weights for the 4-node stencil around t in [0,1].
inline Eigen::Vector4d catmull_rom_weights(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
          0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)};
}

// Lagrange interpolation weights at x for arbitrary nodes.
Eigen::VectorXd lagrange_weights(double x, const Eigen::VectorXd& nodes);

inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace lortz::numeric
