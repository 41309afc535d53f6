#pragma once

// Small dense quasi-Newton minimizer with central-difference gradients.
// Used for low-dimensional parameter searches (group displacements).

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace gcsieve::detail {

struct BfgsResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Minimizes f from x0. f may return +inf to reject a point (outside a domain).
inline BfgsResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                                Eigen::VectorXd x0, int max_iter, double fd_step,
                                double grad_tol = 1e-10) {
  const Eigen::Index n = x0.size();
  auto gradient = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(n);
    Eigen::VectorXd xp = x;
    for (Eigen::Index k = 0; k < n; ++k) {
      xp(k) = x(k) + fd_step;
      const double fp = f(xp);
      xp(k) = x(k) - fd_step;
      const double fm = f(xp);
      xp(k) = x(k);
      g(k) = (std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / (2.0 * fd_step) : 0.0;
    }
    return g;
  };

  BfgsResult res;
  res.x = std::move(x0);
  res.value = f(res.x);
  if (!std::isfinite(res.value)) return res;
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = gradient(res.x);
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    if (g.norm() <= grad_tol) break;
    Eigen::VectorXd dir = -hinv * g;
    if (dir.dot(g) >= 0.0) {
      hinv.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    double fnew = std::numeric_limits<double>::infinity();
    Eigen::VectorXd xnew;
    const double slope = dir.dot(g);
    for (int ls = 0; ls < 60; ++ls) {
      xnew = res.x + step * dir;
      fnew = f(xnew);
      if (std::isfinite(fnew) && fnew <= res.value + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    if (!std::isfinite(fnew) || fnew > res.value) break;
    const Eigen::VectorXd gnew = gradient(xnew);
    const Eigen::VectorXd s = xnew - res.x;
    const Eigen::VectorXd y = gnew - g;
    const double sy = s.dot(y);
    const double improvement = res.value - fnew;
    res.x = xnew;
    res.value = fnew;
    g = gnew;
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      hinv = (eye - rho * s * y.transpose()) * hinv * (eye - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    if (improvement <= 1e-15 * std::max(1.0, std::abs(res.value))) break;
  }
  return res;
}

}  // namespace gcsieve::detail
