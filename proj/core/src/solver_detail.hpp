#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace pennet::detail {

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Root t > 0 of  sum_i c_i^2 / (t * lam_i + kappa)^2 = 1,  the norm of the
// minimizer of 1/2 th^T diag(lam) th - c^T th + kappa ||th||_2 when
// ||c|| > kappa. Newton iteration from below; monotone for this convex
// decreasing function.
inline double block_norm_root(const Eigen::VectorXd& eigvals, const Eigen::VectorXd& c, double kappa) {
  const double c_norm = c.norm();
  double lam_max = 0.0;
  for (Eigen::Index i = 0; i < eigvals.size(); ++i)
    if (c[i] != 0.0) lam_max = std::max(lam_max, eigvals[i]);
  if (lam_max <= 0.0) return 0.0;  // only flat directions carry signal: numerically dead block

  double t = (c_norm - kappa) / lam_max;
  if (t <= 0.0) t = c_norm * 1e-3 / lam_max;
  for (int iter = 0; iter < 200; ++iter) {
    double psi = 0.0;
    double dpsi = 0.0;
    for (Eigen::Index i = 0; i < eigvals.size(); ++i) {
      if (c[i] == 0.0) continue;
      const double denom = t * eigvals[i] + kappa;
      const double term = c[i] / denom;
      psi += term * term;
      dpsi += -2.0 * term * term * eigvals[i] / denom;
    }
    const double f = psi - 1.0;
    if (std::abs(f) < 1e-14) break;
    if (dpsi >= -1e-300) break;
    const double step = f / dpsi;
    const double t_next = t - step;
    if (!(t_next > 0.0) || std::abs(step) < 1e-16 * t) break;
    t = t_next;
  }
  return t;
}

// Minimizer of 1/2 th^T diag(d) th - b^T th + kappa ||th||_2.
inline Eigen::VectorXd diag_block_solve(const Eigen::VectorXd& d, const Eigen::VectorXd& b, double kappa) {
  if (b.norm() <= kappa) return Eigen::VectorXd::Zero(b.size());
  const double t = block_norm_root(d, b, kappa);
  Eigen::VectorXd th(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double denom = t * d[i] + kappa;
    th[i] = denom > 0.0 ? t * b[i] / denom : 0.0;
  }
  return th;
}

}  // namespace pennet::detail
