#pragma once

#include <Eigen/Dense>

namespace pennet {

// Exact solution of the 1-D total-variation denoising problem
//   min_b  sum_t 1/2 (y_t - b_t)^2 + lam * sum_t |b_{t+1} - b_t|
// by dynamic programming over piecewise-linear derivative messages.
// O(n) buffer, near-linear time.
Eigen::VectorXd tv1d_prox(const Eigen::VectorXd& y, double lam);

}  // namespace pennet
