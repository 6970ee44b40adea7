#include <cmath>
#include <stdexcept>

#include "pennet/solvers.hpp"
#include "solver_detail.hpp"

namespace pennet {

double paired_lambda_max(const ExpressionMatrix& m) {
  if (!m.standardized()) throw std::runtime_error("paired_lambda_max requires a standardized matrix");
  const Eigen::MatrixXd& X = m.values();
  const double nd = static_cast<double>(X.rows());
  double best = 0.0;
  for (Eigen::Index i = 0; i < X.cols(); ++i)
    for (Eigen::Index j = i + 1; j < X.cols(); ++j) {
      const double g = X.col(i).dot(X.col(j)) / nd;
      best = std::max(best, std::sqrt(2.0) * std::abs(g));
    }
  return best;
}

PairedFit solve_paired_group(const ExpressionMatrix& m, double lambda, const SolverOptions& opts) {
  if (!m.standardized()) throw std::runtime_error("solve_paired_group requires a standardized matrix");
  if (lambda < 0) throw std::invalid_argument("negative penalty");
  const Eigen::MatrixXd& X = m.values();
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const double nd = static_cast<double>(n);

  Eigen::VectorXd d(p);
  for (Eigen::Index j = 0; j < p; ++j) d[j] = X.col(j).squaredNorm() / nd;

  PairedFit fit;
  fit.matrix = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd residual = X;  // column a: y_a - X theta_a, theta starts at 0

  Eigen::VectorXd block_d(2), block_b(2);
  for (int sweep = 0; sweep < opts.max_iterations; ++sweep) {
    double delta = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = i + 1; j < p; ++j) {
        const double u_old = fit.matrix(i, j);  // gene i in regression of gene j
        const double v_old = fit.matrix(j, i);  // gene j in regression of gene i
        block_d << d[i], d[j];
        block_b << X.col(i).dot(residual.col(j)) / nd + d[i] * u_old,
                   X.col(j).dot(residual.col(i)) / nd + d[j] * v_old;
        const Eigen::VectorXd next = detail::diag_block_solve(block_d, block_b, lambda);
        const double du = next[0] - u_old;
        const double dv = next[1] - v_old;
        if (du != 0.0) {
          residual.col(j) -= X.col(i) * du;
          fit.matrix(i, j) = next[0];
          delta = std::max(delta, std::abs(du));
        }
        if (dv != 0.0) {
          residual.col(i) -= X.col(j) * dv;
          fit.matrix(j, i) = next[1];
          delta = std::max(delta, std::abs(dv));
        }
      }
    }
    fit.iterations = sweep + 1;
    if (delta < opts.tol) {
      fit.converged = true;
      break;
    }
  }

  residual = X - X * fit.matrix;  // diagonal of the coefficient matrix is exactly zero
  double kkt = 0.0;
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double u = fit.matrix(i, j);
      const double v = fit.matrix(j, i);
      const double norm = std::hypot(u, v);
      penalty += lambda * norm;
      fit.pair_norms[{static_cast<int>(i), static_cast<int>(j)}] = norm;
      const double gu = X.col(i).dot(residual.col(j)) / nd;
      const double gv = X.col(j).dot(residual.col(i)) / nd;
      if (norm == 0.0)
        kkt = std::max(kkt, std::max(0.0, std::hypot(gu, gv) - lambda));
      else
        kkt = std::max({kkt, std::abs(gu - lambda * u / norm), std::abs(gv - lambda * v / norm)});
    }
  }
  fit.max_kkt_violation = kkt;
  fit.converged = fit.converged && kkt < opts.kkt_tol;
  fit.objective_value = residual.squaredNorm() / (2.0 * nd) + penalty;
  return fit;
}

}  // namespace pennet
