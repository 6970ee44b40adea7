#include <cmath>
#include <stdexcept>
#include <vector>

#include "pennet/solvers.hpp"
#include "solver_detail.hpp"

namespace pennet::detail {

namespace {

struct GroupLayout {
  std::vector<std::vector<int>> members;    // predictor indices per group
  std::vector<Eigen::MatrixXd> blocks;      // X columns per group
  std::vector<Eigen::MatrixXd> eigvecs;     // eigendecomposition of X_l^T X_l / n
  std::vector<Eigen::VectorXd> eigvals;
  std::vector<double> weight;               // sqrt(n_l)
};

GroupLayout build_group_layout(const Eigen::MatrixXd& X, const GroupAssignment& groups) {
  const Eigen::Index n = X.rows();
  GroupLayout layout;
  layout.members.resize(static_cast<std::size_t>(groups.k));
  for (std::size_t j = 0; j < groups.labels.size(); ++j)
    layout.members[static_cast<std::size_t>(groups.labels[j])].push_back(static_cast<int>(j));
  layout.blocks.resize(layout.members.size());
  layout.eigvecs.resize(layout.members.size());
  layout.eigvals.resize(layout.members.size());
  layout.weight.resize(layout.members.size());
  for (std::size_t g = 0; g < layout.members.size(); ++g) {
    const auto& idx = layout.members[g];
    Eigen::MatrixXd block(n, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) block.col(static_cast<Eigen::Index>(c)) = X.col(idx[c]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block.transpose() * block / static_cast<double>(n));
    layout.blocks[g] = std::move(block);
    layout.eigvecs[g] = eig.eigenvectors();
    layout.eigvals[g] = eig.eigenvalues();
    layout.weight[g] = std::sqrt(static_cast<double>(idx.size()));
  }
  return layout;
}

void scatter_block(const std::vector<int>& idx, const Eigen::VectorXd& block, Eigen::VectorXd& theta) {
  for (std::size_t c = 0; c < idx.size(); ++c) theta[idx[c]] = block[static_cast<Eigen::Index>(c)];
}

Eigen::VectorXd gather_block(const std::vector<int>& idx, const Eigen::VectorXd& theta) {
  Eigen::VectorXd block(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) block[static_cast<Eigen::Index>(c)] = theta[idx[c]];
  return block;
}

}  // namespace

double lambda_max_xy(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return (X.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

FitResult enet_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1, double lambda2,
                  const SolverOptions& opts, const Eigen::VectorXd* warm) {
  if (lambda1 < 0 || lambda2 < 0) throw std::invalid_argument("negative penalty");
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const double nd = static_cast<double>(n);

  Eigen::VectorXd d(p);
  for (Eigen::Index j = 0; j < p; ++j) d[j] = X.col(j).squaredNorm() / nd;

  FitResult fit;
  fit.coefficients = warm ? *warm : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd& theta = fit.coefficients;
  Eigen::VectorXd r = y - X * theta;

  for (int sweep = 0; sweep < opts.max_iterations; ++sweep) {
    double delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = theta[j];
      if (d[j] == 0.0) {
        if (old != 0.0) {
          r += X.col(j) * old;
          theta[j] = 0.0;
          delta = std::max(delta, std::abs(old));
        }
        continue;
      }
      const double rho = X.col(j).dot(r) / nd + d[j] * old;
      const double next = soft_threshold(rho, lambda1) / (d[j] + lambda2);
      if (next != old) {
        r -= X.col(j) * (next - old);
        delta = std::max(delta, std::abs(next - old));
        theta[j] = next;
      }
    }
    fit.iterations = sweep + 1;
    if (delta < opts.tol) {
      fit.converged = true;
      break;
    }
  }

  r = y - X * theta;  // fresh residual for diagnostics
  double kkt = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double g = X.col(j).dot(r) / nd;
    double viol;
    if (theta[j] == 0.0)
      viol = std::max(0.0, std::abs(g) - lambda1);
    else
      viol = std::abs(g - lambda2 * theta[j] - lambda1 * (theta[j] > 0 ? 1.0 : -1.0));
    kkt = std::max(kkt, viol);
  }
  fit.max_kkt_violation = kkt;
  fit.converged = fit.converged && kkt < opts.kkt_tol;
  fit.objective_value = r.squaredNorm() / (2.0 * nd) + lambda1 * theta.lpNorm<1>() +
                        0.5 * lambda2 * theta.squaredNorm();
  fit.possibly_nonunique = n < p;
  return fit;
}

FitResult group_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                   const GroupAssignment& groups, const SolverOptions& opts, const Eigen::VectorXd* warm) {
  if (lambda < 0) throw std::invalid_argument("negative penalty");
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  groups.validate(static_cast<int>(p));
  const double nd = static_cast<double>(n);
  const GroupLayout layout = build_group_layout(X, groups);

  FitResult fit;
  fit.coefficients = warm ? *warm : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd& theta = fit.coefficients;
  Eigen::VectorXd r = y - X * theta;

  for (int sweep = 0; sweep < opts.max_iterations; ++sweep) {
    double delta = 0.0;
    for (std::size_t g = 0; g < layout.members.size(); ++g) {
      const auto& idx = layout.members[g];
      const double kappa = lambda * layout.weight[g];
      Eigen::VectorXd old_block = gather_block(idx, theta);
      // b = X_l^T (r + X_l theta_l) / n
      Eigen::VectorXd b = layout.blocks[g].transpose() * r / nd;
      b += (layout.eigvecs[g] * (layout.eigvals[g].asDiagonal() * (layout.eigvecs[g].transpose() * old_block)));

      Eigen::VectorXd next;
      if (idx.size() == 1) {
        next.resize(1);
        const double dj = layout.eigvals[g][0];
        next[0] = dj > 0.0 ? soft_threshold(b[0], kappa) / dj : 0.0;
      } else if (b.norm() <= kappa) {
        next = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(idx.size()));
      } else {
        const Eigen::VectorXd c = layout.eigvecs[g].transpose() * b;
        const double t = block_norm_root(layout.eigvals[g], c, kappa);
        Eigen::VectorXd scaled(c.size());
        for (Eigen::Index i = 0; i < c.size(); ++i) {
          const double denom = t * layout.eigvals[g][i] + kappa;
          scaled[i] = denom > 0.0 ? t * c[i] / denom : 0.0;
        }
        next = layout.eigvecs[g] * scaled;
      }
      const Eigen::VectorXd change = next - old_block;
      const double step = change.cwiseAbs().maxCoeff();
      if (step > 0.0) {
        r -= layout.blocks[g] * change;
        scatter_block(idx, next, theta);
        delta = std::max(delta, step);
      }
    }
    fit.iterations = sweep + 1;
    if (delta < opts.tol) {
      fit.converged = true;
      break;
    }
  }

  r = y - X * theta;
  double kkt = 0.0;
  double penalty = 0.0;
  for (std::size_t g = 0; g < layout.members.size(); ++g) {
    const auto& idx = layout.members[g];
    const double kappa = lambda * layout.weight[g];
    const Eigen::VectorXd grad = layout.blocks[g].transpose() * r / nd;
    const Eigen::VectorXd block = gather_block(idx, theta);
    const double norm = block.norm();
    penalty += kappa * norm;
    if (norm == 0.0)
      kkt = std::max(kkt, std::max(0.0, grad.norm() - kappa));
    else
      kkt = std::max(kkt, (grad - kappa / norm * block).cwiseAbs().maxCoeff());
  }
  fit.max_kkt_violation = kkt;
  fit.converged = fit.converged && kkt < opts.kkt_tol;
  fit.objective_value = r.squaredNorm() / (2.0 * nd) + penalty;
  fit.possibly_nonunique = n < p;
  return fit;
}

FitResult sparse_group_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1,
                          double lambda2, const GroupAssignment& groups, const SolverOptions& opts,
                          const Eigen::VectorXd* warm) {
  if (lambda1 < 0 || lambda2 < 0) throw std::invalid_argument("negative penalty");
  // Boundary cases collapse to the specialized solvers, exactly.
  if (lambda2 == 0.0) return group_cd(X, y, lambda1, groups, opts, warm);
  if (lambda1 == 0.0) return enet_cd(X, y, lambda2, 0.0, opts, warm);

  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  groups.validate(static_cast<int>(p));
  const double nd = static_cast<double>(n);
  const GroupLayout layout = build_group_layout(X, groups);

  FitResult fit;
  fit.coefficients = warm ? *warm : Eigen::VectorXd::Zero(p);
  Eigen::VectorXd& theta = fit.coefficients;
  Eigen::VectorXd r = y - X * theta;
  const double inner_tol = std::max(opts.tol * 1e-2, 1e-13);

  for (int sweep = 0; sweep < opts.max_iterations; ++sweep) {
    double delta = 0.0;
    for (std::size_t g = 0; g < layout.members.size(); ++g) {
      const auto& idx = layout.members[g];
      const double kappa = lambda1 * layout.weight[g];
      const double lipschitz = layout.eigvals[g].maxCoeff();
      Eigen::VectorXd old_block = gather_block(idx, theta);
      Eigen::VectorXd b = layout.blocks[g].transpose() * r / nd;
      b += (layout.eigvecs[g] * (layout.eigvals[g].asDiagonal() * (layout.eigvecs[g].transpose() * old_block)));

      Eigen::VectorXd next = old_block;
      Eigen::VectorXd soft_b(b.size());
      for (Eigen::Index i = 0; i < b.size(); ++i) soft_b[i] = soft_threshold(b[i], lambda2);
      if (soft_b.norm() <= kappa || lipschitz <= 0.0) {
        next.setZero();
      } else {
        // Proximal gradient on the block objective; the combined prox is
        // componentwise soft-threshold followed by group shrinkage.
        for (int inner = 0; inner < 500; ++inner) {
          const Eigen::VectorXd grad =
              layout.eigvecs[g] * (layout.eigvals[g].asDiagonal() * (layout.eigvecs[g].transpose() * next)) - b;
          Eigen::VectorXd v = next - grad / lipschitz;
          for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = soft_threshold(v[i], lambda2 / lipschitz);
          const double v_norm = v.norm();
          const double shrink = v_norm > 0.0 ? std::max(0.0, 1.0 - kappa / (lipschitz * v_norm)) : 0.0;
          Eigen::VectorXd stepped = shrink * v;
          const double inner_delta = (stepped - next).cwiseAbs().maxCoeff();
          next = std::move(stepped);
          if (inner_delta < inner_tol) break;
        }
      }
      const Eigen::VectorXd change = next - old_block;
      const double step = change.cwiseAbs().maxCoeff();
      if (step > 0.0) {
        r -= layout.blocks[g] * change;
        scatter_block(idx, next, theta);
        delta = std::max(delta, step);
      }
    }
    fit.iterations = sweep + 1;
    if (delta < opts.tol) {
      fit.converged = true;
      break;
    }
  }

  r = y - X * theta;
  double kkt = 0.0;
  double penalty = lambda2 * theta.lpNorm<1>();
  for (std::size_t g = 0; g < layout.members.size(); ++g) {
    const auto& idx = layout.members[g];
    const double kappa = lambda1 * layout.weight[g];
    const Eigen::VectorXd grad = layout.blocks[g].transpose() * r / nd;
    const Eigen::VectorXd block = gather_block(idx, theta);
    const double norm = block.norm();
    penalty += kappa * norm;
    if (norm == 0.0) {
      Eigen::VectorXd soft_grad(grad.size());
      for (Eigen::Index i = 0; i < grad.size(); ++i) soft_grad[i] = soft_threshold(grad[i], lambda2);
      kkt = std::max(kkt, std::max(0.0, soft_grad.norm() - kappa));
    } else {
      for (Eigen::Index i = 0; i < grad.size(); ++i) {
        const double direction = kappa * block[i] / norm;
        double viol;
        if (block[i] == 0.0)
          viol = std::max(0.0, std::abs(grad[i] - direction) - lambda2);
        else
          viol = std::abs(grad[i] - direction - lambda2 * (block[i] > 0 ? 1.0 : -1.0));
        kkt = std::max(kkt, viol);
      }
    }
  }
  fit.max_kkt_violation = kkt;
  fit.converged = fit.converged && kkt < opts.kkt_tol;
  fit.objective_value = r.squaredNorm() / (2.0 * nd) + penalty;
  fit.possibly_nonunique = n < p;
  return fit;
}

}  // namespace pennet::detail
