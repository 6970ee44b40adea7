#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "pennet/solvers.hpp"
#include "pennet/tv.hpp"
#include "solver_detail.hpp"

namespace pennet {

// ---------------------------------------------------------------------------
// Fused lasso: split z = P theta (chain order), ADMM. The z-prox is exact:
// 1-D total-variation denoising followed by soft-thresholding solves the
// combined TV + L1 proximal problem.
// ---------------------------------------------------------------------------

struct FusedState {
  Eigen::Index n = -1, p = -1;
  double rho = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd xty_n;
  Eigen::VectorXd z, u;
  bool ready = false;
};

void FusedStateDeleter::operator()(FusedState* s) const { delete s; }

namespace detail {

std::unique_ptr<FusedState, FusedStateDeleter> make_fused_state() {
  return std::unique_ptr<FusedState, FusedStateDeleter>(new FusedState());
}

FitResult fused_admm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1, double lambda2,
                     const std::vector<int>& order, const SolverOptions& opts, FusedState* state) {
  if (lambda1 < 0 || lambda2 < 0) throw std::invalid_argument("negative penalty");
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();

  if (static_cast<Eigen::Index>(order.size()) != p)
    throw std::invalid_argument("fused order must be a permutation of the predictors");
  std::vector<bool> seen(static_cast<std::size_t>(p), false);
  for (int idx : order) {
    if (idx < 0 || idx >= p || seen[static_cast<std::size_t>(idx)])
      throw std::invalid_argument("fused order must be a permutation of the predictors");
    seen[static_cast<std::size_t>(idx)] = true;
  }

  // A zero fusion weight is a plain lasso; the chain order is irrelevant.
  if (lambda2 == 0.0) return enet_cd(X, y, lambda1, 0.0, opts);

  const double nd = static_cast<double>(n);
  const double rho = opts.admm_rho;

  std::unique_ptr<FusedState, FusedStateDeleter> local;
  if (!state) {
    local = make_fused_state();
    state = local.get();
  }
  if (!state->ready || state->n != n || state->p != p || state->rho != rho) {
    Eigen::MatrixXd M = X.transpose() * X / nd;
    M.diagonal().array() += rho;
    state->llt.compute(M);
    state->xty_n = X.transpose() * y / nd;
    state->z = Eigen::VectorXd::Zero(p);
    state->u = Eigen::VectorXd::Zero(p);
    state->n = n;
    state->p = p;
    state->rho = rho;
    state->ready = true;
  }

  Eigen::VectorXd& z = state->z;
  Eigen::VectorXd& u = state->u;
  Eigen::VectorXd theta(p), ordered(p), relaxed(p), v(p);
  constexpr double kRelaxation = 1.8;

  FitResult fit;
  double primal = 0.0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    // theta-step: quadratic solve against the consensus target.
    Eigen::VectorXd target = z - u;
    Eigen::VectorXd unpermuted(p);
    for (Eigen::Index k = 0; k < p; ++k) unpermuted[order[static_cast<std::size_t>(k)]] = target[k];
    theta = state->llt.solve(state->xty_n + rho * unpermuted);
    for (Eigen::Index k = 0; k < p; ++k) ordered[k] = theta[order[static_cast<std::size_t>(k)]];

    const Eigen::VectorXd z_prev = z;
    relaxed = kRelaxation * ordered + (1.0 - kRelaxation) * z_prev;
    v = relaxed + u;
    z = tv1d_prox(v, lambda2 / rho);
    for (Eigen::Index k = 0; k < p; ++k) z[k] = detail::soft_threshold(z[k], lambda1 / rho);
    u += relaxed - z;

    fit.iterations = iter + 1;
    primal = (ordered - z).cwiseAbs().maxCoeff();
    const double dual = rho * (z - z_prev).cwiseAbs().maxCoeff();
    if (primal < opts.tol && dual < opts.tol) {
      fit.converged = true;
      break;
    }
  }

  // Report the shrinkage-block iterate: exact zeros and exact fusions.
  fit.coefficients.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) fit.coefficients[order[static_cast<std::size_t>(k)]] = z[k];
  const Eigen::VectorXd r = y - X * fit.coefficients;
  double tv = 0.0;
  for (Eigen::Index k = 1; k < p; ++k) tv += std::abs(z[k] - z[k - 1]);
  fit.objective_value = r.squaredNorm() / (2.0 * nd) + lambda1 * fit.coefficients.lpNorm<1>() + lambda2 * tv;
  fit.max_kkt_violation = primal;
  fit.converged = fit.converged && primal < opts.kkt_tol;
  fit.possibly_nonunique = n < p;
  return fit;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hierarchical interaction model. Variables w = (beta+, beta-, Theta) with
// Theta kept as a full off-diagonal matrix; consensus ADMM with three
// proximal blocks: separable shrinkage, per-row projection onto
// { ||Theta_j||_1 <= beta+_j + beta-_j }, and symmetrization of Theta.
// ---------------------------------------------------------------------------

struct HierState {
  Eigen::Index n = -1, q = -1;
  double rho = 0.0;
  Eigen::MatrixXd design;  // [X, -X, interaction features]
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd aty_n;
  const double* y_tag = nullptr;  // identity of the cached response
  Eigen::VectorXd z1, z2, z3, u1, u2, u3;
  bool ready = false;
};

void HierStateDeleter::operator()(HierState* s) const { delete s; }

namespace detail {

std::unique_ptr<HierState, HierStateDeleter> make_hier_state() {
  return std::unique_ptr<HierState, HierStateDeleter>(new HierState());
}

namespace {

// Index of interaction coordinate (j, k), j != k, in the flat layout: row j
// owns the contiguous range [2q + j(q-1), 2q + (j+1)(q-1)).
inline Eigen::Index pair_coord(Eigen::Index q, Eigen::Index j, Eigen::Index k) {
  return 2 * q + j * (q - 1) + (k > j ? k - 1 : k);
}

// Euclidean projection of (b+, b-, t) onto { ||t||_1 <= b+ + b- }: the
// multiplier equation sum_i max(|t_i| - mu, 0) = b+ + b- + 2 mu is piecewise
// linear in mu, solved exactly by walking its breakpoints.
void project_hierarchy_row(double& b_plus, double& b_minus, double* t, Eigen::Index len) {
  double norm1 = 0.0;
  for (Eigen::Index i = 0; i < len; ++i) norm1 += std::abs(t[i]);
  const double budget = b_plus + b_minus;
  if (norm1 <= budget) return;

  std::vector<double> mag(static_cast<std::size_t>(len));
  for (Eigen::Index i = 0; i < len; ++i) mag[static_cast<std::size_t>(i)] = std::abs(t[i]);
  std::sort(mag.begin(), mag.end(), std::greater<double>());

  double mu = 0.0;
  double prefix = 0.0;
  bool found = false;
  for (std::size_t m = 0; m <= mag.size(); ++m) {
    // On [next, mag[m-1]] exactly m magnitudes stay active.
    const double candidate = (prefix - budget) / (static_cast<double>(m) + 2.0);
    const double hi = m == 0 ? std::numeric_limits<double>::infinity() : mag[m - 1];
    const double lo = m == mag.size() ? 0.0 : mag[m];
    if (candidate >= lo && candidate <= hi) {
      mu = candidate;
      found = true;
      break;
    }
    if (m < mag.size()) prefix += mag[m];
  }
  if (!found) mu = (prefix - budget) / (static_cast<double>(mag.size()) + 2.0);  // all active
  mu = std::max(mu, 0.0);

  for (Eigen::Index i = 0; i < len; ++i) t[i] = soft_threshold(t[i], mu);
  b_plus += mu;
  b_minus += mu;
}

}  // namespace

InteractionFit hier_admm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda_main,
                         double lambda_interaction, const SolverOptions& opts, HierState* state) {
  if (lambda_main < 0 || lambda_interaction < 0) throw std::invalid_argument("negative penalty");
  const Eigen::Index n = X.rows();
  const Eigen::Index q = X.cols();
  const std::int64_t interactions = count_pairwise_interactions(static_cast<std::int64_t>(q));
  if (interactions > opts.interaction_budget)
    throw std::runtime_error("hierarchical fit: " + std::to_string(interactions) +
                             " interaction features exceed the budget of " +
                             std::to_string(opts.interaction_budget));

  const double nd = static_cast<double>(n);
  const double rho = opts.admm_rho;
  const Eigen::Index D = 2 * q + q * (q - 1);

  std::unique_ptr<HierState, HierStateDeleter> local;
  if (!state) {
    local = make_hier_state();
    state = local.get();
  }
  if (!state->ready || state->n != n || state->q != q || state->rho != rho) {
    Eigen::MatrixXd A(n, D);
    A.leftCols(q) = X;
    A.middleCols(q, q) = -X;
    for (Eigen::Index j = 0; j < q; ++j)
      for (Eigen::Index k = 0; k < q; ++k) {
        if (k == j) continue;
        A.col(pair_coord(q, j, k)) = 0.5 * X.col(j).cwiseProduct(X.col(k));
      }
    Eigen::MatrixXd M = A.transpose() * A / nd;
    M.diagonal().array() += 3.0 * rho;
    state->llt.compute(M);
    state->design = std::move(A);
    state->n = n;
    state->q = q;
    state->rho = rho;
    state->y_tag = nullptr;
    state->z1 = Eigen::VectorXd::Zero(D);
    state->z2 = Eigen::VectorXd::Zero(D);
    state->z3 = Eigen::VectorXd::Zero(D);
    state->u1 = Eigen::VectorXd::Zero(D);
    state->u2 = Eigen::VectorXd::Zero(D);
    state->u3 = Eigen::VectorXd::Zero(D);
    state->ready = true;
  }
  if (state->y_tag != y.data()) {
    state->aty_n = state->design.transpose() * y / nd;
    state->y_tag = y.data();
  }

  Eigen::VectorXd& z1 = state->z1;
  Eigen::VectorXd& z2 = state->z2;
  Eigen::VectorXd& z3 = state->z3;
  Eigen::VectorXd& u1 = state->u1;
  Eigen::VectorXd& u2 = state->u2;
  Eigen::VectorXd& u3 = state->u3;

  Eigen::VectorXd w(D), v(D), relaxed(D);
  constexpr double kRelaxation = 1.8;
  InteractionFit fit;
  double primal = 0.0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    w = state->llt.solve(state->aty_n + rho * (z1 - u1 + z2 - u2 + z3 - u3));

    // Shrinkage block: nonnegative main-effect parts with a linear cost,
    // entrywise soft-threshold on the interactions.
    const Eigen::VectorXd z1_prev = z1;
    relaxed = kRelaxation * w + (1.0 - kRelaxation) * z1_prev;
    v = relaxed + u1;
    for (Eigen::Index i = 0; i < 2 * q; ++i) z1[i] = std::max(0.0, v[i] - lambda_main / rho);
    for (Eigen::Index i = 2 * q; i < D; ++i) z1[i] = soft_threshold(v[i], lambda_interaction / (2.0 * rho));
    u1 += relaxed - z1;

    // Hierarchy block: exact projection, row by row.
    const Eigen::VectorXd z2_prev = z2;
    relaxed = kRelaxation * w + (1.0 - kRelaxation) * z2_prev;
    z2 = relaxed + u2;
    for (Eigen::Index j = 0; j < q; ++j)
      project_hierarchy_row(z2[j], z2[q + j], z2.data() + 2 * q + j * (q - 1), q - 1);
    u2 += relaxed - z2;

    // Symmetry block.
    const Eigen::VectorXd z3_prev = z3;
    relaxed = kRelaxation * w + (1.0 - kRelaxation) * z3_prev;
    z3 = relaxed + u3;
    for (Eigen::Index j = 0; j < q; ++j)
      for (Eigen::Index k = j + 1; k < q; ++k) {
        const Eigen::Index jk = pair_coord(q, j, k);
        const Eigen::Index kj = pair_coord(q, k, j);
        const double mean = 0.5 * (z3[jk] + z3[kj]);
        z3[jk] = mean;
        z3[kj] = mean;
      }
    u3 += relaxed - z3;

    fit.iterations = iter + 1;
    primal = std::max({(w - z1).cwiseAbs().maxCoeff(), (w - z2).cwiseAbs().maxCoeff(),
                       (w - z3).cwiseAbs().maxCoeff()});
    const double dual = rho * std::max({(z1 - z1_prev).cwiseAbs().maxCoeff(),
                                        (z2 - z2_prev).cwiseAbs().maxCoeff(),
                                        (z3 - z3_prev).cwiseAbs().maxCoeff()});
    if (primal < opts.tol && dual < opts.tol) {
      fit.converged = true;
      break;
    }
  }

  // Report from the shrinkage block (exact zeros, exact nonnegativity),
  // symmetrized, with the main-effect split retightened so the hierarchy
  // constraint holds exactly.
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index j = 0; j < q; ++j)
    for (Eigen::Index k = 0; k < q; ++k)
      if (k != j) theta(j, k) = z1[pair_coord(q, j, k)];
  theta = 0.5 * (theta + theta.transpose()).eval();

  const Eigen::VectorXd beta = z1.head(q) - z1.segment(q, q);
  fit.beta_plus.resize(q);
  fit.beta_minus.resize(q);
  fit.hierarchy_slack.resize(q);
  for (Eigen::Index j = 0; j < q; ++j) {
    const double row_norm = theta.row(j).cwiseAbs().sum();
    const double total = std::max(std::abs(beta[j]), row_norm);
    fit.beta_plus[j] = 0.5 * (total + beta[j]);
    fit.beta_minus[j] = 0.5 * (total - beta[j]);
    fit.hierarchy_slack[j] = fit.beta_plus[j] + fit.beta_minus[j] - row_norm;
  }
  fit.interactions = std::move(theta);

  const Eigen::MatrixXd cross = X * fit.interactions;
  Eigen::VectorXd prediction = X * fit.main_effects();
  prediction += 0.5 * (X.cwiseProduct(cross)).rowwise().sum();
  const double loss = (y - prediction).squaredNorm() / (2.0 * nd);
  fit.objective_value = loss + lambda_main * (fit.beta_plus.sum() + fit.beta_minus.sum()) +
                        0.5 * lambda_interaction * fit.interactions.cwiseAbs().sum();
  fit.max_kkt_violation = primal;
  fit.converged = fit.converged && primal < opts.kkt_tol;
  return fit;
}

}  // namespace detail
}  // namespace pennet
