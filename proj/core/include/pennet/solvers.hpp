#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pennet/expression.hpp"
#include "pennet/grouping.hpp"

namespace pennet {

enum class PenaltyFamily {
  kLasso,
  kRidge,
  kElasticNet,
  kFused,
  kGroup,
  kSparseGroup,
  kPairedGroup,
  kHierarchical,
};

std::string to_string(PenaltyFamily family);
PenaltyFamily penalty_family_from_string(const std::string& name);

/// Penalty family plus its hyperparameters.
///
/// lambda2 is meaningful only for the two-parameter families (elastic net,
/// fused, sparse group); groups only for group and sparse group.
struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::kLasso;
  double lambda = 0.0;
  std::optional<double> lambda2;
  std::optional<GroupAssignment> groups;

  void validate(int n_predictors) const;
};

struct SolverOptions {
  double tol = 1e-6;            // max absolute coefficient change between sweeps
  int max_iterations = 100000;  // full sweeps (coordinate descent) or ADMM iterations
  double kkt_tol = 1e-4;
  double admm_rho = 1.0;                    // augmented penalty parameter for the splitting schemes
  std::int64_t interaction_budget = 200000;  // cap on (p-1)(p-2)/2 interaction features
};

/// Outcome of one penalized regression on a ResponseView.
///
/// Coefficients are on the standardized scale. For the coordinate-descent
/// families max_kkt_violation is the largest violation of the stationarity
/// conditions; for the operator-splitting families (fused, hierarchical) it
/// is the final primal residual of the splitting, the analogous measure.
struct FitResult {
  Eigen::VectorXd coefficients;
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_kkt_violation = 0.0;
  bool possibly_nonunique = false;  // set when n < number of predictors
};

/// Joint fit of the paired grouped penalty over all genes at once.
struct PairedFit {
  Eigen::MatrixXd matrix;           // p x p, zero diagonal, entry (i, j) = coefficient of
                                    // gene i in the regression of gene j
  std::map<std::pair<int, int>, double> pair_norms;  // {i<j} -> ||(theta_ij, theta_ji)||_2
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_kkt_violation = 0.0;
};

/// Main effects plus pairwise interactions under the hierarchy constraint
/// ||Theta_j||_1 <= beta+_j + beta-_j.
struct InteractionFit {
  Eigen::VectorXd beta_plus;    // nonnegative
  Eigen::VectorXd beta_minus;   // nonnegative
  Eigen::MatrixXd interactions; // symmetric, zero diagonal
  Eigen::VectorXd hierarchy_slack;  // beta+_j + beta-_j - ||Theta_j||_1
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_kkt_violation = 0.0;

  Eigen::VectorXd main_effects() const { return beta_plus - beta_minus; }
};

// Warm-start state for the operator-splitting solvers; reused across a
// lambda path to avoid refactorizing the quadratic block.
struct FusedState;
struct HierState;

struct FusedStateDeleter {
  void operator()(FusedState*) const;
};
struct HierStateDeleter {
  void operator()(HierState*) const;
};

// All objectives are  f(theta) = 1/(2n) ||y - X theta||_2^2 + P(theta).

// P = lambda ||theta||_1, cyclic coordinate descent with soft-thresholding.
FitResult solve_lasso(const ResponseView& v, double lambda, const SolverOptions& opts = {});

// P = lambda/2 ||theta||_2^2 (squared penalty, consistent with the closed form).
FitResult solve_ridge(const ResponseView& v, double lambda, const SolverOptions& opts = {});

// Exact solve of (X^T X + lambda_cf I) beta = X^T y; the closed-form oracle
// for solve_ridge under the mapping lambda_cf = n * lambda.
Eigen::VectorXd ridge_closed_form(const ResponseView& v, double lambda_cf);

// P = lambda1 ||theta||_1 + lambda2/2 ||theta||_2^2.
FitResult solve_elastic_net(const ResponseView& v, double lambda1, double lambda2,
                            const SolverOptions& opts = {});

// P = lambda1 sum |theta_j| + lambda2 sum |theta_(j) - theta_(j-1)| over the
// supplied predictor order. ADMM with an exact 1-D total-variation proximal
// step for the difference chain.
FitResult solve_fused(const ResponseView& v, double lambda1, double lambda2,
                      const std::vector<int>& order, const SolverOptions& opts = {});

// P = lambda sum_l sqrt(n_l) ||theta_l||_2, block coordinate descent with an
// exact per-block norm solve. Whole groups are zeroed or kept.
FitResult solve_group(const ResponseView& v, double lambda, const GroupAssignment& groups,
                      const SolverOptions& opts = {});

// P = lambda1 sum_l sqrt(n_l) ||theta_l||_2 + lambda2 ||theta||_1.
FitResult solve_sparse_group(const ResponseView& v, double lambda1, double lambda2,
                             const GroupAssignment& groups, const SolverOptions& opts = {});

// Joint objective 1/(2n) sum_a ||y_a - X_{-a} theta_a||^2 + lambda sum_{i<j}
// ||(theta_ij, theta_ji)||_2; block descent over the coefficient pairs, which
// are zeroed jointly.
PairedFit solve_paired_group(const ExpressionMatrix& m, double lambda, const SolverOptions& opts = {});

// Smallest lambda with an all-zero lasso solution: max_j |x_j^T y| / n.
double lambda_max(const ResponseView& v);

// Smallest lambda with an all-zero paired fit.
double paired_lambda_max(const ExpressionMatrix& m);

// Pairwise-interaction model with main effects split into nonnegative parts
// and the hierarchy constraint ||Theta_j||_1 <= beta+_j + beta-_j. Consensus
// ADMM; one proximal block is the exact projection onto the constraint set.
// lambda_main penalizes the split main effects, lambda_interaction the
// interaction matrix (P = lambda_main sum(beta+ + beta-) +
// lambda_interaction/2 ||Theta||_1).
InteractionFit solve_hierarchical(const ExpressionMatrix& m, int response_index, double lambda_main,
                                  double lambda_interaction, const SolverOptions& opts = {});

inline InteractionFit solve_hierarchical(const ExpressionMatrix& m, int response_index, double lambda,
                                         const SolverOptions& opts = {}) {
  return solve_hierarchical(m, response_index, lambda, lambda, opts);
}

// Number of unordered predictor pairs, p(p-1)/2.
std::int64_t count_pairwise_interactions(std::int64_t p);

namespace detail {

// Engine entry points that work on raw (X, y); the public functions above
// wrap these. Exposed for cross-validation, which refits on row subsets.

FitResult enet_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1, double lambda2,
                  const SolverOptions& opts, const Eigen::VectorXd* warm = nullptr);

FitResult group_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                   const GroupAssignment& groups, const SolverOptions& opts,
                   const Eigen::VectorXd* warm = nullptr);

FitResult sparse_group_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1,
                          double lambda2, const GroupAssignment& groups, const SolverOptions& opts,
                          const Eigen::VectorXd* warm = nullptr);

FitResult fused_admm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda1, double lambda2,
                     const std::vector<int>& order, const SolverOptions& opts, FusedState* state = nullptr);

// Hierarchical fit on a predictor matrix X (response column already removed).
InteractionFit hier_admm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda_main,
                         double lambda_interaction, const SolverOptions& opts, HierState* state = nullptr);

double lambda_max_xy(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

std::unique_ptr<FusedState, FusedStateDeleter> make_fused_state();
std::unique_ptr<HierState, HierStateDeleter> make_hier_state();

}  // namespace detail

}  // namespace pennet
