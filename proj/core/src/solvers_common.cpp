#include <stdexcept>

#include "pennet/solvers.hpp"

namespace pennet {

std::string to_string(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::kLasso: return "lasso";
    case PenaltyFamily::kRidge: return "ridge";
    case PenaltyFamily::kElasticNet: return "enet";
    case PenaltyFamily::kFused: return "fused";
    case PenaltyFamily::kGroup: return "group";
    case PenaltyFamily::kSparseGroup: return "sgroup";
    case PenaltyFamily::kPairedGroup: return "paired";
    case PenaltyFamily::kHierarchical: return "hier";
  }
  return "?";
}

PenaltyFamily penalty_family_from_string(const std::string& name) {
  if (name == "lasso") return PenaltyFamily::kLasso;
  if (name == "ridge") return PenaltyFamily::kRidge;
  if (name == "enet") return PenaltyFamily::kElasticNet;
  if (name == "fused") return PenaltyFamily::kFused;
  if (name == "group") return PenaltyFamily::kGroup;
  if (name == "sgroup") return PenaltyFamily::kSparseGroup;
  if (name == "paired") return PenaltyFamily::kPairedGroup;
  if (name == "hier") return PenaltyFamily::kHierarchical;
  throw std::invalid_argument("unknown penalty family: " + name);
}

void PenaltySpec::validate(int n_predictors) const {
  if (lambda < 0) throw std::invalid_argument("lambda must be nonnegative");
  const bool two_parameter = family == PenaltyFamily::kElasticNet || family == PenaltyFamily::kFused ||
                             family == PenaltyFamily::kSparseGroup;
  if (lambda2.has_value()) {
    if (!two_parameter) throw std::invalid_argument("lambda2 is only valid for enet, fused and sgroup");
    if (*lambda2 < 0) throw std::invalid_argument("lambda2 must be nonnegative");
  }
  const bool grouped = family == PenaltyFamily::kGroup || family == PenaltyFamily::kSparseGroup;
  if (groups.has_value() != grouped)
    throw std::invalid_argument(grouped ? "group penalty requires a group assignment"
                                        : "group assignment is only valid for group and sgroup");
  if (groups.has_value()) groups->validate(n_predictors);
}

std::int64_t count_pairwise_interactions(std::int64_t p) {
  if (p < 0) throw std::invalid_argument("count_pairwise_interactions: negative p");
  return p * (p - 1) / 2;
}

double lambda_max(const ResponseView& v) { return detail::lambda_max_xy(v.predictors, v.y); }

Eigen::VectorXd ridge_closed_form(const ResponseView& v, double lambda_cf) {
  if (lambda_cf < 0) throw std::invalid_argument("ridge_closed_form: negative penalty");
  const Eigen::MatrixXd& X = v.predictors;
  Eigen::MatrixXd gram = X.transpose() * X;
  gram.diagonal().array() += lambda_cf;
  if (lambda_cf == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) throw std::runtime_error("ridge_closed_form: X^T X singular and lambda_cf = 0");
    return lu.solve(X.transpose() * v.y);
  }
  return gram.ldlt().solve(X.transpose() * v.y);
}

FitResult solve_lasso(const ResponseView& v, double lambda, const SolverOptions& opts) {
  return detail::enet_cd(v.predictors, v.y, lambda, 0.0, opts);
}

FitResult solve_ridge(const ResponseView& v, double lambda, const SolverOptions& opts) {
  return detail::enet_cd(v.predictors, v.y, 0.0, lambda, opts);
}

FitResult solve_elastic_net(const ResponseView& v, double lambda1, double lambda2, const SolverOptions& opts) {
  return detail::enet_cd(v.predictors, v.y, lambda1, lambda2, opts);
}

FitResult solve_group(const ResponseView& v, double lambda, const GroupAssignment& groups,
                      const SolverOptions& opts) {
  return detail::group_cd(v.predictors, v.y, lambda, groups, opts);
}

FitResult solve_sparse_group(const ResponseView& v, double lambda1, double lambda2,
                             const GroupAssignment& groups, const SolverOptions& opts) {
  return detail::sparse_group_cd(v.predictors, v.y, lambda1, lambda2, groups, opts);
}

FitResult solve_fused(const ResponseView& v, double lambda1, double lambda2, const std::vector<int>& order,
                      const SolverOptions& opts) {
  return detail::fused_admm(v.predictors, v.y, lambda1, lambda2, order, opts);
}

InteractionFit solve_hierarchical(const ExpressionMatrix& m, int response_index, double lambda_main,
                                  double lambda_interaction, const SolverOptions& opts) {
  if (!m.standardized()) throw std::runtime_error("solve_hierarchical requires a standardized matrix");
  const ResponseView v = response_view(m, response_index);
  return detail::hier_admm(v.predictors, v.y, lambda_main, lambda_interaction, opts);
}

}  // namespace pennet
