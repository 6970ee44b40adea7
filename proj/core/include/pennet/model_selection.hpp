#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pennet/expression.hpp"
#include "pennet/grouping.hpp"
#include "pennet/solvers.hpp"

namespace pennet {

struct CVConfig {
  int folds = 10;
  int grid_size = 50;
  double grid_min_ratio = 1e-3;
  std::uint64_t seed = 0;
  int lambda2_grid_size = 5;  // secondary grid for the two-parameter families
};

struct CVResult {
  double best_lambda = 0.0;
  std::optional<double> best_lambda2;
  struct CurvePoint {
    double lambda;
    double mean_mse;
    double sd_mse;  // sample standard deviation across folds
  };
  std::vector<CurvePoint> cv_curve;  // at the selected lambda2 for two-parameter families
};

/// Penalty family plus the fixed structure (groups or chain order) it needs;
/// the lambdas themselves are what cross-validation chooses.
struct PenaltyStructure {
  PenaltyFamily family = PenaltyFamily::kLasso;
  std::optional<GroupAssignment> groups;   // group, sgroup
  std::optional<std::vector<int>> order;   // fused
};

// Geometric sequence from lambda_max down to grid_min_ratio * lambda_max,
// strictly decreasing, length grid_size. Degenerates to {0} when the
// response carries no signal (lambda_max = 0).
std::vector<double> make_lambda_grid(const ResponseView& v, const CVConfig& cfg);

// k-fold cross-validation over the lambda grid (and a secondary lambda2 grid
// for elastic net, fused and sparse group). Folds are contiguous blocks of a
// seeded permutation of the samples; the minimizer of the mean held-out MSE
// is returned, ties broken toward larger penalties.
CVResult cross_validate(const ResponseView& v, const PenaltyStructure& structure, const CVConfig& cfg,
                        const SolverOptions& opts = {});

}  // namespace pennet
