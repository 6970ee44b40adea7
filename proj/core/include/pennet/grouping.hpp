#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pennet {

/// Partition of predictors into k non-empty groups.
struct GroupAssignment {
  std::vector<int> labels;  // group id in [0, k) per predictor
  int k = 0;
  std::vector<int> sizes;   // predictors per group

  static GroupAssignment from_labels(std::vector<int> labels);
  static GroupAssignment singletons(int n_predictors);
  void validate(int n_predictors) const;
};

enum class Linkage { kAverage, kComplete, kSingle };

struct CorrelationMatrix {
  Eigen::MatrixXd values;             // symmetric, unit diagonal, entries in [-1, 1]
  std::vector<bool> constant_column;  // columns with zero variance (correlation 0 by convention)
};

// Pearson correlation of the columns of X. Constant columns get off-diagonal
// correlation 0 and are flagged.
CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& X);

// Agglomerative clustering of the rows of C under Euclidean distance, cut to
// exactly k clusters. Ties merge the lexicographically smallest pair, so the
// result is deterministic. Group ids are ordered by smallest member index.
GroupAssignment cluster_predictors(const Eigen::MatrixXd& C, int k, Linkage linkage = Linkage::kAverage);

// Permutation placing same-group predictors contiguously: blocks in group-id
// order, ascending original index within a block.
std::vector<int> order_predictors(const GroupAssignment& assignment);

}  // namespace pennet
