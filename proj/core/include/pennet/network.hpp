#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pennet/expression.hpp"
#include "pennet/grouping.hpp"
#include "pennet/model_selection.hpp"
#include "pennet/solvers.hpp"
#include "pennet/types.hpp"

namespace pennet {

/// Directed weighted adjacency: entry (i, j) is the coefficient of gene i in
/// the node-wise regression of response gene j. Zero diagonal.
struct WeightedNetwork {
  Eigen::MatrixXd weights;
  std::vector<std::string> gene_names;

  struct ColumnDiagnostic {
    bool converged = true;
    int iterations = 0;
    double max_kkt_violation = 0.0;
    double lambda = 0.0;
    std::optional<double> lambda2;
  };
  std::vector<ColumnDiagnostic> column_diagnostics;  // one per response gene
};

struct BinaryNetwork {
  BoolMatrix edges;
  bool directed = true;
  std::vector<std::string> gene_names;

  std::int64_t edge_count() const;  // ordered cells when directed, unordered pairs otherwise
};

struct PermutationConfig {
  int num_permutations = 100;  // A
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

enum class SymmetrizeRule { kAnd, kOr, kNone };

enum class GroupingMode { kPerResponse, kGlobal };

struct InferenceOptions {
  SolverOptions solver;
  int groups_k = 3;   // clusters for the group penalties
  int fused_k = 10;   // clusters for the fused chain order
  Linkage linkage = Linkage::kAverage;
  GroupingMode grouping = GroupingMode::kPerResponse;
  int threads = 1;
  std::optional<double> fixed_lambda;   // skip cross-validation when set
  std::optional<double> fixed_lambda2;
};

// Node-wise inference: each gene in turn is the response, its cross-validated
// fit fills column a of the weight matrix. Solver failures are recorded in
// the per-column diagnostics, never thrown.
WeightedNetwork infer_network(const ExpressionMatrix& m, PenaltyFamily family, const CVConfig& cv,
                              const InferenceOptions& opts = {});

// Joint paired-group fit at a fixed penalty.
WeightedNetwork infer_paired(const ExpressionMatrix& m, double lambda, const SolverOptions& opts = {});

// Keeps edge (i, j) iff |w_ij| strictly exceeds the q-quantile (linear
// interpolation) of all off-diagonal |weights|.
BinaryNetwork quantile_filter(const WeightedNetwork& w, double q);

BinaryNetwork symmetrize(const BinaryNetwork& b, SymmetrizeRule rule);

// Permutation stability wrapper: per response, lambda is selected once on
// the unpermuted data; the response is then permuted A times and refit at
// that lambda. Coefficients that fail to exceed the (1 - alpha)-quantile of
// the pooled permutation null are zeroed.
WeightedNetwork permutation_stability(const ExpressionMatrix& m, PenaltyFamily family, const CVConfig& cv,
                                      const PermutationConfig& pcfg, const InferenceOptions& opts = {});

// Linear-interpolation (type 7) quantile of a sample; q in [0, 1].
double quantile_type7(std::vector<double> values, double q);

// Edge-list serialization: gene_i <TAB> gene_j <TAB> weight, zero weights
// omitted; binary networks drop the weight column (undirected networks list
// each pair once).
void save_weighted_network(const WeightedNetwork& w, const std::string& path);
void save_binary_network(const BinaryNetwork& b, const std::string& path);

// Loads an edge list against a fixed gene universe (order defines indices).
// Lines may carry 2 or 3 columns; unknown gene names are an error naming the
// offending gene.
WeightedNetwork load_weighted_network(const std::string& path, const std::vector<std::string>& gene_names);
BinaryNetwork load_binary_network(const std::string& path, const std::vector<std::string>& gene_names);

}  // namespace pennet
