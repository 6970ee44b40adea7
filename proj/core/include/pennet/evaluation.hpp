#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pennet/model_selection.hpp"
#include "pennet/network.hpp"
#include "pennet/synthetic.hpp"

namespace pennet {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
};

/// One benchmark-table row. mcc is empty exactly when one of the four
/// marginal sums of the confusion matrix is zero (printed as NA).
struct MetricsReport {
  std::int64_t true_edges = 0;
  std::int64_t pred_edges = 0;
  ConfusionCounts counts;
  std::optional<double> mcc;
  double tpr = 0.0;
  double fpr = 0.0;
  double acc = 0.0;
  double seconds = 0.0;
};

// Classifies every ordered cell (i, j) of the p x p adjacency, diagonal
// included (always a true negative: neither side carries self-edges).
// Requires identical gene sets in identical order.
ConfusionCounts confusion(const BinaryNetwork& pred, const GoldStandard& gold);

MetricsReport compute_metrics(const ConfusionCounts& c, double seconds);

// The nine benchmarked pipelines: the plain node-wise penalties plus the
// permutation-stability wrapper around lasso (labnet), ridge and elastic net.
enum class BenchMethod {
  kLasso,
  kRidge,
  kEnet,
  kFused,
  kGroup,
  kHier,
  kLabnet,
  kRidgePerm,
  kEnetPerm,
};

std::string to_string(BenchMethod method);
BenchMethod bench_method_from_string(const std::string& name);

struct BenchConfig {
  GoldStandard template_network;
  Eigen::Index n_samples = 100;
  double noise_sd = 1.0;
  double weight_min = 0.3;
  double weight_max = 0.9;
  CVConfig cv;
  PermutationConfig perm;
  InferenceOptions infer;
  // Quantile for the edge filter; when unset each network is filtered to
  // target twice the number of true edges.
  std::optional<double> edge_quantile;
  std::uint64_t seed = 0;
};

struct BenchRow {
  int size = 0;
  std::string method;
  MetricsReport report;
  bool failed = false;
  std::string error;
};

// For each size: sample a subnetwork of the template, simulate expression
// data, then run every method end to end (inference, optional permutation
// wrapper, quantile filter, confusion, metrics) on that same dataset.
// Per-method failures become failed rows; the run continues.
std::vector<BenchRow> run_benchmark(const std::vector<int>& sizes, const std::vector<BenchMethod>& methods,
                                    const BenchConfig& cfg);

// Table-format TSV: header `method True Pred TP FP TN FN MCC TPR FPR ACC
// Time[sec]`, one `# size=...` comment line before each size block, MCC
// printed as NA when undefined.
void write_benchmark_tsv(const std::vector<BenchRow>& rows, std::ostream& out);

std::string format_metrics_row(const std::string& label, const MetricsReport& report);

extern const char kMetricsHeader[];

}  // namespace pennet
