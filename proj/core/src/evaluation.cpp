#include "pennet/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <stdexcept>

#include "pennet/rng.hpp"

namespace pennet {

ConfusionCounts confusion(const BinaryNetwork& pred, const GoldStandard& gold) {
  if (pred.gene_names != gold.gene_names) {
    for (const auto& name : pred.gene_names)
      if (std::find(gold.gene_names.begin(), gold.gene_names.end(), name) == gold.gene_names.end())
        throw std::runtime_error("gene set mismatch: predicted gene '" + name + "' missing from the gold standard");
    for (const auto& name : gold.gene_names)
      if (std::find(pred.gene_names.begin(), pred.gene_names.end(), name) == pred.gene_names.end())
        throw std::runtime_error("gene set mismatch: gold-standard gene '" + name + "' missing from the prediction");
    throw std::runtime_error("gene set mismatch: same genes, different order");
  }
  const Eigen::Index p = gold.n_genes();
  if (pred.edges.rows() != p || pred.edges.cols() != p)
    throw std::runtime_error("gene set mismatch: adjacency shapes differ");

  ConfusionCounts c;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      const bool predicted = i != j && pred.edges(i, j);
      const bool actual = i != j && gold.edges(i, j);
      if (predicted && actual)
        ++c.tp;
      else if (predicted && !actual)
        ++c.fp;
      else if (!predicted && actual)
        ++c.fn;
      else
        ++c.tn;
    }
  return c;
}

MetricsReport compute_metrics(const ConfusionCounts& c, double seconds) {
  if (c.tp < 0 || c.fp < 0 || c.tn < 0 || c.fn < 0) throw std::invalid_argument("negative confusion count");
  MetricsReport report;
  report.counts = c;
  report.true_edges = c.tp + c.fn;
  report.pred_edges = c.tp + c.fp;
  report.seconds = seconds;

  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
  const double total = tp + fp + tn + fn;
  if (total <= 0) throw std::invalid_argument("empty confusion matrix");

  if (c.tp + c.fp > 0 && c.tp + c.fn > 0 && c.tn + c.fp > 0 && c.tn + c.fn > 0)
    report.mcc = (tp * tn - fp * fn) /
                 (std::sqrt(tp + fp) * std::sqrt(tp + fn) * std::sqrt(tn + fp) * std::sqrt(tn + fn));
  report.tpr = c.tp + c.fn > 0 ? tp / (tp + fn) : 0.0;
  report.fpr = c.fp + c.tn > 0 ? fp / (fp + tn) : 0.0;
  report.acc = (tp + tn) / total;
  return report;
}

std::string to_string(BenchMethod method) {
  switch (method) {
    case BenchMethod::kLasso: return "lasso";
    case BenchMethod::kRidge: return "ridge";
    case BenchMethod::kEnet: return "enet";
    case BenchMethod::kFused: return "fused";
    case BenchMethod::kGroup: return "group";
    case BenchMethod::kHier: return "hier";
    case BenchMethod::kLabnet: return "labnet";
    case BenchMethod::kRidgePerm: return "ridgeperm";
    case BenchMethod::kEnetPerm: return "enetperm";
  }
  return "?";
}

BenchMethod bench_method_from_string(const std::string& name) {
  if (name == "lasso") return BenchMethod::kLasso;
  if (name == "ridge") return BenchMethod::kRidge;
  if (name == "enet") return BenchMethod::kEnet;
  if (name == "fused") return BenchMethod::kFused;
  if (name == "group") return BenchMethod::kGroup;
  if (name == "hier") return BenchMethod::kHier;
  if (name == "labnet") return BenchMethod::kLabnet;
  if (name == "ridgeperm") return BenchMethod::kRidgePerm;
  if (name == "enetperm") return BenchMethod::kEnetPerm;
  throw std::invalid_argument("unknown benchmark method: " + name);
}

namespace {

struct MethodPlan {
  PenaltyFamily family;
  bool permutation;
};

MethodPlan plan_for(BenchMethod method) {
  switch (method) {
    case BenchMethod::kLasso: return {PenaltyFamily::kLasso, false};
    case BenchMethod::kRidge: return {PenaltyFamily::kRidge, false};
    case BenchMethod::kEnet: return {PenaltyFamily::kElasticNet, false};
    case BenchMethod::kFused: return {PenaltyFamily::kFused, false};
    case BenchMethod::kGroup: return {PenaltyFamily::kGroup, false};
    case BenchMethod::kHier: return {PenaltyFamily::kHierarchical, false};
    case BenchMethod::kLabnet: return {PenaltyFamily::kLasso, true};
    case BenchMethod::kRidgePerm: return {PenaltyFamily::kRidge, true};
    case BenchMethod::kEnetPerm: return {PenaltyFamily::kElasticNet, true};
  }
  throw std::invalid_argument("unknown benchmark method");
}

}  // namespace

std::vector<BenchRow> run_benchmark(const std::vector<int>& sizes, const std::vector<BenchMethod>& methods,
                                    const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  rows.reserve(sizes.size() * methods.size());

  for (const int size : sizes) {
    const GoldStandard gold = size == cfg.template_network.n_genes()
                                  ? cfg.template_network
                                  : sample_subnetwork(cfg.template_network, size,
                                                      derive_seed(cfg.seed, static_cast<std::uint64_t>(size), 0));
    SimulationConfig sim;
    sim.n_samples = cfg.n_samples;
    sim.noise_sd = cfg.noise_sd;
    sim.weight_min = cfg.weight_min;
    sim.weight_max = cfg.weight_max;
    sim.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(size), 1);
    const ExpressionMatrix data = standardize(simulate_expression(gold, sim));

    const double p = static_cast<double>(gold.n_genes());
    const double off_diagonal = p * (p - 1.0);
    const double target_fraction = std::min(1.0, 2.0 * static_cast<double>(gold.edge_count()) / off_diagonal);
    const double quantile = cfg.edge_quantile.value_or(std::max(0.0, 1.0 - target_fraction));

    for (const BenchMethod method : methods) {
      BenchRow row;
      row.size = size;
      row.method = to_string(method);
      const auto start = std::chrono::steady_clock::now();
      try {
        const MethodPlan plan = plan_for(method);
        CVConfig cv = cfg.cv;
        cv.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(size), 2);
        PermutationConfig perm = cfg.perm;
        perm.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(size), 3);

        const WeightedNetwork weighted = plan.permutation
                                             ? permutation_stability(data, plan.family, cv, perm, cfg.infer)
                                             : infer_network(data, plan.family, cv, cfg.infer);
        const BinaryNetwork binary = quantile_filter(weighted, quantile);
        const ConfusionCounts counts = confusion(binary, gold);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        row.report = compute_metrics(counts, seconds);
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
        row.report = MetricsReport{};
        row.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cerr << "bench: " << row.method << " on size " << size << " failed: " << e.what() << "\n";
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

const char kMetricsHeader[] = "method\tTrue\tPred\tTP\tFP\tTN\tFN\tMCC\tTPR\tFPR\tACC\tTime[sec]";

std::string format_metrics_row(const std::string& label, const MetricsReport& report) {
  char buffer[256];
  char mcc[32];
  if (report.mcc)
    std::snprintf(mcc, sizeof(mcc), "%.6g", *report.mcc);
  else
    std::snprintf(mcc, sizeof(mcc), "NA");
  std::snprintf(buffer, sizeof(buffer),
                "%s\t%lld\t%lld\t%lld\t%lld\t%lld\t%lld\t%s\t%.6g\t%.6g\t%.6g\t%.3f",
                label.c_str(), static_cast<long long>(report.true_edges),
                static_cast<long long>(report.pred_edges), static_cast<long long>(report.counts.tp),
                static_cast<long long>(report.counts.fp), static_cast<long long>(report.counts.tn),
                static_cast<long long>(report.counts.fn), mcc, report.tpr, report.fpr, report.acc,
                report.seconds);
  return buffer;
}

void write_benchmark_tsv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << kMetricsHeader << '\n';
  int current_size = -1;
  for (const auto& row : rows) {
    if (row.size != current_size) {
      out << "# size=" << row.size << '\n';
      current_size = row.size;
    }
    out << format_metrics_row(row.method, row.report) << '\n';
  }
}

}  // namespace pennet
