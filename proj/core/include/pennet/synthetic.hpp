#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pennet/expression.hpp"
#include "pennet/types.hpp"

namespace pennet {

/// Known true network: directed binary adjacency with zero diagonal.
struct GoldStandard {
  BoolMatrix edges;
  std::vector<std::string> gene_names;

  Eigen::Index n_genes() const { return edges.rows(); }
  std::int64_t edge_count() const;
};

struct SimulationConfig {
  Eigen::Index n_samples = 100;
  double noise_sd = 1.0;
  double weight_min = 0.3;  // |edge weight| drawn uniformly from [weight_min, weight_max]
  double weight_max = 0.9;
  std::uint64_t seed = 0;
};

// GeneNetWeaver-style edge list: `source <TAB> target <TAB> {0|1}` per line.
// Flag-1 lines are edges; flag-0 lines only register genes. Self-edges and
// contradictory duplicates are rejected. Gene order is first appearance.
GoldStandard load_gold_standard(const std::string& path);
void save_gold_standard(const GoldStandard& g, const std::string& path);

// Seeded random-walk vertex sampling on the undirected skeleton (restarting
// on dead ends and stalls) until `size` distinct vertices are collected;
// returns the induced directed subgraph in template gene order.
GoldStandard sample_subnetwork(const GoldStandard& tmpl, int size, std::uint64_t seed);

// Linear structural-equation sampler: draws signed edge weights on the gold
// edges, rescales to spectral radius <= 0.9, and samples rows of
// x = (I - W^T)^{-1} eps with eps ~ N(0, noise_sd^2) i.i.d.
ExpressionMatrix simulate_expression(const GoldStandard& g, const SimulationConfig& cfg);

// Built-in 300-gene scale-free-style template used by the benchmark harness
// when no template file is supplied. Deterministic.
GoldStandard default_benchmark_template();

}  // namespace pennet
