#include "pennet/synthetic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "pennet/rng.hpp"

namespace pennet {

std::int64_t GoldStandard::edge_count() const {
  std::int64_t count = 0;
  for (Eigen::Index i = 0; i < edges.rows(); ++i)
    for (Eigen::Index j = 0; j < edges.cols(); ++j)
      if (edges(i, j)) ++count;
  return count;
}

GoldStandard load_gold_standard(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gold standard file: " + path);

  std::vector<std::string> names;
  std::unordered_map<std::string, int> index;
  auto intern = [&](const std::string& name) {
    const auto it = index.find(name);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(names.size());
    names.push_back(name);
    index.emplace(name, id);
    return id;
  };

  std::map<std::pair<int, int>, bool> flags;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string src, dst, flag;
    std::string extra;
    if (!(ss >> src >> dst >> flag) || (ss >> extra))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'source target {0|1}'");
    if (flag != "0" && flag != "1")
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": edge flag must be 0 or 1, got '" + flag + "'");
    if (src == dst)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": self-edge on gene '" + src + "'");
    const int s = intern(src);
    const int t = intern(dst);
    const bool present = flag == "1";
    const auto [it, inserted] = flags.emplace(std::make_pair(s, t), present);
    if (!inserted && it->second != present)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": contradictory duplicate for " + src +
                               " -> " + dst);
  }
  if (names.empty()) throw std::runtime_error("gold standard file lists no genes: " + path);

  GoldStandard g;
  g.gene_names = std::move(names);
  const Eigen::Index p = static_cast<Eigen::Index>(g.gene_names.size());
  g.edges = BoolMatrix::Constant(p, p, false);
  for (const auto& [pair, present] : flags)
    if (present) g.edges(pair.first, pair.second) = true;
  return g;
}

void save_gold_standard(const GoldStandard& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write gold standard file: " + path);
  for (Eigen::Index i = 0; i < g.edges.rows(); ++i)
    for (Eigen::Index j = 0; j < g.edges.cols(); ++j)
      if (g.edges(i, j))
        out << g.gene_names[static_cast<std::size_t>(i)] << '\t' << g.gene_names[static_cast<std::size_t>(j)]
            << "\t1\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

GoldStandard sample_subnetwork(const GoldStandard& tmpl, int size, std::uint64_t seed) {
  const Eigen::Index p = tmpl.n_genes();
  if (size < 2 || size > p) throw std::invalid_argument("subnetwork size must lie in [2, template size]");

  std::vector<std::vector<Eigen::Index>> adjacency(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      if (i != j && (tmpl.edges(i, j) || tmpl.edges(j, i))) adjacency[static_cast<std::size_t>(i)].push_back(j);

  Rng rng(seed);
  std::vector<bool> visited(static_cast<std::size_t>(p), false);
  int collected = 0;
  auto mark = [&](Eigen::Index v) {
    if (!visited[static_cast<std::size_t>(v)]) {
      visited[static_cast<std::size_t>(v)] = true;
      ++collected;
      return true;
    }
    return false;
  };

  Eigen::Index current = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(p)));
  mark(current);
  const int stall_limit = 10 * static_cast<int>(p) + 100;
  int stalled = 0;
  int restarts = 0;
  while (collected < size) {
    const auto& nbrs = adjacency[static_cast<std::size_t>(current)];
    bool restart = nbrs.empty() || stalled > stall_limit;
    if (!restart) {
      current = nbrs[rng.below(nbrs.size())];
      if (mark(current))
        stalled = 0;
      else
        ++stalled;
      continue;
    }
    if (++restarts > 10000)
      throw std::runtime_error("sample_subnetwork: could not collect " + std::to_string(size) +
                               " connected vertices (template too fragmented)");
    current = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(p)));
    mark(current);
    stalled = 0;
  }

  std::vector<Eigen::Index> chosen;
  for (Eigen::Index v = 0; v < p; ++v)
    if (visited[static_cast<std::size_t>(v)]) chosen.push_back(v);

  GoldStandard sub;
  const Eigen::Index s = static_cast<Eigen::Index>(chosen.size());
  sub.edges = BoolMatrix::Constant(s, s, false);
  sub.gene_names.reserve(static_cast<std::size_t>(s));
  for (Eigen::Index a = 0; a < s; ++a) sub.gene_names.push_back(tmpl.gene_names[static_cast<std::size_t>(chosen[a])]);
  for (Eigen::Index a = 0; a < s; ++a)
    for (Eigen::Index b = 0; b < s; ++b) sub.edges(a, b) = tmpl.edges(chosen[a], chosen[b]);
  return sub;
}

ExpressionMatrix simulate_expression(const GoldStandard& g, const SimulationConfig& cfg) {
  if (cfg.n_samples < 2) throw std::invalid_argument("simulate_expression: need at least 2 samples");
  if (!(cfg.noise_sd > 0)) throw std::invalid_argument("simulate_expression: noise_sd must be positive");
  if (!(cfg.weight_min > 0) || cfg.weight_min > cfg.weight_max)
    throw std::invalid_argument("simulate_expression: need 0 < weight_min <= weight_max");

  const Eigen::Index p = g.n_genes();
  Rng rng(cfg.seed);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!g.edges(i, j)) continue;
      const double magnitude = rng.uniform(cfg.weight_min, cfg.weight_max);
      W(i, j) = rng.below(2) == 0 ? magnitude : -magnitude;
    }

  // Keep the feedback loop stable: cap the spectral radius at 0.9.
  const Eigen::VectorXcd eigenvalues = Eigen::EigenSolver<Eigen::MatrixXd>(W, false).eigenvalues();
  const double radius = eigenvalues.cwiseAbs().maxCoeff();
  if (radius > 0.9) W *= 0.9 / radius;

  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(p, p) - W.transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);

  Eigen::MatrixXd values(cfg.n_samples, p);
  Eigen::VectorXd noise(p);
  for (Eigen::Index i = 0; i < cfg.n_samples; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) noise[j] = rng.normal(0.0, cfg.noise_sd);
    values.row(i) = lu.solve(noise).transpose();
  }
  return ExpressionMatrix(std::move(values), g.gene_names);
}

GoldStandard default_benchmark_template() {
  // Growing-network construction: each new gene attaches to one or two
  // earlier genes, biased toward genes that already regulate others, which
  // yields the hub-dominated shape typical of curated regulatory templates.
  constexpr int p = 300;
  Rng rng(0x5eedu);
  GoldStandard g;
  g.edges = BoolMatrix::Constant(p, p, false);
  g.gene_names.reserve(p);
  for (int i = 0; i < p; ++i) {
    char name[8];
    std::snprintf(name, sizeof(name), "G%03d", i + 1);
    g.gene_names.emplace_back(name);
  }
  std::vector<int> out_degree(p, 0);
  g.edges(0, 1) = true;
  out_degree[0] = 1;
  for (int v = 2; v < p; ++v) {
    const int attachments = 1 + static_cast<int>(rng.below(2));
    for (int e = 0; e < attachments; ++e) {
      // Preferential choice: pick an endpoint of a random existing edge.
      int regulator;
      if (rng.below(2) == 0) {
        regulator = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
      } else {
        int total = 0;
        for (int u = 0; u < v; ++u) total += out_degree[u] + 1;
        int ticket = static_cast<int>(rng.below(static_cast<std::uint64_t>(total)));
        regulator = 0;
        for (int u = 0; u < v; ++u) {
          ticket -= out_degree[u] + 1;
          if (ticket < 0) {
            regulator = u;
            break;
          }
        }
      }
      if (!g.edges(regulator, v)) {
        g.edges(regulator, v) = true;
        ++out_degree[regulator];
      }
    }
  }
  return g;
}

}  // namespace pennet
