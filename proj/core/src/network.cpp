#include "pennet/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "pennet/parallel.hpp"
#include "pennet/rng.hpp"

namespace pennet {

namespace {

struct ResponsePlan {
  PenaltyStructure structure;
  ResponseView view;
};

// Structure (groups or chain order) for one response. Per-response mode
// clusters the p-1 predictors of this regression; global mode reuses one
// clustering of all p genes with the response dropped (labels compacted).
ResponsePlan make_plan(const ExpressionMatrix& m, PenaltyFamily family, int a, const InferenceOptions& opts,
                       const GroupAssignment* global_groups) {
  ResponsePlan plan;
  plan.view = response_view(m, a);
  plan.structure.family = family;
  const int p_minus = static_cast<int>(plan.view.predictors.cols());

  const bool needs_groups = family == PenaltyFamily::kGroup || family == PenaltyFamily::kSparseGroup;
  const bool needs_order = family == PenaltyFamily::kFused;
  if (!needs_groups && !needs_order) return plan;

  GroupAssignment assignment;
  if (global_groups) {
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(p_minus));
    for (int idx : plan.view.predictor_indices) labels.push_back(global_groups->labels[static_cast<std::size_t>(idx)]);
    std::vector<int> remap(static_cast<std::size_t>(global_groups->k), -1);
    int next = 0;
    for (int& label : labels) {
      if (remap[static_cast<std::size_t>(label)] < 0) remap[static_cast<std::size_t>(label)] = next++;
      label = remap[static_cast<std::size_t>(label)];
    }
    assignment = GroupAssignment::from_labels(std::move(labels));
  } else {
    const int k_requested = needs_order ? opts.fused_k : opts.groups_k;
    const int k = std::clamp(k_requested, 1, p_minus);
    const CorrelationMatrix corr = correlation_matrix(plan.view.predictors);
    assignment = cluster_predictors(corr.values, k, opts.linkage);
  }
  if (needs_order)
    plan.structure.order = order_predictors(assignment);
  else
    plan.structure.groups = std::move(assignment);
  return plan;
}

FitResult fit_at(const ResponsePlan& plan, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l1,
                 double l2, const SolverOptions& solver) {
  switch (plan.structure.family) {
    case PenaltyFamily::kLasso:
      return detail::enet_cd(X, y, l1, 0.0, solver);
    case PenaltyFamily::kRidge:
      return detail::enet_cd(X, y, 0.0, l1, solver);
    case PenaltyFamily::kElasticNet:
      return detail::enet_cd(X, y, l1, l2, solver);
    case PenaltyFamily::kFused:
      return detail::fused_admm(X, y, l1, l2, *plan.structure.order, solver);
    case PenaltyFamily::kGroup:
      return detail::group_cd(X, y, l1, *plan.structure.groups, solver);
    case PenaltyFamily::kSparseGroup:
      return detail::sparse_group_cd(X, y, l1, l2, *plan.structure.groups, solver);
    case PenaltyFamily::kHierarchical: {
      const InteractionFit fit = detail::hier_admm(X, y, l1, l1, solver);
      FitResult out;
      out.coefficients = fit.main_effects();
      out.objective_value = fit.objective_value;
      out.iterations = fit.iterations;
      out.converged = fit.converged;
      out.max_kkt_violation = fit.max_kkt_violation;
      return out;
    }
    case PenaltyFamily::kPairedGroup:
      break;
  }
  throw std::invalid_argument("node-wise inference does not support this family");
}

struct ColumnFit {
  Eigen::VectorXd coefficients;
  WeightedNetwork::ColumnDiagnostic diagnostic;
  ResponsePlan plan;
  double lambda = 0.0;
  double lambda2 = 0.0;
};

ColumnFit fit_column(const ExpressionMatrix& m, PenaltyFamily family, int a, const CVConfig& cv,
                     const InferenceOptions& opts, const GroupAssignment* global_groups) {
  ColumnFit out;
  out.plan = make_plan(m, family, a, opts, global_groups);
  double l1, l2 = 0.0;
  std::optional<double> chosen2;
  if (opts.fixed_lambda) {
    l1 = *opts.fixed_lambda;
    l2 = opts.fixed_lambda2.value_or(0.0);
    if (opts.fixed_lambda2) chosen2 = l2;
  } else {
    CVConfig cv_gene = cv;
    cv_gene.seed = derive_seed(cv.seed, static_cast<std::uint64_t>(a));
    // Fold fits only rank lambdas; they run at a loosened tolerance. The
    // final fit below uses the configured one.
    SolverOptions fold_opts = opts.solver;
    fold_opts.tol = std::max(fold_opts.tol, 1e-4);
    const CVResult cv_result = cross_validate(out.plan.view, out.plan.structure, cv_gene, fold_opts);
    l1 = cv_result.best_lambda;
    chosen2 = cv_result.best_lambda2;
    l2 = chosen2.value_or(0.0);
  }
  const FitResult fit = fit_at(out.plan, out.plan.view.predictors, out.plan.view.y, l1, l2, opts.solver);
  out.coefficients = fit.coefficients;
  out.diagnostic = {fit.converged, fit.iterations, fit.max_kkt_violation, l1, chosen2};
  out.lambda = l1;
  out.lambda2 = l2;
  return out;
}

std::optional<GroupAssignment> maybe_global_groups(const ExpressionMatrix& m, PenaltyFamily family,
                                                   const InferenceOptions& opts) {
  const bool structured = family == PenaltyFamily::kGroup || family == PenaltyFamily::kSparseGroup ||
                          family == PenaltyFamily::kFused;
  if (!structured || opts.grouping != GroupingMode::kGlobal) return std::nullopt;
  const int k_requested = family == PenaltyFamily::kFused ? opts.fused_k : opts.groups_k;
  const int k = std::clamp(k_requested, 1, static_cast<int>(m.n_genes()));
  const CorrelationMatrix corr = correlation_matrix(m.values());
  return cluster_predictors(corr.values, k, opts.linkage);
}

}  // namespace

std::int64_t BinaryNetwork::edge_count() const {
  std::int64_t count = 0;
  for (Eigen::Index i = 0; i < edges.rows(); ++i)
    for (Eigen::Index j = 0; j < edges.cols(); ++j) {
      if (i == j || !edges(i, j)) continue;
      if (!directed && j < i) continue;
      ++count;
    }
  return count;
}

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

WeightedNetwork infer_network(const ExpressionMatrix& m, PenaltyFamily family, const CVConfig& cv,
                              const InferenceOptions& opts) {
  if (!m.standardized()) throw std::runtime_error("infer_network requires a standardized matrix");
  if (family == PenaltyFamily::kPairedGroup)
    throw std::invalid_argument("the paired penalty is fit jointly; use infer_paired");
  const Eigen::Index p = m.n_genes();
  const std::optional<GroupAssignment> global_groups = maybe_global_groups(m, family, opts);

  WeightedNetwork net;
  net.weights = Eigen::MatrixXd::Zero(p, p);
  net.gene_names = m.gene_names();
  net.column_diagnostics.resize(static_cast<std::size_t>(p));

  std::vector<ColumnFit> fits(static_cast<std::size_t>(p));
  parallel_for(static_cast<std::size_t>(p), opts.threads, [&](std::size_t a) {
    fits[a] = fit_column(m, family, static_cast<int>(a), cv, opts, global_groups ? &*global_groups : nullptr);
  });
  for (Eigen::Index a = 0; a < p; ++a) {
    const ColumnFit& fit = fits[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < fit.plan.view.predictor_indices.size(); ++c)
      net.weights(fit.plan.view.predictor_indices[c], a) = fit.coefficients[static_cast<Eigen::Index>(c)];
    net.column_diagnostics[static_cast<std::size_t>(a)] = fit.diagnostic;
  }
  return net;
}

WeightedNetwork infer_paired(const ExpressionMatrix& m, double lambda, const SolverOptions& opts) {
  const PairedFit fit = solve_paired_group(m, lambda, opts);
  WeightedNetwork net;
  net.weights = fit.matrix;
  net.gene_names = m.gene_names();
  net.column_diagnostics.assign(static_cast<std::size_t>(m.n_genes()),
                                {fit.converged, fit.iterations, fit.max_kkt_violation, lambda, std::nullopt});
  return net;
}

BinaryNetwork quantile_filter(const WeightedNetwork& w, double q) {
  if (q < 0.0 || q >= 1.0) throw std::invalid_argument("edge quantile must lie in [0, 1)");
  const Eigen::Index p = w.weights.rows();
  std::vector<double> magnitudes;
  magnitudes.reserve(static_cast<std::size_t>(p * (p - 1)));
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      if (i != j) magnitudes.push_back(std::abs(w.weights(i, j)));
  const double threshold = quantile_type7(std::move(magnitudes), q);

  BinaryNetwork out;
  out.directed = true;
  out.gene_names = w.gene_names;
  out.edges = BoolMatrix::Constant(p, p, false);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      if (i != j && std::abs(w.weights(i, j)) > threshold) out.edges(i, j) = true;
  return out;
}

BinaryNetwork symmetrize(const BinaryNetwork& b, SymmetrizeRule rule) {
  if (rule == SymmetrizeRule::kNone) return b;
  if (!b.directed) throw std::invalid_argument("symmetrize expects a directed network");
  BinaryNetwork out;
  out.gene_names = b.gene_names;
  out.directed = false;
  const Eigen::Index p = b.edges.rows();
  out.edges = BoolMatrix::Constant(p, p, false);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const bool keep = rule == SymmetrizeRule::kAnd ? (b.edges(i, j) && b.edges(j, i))
                                                     : (b.edges(i, j) || b.edges(j, i));
      out.edges(i, j) = keep;
      out.edges(j, i) = keep;
    }
  return out;
}

WeightedNetwork permutation_stability(const ExpressionMatrix& m, PenaltyFamily family, const CVConfig& cv,
                                      const PermutationConfig& pcfg, const InferenceOptions& opts) {
  if (!m.standardized()) throw std::runtime_error("permutation_stability requires a standardized matrix");
  if (pcfg.num_permutations < 1) throw std::invalid_argument("need at least one permutation");
  if (!(pcfg.alpha > 0.0 && pcfg.alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (family == PenaltyFamily::kPairedGroup)
    throw std::invalid_argument("the paired penalty is fit jointly; use infer_paired");

  const Eigen::Index p = m.n_genes();
  const std::optional<GroupAssignment> global_groups = maybe_global_groups(m, family, opts);

  WeightedNetwork net;
  net.weights = Eigen::MatrixXd::Zero(p, p);
  net.gene_names = m.gene_names();
  net.column_diagnostics.resize(static_cast<std::size_t>(p));

  std::vector<ColumnFit> fits(static_cast<std::size_t>(p));
  parallel_for(static_cast<std::size_t>(p), opts.threads, [&](std::size_t a) {
    ColumnFit fit = fit_column(m, family, static_cast<int>(a), cv, opts, global_groups ? &*global_groups : nullptr);

    // Null distribution: refits against permuted responses, pooled per response.
    const Eigen::Index q = fit.plan.view.predictors.cols();
    std::vector<double> null_pool;
    null_pool.reserve(static_cast<std::size_t>(pcfg.num_permutations) * static_cast<std::size_t>(q));
    for (int t = 0; t < pcfg.num_permutations; ++t) {
      Rng rng(derive_seed(pcfg.seed, static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(t + 1)));
      Eigen::VectorXd y_perm = fit.plan.view.y;
      rng.shuffle(y_perm.data(), static_cast<std::size_t>(y_perm.size()));
      const FitResult refit = fit_at(fit.plan, fit.plan.view.predictors, y_perm, fit.lambda, fit.lambda2, opts.solver);
      for (Eigen::Index c = 0; c < q; ++c) null_pool.push_back(std::abs(refit.coefficients[c]));
    }
    const double threshold = quantile_type7(std::move(null_pool), 1.0 - pcfg.alpha);
    for (Eigen::Index c = 0; c < q; ++c)
      if (std::abs(fit.coefficients[c]) <= threshold) fit.coefficients[c] = 0.0;
    fits[a] = std::move(fit);
  });

  for (Eigen::Index a = 0; a < p; ++a) {
    const ColumnFit& fit = fits[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < fit.plan.view.predictor_indices.size(); ++c)
      net.weights(fit.plan.view.predictor_indices[c], a) = fit.coefficients[static_cast<Eigen::Index>(c)];
    net.column_diagnostics[static_cast<std::size_t>(a)] = fit.diagnostic;
  }
  return net;
}

void save_weighted_network(const WeightedNetwork& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file: " + path);
  char buffer[64];
  for (Eigen::Index i = 0; i < w.weights.rows(); ++i)
    for (Eigen::Index j = 0; j < w.weights.cols(); ++j) {
      if (i == j || w.weights(i, j) == 0.0) continue;
      std::snprintf(buffer, sizeof(buffer), "%.17g", w.weights(i, j));
      out << w.gene_names[static_cast<std::size_t>(i)] << '\t' << w.gene_names[static_cast<std::size_t>(j)]
          << '\t' << buffer << '\n';
    }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void save_binary_network(const BinaryNetwork& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file: " + path);
  for (Eigen::Index i = 0; i < b.edges.rows(); ++i)
    for (Eigen::Index j = 0; j < b.edges.cols(); ++j) {
      if (i == j || !b.edges(i, j)) continue;
      if (!b.directed && j < i) continue;
      out << b.gene_names[static_cast<std::size_t>(i)] << '\t' << b.gene_names[static_cast<std::size_t>(j)] << '\n';
    }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::unordered_map<std::string, Eigen::Index> name_index(const std::vector<std::string>& names) {
  std::unordered_map<std::string, Eigen::Index> map;
  for (std::size_t i = 0; i < names.size(); ++i) map.emplace(names[i], static_cast<Eigen::Index>(i));
  return map;
}

Eigen::Index lookup(const std::unordered_map<std::string, Eigen::Index>& map, const std::string& name) {
  const auto it = map.find(name);
  if (it == map.end()) throw std::runtime_error("gene '" + name + "' is not part of the expected gene set");
  return it->second;
}

}  // namespace

WeightedNetwork load_weighted_network(const std::string& path, const std::vector<std::string>& gene_names) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file: " + path);
  const auto index = name_index(gene_names);
  WeightedNetwork net;
  net.gene_names = gene_names;
  const Eigen::Index p = static_cast<Eigen::Index>(gene_names.size());
  net.weights = Eigen::MatrixXd::Zero(p, p);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string src, dst, weight;
    if (!(ss >> src >> dst >> weight))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'gene gene weight'");
    const Eigen::Index i = lookup(index, src);
    const Eigen::Index j = lookup(index, dst);
    if (i == j) throw std::runtime_error(path + ":" + std::to_string(line_no) + ": self-edge " + src);
    net.weights(i, j) = std::stod(weight);
  }
  return net;
}

BinaryNetwork load_binary_network(const std::string& path, const std::vector<std::string>& gene_names) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file: " + path);
  const auto index = name_index(gene_names);
  BinaryNetwork net;
  net.directed = true;
  net.gene_names = gene_names;
  const Eigen::Index p = static_cast<Eigen::Index>(gene_names.size());
  net.edges = BoolMatrix::Constant(p, p, false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string src, dst;
    if (!(ss >> src >> dst))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'gene gene'");
    const Eigen::Index i = lookup(index, src);
    const Eigen::Index j = lookup(index, dst);
    if (i == j) throw std::runtime_error(path + ":" + std::to_string(line_no) + ": self-edge " + src);
    net.edges(i, j) = true;
  }
  return net;
}

}  // namespace pennet
