// pennet: penalized-regression inference of gene interaction networks.
//
// Subcommands: simulate (expression data from a gold-standard network),
// infer (node-wise penalized regression), eval (confusion metrics against a
// gold standard), bench (the full simulate-infer-score loop over sizes and
// methods).

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pennet/evaluation.hpp"
#include "pennet/expression.hpp"
#include "pennet/network.hpp"
#include "pennet/solvers.hpp"
#include "pennet/synthetic.hpp"

namespace {

using namespace pennet;

Linkage parse_linkage(const std::string& name) {
  if (name == "average") return Linkage::kAverage;
  if (name == "complete") return Linkage::kComplete;
  if (name == "single") return Linkage::kSingle;
  throw CLI::ValidationError("--linkage", "must be one of average|complete|single");
}

SymmetrizeRule parse_symmetrize(const std::string& name) {
  if (name == "and") return SymmetrizeRule::kAnd;
  if (name == "or") return SymmetrizeRule::kOr;
  if (name == "none") return SymmetrizeRule::kNone;
  throw CLI::ValidationError("--symmetrize", "must be one of and|or|none");
}

struct SimulateArgs {
  std::string gold_path;
  std::string out_path;
  SimulationConfig sim;
};

struct CommonInferArgs {
  CVConfig cv;
  PermutationConfig perm;
  InferenceOptions infer;
  std::string linkage = "average";
  bool global_groups = false;
  std::uint64_t seed = 0;
};

struct InferArgs {
  std::string expr_path;
  std::string out_path;
  bool transpose = false;
  std::string method = "lasso";
  CommonInferArgs common;
  double lambda = -1.0;   // < 0 means cross-validate
  double lambda2 = -1.0;
  double edge_quantile = -1.0;  // < 0 means keep the weighted network
  std::string symmetrize_rule = "none";
};

struct EvalArgs {
  std::string pred_path;
  std::string gold_path;
  double edge_quantile = 0.0;
};

struct BenchArgs {
  std::vector<int> sizes{15};
  std::vector<std::string> methods{"lasso", "ridge", "enet", "fused", "group",
                                   "hier",  "labnet", "ridgeperm", "enetperm"};
  std::string template_path;
  std::string out_path;
  Eigen::Index n_samples = 100;
  double noise_sd = 1.0;
  double wmin = 0.3;
  double wmax = 0.9;
  CommonInferArgs common;
  double edge_quantile = -1.0;  // < 0 means target 2x true edges
};

void add_solver_flags(CLI::App* cmd, SolverOptions& solver) {
  cmd->add_option("--tol", solver.tol, "Convergence tolerance (max coefficient change per sweep)")
      ->capture_default_str();
  cmd->add_option("--max-iter", solver.max_iterations, "Iteration cap per fit")->capture_default_str();
}

void add_common_flags(CLI::App* cmd, CommonInferArgs& args) {
  cmd->add_option("--seed", args.seed, "Seed for every stochastic step")->capture_default_str();
  cmd->add_option("--cv-folds", args.cv.folds, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--cv-grid", args.cv.grid_size, "Lambda grid size")->capture_default_str();
  cmd->add_option("--cv-min-ratio", args.cv.grid_min_ratio, "Smallest grid lambda as a fraction of lambda_max")
      ->capture_default_str();
  cmd->add_option("--groups-k", args.infer.groups_k, "Clusters for the group penalties")->capture_default_str();
  cmd->add_option("--fused-k", args.infer.fused_k, "Clusters for the fused chain order")->capture_default_str();
  cmd->add_option("--linkage", args.linkage, "Clustering linkage: average|complete|single")
      ->capture_default_str();
  cmd->add_flag("--global-groups", args.global_groups,
                "Cluster all genes once instead of per response (non-default mode)");
  cmd->add_option("--permutations", args.perm.num_permutations, "Permutations A for the stability wrapper")
      ->capture_default_str();
  cmd->add_option("--alpha", args.perm.alpha, "Stability level: coefficients must beat the (1-alpha) null quantile")
      ->capture_default_str();
  cmd->add_option("--threads", args.infer.threads, "Worker threads (any value reproduces --threads 1 exactly)")
      ->capture_default_str();
  add_solver_flags(cmd, args.infer.solver);
}

void finish_common(CommonInferArgs& args) {
  args.infer.linkage = parse_linkage(args.linkage);
  args.infer.grouping = args.global_groups ? GroupingMode::kGlobal : GroupingMode::kPerResponse;
  args.cv.seed = args.seed;
  args.perm.seed = args.seed;
}

// Flat key=value config support. Values from the file are injected as
// options right after the subcommand, so anything typed on the command line
// overrides them (options take the last occurrence).
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      config_path = args[i].substr(9);
  }
  if (config_path.empty() || args.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + config_path);
  std::vector<std::string> from_file;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    const std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const std::size_t end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error("config file: expected key=value, got '" + line + "'");
    from_file.push_back("--" + line.substr(0, eq) + "=" + line.substr(eq + 1));
  }
  args.insert(args.begin() + 1, from_file.begin(), from_file.end());
  return args;
}

int run_simulate(const SimulateArgs& args) {
  const GoldStandard gold = load_gold_standard(args.gold_path);
  const ExpressionMatrix data = simulate_expression(gold, args.sim);
  save_expression(data, args.out_path);
  std::cerr << "simulated " << data.n_samples() << " samples for " << data.n_genes() << " genes -> "
            << args.out_path << "\n";
  return 0;
}

int run_infer(InferArgs& args) {
  finish_common(args.common);
  const ExpressionMatrix raw = load_expression(args.expr_path, args.transpose);
  const ExpressionMatrix data = standardize(raw);

  if (args.lambda >= 0) args.common.infer.fixed_lambda = args.lambda;
  if (args.lambda2 >= 0) args.common.infer.fixed_lambda2 = args.lambda2;

  WeightedNetwork network;
  if (args.method == "paired") {
    if (args.lambda < 0)
      throw std::runtime_error("infer --method paired fits jointly at a fixed penalty: pass --lambda");
    network = infer_paired(data, args.lambda, args.common.infer.solver);
  } else if (args.method == "labnet" || args.method == "ridgeperm" || args.method == "enetperm") {
    const PenaltyFamily family = args.method == "labnet"     ? PenaltyFamily::kLasso
                                 : args.method == "ridgeperm" ? PenaltyFamily::kRidge
                                                              : PenaltyFamily::kElasticNet;
    network = permutation_stability(data, family, args.common.cv, args.common.perm, args.common.infer);
  } else {
    network = infer_network(data, penalty_family_from_string(args.method), args.common.cv, args.common.infer);
  }

  int unconverged = 0;
  for (const auto& d : network.column_diagnostics)
    if (!d.converged) ++unconverged;
  if (unconverged > 0)
    std::cerr << "warning: " << unconverged << " of " << network.column_diagnostics.size()
              << " node-wise fits did not converge\n";

  if (args.edge_quantile >= 0) {
    BinaryNetwork binary = quantile_filter(network, args.edge_quantile);
    binary = symmetrize(binary, parse_symmetrize(args.symmetrize_rule));
    save_binary_network(binary, args.out_path);
    std::cerr << "wrote " << binary.edge_count() << " edges -> " << args.out_path << "\n";
  } else {
    save_weighted_network(network, args.out_path);
    std::cerr << "wrote weighted network -> " << args.out_path << "\n";
  }
  return 0;
}

int run_eval(const EvalArgs& args) {
  const GoldStandard gold = load_gold_standard(args.gold_path);

  // Two columns are a binary edge list, three a weighted one.
  std::ifstream probe(args.pred_path);
  if (!probe) throw std::runtime_error("cannot open predicted network: " + args.pred_path);
  std::string first_line;
  int columns = 0;
  while (std::getline(probe, first_line) && columns == 0) {
    if (first_line.empty()) continue;
    columns = 1;
    for (const char c : first_line)
      if (c == '\t') ++columns;
  }
  probe.close();

  BinaryNetwork pred;
  if (columns >= 3) {
    const WeightedNetwork weighted = load_weighted_network(args.pred_path, gold.gene_names);
    pred = quantile_filter(weighted, args.edge_quantile);
  } else {
    pred = load_binary_network(args.pred_path, gold.gene_names);
  }

  const ConfusionCounts counts = confusion(pred, gold);
  const MetricsReport report = compute_metrics(counts, 0.0);
  const std::string label = std::filesystem::path(args.pred_path).stem().string();
  std::cout << kMetricsHeader << '\n' << format_metrics_row(label, report) << '\n';
  return 0;
}

int run_bench(BenchArgs& args) {
  finish_common(args.common);
  BenchConfig cfg;
  cfg.template_network =
      args.template_path.empty() ? default_benchmark_template() : load_gold_standard(args.template_path);
  cfg.n_samples = args.n_samples;
  cfg.noise_sd = args.noise_sd;
  cfg.weight_min = args.wmin;
  cfg.weight_max = args.wmax;
  cfg.cv = args.common.cv;
  cfg.perm = args.common.perm;
  cfg.infer = args.common.infer;
  cfg.seed = args.common.seed;
  if (args.edge_quantile >= 0) cfg.edge_quantile = args.edge_quantile;

  std::vector<BenchMethod> methods;
  methods.reserve(args.methods.size());
  for (const auto& name : args.methods) methods.push_back(bench_method_from_string(name));

  const std::vector<BenchRow> rows = run_benchmark(args.sizes, methods, cfg);
  std::ofstream out(args.out_path);
  if (!out) throw std::runtime_error("cannot write results file: " + args.out_path);
  write_benchmark_tsv(rows, out);
  int failures = 0;
  for (const auto& row : rows)
    if (row.failed) ++failures;
  std::cerr << "wrote " << rows.size() << " rows -> " << args.out_path;
  if (failures > 0) std::cerr << " (" << failures << " failed)";
  std::cerr << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized-regression toolkit for gene interaction networks"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_sink;

  SimulateArgs simulate_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Sample expression data from a gold-standard network");
  simulate->add_option("--gold", simulate_args.gold_path, "Gold standard edge list (source<TAB>target<TAB>{0|1})")
      ->required();
  simulate->add_option("--n", simulate_args.sim.n_samples, "Samples to draw")->capture_default_str();
  simulate->add_option("--seed", simulate_args.sim.seed, "Simulation seed")->capture_default_str();
  simulate->add_option("--noise-sd", simulate_args.sim.noise_sd, "Innovation noise standard deviation")
      ->capture_default_str();
  simulate->add_option("--wmin", simulate_args.sim.weight_min, "Smallest |edge weight|")->capture_default_str();
  simulate->add_option("--wmax", simulate_args.sim.weight_max, "Largest |edge weight|")->capture_default_str();
  simulate->add_option("--out", simulate_args.out_path, "Output expression TSV")->required();
  simulate->add_option("--config", config_sink, "Flat key=value config file; flags override file values");

  InferArgs infer_args;
  CLI::App* infer = app.add_subcommand("infer", "Infer a weighted interaction network from expression data");
  infer->add_option("--expr", infer_args.expr_path, "Expression TSV (header of gene names, one sample per row)")
      ->required();
  infer->add_flag("--transpose", infer_args.transpose, "Numeric block is gene-per-row");
  infer->add_option("--method,--penalty", infer_args.method,
                    "lasso|ridge|enet|fused|group|sgroup|paired|hier|labnet|ridgeperm|enetperm")
      ->capture_default_str();
  infer->add_option("--lambda", infer_args.lambda, "Fixed penalty (skips cross-validation)");
  infer->add_option("--lambda2", infer_args.lambda2, "Fixed secondary penalty for enet|fused|sgroup");
  infer->add_option("--edge-quantile", infer_args.edge_quantile,
                    "Binarize: keep |weights| above this quantile of all off-diagonal magnitudes");
  infer->add_option("--symmetrize", infer_args.symmetrize_rule, "and|or|none, applied after --edge-quantile")
      ->capture_default_str();
  infer->add_option("--out", infer_args.out_path, "Output edge list")->required();
  add_common_flags(infer, infer_args.common);
  infer->add_option("--config", config_sink, "Flat key=value config file; flags override file values");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Score a predicted network against a gold standard");
  eval->add_option("--pred", eval_args.pred_path, "Predicted network edge list (2 or 3 columns)")->required();
  eval->add_option("--gold", eval_args.gold_path, "Gold standard edge list")->required();
  eval->add_option("--edge-quantile", eval_args.edge_quantile, "Quantile filter for weighted predictions")
      ->capture_default_str();
  eval->add_option("--config", config_sink, "Flat key=value config file; flags override file values");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Benchmark methods on simulated data from a template network");
  bench->add_option("--sizes", bench_args.sizes, "Subnetwork sizes, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--methods", bench_args.methods, "Methods, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--template", bench_args.template_path,
                    "Template network file (default: built-in 300-gene template)");
  bench->add_option("--n", bench_args.n_samples, "Samples per dataset")->capture_default_str();
  bench->add_option("--noise-sd", bench_args.noise_sd, "Innovation noise standard deviation")
      ->capture_default_str();
  bench->add_option("--wmin", bench_args.wmin, "Smallest |edge weight|")->capture_default_str();
  bench->add_option("--wmax", bench_args.wmax, "Largest |edge weight|")->capture_default_str();
  bench->add_option("--edge-quantile", bench_args.edge_quantile,
                    "Edge filter quantile (default: target twice the true edge count)");
  bench->add_option("--out", bench_args.out_path, "Results TSV")->required();
  add_common_flags(bench, bench_args.common);
  bench->add_option("--config", config_sink, "Flat key=value config file; flags override file values");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes arguments back to front
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (simulate->parsed()) return run_simulate(simulate_args);
    if (infer->parsed()) return run_infer(infer_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (bench->parsed()) return run_bench(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
