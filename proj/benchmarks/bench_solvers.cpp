#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "pennet/expression.hpp"
#include "pennet/model_selection.hpp"
#include "pennet/network.hpp"
#include "pennet/rng.hpp"
#include "pennet/solvers.hpp"
#include "pennet/synthetic.hpp"
#include "pennet/tv.hpp"

namespace {

using namespace pennet;

ExpressionMatrix random_matrix(int n, int p, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd values(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) values(i, j) = rng.normal();
  std::vector<std::string> names;
  for (int j = 0; j < p; ++j) names.push_back("g" + std::to_string(j));
  return standardize(ExpressionMatrix(std::move(values), names));
}

void bm_tv_prox(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(tv1d_prox(y, 0.3));
}
BENCHMARK(bm_tv_prox)->Arg(100)->Arg(1000)->Arg(10000);

void bm_lasso(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const ExpressionMatrix m = random_matrix(100, p + 1, 7);
  const ResponseView v = response_view(m, 0);
  const double lambda = 0.3 * lambda_max(v);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lasso(v, lambda));
}
BENCHMARK(bm_lasso)->Arg(20)->Arg(50)->Arg(200);

void bm_group(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const ExpressionMatrix m = random_matrix(100, p + 1, 9);
  const ResponseView v = response_view(m, 0);
  std::vector<int> labels(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) labels[static_cast<std::size_t>(j)] = j % 3;
  const GroupAssignment groups = GroupAssignment::from_labels(std::move(labels));
  for (auto _ : state) benchmark::DoNotOptimize(solve_group(v, 0.1, groups));
}
BENCHMARK(bm_group)->Arg(30)->Arg(90);

void bm_fused(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const ExpressionMatrix m = random_matrix(100, p + 1, 11);
  const ResponseView v = response_view(m, 0);
  std::vector<int> order(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) order[static_cast<std::size_t>(j)] = j;
  for (auto _ : state) benchmark::DoNotOptimize(solve_fused(v, 0.05, 0.05, order));
}
BENCHMARK(bm_fused)->Arg(20)->Arg(50);

void bm_hierarchical(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const ExpressionMatrix m = random_matrix(60, p, 13);
  for (auto _ : state) benchmark::DoNotOptimize(solve_hierarchical(m, 0, 0.1));
}
BENCHMARK(bm_hierarchical)->Arg(8)->Arg(15);

void bm_paired(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const ExpressionMatrix m = random_matrix(80, p, 17);
  const double lambda = 0.4 * paired_lambda_max(m);
  for (auto _ : state) benchmark::DoNotOptimize(solve_paired_group(m, lambda));
}
BENCHMARK(bm_paired)->Arg(10)->Arg(25);

void bm_simulate(benchmark::State& state) {
  GoldStandard tmpl = default_benchmark_template();
  const GoldStandard gold = sample_subnetwork(tmpl, static_cast<int>(state.range(0)), 5);
  SimulationConfig cfg;
  cfg.n_samples = 100;
  cfg.seed = 2;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_expression(gold, cfg));
}
BENCHMARK(bm_simulate)->Arg(50)->Arg(200);

void bm_infer_lasso_15(benchmark::State& state) {
  GoldStandard tmpl = default_benchmark_template();
  const GoldStandard gold = sample_subnetwork(tmpl, 15, 3);
  SimulationConfig sim;
  sim.n_samples = 100;
  sim.seed = 4;
  const ExpressionMatrix data = standardize(simulate_expression(gold, sim));
  CVConfig cv;
  for (auto _ : state) benchmark::DoNotOptimize(infer_network(data, PenaltyFamily::kLasso, cv));
}
BENCHMARK(bm_infer_lasso_15);

}  // namespace

BENCHMARK_MAIN();
