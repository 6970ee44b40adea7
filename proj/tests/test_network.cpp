#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "pennet/evaluation.hpp"
#include "pennet/network.hpp"
#include "pennet/rng.hpp"
#include "pennet/synthetic.hpp"
#include "test_util.hpp"

using namespace pennet;

namespace {

ExpressionMatrix two_gene_chain(int n, std::uint64_t seed) {
  pennet::Rng rng(seed);
  Eigen::MatrixXd values(n, 2);
  for (int i = 0; i < n; ++i) {
    values(i, 0) = rng.normal();
    values(i, 1) = 2.0 * values(i, 0);
  }
  return standardize(ExpressionMatrix(values, test_util::gene_names(2)));
}

WeightedNetwork network_from(const Eigen::MatrixXd& weights) {
  WeightedNetwork w;
  w.weights = weights;
  w.gene_names = test_util::gene_names(static_cast<int>(weights.rows()));
  return w;
}

}  // namespace

TEST_CASE("noiseless mutual dependence yields both directed edges") {
  const ExpressionMatrix m = two_gene_chain(50, 3);
  CVConfig cv;
  cv.folds = 5;
  const WeightedNetwork net = infer_network(m, PenaltyFamily::kLasso, cv);
  CHECK(net.weights(0, 1) > 0.5);
  CHECK(net.weights(1, 0) > 0.5);
  CHECK(net.weights(0, 0) == 0.0);
  CHECK(net.weights(1, 1) == 0.0);
}

TEST_CASE("network shape matches the gene count") {
  const GoldStandard gold = load_gold_standard(std::string(PENNET_DATA_DIR) + "/ecoli15_gold.tsv");
  SimulationConfig sim;
  sim.n_samples = 60;
  sim.seed = 5;
  const ExpressionMatrix data = standardize(simulate_expression(gold, sim));
  CVConfig cv;
  cv.grid_size = 10;
  InferenceOptions opts;
  opts.threads = 4;
  const WeightedNetwork net = infer_network(data, PenaltyFamily::kLasso, cv, opts);
  CHECK(net.weights.rows() == 15);
  CHECK(net.weights.cols() == 15);
  CHECK(net.weights.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(net.column_diagnostics.size() == 15);
  int off_diagonal = 0;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; ++j)
      if (i != j) ++off_diagonal;
  CHECK(off_diagonal == 210);
}

TEST_CASE("independent genes stay unconnected after strict filtering") {
  const ExpressionMatrix data = standardize(test_util::random_expression(500, 15, 21));
  CVConfig cv;
  cv.grid_size = 20;
  InferenceOptions opts;
  opts.threads = 4;
  const WeightedNetwork net = infer_network(data, PenaltyFamily::kLasso, cv, opts);
  const BinaryNetwork filtered = quantile_filter(net, 0.99);
  CHECK(filtered.edge_count() <= static_cast<std::int64_t>(0.01 * 15 * 14) + 1);
}

TEST_CASE("quantile filter boundary semantics") {
  SUBCASE("all-equal magnitudes keep nothing at q = 0") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(4, 4, 0.7);
    w.diagonal().setZero();
    CHECK(quantile_filter(network_from(w), 0.0).edge_count() == 0);
  }
  SUBCASE("zeros plus signal: everything nonzero survives q = 0") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
    w(0, 1) = 0.5;
    w(2, 3) = -0.8;
    const BinaryNetwork b = quantile_filter(network_from(w), 0.0);
    CHECK(b.edge_count() == 2);
    CHECK(b.edges(0, 1));
    CHECK(b.edges(2, 3));
  }
  SUBCASE("all-zero network is empty for any q") {
    const Eigen::MatrixXd w = Eigen::MatrixXd::Zero(5, 5);
    for (const double q : {0.0, 0.5, 0.9}) CHECK(quantile_filter(network_from(w), q).edge_count() == 0);
  }
  SUBCASE("the Pred=24 normalization: 210 distinct weights") {
    pennet::Rng rng(8);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(15, 15);
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j)
        if (i != j) w(i, j) = 0.1 + rng.uniform01();
    const double q = 1.0 - 24.0 / 210.0;
    CHECK(quantile_filter(network_from(w), q).edge_count() == 24);
  }
  SUBCASE("rejects q outside [0, 1)") {
    const Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    CHECK_THROWS(quantile_filter(network_from(w), 1.0));
    CHECK_THROWS(quantile_filter(network_from(w), -0.1));
  }
}

TEST_CASE("quantile filtering is monotone in q") {
  pennet::Rng rng(77);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (i != j) w(i, j) = rng.normal();
  const WeightedNetwork net = network_from(w);
  BinaryNetwork previous = quantile_filter(net, 0.0);
  for (const double q : {0.2, 0.5, 0.8, 0.95}) {
    const BinaryNetwork current = quantile_filter(net, q);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        if (current.edges(i, j)) CHECK(previous.edges(i, j));
    previous = current;
  }
}

TEST_CASE("symmetrization rules") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = 1.0;
  const BinaryNetwork one_sided = quantile_filter(network_from(w), 0.0);
  REQUIRE(one_sided.edges(0, 1));
  REQUIRE_FALSE(one_sided.edges(1, 0));

  const BinaryNetwork under_and = symmetrize(one_sided, SymmetrizeRule::kAnd);
  CHECK(under_and.edge_count() == 0);
  CHECK_FALSE(under_and.directed);

  const BinaryNetwork under_or = symmetrize(one_sided, SymmetrizeRule::kOr);
  CHECK(under_or.edge_count() == 1);
  CHECK(under_or.edges(0, 1));
  CHECK(under_or.edges(1, 0));

  const BinaryNetwork untouched = symmetrize(one_sided, SymmetrizeRule::kNone);
  CHECK(untouched.directed);
  CHECK(untouched.edges == one_sided.edges);

  SUBCASE("symmetric input is a fixed point of both rules") {
    Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(3, 3);
    sym(0, 1) = sym(1, 0) = 1.0;
    const BinaryNetwork b = quantile_filter(network_from(sym), 0.0);
    CHECK(symmetrize(b, SymmetrizeRule::kAnd).edges == symmetrize(b, SymmetrizeRule::kOr).edges);
  }
}

TEST_CASE("permutation stability with alpha = 1 is the plain network") {
  const GoldStandard gold = load_gold_standard(std::string(PENNET_DATA_DIR) + "/ecoli15_gold.tsv");
  SimulationConfig sim;
  sim.n_samples = 50;
  sim.seed = 13;
  const ExpressionMatrix data = standardize(simulate_expression(gold, sim));
  CVConfig cv;
  cv.grid_size = 10;
  cv.seed = 4;
  InferenceOptions opts;
  opts.threads = 4;
  PermutationConfig perm;
  perm.num_permutations = 20;
  perm.alpha = 1.0;
  perm.seed = 9;
  const WeightedNetwork plain = infer_network(data, PenaltyFamily::kLasso, cv, opts);
  const WeightedNetwork stable = permutation_stability(data, PenaltyFamily::kLasso, cv, perm, opts);
  for (Eigen::Index i = 0; i < 15; ++i)
    for (Eigen::Index j = 0; j < 15; ++j) {
      if (plain.weights(i, j) != 0.0) CHECK(stable.weights(i, j) == plain.weights(i, j));
      else CHECK(stable.weights(i, j) == 0.0);
    }
}

TEST_CASE("stability support is a subset of the plain support") {
  const GoldStandard gold = load_gold_standard(std::string(PENNET_DATA_DIR) + "/ecoli15_gold.tsv");
  SimulationConfig sim;
  sim.n_samples = 80;
  sim.seed = 29;
  const ExpressionMatrix data = standardize(simulate_expression(gold, sim));
  CVConfig cv;
  cv.grid_size = 15;
  cv.seed = 12;
  InferenceOptions opts;
  opts.threads = 4;
  PermutationConfig perm;
  perm.num_permutations = 30;
  perm.alpha = 0.2;
  perm.seed = 3;
  const WeightedNetwork plain = infer_network(data, PenaltyFamily::kLasso, cv, opts);
  const WeightedNetwork stable = permutation_stability(data, PenaltyFamily::kLasso, cv, perm, opts);
  for (Eigen::Index i = 0; i < 15; ++i)
    for (Eigen::Index j = 0; j < 15; ++j)
      if (stable.weights(i, j) != 0.0) {
        CHECK(plain.weights(i, j) == stable.weights(i, j));
      }
}

TEST_CASE("pure-noise responses rarely survive the permutation filter") {
  // 50 seeded repetitions; expected survivors per response stay within 1.5x
  // of the nominal alpha level.
  const int reps = 50;
  PermutationConfig perm;
  perm.num_permutations = 100;
  perm.alpha = 0.05;
  CVConfig cv;
  cv.grid_size = 15;
  cv.folds = 5;
  InferenceOptions opts;
  opts.threads = 4;
  double survivors = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const ExpressionMatrix data = standardize(test_util::random_expression(30, 6, 1000 + rep));
    CVConfig cv_rep = cv;
    cv_rep.seed = static_cast<std::uint64_t>(rep);
    PermutationConfig perm_rep = perm;
    perm_rep.seed = static_cast<std::uint64_t>(rep * 31 + 1);
    const WeightedNetwork stable = permutation_stability(data, PenaltyFamily::kLasso, cv_rep, perm_rep, opts);
    for (Eigen::Index j = 0; j < 6; ++j)
      for (Eigen::Index i = 0; i < 6; ++i)
        if (stable.weights(i, j) != 0.0) survivors += 1.0;
  }
  const double per_response = survivors / (reps * 6.0);
  CHECK(per_response <= 0.05 * 5.0 * 1.5);
}

TEST_CASE("more permutations do not inflate the predicted edge count") {
  // On 50-gene subnetworks, A = 100 keeps at most as many edges as A = 10 in
  // at least 80% of seeded runs.
  const GoldStandard tmpl = default_benchmark_template();
  CVConfig cv;
  cv.grid_size = 15;
  cv.folds = 5;
  InferenceOptions opts;
  opts.threads = 8;
  int direction_holds = 0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    const GoldStandard gold = sample_subnetwork(tmpl, 50, 100 + static_cast<std::uint64_t>(s));
    SimulationConfig sim;
    sim.n_samples = 100;
    sim.seed = 200 + static_cast<std::uint64_t>(s);
    const ExpressionMatrix data = standardize(simulate_expression(gold, sim));
    CVConfig cv_run = cv;
    cv_run.seed = static_cast<std::uint64_t>(s);
    PermutationConfig few;
    few.num_permutations = 10;
    few.alpha = 0.05;
    few.seed = static_cast<std::uint64_t>(s) * 7 + 1;
    PermutationConfig many = few;
    many.num_permutations = 100;
    const WeightedNetwork with_few = permutation_stability(data, PenaltyFamily::kLasso, cv_run, few, opts);
    const WeightedNetwork with_many = permutation_stability(data, PenaltyFamily::kLasso, cv_run, many, opts);
    // Predicted edge count in the results-table sense: after the quantile filter
    // targeting twice the true edge count, as the benchmark harness does.
    const double target = std::min(1.0, 2.0 * static_cast<double>(gold.edge_count()) / (50.0 * 49.0));
    const double q = std::max(0.0, 1.0 - target);
    if (quantile_filter(with_many, q).edge_count() <= quantile_filter(with_few, q).edge_count())
      ++direction_holds;
  }
  CHECK(direction_holds >= 8);
}

TEST_CASE("paired inference") {
  const ExpressionMatrix m = standardize(test_util::random_expression(25, 4, 41));
  SUBCASE("full shrinkage gives the empty network") {
    const WeightedNetwork net = infer_paired(m, paired_lambda_max(m) * 1.01);
    CHECK(net.weights.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("pairs survive or die together") {
    const WeightedNetwork net = infer_paired(m, 0.3 * paired_lambda_max(m));
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j)
        if (i != j) CHECK((net.weights(i, j) != 0.0) == (net.weights(j, i) != 0.0));
  }
}

TEST_CASE("inference is deterministic across thread counts") {
  const GoldStandard gold = load_gold_standard(std::string(PENNET_DATA_DIR) + "/ecoli15_gold.tsv");
  SimulationConfig sim;
  sim.n_samples = 40;
  sim.seed = 55;
  const ExpressionMatrix data = standardize(simulate_expression(gold, sim));
  CVConfig cv;
  cv.grid_size = 8;
  cv.seed = 77;
  PermutationConfig perm;
  perm.num_permutations = 12;
  perm.seed = 5;
  InferenceOptions serial;
  serial.threads = 1;
  InferenceOptions parallel;
  parallel.threads = 8;
  const WeightedNetwork a = permutation_stability(data, PenaltyFamily::kLasso, cv, perm, serial);
  const WeightedNetwork b = permutation_stability(data, PenaltyFamily::kLasso, cv, perm, parallel);
  CHECK(a.weights == b.weights);
}

TEST_CASE("edge-list round trip") {
  pennet::Rng rng(6);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j && rng.uniform01() < 0.4) w(i, j) = rng.normal();
  const WeightedNetwork net = network_from(w);
  const std::string path = "/tmp/pennet_net_roundtrip.tsv";
  save_weighted_network(net, path);
  const WeightedNetwork back = load_weighted_network(path, net.gene_names);
  CHECK(back.weights == net.weights);

  const BinaryNetwork binary = quantile_filter(net, 0.0);
  save_binary_network(binary, path);
  const BinaryNetwork binary_back = load_binary_network(path, net.gene_names);
  CHECK(binary_back.edges == binary.edges);
  std::remove(path.c_str());
}

TEST_CASE("unknown gene names in edge lists are reported") {
  const std::string path = "/tmp/pennet_net_unknown.tsv";
  {
    std::ofstream out(path);
    out << "g1\tmystery\t0.5\n";
  }
  CHECK_THROWS_WITH_AS(load_weighted_network(path, test_util::gene_names(3)), doctest::Contains("mystery"),
                       std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("global grouping mode clusters once and still covers every response") {
  const ExpressionMatrix data = standardize(test_util::random_expression(40, 8, 61));
  CVConfig cv;
  cv.grid_size = 6;
  cv.folds = 5;
  InferenceOptions opts;
  opts.grouping = GroupingMode::kGlobal;
  opts.groups_k = 3;
  const WeightedNetwork net = infer_network(data, PenaltyFamily::kGroup, cv, opts);
  CHECK(net.weights.rows() == 8);
  CHECK(net.weights.diagonal().cwiseAbs().maxCoeff() == 0.0);
  for (const auto& d : net.column_diagnostics) CHECK(d.lambda > 0.0);
}
