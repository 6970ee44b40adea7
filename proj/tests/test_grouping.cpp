#include <doctest.h>

#include <algorithm>

#include "pennet/grouping.hpp"
#include "pennet/rng.hpp"
#include "test_util.hpp"

using namespace pennet;

TEST_CASE("correlation matrix basics") {
  pennet::Rng rng(4);
  Eigen::MatrixXd X(20, 3);
  for (Eigen::Index i = 0; i < 20; ++i) X(i, 0) = rng.normal();
  X.col(1) = 3.0 * X.col(0);             // identical up to positive scale
  X.col(2) = -X.col(0);                  // negation
  const CorrelationMatrix c = correlation_matrix(X);
  CHECK(c.values(0, 1) == doctest::Approx(1.0));
  CHECK(c.values(0, 2) == doctest::Approx(-1.0));
  CHECK(c.values(1, 2) == doctest::Approx(-1.0));
  for (int j = 0; j < 3; ++j) CHECK(c.values(j, j) == 1.0);
  CHECK(c.values == c.values.transpose().eval());
}

TEST_CASE("independent columns decorrelate at large n") {
  pennet::Rng rng(1234);
  Eigen::MatrixXd X(10000, 4);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < 4; ++j) X(i, j) = rng.normal();
  const CorrelationMatrix c = correlation_matrix(X);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) CHECK(std::abs(c.values(i, j)) < 0.05);
}

TEST_CASE("constant columns get correlation zero by convention") {
  Eigen::MatrixXd X(6, 3);
  X.col(0).setConstant(2.5);
  for (int i = 0; i < 6; ++i) {
    X(i, 1) = static_cast<double>(i);
    X(i, 2) = static_cast<double>(i * i);
  }
  const CorrelationMatrix c = correlation_matrix(X);
  CHECK(c.constant_column[0]);
  CHECK(c.values(0, 1) == 0.0);
  CHECK(c.values(0, 2) == 0.0);
  CHECK(c.values(0, 0) == 1.0);
}

TEST_CASE("correlation is invariant under positive column rescaling") {
  pennet::Rng rng(9);
  Eigen::MatrixXd X(15, 3);
  for (Eigen::Index i = 0; i < 15; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.normal();
  const CorrelationMatrix base = correlation_matrix(X);
  Eigen::MatrixXd scaled = X;
  scaled.col(1) *= 17.0;
  scaled.col(2) *= 0.003;
  const CorrelationMatrix after = correlation_matrix(scaled);
  CHECK((base.values - after.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("clustering cut sizes") {
  const Eigen::MatrixXd C = Eigen::MatrixXd::Identity(5, 5);
  SUBCASE("k = m gives singletons") {
    const GroupAssignment g = cluster_predictors(C, 5);
    CHECK(g.k == 5);
    for (int s : g.sizes) CHECK(s == 1);
  }
  SUBCASE("k = 1 gives one group") {
    const GroupAssignment g = cluster_predictors(C, 1);
    CHECK(g.k == 1);
    CHECK(g.sizes[0] == 5);
  }
  SUBCASE("k out of range") {
    CHECK_THROWS(cluster_predictors(C, 0));
    CHECK_THROWS(cluster_predictors(C, 6));
  }
}

TEST_CASE("two perfect correlation blocks are recovered at k = 2") {
  // Predictors 0-2 fully correlated, 3-5 fully correlated, blocks independent.
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if ((i < 3) == (j < 3)) C(i, j) = 1.0;
  const GroupAssignment g = cluster_predictors(C, 2);
  CHECK(g.k == 2);
  CHECK(g.labels[0] == g.labels[1]);
  CHECK(g.labels[1] == g.labels[2]);
  CHECK(g.labels[3] == g.labels[4]);
  CHECK(g.labels[4] == g.labels[5]);
  CHECK(g.labels[0] != g.labels[3]);

  // Brute force over all 2-partitions: only the block split has zero
  // within-group row distances.
  for (int mask = 1; mask < 31; ++mask) {
    bool zero_within = true;
    for (int i = 0; i < 6 && zero_within; ++i)
      for (int j = i + 1; j < 6 && zero_within; ++j) {
        const bool same = ((mask >> i) & 1) == ((mask >> j) & 1);
        if (same && (C.row(i) - C.row(j)).norm() > 0) zero_within = false;
      }
    if (zero_within) CHECK(mask == 0b000111);  // exactly the true blocks
  }
}

TEST_CASE("clustering is deterministic") {
  pennet::Rng rng(12);
  Eigen::MatrixXd X(25, 7);
  for (Eigen::Index i = 0; i < 25; ++i)
    for (Eigen::Index j = 0; j < 7; ++j) X(i, j) = rng.normal();
  const CorrelationMatrix c = correlation_matrix(X);
  for (const Linkage linkage : {Linkage::kAverage, Linkage::kComplete, Linkage::kSingle}) {
    const GroupAssignment a = cluster_predictors(c.values, 3, linkage);
    const GroupAssignment b = cluster_predictors(c.values, 3, linkage);
    CHECK(a.labels == b.labels);
  }
}

TEST_CASE("ordering places group members contiguously") {
  SUBCASE("documented example") {
    const GroupAssignment g = GroupAssignment::from_labels({1, 0, 1});
    CHECK(order_predictors(g) == std::vector<int>{1, 0, 2});
  }
  SUBCASE("single group is the identity") {
    const GroupAssignment g = GroupAssignment::from_labels({0, 0, 0, 0});
    CHECK(order_predictors(g) == std::vector<int>{0, 1, 2, 3});
  }
  SUBCASE("output is a permutation with group-adjacency") {
    const GroupAssignment g = GroupAssignment::from_labels({2, 0, 1, 0, 2, 1, 0});
    const std::vector<int> order = order_predictors(g);
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    for (std::size_t k = 1; k < order.size(); ++k) {
      const int prev = g.labels[static_cast<std::size_t>(order[k - 1])];
      const int curr = g.labels[static_cast<std::size_t>(order[k])];
      CHECK(curr >= prev);  // blocks in group-id order
    }
  }
}
