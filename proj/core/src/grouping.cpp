#include "pennet/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pennet {

GroupAssignment GroupAssignment::from_labels(std::vector<int> labels) {
  GroupAssignment g;
  g.labels = std::move(labels);
  int max_label = -1;
  for (int label : g.labels) max_label = std::max(max_label, label);
  g.k = max_label + 1;
  g.sizes.assign(static_cast<std::size_t>(g.k), 0);
  for (int label : g.labels) {
    if (label < 0) throw std::invalid_argument("negative group label");
    ++g.sizes[static_cast<std::size_t>(label)];
  }
  g.validate(static_cast<int>(g.labels.size()));
  return g;
}

GroupAssignment GroupAssignment::singletons(int n_predictors) {
  std::vector<int> labels(static_cast<std::size_t>(n_predictors));
  for (int i = 0; i < n_predictors; ++i) labels[static_cast<std::size_t>(i)] = i;
  return from_labels(std::move(labels));
}

void GroupAssignment::validate(int n_predictors) const {
  if (static_cast<int>(labels.size()) != n_predictors)
    throw std::invalid_argument("group labels do not cover every predictor exactly once");
  if (k <= 0) throw std::invalid_argument("group assignment has no groups");
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int label : labels) {
    if (label < 0 || label >= k) throw std::invalid_argument("group label out of range");
    ++counts[static_cast<std::size_t>(label)];
  }
  for (int c : counts)
    if (c == 0) throw std::invalid_argument("empty group in assignment");
  if (counts != sizes) throw std::invalid_argument("group sizes inconsistent with labels");
}

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  const Eigen::Index m = X.cols();
  if (m < 2) throw std::invalid_argument("correlation_matrix needs at least 2 columns");

  Eigen::MatrixXd centered = X;
  std::vector<bool> constant(static_cast<std::size_t>(m), false);
  Eigen::VectorXd norm(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    centered.col(j).array() -= centered.col(j).mean();
    norm[j] = centered.col(j).norm();
    if (norm[j] <= 1e-13 * std::sqrt(static_cast<double>(n)) * (1.0 + X.col(j).cwiseAbs().maxCoeff()))
      constant[static_cast<std::size_t>(j)] = true;
  }

  CorrelationMatrix out;
  out.values = Eigen::MatrixXd::Identity(m, m);
  out.constant_column = std::move(constant);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      double r = 0.0;
      if (!out.constant_column[static_cast<std::size_t>(i)] && !out.constant_column[static_cast<std::size_t>(j)]) {
        r = centered.col(i).dot(centered.col(j)) / (norm[i] * norm[j]);
        r = std::clamp(r, -1.0, 1.0);
      }
      out.values(i, j) = r;
      out.values(j, i) = r;
    }
  }
  return out;
}

GroupAssignment cluster_predictors(const Eigen::MatrixXd& C, int k, Linkage linkage) {
  const Eigen::Index m = C.rows();
  if (C.cols() != m) throw std::invalid_argument("cluster_predictors: correlation matrix must be square");
  if (k < 1 || k > m) throw std::invalid_argument("cluster_predictors: k out of range [1, m]");

  // Pairwise Euclidean distance between rows of C.
  Eigen::MatrixXd dist(m, m);
  dist.setZero();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d = (C.row(i) - C.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }

  std::vector<bool> active(static_cast<std::size_t>(m), true);
  std::vector<int> size(static_cast<std::size_t>(m), 1);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) members[static_cast<std::size_t>(i)] = {static_cast<int>(i)};

  int clusters = static_cast<int>(m);
  while (clusters > k) {
    // Smallest pairwise distance; ties broken toward the smallest (i, j).
    Eigen::Index best_i = -1, best_j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j = i + 1; j < m; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        if (dist(i, j) < best) {
          best = dist(i, j);
          best_i = i;
          best_j = j;
        }
      }
    }
    // Merge j into i, Lance-Williams update of the remaining distances.
    const double ni = size[static_cast<std::size_t>(best_i)];
    const double nj = size[static_cast<std::size_t>(best_j)];
    for (Eigen::Index h = 0; h < m; ++h) {
      if (!active[static_cast<std::size_t>(h)] || h == best_i || h == best_j) continue;
      double d = 0.0;
      switch (linkage) {
        case Linkage::kAverage:
          d = (ni * dist(h, best_i) + nj * dist(h, best_j)) / (ni + nj);
          break;
        case Linkage::kComplete:
          d = std::max(dist(h, best_i), dist(h, best_j));
          break;
        case Linkage::kSingle:
          d = std::min(dist(h, best_i), dist(h, best_j));
          break;
      }
      dist(h, best_i) = d;
      dist(best_i, h) = d;
    }
    active[static_cast<std::size_t>(best_j)] = false;
    size[static_cast<std::size_t>(best_i)] += size[static_cast<std::size_t>(best_j)];
    auto& into = members[static_cast<std::size_t>(best_i)];
    auto& from = members[static_cast<std::size_t>(best_j)];
    into.insert(into.end(), from.begin(), from.end());
    from.clear();
    --clusters;
  }

  // Group ids ordered by smallest member index.
  std::vector<int> roots;
  for (Eigen::Index i = 0; i < m; ++i)
    if (active[static_cast<std::size_t>(i)]) roots.push_back(static_cast<int>(i));
  std::sort(roots.begin(), roots.end(), [&](int a, int b) {
    return *std::min_element(members[static_cast<std::size_t>(a)].begin(), members[static_cast<std::size_t>(a)].end()) <
           *std::min_element(members[static_cast<std::size_t>(b)].begin(), members[static_cast<std::size_t>(b)].end());
  });
  std::vector<int> labels(static_cast<std::size_t>(m), -1);
  for (std::size_t g = 0; g < roots.size(); ++g)
    for (int member : members[static_cast<std::size_t>(roots[g])]) labels[static_cast<std::size_t>(member)] = static_cast<int>(g);
  return GroupAssignment::from_labels(std::move(labels));
}

std::vector<int> order_predictors(const GroupAssignment& assignment) {
  assignment.validate(static_cast<int>(assignment.labels.size()));
  std::vector<int> order;
  order.reserve(assignment.labels.size());
  for (int g = 0; g < assignment.k; ++g)
    for (std::size_t j = 0; j < assignment.labels.size(); ++j)
      if (assignment.labels[j] == g) order.push_back(static_cast<int>(j));
  return order;
}

}  // namespace pennet
