#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace pennet {

/// Samples-by-genes expression matrix with gene labels.
///
/// Values are immutable after construction; instances can be shared freely
/// across concurrent solver tasks.
class ExpressionMatrix {
 public:
  // Validates: n >= 2, p >= 2, finite entries, unique non-empty gene names.
  ExpressionMatrix(Eigen::MatrixXd values, std::vector<std::string> gene_names);

  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& gene_names() const { return gene_names_; }
  Eigen::Index n_samples() const { return values_.rows(); }
  Eigen::Index n_genes() const { return values_.cols(); }
  bool standardized() const { return standardized_; }

  // Per-column flags set by standardize(); empty until then.
  const std::vector<bool>& constant_columns() const { return constant_columns_; }

  friend ExpressionMatrix standardize(const ExpressionMatrix& m);

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> gene_names_;
  bool standardized_ = false;
  std::vector<bool> constant_columns_;
};

/// One gene singled out as regression response, the rest as predictors.
struct ResponseView {
  int response_index = 0;
  Eigen::VectorXd y;            // column `response_index`
  Eigen::MatrixXd predictors;   // remaining columns, original order preserved
  std::vector<int> predictor_indices;  // original gene index per predictor column
};

// Reads a tab-separated expression file. First row is a header of gene
// names; subsequent rows are samples. With `transpose` the numeric block is
// gene-per-row instead (one row per header entry, one column per sample).
ExpressionMatrix load_expression(const std::string& path, bool transpose = false);

// Writes the matrix in the same format with 17 significant digits, which
// round-trips doubles exactly through load_expression.
void save_expression(const ExpressionMatrix& m, const std::string& path);

// Centers every column to mean 0 and scales non-constant columns to standard
// deviation 1 (divisor n). Constant columns are centered only and flagged so
// gene indices stay aligned with the input. Throws if already standardized.
ExpressionMatrix standardize(const ExpressionMatrix& m);

// Extracts response gene `a`; requires a standardized matrix.
ResponseView response_view(const ExpressionMatrix& m, int a);

}  // namespace pennet
