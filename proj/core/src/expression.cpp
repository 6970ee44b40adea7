#include "pennet/expression.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace pennet {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end || !std::isfinite(value)) {
    throw std::runtime_error("expression parse error: non-numeric cell '" + cell + "' at data row " +
                             std::to_string(row + 1) + ", column " + std::to_string(col + 1));
  }
  return value;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

ExpressionMatrix::ExpressionMatrix(Eigen::MatrixXd values, std::vector<std::string> gene_names)
    : values_(std::move(values)), gene_names_(std::move(gene_names)) {
  if (values_.rows() < 2) throw std::runtime_error("expression matrix needs at least 2 samples");
  if (values_.cols() < 2) throw std::runtime_error("expression matrix needs at least 2 genes");
  if (static_cast<Eigen::Index>(gene_names_.size()) != values_.cols())
    throw std::runtime_error("gene name count does not match column count");
  if (!values_.allFinite()) throw std::runtime_error("expression matrix contains non-finite values");
  std::unordered_set<std::string> seen;
  for (const auto& name : gene_names_) {
    if (name.empty()) throw std::runtime_error("empty gene name");
    if (!seen.insert(name).second) throw std::runtime_error("duplicate gene name '" + name + "'");
  }
}

ExpressionMatrix load_expression(const std::string& path, bool transpose) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open expression file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty expression file: " + path);
  strip_cr(line);
  const std::vector<std::string> names = split_tabs(line);
  const std::size_t p = names.size();

  std::vector<std::vector<double>> rows;
  std::size_t row_index = 0;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_tabs(line);
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_cell(cells[c], row_index, c);
    rows.push_back(std::move(row));
    ++row_index;
  }
  if (rows.empty()) throw std::runtime_error("expression file has no data rows: " + path);
  const std::size_t width = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width)
      throw std::runtime_error("ragged expression file: data row " + std::to_string(r + 1) + " has " +
                               std::to_string(rows[r].size()) + " cells, expected " + std::to_string(width));
  }

  Eigen::MatrixXd values;
  if (!transpose) {
    if (width != p)
      throw std::runtime_error("expression file: header lists " + std::to_string(p) + " genes but rows have " +
                               std::to_string(width) + " cells");
    values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < p; ++c) values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  } else {
    // Gene-per-row block: row g holds the samples of header gene g.
    if (rows.size() != p)
      throw std::runtime_error("transposed expression file: header lists " + std::to_string(p) +
                               " genes but block has " + std::to_string(rows.size()) + " rows");
    values.resize(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(p));
    for (std::size_t g = 0; g < p; ++g)
      for (std::size_t s = 0; s < width; ++s) values(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(g)) = rows[g][s];
  }
  return ExpressionMatrix(std::move(values), names);
}

void save_expression(const ExpressionMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write expression file: " + path);
  const auto& names = m.gene_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out << '\t';
    out << names[i];
  }
  out << '\n';
  char buffer[64];
  for (Eigen::Index r = 0; r < m.n_samples(); ++r) {
    for (Eigen::Index c = 0; c < m.n_genes(); ++c) {
      if (c) out << '\t';
      std::snprintf(buffer, sizeof(buffer), "%.17g", m.values()(r, c));
      out << buffer;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ExpressionMatrix standardize(const ExpressionMatrix& m) {
  if (m.standardized()) throw std::runtime_error("matrix is already standardized");
  const auto n = m.n_samples();
  const auto p = m.n_genes();
  Eigen::MatrixXd values = m.values();
  std::vector<bool> constant(static_cast<std::size_t>(p), false);
  for (Eigen::Index j = 0; j < p; ++j) {
    auto col = values.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n));
    const double scale = std::abs(mean) + (sd > 0 ? sd : 0.0);
    if (sd <= 1e-13 * std::max(1.0, scale)) {
      constant[static_cast<std::size_t>(j)] = true;  // centered only
      col.setZero();
    } else {
      col /= sd;
    }
  }
  ExpressionMatrix out(std::move(values), m.gene_names());
  out.standardized_ = true;
  out.constant_columns_ = std::move(constant);
  return out;
}

ResponseView response_view(const ExpressionMatrix& m, int a) {
  if (!m.standardized()) throw std::runtime_error("response_view requires a standardized matrix");
  const auto p = m.n_genes();
  if (a < 0 || a >= p) throw std::out_of_range("response index " + std::to_string(a) + " out of range [0, " +
                                               std::to_string(p) + ")");
  ResponseView view;
  view.response_index = a;
  view.y = m.values().col(a);
  view.predictors.resize(m.n_samples(), p - 1);
  view.predictor_indices.reserve(static_cast<std::size_t>(p - 1));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (j == a) continue;
    view.predictors.col(k++) = m.values().col(j);
    view.predictor_indices.push_back(static_cast<int>(j));
  }
  return view;
}

}  // namespace pennet
