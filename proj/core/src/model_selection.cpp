#include "pennet/model_selection.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pennet/rng.hpp"

namespace pennet {

namespace {

struct FoldData {
  Eigen::MatrixXd X_train, X_valid;
  Eigen::VectorXd y_train, y_valid;
};

std::vector<FoldData> make_folds(const ResponseView& v, const CVConfig& cfg) {
  const Eigen::Index n = v.y.size();
  if (cfg.folds < 2) throw std::invalid_argument("cross_validate: need at least 2 folds");
  if (cfg.folds > n) throw std::invalid_argument("cross_validate: more folds than samples");
  if (n / cfg.folds < 2) throw std::invalid_argument("cross_validate: fold with < 2 samples");

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(cfg.seed);
  rng.shuffle(perm.data(), perm.size());

  std::vector<FoldData> folds(static_cast<std::size_t>(cfg.folds));
  for (int f = 0; f < cfg.folds; ++f) {
    const Eigen::Index begin = static_cast<Eigen::Index>(f) * n / cfg.folds;
    const Eigen::Index end = static_cast<Eigen::Index>(f + 1) * n / cfg.folds;
    const Eigen::Index n_valid = end - begin;
    const Eigen::Index n_train = n - n_valid;
    FoldData fold;
    fold.X_train.resize(n_train, v.predictors.cols());
    fold.X_valid.resize(n_valid, v.predictors.cols());
    fold.y_train.resize(n_train);
    fold.y_valid.resize(n_valid);
    Eigen::Index ti = 0, vi = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = perm[static_cast<std::size_t>(i)];
      if (i >= begin && i < end) {
        fold.X_valid.row(vi) = v.predictors.row(row);
        fold.y_valid[vi++] = v.y[row];
      } else {
        fold.X_train.row(ti) = v.predictors.row(row);
        fold.y_train[ti++] = v.y[row];
      }
    }
    folds[static_cast<std::size_t>(f)] = std::move(fold);
  }
  return folds;
}

bool two_parameter_family(PenaltyFamily family) {
  return family == PenaltyFamily::kElasticNet || family == PenaltyFamily::kFused ||
         family == PenaltyFamily::kSparseGroup;
}

// Held-out MSE of one fit on the validation block.
double validation_mse(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& coef) {
  return (y - X * coef).squaredNorm() / static_cast<double>(y.size());
}

double hier_validation_mse(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const InteractionFit& fit) {
  Eigen::VectorXd pred = X * fit.main_effects();
  pred += 0.5 * (X.cwiseProduct(X * fit.interactions)).rowwise().sum();
  return (y - pred).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace

std::vector<double> make_lambda_grid(const ResponseView& v, const CVConfig& cfg) {
  if (cfg.grid_size < 1) throw std::invalid_argument("make_lambda_grid: grid_size must be >= 1");
  if (!(cfg.grid_min_ratio > 0.0 && cfg.grid_min_ratio < 1.0))
    throw std::invalid_argument("make_lambda_grid: grid_min_ratio must be in (0, 1)");
  const double top = lambda_max(v);
  if (top <= 0.0) return {0.0};
  if (cfg.grid_size == 1) return {top};
  std::vector<double> grid(static_cast<std::size_t>(cfg.grid_size));
  const double log_ratio = std::log(cfg.grid_min_ratio);
  for (int i = 0; i < cfg.grid_size; ++i)
    grid[static_cast<std::size_t>(i)] =
        top * std::exp(log_ratio * static_cast<double>(i) / static_cast<double>(cfg.grid_size - 1));
  return grid;
}

CVResult cross_validate(const ResponseView& v, const PenaltyStructure& structure, const CVConfig& cfg,
                        const SolverOptions& opts) {
  if (structure.family == PenaltyFamily::kPairedGroup)
    throw std::invalid_argument("cross_validate: the paired penalty is fit jointly, not per response");
  const Eigen::Index p = v.predictors.cols();
  if (structure.family == PenaltyFamily::kGroup || structure.family == PenaltyFamily::kSparseGroup) {
    if (!structure.groups) throw std::invalid_argument("cross_validate: group family needs a group assignment");
    structure.groups->validate(static_cast<int>(p));
  }
  if (structure.family == PenaltyFamily::kFused && !structure.order)
    throw std::invalid_argument("cross_validate: fused family needs a predictor order");

  const std::vector<double> grid = make_lambda_grid(v, cfg);
  std::vector<double> grid2{0.0};
  if (two_parameter_family(structure.family)) {
    CVConfig cfg2 = cfg;
    cfg2.grid_size = cfg.lambda2_grid_size;
    grid2 = make_lambda_grid(v, cfg2);
  }

  const std::vector<FoldData> folds = make_folds(v, cfg);
  const std::size_t n_cells = grid.size() * grid2.size();
  // mse[fold][cell], cell = i2 * |grid| + i1; aggregation below runs in fixed
  // index order so results do not depend on evaluation schedule.
  std::vector<std::vector<double>> mse(folds.size(), std::vector<double>(n_cells, 0.0));

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const FoldData& fold = folds[f];
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
    auto fused_state = detail::make_fused_state();
    auto hier_state = detail::make_hier_state();
    for (std::size_t i2 = 0; i2 < grid2.size(); ++i2) {
      for (std::size_t i1 = 0; i1 < grid.size(); ++i1) {
        const double l1 = grid[i1];
        const double l2 = grid2[i2];
        double cell_mse = 0.0;
        switch (structure.family) {
          case PenaltyFamily::kLasso: {
            const FitResult fit = detail::enet_cd(fold.X_train, fold.y_train, l1, 0.0, opts, &warm);
            warm = fit.coefficients;
            cell_mse = validation_mse(fold.X_valid, fold.y_valid, fit.coefficients);
            break;
          }
          case PenaltyFamily::kRidge: {
            const FitResult fit = detail::enet_cd(fold.X_train, fold.y_train, 0.0, l1, opts, &warm);
            warm = fit.coefficients;
            cell_mse = validation_mse(fold.X_valid, fold.y_valid, fit.coefficients);
            break;
          }
          case PenaltyFamily::kElasticNet: {
            const FitResult fit = detail::enet_cd(fold.X_train, fold.y_train, l1, l2, opts, &warm);
            warm = fit.coefficients;
            cell_mse = validation_mse(fold.X_valid, fold.y_valid, fit.coefficients);
            break;
          }
          case PenaltyFamily::kFused: {
            const FitResult fit =
                detail::fused_admm(fold.X_train, fold.y_train, l1, l2, *structure.order, opts, fused_state.get());
            cell_mse = validation_mse(fold.X_valid, fold.y_valid, fit.coefficients);
            break;
          }
          case PenaltyFamily::kGroup: {
            const FitResult fit = detail::group_cd(fold.X_train, fold.y_train, l1, *structure.groups, opts, &warm);
            warm = fit.coefficients;
            cell_mse = validation_mse(fold.X_valid, fold.y_valid, fit.coefficients);
            break;
          }
          case PenaltyFamily::kSparseGroup: {
            const FitResult fit =
                detail::sparse_group_cd(fold.X_train, fold.y_train, l1, l2, *structure.groups, opts, &warm);
            warm = fit.coefficients;
            cell_mse = validation_mse(fold.X_valid, fold.y_valid, fit.coefficients);
            break;
          }
          case PenaltyFamily::kHierarchical: {
            const InteractionFit fit =
                detail::hier_admm(fold.X_train, fold.y_train, l1, l1, opts, hier_state.get());
            cell_mse = hier_validation_mse(fold.X_valid, fold.y_valid, fit);
            break;
          }
          case PenaltyFamily::kPairedGroup:
            break;  // rejected above
        }
        mse[f][i2 * grid.size() + i1] = cell_mse;
      }
    }
  }

  const double fold_count = static_cast<double>(folds.size());
  std::vector<double> mean(n_cells, 0.0), sd(n_cells, 0.0);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    for (std::size_t f = 0; f < folds.size(); ++f) mean[cell] += mse[f][cell];
    mean[cell] /= fold_count;
    double ss = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const double d = mse[f][cell] - mean[cell];
      ss += d * d;
    }
    sd[cell] = folds.size() > 1 ? std::sqrt(ss / (fold_count - 1.0)) : 0.0;
  }

  // Strictly-better updates keep the first (largest-penalty) minimizer.
  CVResult result;
  std::size_t best_cell = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    if (!(mean[cell] >= 0.0) || !std::isfinite(mean[cell]))
      throw std::runtime_error("cross_validate: non-finite validation error");
    if (mean[cell] < best) {
      best = mean[cell];
      best_cell = cell;
    }
  }
  const std::size_t best_i2 = best_cell / grid.size();
  result.best_lambda = grid[best_cell % grid.size()];
  if (two_parameter_family(structure.family)) result.best_lambda2 = grid2[best_i2];
  result.cv_curve.reserve(grid.size());
  for (std::size_t i1 = 0; i1 < grid.size(); ++i1) {
    const std::size_t cell = best_i2 * grid.size() + i1;
    result.cv_curve.push_back({grid[i1], mean[cell], sd[cell]});
  }
  return result;
}

}  // namespace pennet
