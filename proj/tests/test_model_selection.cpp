#include <doctest.h>

#include <cmath>

#include "pennet/model_selection.hpp"
#include "pennet/rng.hpp"
#include "test_util.hpp"

using namespace pennet;

TEST_CASE("lambda grid shapes") {
  const ResponseView v = test_util::random_view(20, 4, 3);
  const double top = lambda_max(v);
  CVConfig cfg;

  SUBCASE("a single grid point is lambda_max") {
    cfg.grid_size = 1;
    CHECK(make_lambda_grid(v, cfg) == std::vector<double>{top});
  }
  SUBCASE("geometric spacing") {
    cfg.grid_size = 3;
    cfg.grid_min_ratio = 0.01;
    const std::vector<double> grid = make_lambda_grid(v, cfg);
    REQUIRE(grid.size() == 3);
    CHECK(grid[0] == doctest::Approx(top));
    CHECK(grid[1] == doctest::Approx(0.1 * top));
    CHECK(grid[2] == doctest::Approx(0.01 * top));
  }
  SUBCASE("the grid head zeroes the lasso") {
    cfg.grid_size = 50;
    const std::vector<double> grid = make_lambda_grid(v, cfg);
    SolverOptions opts;
    const FitResult fit = solve_lasso(v, grid[0] * (1 + 1e-12), opts);
    CHECK(fit.coefficients.cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);
  }
}

TEST_CASE("cross-validation on a single-point grid returns that lambda") {
  const ResponseView v = test_util::random_view(30, 3, 8);
  CVConfig cfg;
  cfg.grid_size = 1;
  cfg.folds = 5;
  const CVResult result = cross_validate(v, {PenaltyFamily::kLasso, {}, {}}, cfg);
  CHECK(result.best_lambda == doctest::Approx(lambda_max(v)));
  CHECK(result.cv_curve.size() == 1);
}

TEST_CASE("strong noiseless signal drives lambda down") {
  // y = 2 * x1 exactly: the smallest grid lambdas interpolate best.
  pennet::Rng rng(5);
  Eigen::MatrixXd values(100, 3);
  for (Eigen::Index i = 0; i < 100; ++i) {
    values(i, 1) = rng.normal();
    values(i, 2) = rng.normal();
    values(i, 0) = 2.0 * values(i, 1);
  }
  const ExpressionMatrix m = standardize(ExpressionMatrix(values, test_util::gene_names(3)));
  const ResponseView v = response_view(m, 0);
  CVConfig cfg;
  cfg.seed = 11;
  const CVResult result = cross_validate(v, {PenaltyFamily::kLasso, {}, {}}, cfg);
  CHECK(result.best_lambda <= 0.05 * lambda_max(v));
}

TEST_CASE("fold assignment is a partition and fits are deterministic") {
  const ResponseView v = test_util::random_view(40, 4, 21);
  CVConfig cfg;
  cfg.seed = 42;
  cfg.folds = 7;
  const CVResult a = cross_validate(v, {PenaltyFamily::kLasso, {}, {}}, cfg);
  const CVResult b = cross_validate(v, {PenaltyFamily::kLasso, {}, {}}, cfg);
  CHECK(a.best_lambda == b.best_lambda);
  REQUIRE(a.cv_curve.size() == b.cv_curve.size());
  for (std::size_t i = 0; i < a.cv_curve.size(); ++i) {
    CHECK(a.cv_curve[i].mean_mse == b.cv_curve[i].mean_mse);
    CHECK(a.cv_curve[i].mean_mse >= 0.0);
    CHECK(std::isfinite(a.cv_curve[i].mean_mse));
  }
}

TEST_CASE("a clear minimum is stable across fold seeds") {
  // Strong signal-to-noise: the selected lambda moves by at most one grid
  // step when the folds are reshuffled.
  pennet::Rng rng(3);
  Eigen::MatrixXd values(80, 4);
  for (Eigen::Index i = 0; i < 80; ++i) {
    values(i, 1) = rng.normal();
    values(i, 2) = rng.normal();
    values(i, 3) = rng.normal();
    values(i, 0) = 3.0 * values(i, 1) - 2.0 * values(i, 2) + 0.1 * rng.normal();
  }
  const ExpressionMatrix m = standardize(ExpressionMatrix(values, test_util::gene_names(4)));
  const ResponseView v = response_view(m, 0);
  CVConfig cfg;
  cfg.grid_size = 20;
  cfg.seed = 1;
  const CVResult first = cross_validate(v, {PenaltyFamily::kLasso, {}, {}}, cfg);
  cfg.seed = 2;
  const CVResult second = cross_validate(v, {PenaltyFamily::kLasso, {}, {}}, cfg);
  const std::vector<double> grid = make_lambda_grid(v, cfg);
  int index_first = -1, index_second = -1;
  for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
    if (grid[static_cast<std::size_t>(i)] == first.best_lambda) index_first = i;
    if (grid[static_cast<std::size_t>(i)] == second.best_lambda) index_second = i;
  }
  REQUIRE(index_first >= 0);
  REQUIRE(index_second >= 0);
  CHECK(std::abs(index_first - index_second) <= 1);
}

TEST_CASE("two-parameter families search a secondary grid") {
  const ResponseView v = test_util::random_view(30, 4, 13);
  CVConfig cfg;
  cfg.grid_size = 10;
  cfg.lambda2_grid_size = 3;
  const CVResult result = cross_validate(v, {PenaltyFamily::kElasticNet, {}, {}}, cfg);
  REQUIRE(result.best_lambda2.has_value());
  CHECK(*result.best_lambda2 > 0.0);
  CHECK(result.cv_curve.size() == 10);

  SUBCASE("one-parameter families do not") {
    const CVResult lasso = cross_validate(v, {PenaltyFamily::kLasso, {}, {}}, cfg);
    CHECK_FALSE(lasso.best_lambda2.has_value());
  }
}

TEST_CASE("cross-validation input validation") {
  const ResponseView v = test_util::random_view(10, 3, 1);
  CVConfig cfg;
  SUBCASE("too many folds") {
    cfg.folds = 11;
    CHECK_THROWS(cross_validate(v, {PenaltyFamily::kLasso, {}, {}}, cfg));
  }
  SUBCASE("folds too small") {
    cfg.folds = 7;  // 10 / 7 < 2 samples per fold
    CHECK_THROWS(cross_validate(v, {PenaltyFamily::kLasso, {}, {}}, cfg));
  }
  SUBCASE("group family requires groups") {
    cfg.folds = 5;
    CHECK_THROWS(cross_validate(v, {PenaltyFamily::kGroup, {}, {}}, cfg));
  }
  SUBCASE("fused family requires an order") {
    cfg.folds = 5;
    CHECK_THROWS(cross_validate(v, {PenaltyFamily::kFused, {}, {}}, cfg));
  }
  SUBCASE("paired is not a node-wise family") {
    cfg.folds = 5;
    CHECK_THROWS(cross_validate(v, {PenaltyFamily::kPairedGroup, {}, {}}, cfg));
  }
}

TEST_CASE("structured families cross-validate end to end") {
  const ResponseView v = test_util::random_view(30, 4, 19);
  CVConfig cfg;
  cfg.grid_size = 8;
  cfg.lambda2_grid_size = 2;
  cfg.folds = 5;

  const GroupAssignment groups = GroupAssignment::from_labels({0, 0, 1, 1});
  const CVResult group = cross_validate(v, {PenaltyFamily::kGroup, groups, {}}, cfg);
  CHECK(group.best_lambda > 0.0);

  const std::vector<int> order{3, 1, 0, 2};
  const CVResult fused = cross_validate(v, {PenaltyFamily::kFused, {}, order}, cfg);
  CHECK(fused.best_lambda > 0.0);
  CHECK(fused.best_lambda2.has_value());

  const CVResult hier = cross_validate(v, {PenaltyFamily::kHierarchical, {}, {}}, cfg);
  CHECK(hier.best_lambda > 0.0);
}
