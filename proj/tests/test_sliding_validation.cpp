#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "coincast/errors.hpp"
#include "coincast/ensemble_learners.hpp"
#include "coincast/sliding_validation.hpp"
#include "support.hpp"

using namespace coincast;

namespace {

struct ConstantModel {
  double c = 0.0;
  std::size_t width = 1;
};
double predict(const ConstantModel& m, RowRef) { return m.c; }
std::size_t n_features(const ConstantModel& m) { return m.width; }
std::string_view model_kind(const ConstantModel&) { return "constant"; }
void save_model(std::ostream& out, const ConstantModel& m) { out << "constant " << m.c << '\n'; }

WindowedExampleSet examples(std::size_t n, std::uint64_t seed = 4) {
  return window(testsupport::series_from_closes(testsupport::random_walk(n + 1, seed)), {Attribute::Close}, {1, 1, 1});
}

const Trainer kZero = [](const Eigen::MatrixXd& x, const Eigen::VectorXd&, std::uint64_t) {
  return AnyModel(ConstantModel{0.0, static_cast<std::size_t>(x.cols())});
};

}  // namespace

TEST(SlidingFolds, TenExamples) {
  const auto folds = sliding_folds(10, {4, 1, 4, 1});
  ASSERT_EQ(folds.size(), 3u);
  EXPECT_EQ(folds[0].first, (IndexRange{0, 3}));
  EXPECT_EQ(folds[0].second, (IndexRange{4, 7}));
  EXPECT_EQ(folds[1].first, (IndexRange{1, 4}));
  EXPECT_EQ(folds[1].second, (IndexRange{5, 8}));
  EXPECT_EQ(folds[2].first, (IndexRange{2, 5}));
  EXPECT_EQ(folds[2].second, (IndexRange{6, 9}));
}

TEST(SlidingFolds, SingleFoldBoundary) {
  for (std::size_t tw = 1; tw <= 6; ++tw)
    for (std::size_t sw = 1; sw <= 6; ++sw) EXPECT_EQ(sliding_fold_count(tw + sw, {tw, 1, sw, 1}), 1u);
}

TEST(SlidingFolds, ExhaustiveEnumeration) {
  for (std::size_t n = 8; n <= 40; ++n)
    for (std::size_t tw = 1; tw <= 6; ++tw)
      for (std::size_t st = 1; st <= 6; ++st)
        for (std::size_t sw = 1; sw <= 6; ++sw)
          for (std::size_t h = 1; h <= 6; ++h) {
            std::vector<std::pair<IndexRange, IndexRange>> expect;
            for (std::size_t k = 0;; ++k) {
              const std::size_t tr0 = k * st, tr1 = tr0 + tw - 1, te0 = tr1 + h, te1 = te0 + sw - 1;
              if (te1 >= n) break;
              expect.push_back({{tr0, tr1}, {te0, te1}});
            }
            const SlidingConfig cfg{tw, st, sw, h};
            ASSERT_EQ(sliding_fold_count(n, cfg), expect.size());
            ASSERT_EQ(sliding_folds(n, cfg), expect);
            for (const auto& [tr, te] : expect) ASSERT_GE(te.first, tr.last + h);
          }
}

TEST(SlidingValidate, ZeroTrainerMicroRmse) {
  const auto ex = examples(10);
  const auto rep = sliding_validate(ex, kZero, {4, 1, 4, 1});
  ASSERT_EQ(rep.folds.size(), 3u);
  const Eigen::VectorXd pooled = rep.pooled_actuals();
  ASSERT_EQ(pooled.size(), 12);
  EXPECT_NEAR(rep.micro.rmse, std::sqrt(pooled.squaredNorm() / 12.0), 1e-12);
  EXPECT_EQ(rep.folds[1].dates.front(), ex.label_dates[5]);
  EXPECT_EQ(rep.folds[2].prev_actuals[0], ex.prev_actuals[6]);
}

TEST(SlidingValidate, TooFewExamples) {
  try {
    sliding_validate(examples(7), kZero, {4, 1, 4, 1});
    FAIL();
  } catch (const InsufficientDataError& e) {
    EXPECT_NE(std::string(e.what()).find("8"), std::string::npos) << e.what();
  }
}

TEST(SlidingValidate, SingleFoldMacroEqualsFold) {
  const auto rep = sliding_validate(examples(8), kZero, {4, 1, 4, 1});
  ASSERT_EQ(rep.folds.size(), 1u);
  for (const auto& [k, v] : rep.macro) {
    if (!v) continue;
    EXPECT_EQ(v->std, 0.0) << k;
    if (k == "rmse") EXPECT_EQ(v->mean, rep.folds[0].performance.rmse);
  }
}

TEST(SlidingValidate, MicroIsPooledMetrics) {
  const Trainer ols = [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t) {
    return AnyModel(fit_linear(x, y));
  };
  const auto rep = sliding_validate(examples(30), ols, {5, 2, 3, 2});
  const auto again = performance_vector(rep.pooled_actuals(), rep.pooled_predictions(), rep.pooled_prev_actuals());
  EXPECT_EQ(again.rmse, rep.micro.rmse);
  EXPECT_EQ(again.trend_accuracy, rep.micro.trend_accuracy);
}

TEST(SlidingValidate, FoldSeedsAndThreadIndependence) {
  std::vector<std::uint64_t> seen;
  std::mutex mu;
  const Trainer record = [&](const Eigen::MatrixXd& x, const Eigen::VectorXd&, std::uint64_t seed) {
    std::lock_guard lock(mu);
    seen.push_back(seed);
    return AnyModel(ConstantModel{static_cast<double>(seed), static_cast<std::size_t>(x.cols())});
  };
  const auto one = sliding_validate(examples(20), record, {4, 1, 4, 1}, 100, 1);
  std::sort(seen.begin(), seen.end());
  ASSERT_EQ(seen.size(), 13u);
  for (std::size_t k = 0; k < seen.size(); ++k) EXPECT_EQ(seen[k], 100 + k);
  const auto four = sliding_validate(examples(20), record, {4, 1, 4, 1}, 100, 4);
  EXPECT_EQ(one.pooled_predictions(), four.pooled_predictions());
  for (std::size_t k = 0; k < one.folds.size(); ++k) EXPECT_EQ(one.folds[k].predictions[0], 100.0 + k);
}

TEST(SlidingValidate, FoldsCsv) {
  const auto rep = sliding_validate(examples(9), kZero, {4, 1, 4, 1});
  std::ostringstream out;
  write_folds_csv(out, rep);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("fold,date,actual,prediction\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 2 * 4);
}
