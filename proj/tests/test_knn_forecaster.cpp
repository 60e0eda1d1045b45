#include <gtest/gtest.h>

#include "coincast/errors.hpp"
#include "coincast/knn_forecaster.hpp"
#include "support.hpp"

using namespace coincast;
using testsupport::series_from_closes;

namespace {

const Day kStart = Day::from_ymd(2018, 12, 27);
PriceSeries five() { return series_from_closes({100, 102, 104, 106, 108}, kStart); }

}  // namespace

TEST(Knn, Fit) {
  EXPECT_EQ(fit_knn(five(), 5).points.size(), 5u);
  EXPECT_EQ(fit_knn(five(), 5).points[0].date_ordinal, kStart.ordinal());
  EXPECT_THROW(fit_knn(five(), 0), ArgumentError);
  EXPECT_THROW(fit_knn(five(), 6), ArgumentError);
}

TEST(Knn, FutureQueries) {
  const Day later = kStart + 10;
  EXPECT_DOUBLE_EQ(forecast_knn(fit_knn(five(), 5), {later})[0], 104.0);
  EXPECT_DOUBLE_EQ(forecast_knn(fit_knn(five(), 1), {later})[0], 108.0);
  const auto f = forecast_knn(fit_knn(five(), 5), {kStart + 34, kStart + 64});
  EXPECT_EQ(f[0], f[1]);
}

TEST(Knn, TieBreaksToLaterDate) {
  // query between day 1 (102) and day 3 (106): both at distance 1
  EXPECT_EQ(forecast_knn(fit_knn(five(), 1), {kStart + 2})[0], 104.0);
  const auto m = fit_knn(series_from_closes({100, 200}, kStart), 1);
  EXPECT_EQ(forecast_knn(m, {kStart})[0], 100.0);
  const auto gap = fit_knn(PriceSeries("g", {five()[0], five()[2]}), 1);
  EXPECT_EQ(forecast_knn(gap, {kStart + 1})[0], 104.0);
}

TEST(Knn, InverseDistance) {
  const auto m = fit_knn(series_from_closes({100, 200}, kStart), 2, KnnWeighting::InverseDistance);
  // distances 2 and 1 -> weights 1/3 and 1/2
  const double expect = (100.0 / 3 + 200.0 / 2) / (1.0 / 3 + 1.0 / 2);
  EXPECT_NEAR(forecast_knn(m, {kStart + 2})[0], expect, 1e-12);
}

TEST(Knn, SaturationAndBounds) {
  const auto closes = testsupport::random_walk(200, 21);
  const auto s = series_from_closes(closes, kStart);
  for (std::size_t k : {1u, 3u, 5u, 17u}) {
    const auto m = fit_knn(s, k);
    double tail = 0;
    for (std::size_t i = closes.size() - k; i < closes.size(); ++i) tail += closes[i];
    tail /= static_cast<double>(k);
    std::vector<Day> later;
    for (int d = 1; d <= 40; ++d) later.push_back(s.back().date + d);
    const auto f = forecast_knn(m, later);
    for (Eigen::Index i = 0; i < f.size(); ++i) EXPECT_EQ(f[i], f[0]);
    EXPECT_NEAR(f[0], tail, 1e-9 * tail);
  }
  const auto all = fit_knn(s, 200);
  const double mean = testsupport::to_vec(closes).mean();
  const auto inside = forecast_knn(fit_knn(s, 7), {kStart + 3, kStart + 120, kStart - 50});
  for (Eigen::Index i = 0; i < inside.size(); ++i) {
    EXPECT_GE(inside[i], *std::min_element(closes.begin(), closes.end()));
    EXPECT_LE(inside[i], *std::max_element(closes.begin(), closes.end()));
  }
  EXPECT_NEAR(forecast_knn(all, {kStart + 50})[0], mean, 1e-9 * mean);
}

TEST(KnnRun, ResidualFixture) {
  const auto r = knn_run(five(), {kStart + 10, kStart + 11}, Eigen::Vector2d(105, 105), 5);
  EXPECT_EQ(r.residuals.residuals, Eigen::Vector2d(1, 1));
  EXPECT_EQ(r.residuals.mean, 1.0);
  // first baseline is the last training close (108): both down moves, forecast 104 is down too
  EXPECT_EQ(r.performance.trend_accuracy, 0.5);
}

TEST(KnnRun, PerfectActuals) {
  const auto f = forecast_knn(fit_knn(five(), 3), {kStart + 8, kStart + 9});
  const auto r = knn_run(five(), {kStart + 8, kStart + 9}, f, 3);
  EXPECT_EQ(r.residuals.mean, 0.0);
  EXPECT_EQ(r.performance.rmse, 0.0);
  EXPECT_FALSE(r.performance.correlation.has_value());
}
