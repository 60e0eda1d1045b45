#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "coincast/date.hpp"
#include "coincast/market_data.hpp"
#include "coincast/perf_metrics.hpp"

namespace coincast {

enum class KnnWeighting { Uniform, InverseDistance };

struct KnnPoint {
  std::int64_t date_ordinal;
  double close;
};

/// Lazy nearest-neighbour forecaster over (date, close) pairs.
struct KnnModel {
  std::vector<KnnPoint> points;  // strictly increasing date_ordinal
  std::size_t k = 5;
  KnnWeighting weighting = KnnWeighting::Uniform;
};

KnnModel fit_knn(const PriceSeries& series, std::size_t k = 5, KnnWeighting weighting = KnnWeighting::Uniform);

/// Distance is |day difference|; equal distances prefer the later training day.
/// Inverse-distance weights are 1 / (distance + 1), normalised.
Eigen::VectorXd forecast_knn(const KnnModel& model, const std::vector<Day>& dates);

struct KnnRunResult {
  Eigen::VectorXd forecasts;
  ResidualSummary residuals;
  PerformanceVector performance;
};

/// Forecasts `dates` from `training`, then scores against `actuals`. The trend
/// baseline is the true close preceding each date (the last training close for
/// the first date).
KnnRunResult knn_run(const PriceSeries& training, const std::vector<Day>& dates, const Eigen::VectorXd& actuals,
                     std::size_t k = 5, KnnWeighting weighting = KnnWeighting::Uniform);

}  // namespace coincast
