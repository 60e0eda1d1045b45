#include "coincast/knn_forecaster.hpp"

#include <algorithm>
#include <cstdlib>

#include "coincast/errors.hpp"

namespace coincast {

KnnModel fit_knn(const PriceSeries& series, std::size_t k, KnnWeighting weighting) {
  if (k == 0) throw ArgumentError("k must be at least 1");
  if (k > series.size())
    throw ArgumentError("k = " + std::to_string(k) + " exceeds the " + std::to_string(series.size()) +
                        " training points");
  KnnModel m;
  m.k = k;
  m.weighting = weighting;
  m.points.reserve(series.size());
  for (const auto& r : series.records()) m.points.push_back({r.date.ordinal(), r.close});
  return m;
}

Eigen::VectorXd forecast_knn(const KnnModel& model, const std::vector<Day>& dates) {
  if (dates.empty()) throw ArgumentError("forecast_knn: no query dates");
  if (model.k == 0 || model.k > model.points.size()) throw ArgumentError("forecast_knn: invalid k for this model");

  struct Candidate {
    std::int64_t distance;
    std::int64_t ordinal;
    double close;
  };
  std::vector<Candidate> cand(model.points.size());
  Eigen::VectorXd out(static_cast<Eigen::Index>(dates.size()));
  const auto k = static_cast<std::ptrdiff_t>(model.k);

  for (std::size_t q = 0; q < dates.size(); ++q) {
    const std::int64_t day = dates[q].ordinal();
    for (std::size_t i = 0; i < model.points.size(); ++i)
      cand[i] = {std::abs(day - model.points[i].date_ordinal), model.points[i].date_ordinal, model.points[i].close};
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), [](const Candidate& a, const Candidate& b) {
      return a.distance < b.distance || (a.distance == b.distance && a.ordinal > b.ordinal);
    });
    double num = 0.0, den = 0.0;
    for (std::ptrdiff_t j = 0; j < k; ++j) {
      const double w =
          model.weighting == KnnWeighting::Uniform ? 1.0 : 1.0 / (static_cast<double>(cand[static_cast<std::size_t>(j)].distance) + 1.0);
      num += w * cand[static_cast<std::size_t>(j)].close;
      den += w;
    }
    out[static_cast<Eigen::Index>(q)] = num / den;
  }
  return out;
}

KnnRunResult knn_run(const PriceSeries& training, const std::vector<Day>& dates, const Eigen::VectorXd& actuals,
                     std::size_t k, KnnWeighting weighting) {
  if (static_cast<std::size_t>(actuals.size()) != dates.size())
    throw ArgumentError("knn_run: " + std::to_string(actuals.size()) + " actuals for " + std::to_string(dates.size()) +
                        " forecast dates");
  const KnnModel model = fit_knn(training, k, weighting);
  KnnRunResult r;
  r.forecasts = forecast_knn(model, dates);
  r.residuals = residual_summary(actuals, r.forecasts, dates);
  Eigen::VectorXd prev(actuals.size());
  for (Eigen::Index i = 0; i < actuals.size(); ++i) prev[i] = i == 0 ? training.back().close : actuals[i - 1];
  r.performance = performance_vector(actuals, r.forecasts, prev);
  return r;
}

}  // namespace coincast
