#include "coincast/perf_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "coincast/errors.hpp"

namespace coincast {

namespace {

void check_pair(VectorRef a, VectorRef p, const char* what) {
  if (a.size() == 0) throw ArgumentError(std::string(what) + ": empty input");
  if (a.size() != p.size())
    throw ArgumentError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(p.size()) + ")");
}

bool is_constant(VectorRef v) { return v.minCoeff() == v.maxCoeff(); }

}  // namespace

MeanStd mean_std(VectorRef values) {
  if (values.size() == 0) throw ArgumentError("mean_std: empty input");
  const double mean = values.mean();
  const double var = (values.array() - mean).square().mean();
  return {mean, std::sqrt(var)};
}

double rmse(VectorRef actuals, VectorRef predictions) {
  check_pair(actuals, predictions, "rmse");
  return std::sqrt((predictions - actuals).squaredNorm() / static_cast<double>(actuals.size()));
}

double trend_accuracy(VectorRef actuals, VectorRef predictions, VectorRef prev_actuals) {
  check_pair(actuals, predictions, "trend_accuracy");
  check_pair(actuals, prev_actuals, "trend_accuracy");
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < actuals.size(); ++i) {
    const bool predicted_up = predictions[i] - prev_actuals[i] >= 0.0;
    const bool actual_up = actuals[i] - prev_actuals[i] >= 0.0;
    hits += predicted_up == actual_up;
  }
  return static_cast<double>(hits) / static_cast<double>(actuals.size());
}

MeanStd absolute_error(VectorRef actuals, VectorRef predictions) {
  check_pair(actuals, predictions, "absolute_error");
  return mean_std((predictions - actuals).cwiseAbs());
}

MeanStd relative_error(VectorRef actuals, VectorRef predictions) {
  check_pair(actuals, predictions, "relative_error");
  for (Eigen::Index i = 0; i < actuals.size(); ++i)
    if (actuals[i] == 0.0) throw DivisionGuardError("relative_error: actual value at index " + std::to_string(i) + " is zero");
  return mean_std(((predictions - actuals).array().abs() / actuals.array().abs()).matrix());
}

MeanStd squared_error(VectorRef actuals, VectorRef predictions) {
  check_pair(actuals, predictions, "squared_error");
  return mean_std((predictions - actuals).array().square().matrix());
}

std::optional<double> correlation(VectorRef actuals, VectorRef predictions) {
  if (actuals.size() != predictions.size()) throw ArgumentError("correlation: length mismatch");
  if (actuals.size() < 2) throw ArgumentError("correlation: needs at least 2 pairs");
  if (is_constant(actuals) || is_constant(predictions)) return std::nullopt;
  const Eigen::ArrayXd x = actuals.array() - actuals.mean();
  const Eigen::ArrayXd y = predictions.array() - predictions.mean();
  const double r = (x * y).sum() / std::sqrt(x.square().sum() * y.square().sum());
  return std::clamp(r, -1.0, 1.0);
}

PerformanceVector performance_vector(VectorRef actuals, VectorRef predictions, VectorRef prev_actuals) {
  check_pair(actuals, predictions, "performance_vector");
  PerformanceVector pv;
  const Eigen::ArrayXd err = (predictions - actuals).array();
  const Eigen::ArrayXd sq = err.square();
  pv.squared_error = mean_std(sq.matrix());
  pv.rmse = std::sqrt(pv.squared_error.mean);
  pv.absolute_error = mean_std(err.abs().matrix());
  if ((actuals.array() != 0.0).all()) pv.relative_error = mean_std((err.abs() / actuals.array().abs()).matrix());
  pv.trend_accuracy = trend_accuracy(actuals, predictions, prev_actuals);
  if (actuals.size() >= 2) pv.correlation = correlation(actuals, predictions);
  if (pv.correlation) pv.squared_correlation = *pv.correlation * *pv.correlation;
  return pv;
}

ResidualSummary residual_summary(VectorRef actuals, VectorRef forecasts, std::vector<Day> dates) {
  check_pair(actuals, forecasts, "residual_summary");
  if (dates.size() != static_cast<std::size_t>(actuals.size())) throw ArgumentError("residual_summary: date count mismatch");
  ResidualSummary out;
  out.residuals = actuals - forecasts;
  out.mean = out.residuals.mean();
  out.dates = std::move(dates);
  return out;
}

std::vector<std::pair<std::string, std::optional<double>>> metric_entries(const PerformanceVector& pv) {
  std::vector<std::pair<std::string, std::optional<double>>> out;
  out.emplace_back("rmse", pv.rmse);
  out.emplace_back("trend_accuracy", pv.trend_accuracy);
  out.emplace_back("absolute_error_mean", pv.absolute_error.mean);
  out.emplace_back("absolute_error_std", pv.absolute_error.std);
  out.emplace_back("relative_error_mean",
                   pv.relative_error ? std::optional<double>(pv.relative_error->mean) : std::nullopt);
  out.emplace_back("relative_error_std",
                   pv.relative_error ? std::optional<double>(pv.relative_error->std) : std::nullopt);
  out.emplace_back("squared_error_mean", pv.squared_error.mean);
  out.emplace_back("squared_error_std", pv.squared_error.std);
  out.emplace_back("correlation", pv.correlation);
  out.emplace_back("squared_correlation", pv.squared_correlation);
  return out;
}

std::vector<std::pair<std::string, std::optional<MeanStd>>> macro_average(const std::vector<PerformanceVector>& pvs) {
  std::vector<std::pair<std::string, std::optional<MeanStd>>> out;
  if (pvs.empty()) return out;
  const auto keys = metric_entries(pvs.front());
  for (std::size_t k = 0; k < keys.size(); ++k) {
    std::vector<double> values;
    for (const auto& pv : pvs) {
      const auto v = metric_entries(pv)[k].second;
      if (v) values.push_back(*v);
    }
    if (values.empty()) {
      out.emplace_back(keys[k].first, std::nullopt);
    } else {
      out.emplace_back(keys[k].first,
                       mean_std(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))));
    }
  }
  return out;
}

namespace {

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string pct(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

std::string opt3(const std::optional<double>& v) { return v ? fmt3(*v) : "undefined"; }

}  // namespace

std::string render_text(const PerformanceVector& pv) {
  std::string s;
  s += "Root mean squared error: " + fmt3(pv.rmse) + " +/- 0.000\n";
  s += "Prediction trend accuracy: " + fmt3(pv.trend_accuracy) + "\n";
  s += "Absolute error: " + fmt3(pv.absolute_error.mean) + " +/- " + fmt3(pv.absolute_error.std) + "\n";
  s += "Relative error: " +
       (pv.relative_error ? pct(pv.relative_error->mean) + " +/- " + pct(pv.relative_error->std) : "undefined") + "\n";
  s += "Squared error: " + fmt3(pv.squared_error.mean) + " +/- " + fmt3(pv.squared_error.std) + "\n";
  s += "Correlation: " + opt3(pv.correlation) + "\n";
  s += "Squared correlation: " + opt3(pv.squared_correlation) + "\n";
  return s;
}

std::string render_text(const std::vector<std::pair<std::string, std::optional<MeanStd>>>& macro,
                        const PerformanceVector& micro) {
  const auto find = [&](const std::string& key) -> std::optional<MeanStd> {
    for (const auto& [k, v] : macro)
      if (k == key) return v;
    return std::nullopt;
  };
  const auto macro_str = [&](const std::string& key, bool percent) {
    const auto v = find(key);
    if (!v) return std::string("undefined");
    return percent ? pct(v->mean) + " +/- " + pct(v->std) : fmt3(v->mean) + " +/- " + fmt3(v->std);
  };
  std::string s;
  s += "Prediction trend accuracy: " + macro_str("trend_accuracy", false) +
       " (micro average: " + fmt3(micro.trend_accuracy) + ")\n";
  s += "Root mean squared error: " + macro_str("rmse", false) + " (micro average: " + fmt3(micro.rmse) +
       " +/- 0.000)\n";
  s += "Absolute error: " + macro_str("absolute_error_mean", false) + " (micro average: " +
       fmt3(micro.absolute_error.mean) + " +/- " + fmt3(micro.absolute_error.std) + ")\n";
  s += "Relative error: " + macro_str("relative_error_mean", true) + " (micro average: " +
       (micro.relative_error ? pct(micro.relative_error->mean) + " +/- " + pct(micro.relative_error->std)
                             : std::string("undefined")) +
       ")\n";
  s += "Squared error: " + macro_str("squared_error_mean", false) + " (micro average: " +
       fmt3(micro.squared_error.mean) + " +/- " + fmt3(micro.squared_error.std) + ")\n";
  s += "Correlation: " + macro_str("correlation", false) + " (micro average: " + opt3(micro.correlation) + ")\n";
  s += "Squared correlation: " + macro_str("squared_correlation", false) + " (micro average: " +
       opt3(micro.squared_correlation) + ")\n";
  return s;
}

}  // namespace coincast
