#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coincast/date.hpp"

namespace coincast {

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// Arithmetic mean and population standard deviation.
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// The seven regression metrics. Undefined values (zero-variance
/// correlation, relative error over a zero actual) are std::nullopt.
struct PerformanceVector {
  double rmse = 0.0;
  double trend_accuracy = 0.0;
  MeanStd absolute_error;
  std::optional<MeanStd> relative_error;
  MeanStd squared_error;
  std::optional<double> correlation;
  std::optional<double> squared_correlation;
};

double rmse(VectorRef actuals, VectorRef predictions);

/// Fraction of points where the predicted move from the previous actual has
/// the same sign as the actual move. A zero move counts as "not falling".
double trend_accuracy(VectorRef actuals, VectorRef predictions, VectorRef prev_actuals);

MeanStd absolute_error(VectorRef actuals, VectorRef predictions);
/// |e_i| / |actual_i| as a fraction. Throws DivisionGuardError on a zero actual.
MeanStd relative_error(VectorRef actuals, VectorRef predictions);
MeanStd squared_error(VectorRef actuals, VectorRef predictions);

/// Pearson coefficient; nullopt when either side is constant. Needs n >= 2.
std::optional<double> correlation(VectorRef actuals, VectorRef predictions);

/// All seven metrics. Relative error degrades to nullopt on a zero actual and
/// correlation degrades to nullopt for a single pair.
PerformanceVector performance_vector(VectorRef actuals, VectorRef predictions, VectorRef prev_actuals);

MeanStd mean_std(VectorRef values);

struct ResidualSummary {
  Eigen::VectorXd residuals;  // actual - forecast
  double mean = 0.0;
  std::vector<Day> dates;
};

ResidualSummary residual_summary(VectorRef actuals, VectorRef forecasts, std::vector<Day> dates);

/// Flat ordered entries: rmse, trend_accuracy, absolute_error_mean, ... squared_correlation.
std::vector<std::pair<std::string, std::optional<double>>> metric_entries(const PerformanceVector& pv);

/// Mean and population std of each metric across several vectors. Keys as in metric_entries.
std::vector<std::pair<std::string, std::optional<MeanStd>>> macro_average(const std::vector<PerformanceVector>& pvs);

/// Human-readable block, one metric per line, "name: value +/- std".
std::string render_text(const PerformanceVector& pv);
/// Macro "mean +/- std" lines with pooled values in "(micro average: ...)".
std::string render_text(const std::vector<std::pair<std::string, std::optional<MeanStd>>>& macro,
                        const PerformanceVector& micro);

}  // namespace coincast
