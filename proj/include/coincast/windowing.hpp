#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coincast/date.hpp"
#include "coincast/market_data.hpp"

namespace coincast {

/// Supervised examples built from a price series.
///
/// Row i of `features` predicts `labels[i]`, observed on `label_dates[i]`.
/// `prev_actuals[i]` is the last label-attribute value known before that
/// label, used as the baseline for trend accuracy. Rows where no earlier
/// value exists carry the label itself and are marked in `prev_flagged`.
struct WindowedExampleSet {
  Eigen::MatrixXd features;
  std::vector<std::string> feature_names;
  Eigen::VectorXd labels;
  std::vector<Day> label_dates;
  Eigen::VectorXd prev_actuals;
  std::vector<bool> prev_flagged;

  std::size_t size() const { return static_cast<std::size_t>(labels.size()); }
  std::size_t n_features() const { return feature_names.size(); }
  /// Index of a named feature column; throws ArgumentError if absent.
  std::size_t feature_index(const std::string& name) const;
  /// Throws InvariantError if the shapes or date order disagree.
  void check_invariants() const;
};

struct WindowConfig {
  std::size_t window_size = 1;
  std::size_t step_size = 1;
  std::size_t horizon = 1;
};

/// floor((n - w - h) / s) + 1, or 0 when the series is too short.
std::size_t window_example_count(std::size_t n, const WindowConfig& cfg);

/// Lagged examples. Feature "attr-k" holds the value k steps before the window end.
WindowedExampleSet window(const PriceSeries& series, const std::vector<Attribute>& attrs, const WindowConfig& cfg,
                          Attribute label_attr = Attribute::Close);

/// One example per record: same-day attribute values regress the same-day label.
/// Contains same-day lookahead by construction; `attrs` must not include the label.
WindowedExampleSet make_same_day_examples(const PriceSeries& series, const std::vector<Attribute>& attrs,
                                          Attribute label_attr = Attribute::Close);

/// Appends the previous label value as feature "<label>-1" and drops rows
/// whose previous value is unknown.
WindowedExampleSet with_previous_label(const WindowedExampleSet& set, const std::string& label_name);

/// Rows [first, first + count).
WindowedExampleSet select_rows(const WindowedExampleSet& set, std::size_t first, std::size_t count);

/// Rows whose label date lies in [start, end]. Throws EmptySliceError if none do.
WindowedExampleSet select_by_label_date(const WindowedExampleSet& set, Day start, Day end);

/// Leading/trailing parts without reordering, sized by linear_split_point.
std::pair<WindowedExampleSet, WindowedExampleSet> split_linear(const WindowedExampleSet& set, double ratio);

/// Feature columns, then label, then label_date.
void write_examples_csv(std::ostream& out, const WindowedExampleSet& set);

}  // namespace coincast
