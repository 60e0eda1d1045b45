#include "coincast/windowing.hpp"

#include <algorithm>
#include <ostream>

#include "coincast/errors.hpp"
#include "coincast/numeric_text.hpp"

namespace coincast {

std::size_t WindowedExampleSet::feature_index(const std::string& name) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) throw ArgumentError("no feature named '" + name + "'");
  return static_cast<std::size_t>(it - feature_names.begin());
}

void WindowedExampleSet::check_invariants() const {
  const auto n = static_cast<std::size_t>(labels.size());
  if (static_cast<std::size_t>(features.rows()) != n || label_dates.size() != n ||
      static_cast<std::size_t>(prev_actuals.size()) != n || prev_flagged.size() != n)
    throw InvariantError("example set row counts disagree");
  if (static_cast<std::size_t>(features.cols()) != feature_names.size())
    throw InvariantError("example set column count disagrees with feature names");
  for (std::size_t i = 1; i < n; ++i)
    if (!(label_dates[i - 1] < label_dates[i])) throw InvariantError("label dates not strictly increasing");
}

std::size_t window_example_count(std::size_t n, const WindowConfig& cfg) {
  if (cfg.step_size == 0 || n < cfg.window_size + cfg.horizon) return 0;
  return (n - cfg.window_size - cfg.horizon) / cfg.step_size + 1;
}

namespace {

void require_attributes(const PriceSeries& series, const std::vector<Attribute>& attrs, Attribute label_attr) {
  if (attrs.empty()) throw ArgumentError("attribute set is empty");
  for (Attribute a : attrs)
    if (!series.has_attribute(a))
      throw ArgumentError("attribute '" + std::string(attribute_name(a)) + "' is not present in series '" +
                          series.symbol() + "'");
  if (!series.has_attribute(label_attr))
    throw ArgumentError("label attribute '" + std::string(attribute_name(label_attr)) + "' is not present");
}

}  // namespace

WindowedExampleSet window(const PriceSeries& series, const std::vector<Attribute>& attrs, const WindowConfig& cfg,
                          Attribute label_attr) {
  if (cfg.window_size == 0 || cfg.step_size == 0 || cfg.horizon == 0)
    throw ArgumentError("window size, step size and horizon must be positive");
  require_attributes(series, attrs, label_attr);
  const std::size_t n = series.size();
  const std::size_t count = window_example_count(n, cfg);
  if (count == 0)
    throw InsufficientDataError("windowing needs at least " + std::to_string(cfg.window_size + cfg.horizon) +
                                " records, series has " + std::to_string(n));

  std::vector<Eigen::VectorXd> columns;
  for (Attribute a : attrs) columns.push_back(series.column(a));
  const Eigen::VectorXd label_col = series.column(label_attr);

  WindowedExampleSet out;
  const std::size_t w = cfg.window_size;
  for (Attribute a : attrs)
    for (std::size_t j = 0; j < w; ++j)
      out.feature_names.push_back(std::string(attribute_name(a)) + "-" + std::to_string(w - 1 - j));

  const auto rows = static_cast<Eigen::Index>(count);
  out.features.resize(rows, static_cast<Eigen::Index>(attrs.size() * w));
  out.labels.resize(rows);
  out.prev_actuals.resize(rows);
  out.label_dates.reserve(count);
  out.prev_flagged.assign(count, false);

  for (std::size_t e = 0; e < count; ++e) {
    const std::size_t start = e * cfg.step_size;
    const std::size_t last = start + w - 1;
    const std::size_t target = last + cfg.horizon;
    const auto row = static_cast<Eigen::Index>(e);
    for (std::size_t k = 0; k < attrs.size(); ++k)
      out.features.row(row).segment(static_cast<Eigen::Index>(k * w), static_cast<Eigen::Index>(w)) =
          columns[k].segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(w)).transpose();
    out.labels[row] = label_col[static_cast<Eigen::Index>(target)];
    out.prev_actuals[row] = label_col[static_cast<Eigen::Index>(last)];
    out.label_dates.push_back(series[target].date);
  }
  return out;
}

WindowedExampleSet make_same_day_examples(const PriceSeries& series, const std::vector<Attribute>& attrs,
                                          Attribute label_attr) {
  if (std::find(attrs.begin(), attrs.end(), label_attr) != attrs.end())
    throw ArgumentError("feature attributes include the label '" + std::string(attribute_name(label_attr)) +
                        "' (target leakage)");
  require_attributes(series, attrs, label_attr);

  WindowedExampleSet out;
  for (Attribute a : attrs) out.feature_names.emplace_back(attribute_name(a));
  const auto rows = static_cast<Eigen::Index>(series.size());
  out.features.resize(rows, static_cast<Eigen::Index>(attrs.size()));
  for (std::size_t k = 0; k < attrs.size(); ++k) out.features.col(static_cast<Eigen::Index>(k)) = series.column(attrs[k]);
  out.labels = series.column(label_attr);
  out.label_dates = series.dates();
  out.prev_actuals.resize(rows);
  out.prev_flagged.assign(series.size(), false);
  out.prev_actuals[0] = out.labels[0];
  out.prev_flagged[0] = true;
  for (Eigen::Index i = 1; i < rows; ++i) out.prev_actuals[i] = out.labels[i - 1];
  return out;
}

WindowedExampleSet with_previous_label(const WindowedExampleSet& set, const std::string& label_name) {
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (!set.prev_flagged[i]) keep.push_back(static_cast<Eigen::Index>(i));
  if (keep.empty()) throw InsufficientDataError("no example has a known previous label value");

  WindowedExampleSet out;
  out.feature_names = set.feature_names;
  out.feature_names.push_back(label_name + "-1");
  const auto rows = static_cast<Eigen::Index>(keep.size());
  const auto cols = set.features.cols();
  out.features.resize(rows, cols + 1);
  out.labels.resize(rows);
  out.prev_actuals.resize(rows);
  out.prev_flagged.assign(keep.size(), false);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index src = keep[static_cast<std::size_t>(r)];
    out.features.row(r).head(cols) = set.features.row(src);
    out.features(r, cols) = set.prev_actuals[src];
    out.labels[r] = set.labels[src];
    out.prev_actuals[r] = set.prev_actuals[src];
    out.label_dates.push_back(set.label_dates[static_cast<std::size_t>(src)]);
  }
  return out;
}

WindowedExampleSet select_rows(const WindowedExampleSet& set, std::size_t first, std::size_t count) {
  if (first + count > set.size()) throw ArgumentError("row range exceeds example count");
  const auto f = static_cast<Eigen::Index>(first);
  const auto c = static_cast<Eigen::Index>(count);
  WindowedExampleSet out;
  out.feature_names = set.feature_names;
  out.features = set.features.middleRows(f, c);
  out.labels = set.labels.segment(f, c);
  out.prev_actuals = set.prev_actuals.segment(f, c);
  out.label_dates.assign(set.label_dates.begin() + f, set.label_dates.begin() + f + c);
  out.prev_flagged.assign(set.prev_flagged.begin() + f, set.prev_flagged.begin() + f + c);
  return out;
}

WindowedExampleSet select_by_label_date(const WindowedExampleSet& set, Day start, Day end) {
  if (end < start) throw ArgumentError("date range start " + start.iso() + " is after end " + end.iso());
  const auto lo = std::lower_bound(set.label_dates.begin(), set.label_dates.end(), start);
  const auto hi = std::upper_bound(set.label_dates.begin(), set.label_dates.end(), end);
  if (lo >= hi) throw EmptySliceError("no examples labelled between " + start.iso() + " and " + end.iso());
  return select_rows(set, static_cast<std::size_t>(lo - set.label_dates.begin()), static_cast<std::size_t>(hi - lo));
}

std::pair<WindowedExampleSet, WindowedExampleSet> split_linear(const WindowedExampleSet& set, double ratio) {
  const std::size_t cut = linear_split_point(set.size(), ratio);
  return {select_rows(set, 0, cut), select_rows(set, cut, set.size() - cut)};
}

void write_examples_csv(std::ostream& out, const WindowedExampleSet& set) {
  for (const auto& name : set.feature_names) out << name << ',';
  out << "label,label_date\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = 0; c < set.features.cols(); ++c) out << format_double(set.features(r, c)) << ',';
    out << format_double(set.labels[r]) << ',' << set.label_dates[i].iso() << '\n';
  }
}

}  // namespace coincast
