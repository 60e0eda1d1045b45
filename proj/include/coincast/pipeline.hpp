#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coincast/model.hpp"
#include "coincast/perf_metrics.hpp"
#include "coincast/run_spec.hpp"
#include "coincast/sliding_validation.hpp"

namespace coincast {

struct PredictionRow {
  Day date;
  double actual = 0.0;
  double prediction = 0.0;
  double previous_actual = 0.0;  // trend baseline used for this row
};

struct RunOptions {
  unsigned threads = 1;  // fold / vote-member workers; never changes results
  bool write_outputs = true;
};

struct RunReport {
  RunSpec spec;
  std::string spec_echo;
  std::vector<PredictionRow> predictions;
  PerformanceVector metrics;  // holdout metrics, or the pooled (micro) metrics under sliding validation
  std::optional<ValidationReport> validation;
  std::optional<ResidualSummary> residuals;  // knn only
  AnyModel model;                            // holdout gbt / neural_net / ensemble only
  std::vector<std::filesystem::path> artifacts;
};

/// ingest -> slice/split -> examples -> fit -> predict -> metrics, then write
/// the run's files. Any failure removes files already written.
RunReport run(const RunSpec& spec, const RunOptions& options = {});

/// Builds the example set a spec asks for from a (sliced) series.
WindowedExampleSet build_examples(const RunSpec& spec, const PriceSeries& series);

/// Trainer for the spec's model over examples with the given feature names.
Trainer make_trainer(const RunSpec& spec, const std::vector<std::string>& feature_names, unsigned threads = 1);

void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> read_predictions_csv(std::istream& in);
PerformanceVector metrics_from_predictions(const std::vector<PredictionRow>& rows);

std::string metrics_json(const RunReport& report);
std::string metrics_text(const RunReport& report);

struct ConsistencyCheck {
  bool ok = false;
  double max_abs_diff = 0.0;
  std::string detail;
};

/// Recomputes metrics from <dir>/predictions.csv and compares with <dir>/metrics.json.
ConsistencyCheck check_self_consistency(const std::filesystem::path& output_dir, double tolerance = 1e-9);

/// A labelled reference value supplied by the user (symbol, model, metric key, value).
struct ReferenceValue {
  std::string symbol;
  std::string model;
  std::string metric;
  double value = 0.0;
};

/// CSV with header symbol,model,metric,value.
std::vector<ReferenceValue> load_reference_values(const std::filesystem::path& path);

struct Comparison {
  std::string text;       // aligned table for the terminal
  std::string table_csv;  // metric,<model columns>,<reference columns>
  std::string plot_csv;   // date,actual,model,prediction
};

/// Side-by-side metrics of several runs of one symbol.
Comparison compare(const std::vector<RunReport>& reports, const std::vector<ReferenceValue>& references = {});

/// One swept key: "section.key" (or "key" for top level) and its alternatives.
struct GridAxis {
  std::string section;
  std::string key;
  std::vector<std::string> values;
};

/// Lines of "section.key = v1; v2; ...".
std::vector<GridAxis> parse_grid(std::string_view text);

/// Runs the cartesian product of the grid over a base spec file; returns CSV
/// with one row per combination (swept values then metrics).
std::string sweep(const std::filesystem::path& spec_path, const std::vector<GridAxis>& grid,
                  const RunOptions& options = {});

}  // namespace coincast
