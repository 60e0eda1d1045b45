#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coincast/model.hpp"
#include "coincast/perf_metrics.hpp"
#include "coincast/windowing.hpp"

namespace coincast {

struct SlidingConfig {
  std::size_t train_width = 4;
  std::size_t step = 1;
  std::size_t test_width = 4;
  std::size_t horizon = 1;  // test starts `horizon` examples after the last training example
};

/// Inclusive, 0-based example index range.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  bool operator==(const IndexRange&) const = default;
};

struct FoldResult {
  std::size_t fold_index = 0;
  IndexRange train_range;
  IndexRange test_range;
  std::vector<Day> dates;
  Eigen::VectorXd predictions;
  Eigen::VectorXd actuals;
  Eigen::VectorXd prev_actuals;
  PerformanceVector performance;
};

struct ValidationReport {
  std::vector<FoldResult> folds;
  std::vector<std::pair<std::string, std::optional<MeanStd>>> macro;
  PerformanceVector micro;

  /// Fold predictions concatenated in fold order.
  Eigen::VectorXd pooled_predictions() const;
  Eigen::VectorXd pooled_actuals() const;
  Eigen::VectorXd pooled_prev_actuals() const;
  std::vector<Day> pooled_dates() const;
};

/// floor((n - train_width - (horizon - 1) - test_width) / step) + 1, or 0 if no fold fits.
std::size_t sliding_fold_count(std::size_t n, const SlidingConfig& cfg);

/// Train/test ranges of every fold, in fold order.
std::vector<std::pair<IndexRange, IndexRange>> sliding_folds(std::size_t n, const SlidingConfig& cfg);

/// Walk-forward validation. Fold k retrains from scratch with seed base_seed + k.
/// Folds may run on `threads` workers; the report is identical either way.
ValidationReport sliding_validate(const WindowedExampleSet& examples, const Trainer& trainer, const SlidingConfig& cfg,
                                  std::uint64_t base_seed = 0, unsigned threads = 1);

/// CSV with columns fold,date,actual,prediction.
void write_folds_csv(std::ostream& out, const ValidationReport& report);

}  // namespace coincast
