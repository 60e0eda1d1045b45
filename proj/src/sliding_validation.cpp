#include "coincast/sliding_validation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <ostream>
#include <thread>

#include "coincast/errors.hpp"
#include "coincast/numeric_text.hpp"

namespace coincast {

std::size_t sliding_fold_count(std::size_t n, const SlidingConfig& cfg) {
  if (cfg.train_width == 0 || cfg.step == 0 || cfg.test_width == 0 || cfg.horizon == 0) return 0;
  const std::size_t span = cfg.train_width + (cfg.horizon - 1) + cfg.test_width;
  if (n < span) return 0;
  return (n - span) / cfg.step + 1;
}

std::vector<std::pair<IndexRange, IndexRange>> sliding_folds(std::size_t n, const SlidingConfig& cfg) {
  std::vector<std::pair<IndexRange, IndexRange>> out;
  const std::size_t count = sliding_fold_count(n, cfg);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t train_first = k * cfg.step;
    const std::size_t train_last = train_first + cfg.train_width - 1;
    const std::size_t test_first = train_last + cfg.horizon;
    out.push_back({{train_first, train_last}, {test_first, test_first + cfg.test_width - 1}});
  }
  return out;
}

namespace {

Eigen::VectorXd concat(const std::vector<FoldResult>& folds, Eigen::VectorXd FoldResult::*field) {
  Eigen::Index total = 0;
  for (const auto& f : folds) total += (f.*field).size();
  Eigen::VectorXd out(total);
  Eigen::Index pos = 0;
  for (const auto& f : folds) {
    out.segment(pos, (f.*field).size()) = f.*field;
    pos += (f.*field).size();
  }
  return out;
}

}  // namespace

Eigen::VectorXd ValidationReport::pooled_predictions() const { return concat(folds, &FoldResult::predictions); }
Eigen::VectorXd ValidationReport::pooled_actuals() const { return concat(folds, &FoldResult::actuals); }
Eigen::VectorXd ValidationReport::pooled_prev_actuals() const { return concat(folds, &FoldResult::prev_actuals); }

std::vector<Day> ValidationReport::pooled_dates() const {
  std::vector<Day> out;
  for (const auto& f : folds) out.insert(out.end(), f.dates.begin(), f.dates.end());
  return out;
}

ValidationReport sliding_validate(const WindowedExampleSet& examples, const Trainer& trainer, const SlidingConfig& cfg,
                                  std::uint64_t base_seed, unsigned threads) {
  if (cfg.train_width == 0 || cfg.step == 0 || cfg.test_width == 0 || cfg.horizon == 0)
    throw ArgumentError("sliding validation widths, step and horizon must be positive");
  const std::size_t n = examples.size();
  const auto layout = sliding_folds(n, cfg);
  if (layout.empty())
    throw InsufficientDataError("sliding validation needs at least " +
                                std::to_string(cfg.train_width + cfg.horizon - 1 + cfg.test_width) +
                                " examples, got " + std::to_string(n));

  ValidationReport report;
  report.folds.resize(layout.size());
  std::vector<std::exception_ptr> failures(layout.size());

  const auto run_fold = [&](std::size_t k) {
    try {
      const auto& [train, test] = layout[k];
      const WindowedExampleSet train_set = select_rows(examples, train.first, train.last - train.first + 1);
      const WindowedExampleSet test_set = select_rows(examples, test.first, test.last - test.first + 1);
      const AnyModel model = trainer(train_set.features, train_set.labels, base_seed + k);
      FoldResult& fold = report.folds[k];
      fold.fold_index = k;
      fold.train_range = train;
      fold.test_range = test;
      fold.dates = test_set.label_dates;
      fold.actuals = test_set.labels;
      fold.prev_actuals = test_set.prev_actuals;
      fold.predictions = model.predict_all(test_set.features);
      fold.performance = performance_vector(fold.actuals, fold.predictions, fold.prev_actuals);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(layout.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < layout.size(); ++k) run_fold(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < layout.size();) run_fold(k);
      });
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<PerformanceVector> per_fold;
  per_fold.reserve(report.folds.size());
  for (const auto& f : report.folds) per_fold.push_back(f.performance);
  report.macro = macro_average(per_fold);
  report.micro = performance_vector(report.pooled_actuals(), report.pooled_predictions(), report.pooled_prev_actuals());
  return report;
}

void write_folds_csv(std::ostream& out, const ValidationReport& report) {
  out << "fold,date,actual,prediction\n";
  for (const auto& f : report.folds)
    for (std::size_t i = 0; i < f.dates.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      out << f.fold_index << ',' << f.dates[i].iso() << ',' << format_double(f.actuals[r]) << ','
          << format_double(f.predictions[r]) << '\n';
    }
}

}  // namespace coincast
