#include "coincast/ensemble_learners.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <exception>
#include <ostream>
#include <thread>

#include "coincast/errors.hpp"
#include "coincast/numeric_text.hpp"
#include "text_io.hpp"

namespace coincast {

LinearModel fit_linear(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets) {
  if (features.rows() != targets.size()) throw ArgumentError("fit_linear: row count differs from target count");
  if (features.rows() < features.cols() + 1)
    throw InsufficientDataError("fit_linear: underdetermined, " + std::to_string(features.rows()) + " rows for " +
                                std::to_string(features.cols()) + " features plus intercept");
  const Eigen::RowVectorXd x_mean = features.colwise().mean();
  const double y_mean = targets.mean();
  const Eigen::MatrixXd centred = features.rowwise() - x_mean;

  LinearModel m;
  if (features.cols() == 0) {
    m.coefficients.resize(0);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(centred);
    m.coefficients = cod.solve((targets.array() - y_mean).matrix());
  }
  m.intercept = y_mean - x_mean.dot(m.coefficients);
  return m;
}

double predict(const LinearModel& model, RowRef row) {
  if (row.size() != model.coefficients.size())
    throw ArgumentError("linear predict: expected " + std::to_string(model.coefficients.size()) + " features, got " +
                        std::to_string(row.size()));
  return model.intercept + row.dot(model.coefficients.transpose());
}

void save_model(std::ostream& out, const LinearModel& m) {
  out << "linear 1\n"
      << "n_features " << m.coefficients.size() << '\n'
      << "intercept " << format_double(m.intercept) << '\n'
      << "coefficients " << textio::join(m.coefficients) << '\n'
      << "end linear\n";
}

LinearModel load_linear(std::istream& in) {
  if (textio::expect(in, "linear") != "1") throw ParseError("unsupported linear model version");
  const auto n = static_cast<Eigen::Index>(textio::read_uint(in, "n_features"));
  LinearModel m;
  m.intercept = textio::read_double(in, "intercept");
  m.coefficients = textio::read_vector(in, "coefficients", n);
  if (textio::expect(in, "end") != "linear") throw ParseError("missing 'end linear'");
  return m;
}

std::string_view transform_name(RelativeTransform t) {
  return t == RelativeTransform::Difference ? "difference" : "ratio";
}

RelativeTransform parse_transform(std::string_view name) {
  if (name == "difference") return RelativeTransform::Difference;
  if (name == "ratio") return RelativeTransform::Ratio;
  throw ArgumentError("unknown relative transform '" + std::string(name) + "'");
}

RelativeRegressionModel fit_relative(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                     std::size_t base_index, std::string base_feature, RelativeTransform transform,
                                     const Trainer& inner_trainer, std::uint64_t seed) {
  if (features.rows() != targets.size()) throw ArgumentError("fit_relative: row count differs from target count");
  if (base_index >= static_cast<std::size_t>(features.cols()))
    throw ArgumentError("fit_relative: base feature index out of range");
  const Eigen::VectorXd base = features.col(static_cast<Eigen::Index>(base_index));
  Eigen::VectorXd relative(targets.size());
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    if (transform == RelativeTransform::Ratio) {
      if (base[i] == 0.0)
        throw DivisionGuardError("fit_relative: base feature '" + base_feature + "' is zero in row " + std::to_string(i));
      relative[i] = targets[i] / base[i];
    } else {
      relative[i] = targets[i] - base[i];
    }
  }
  RelativeRegressionModel m;
  m.base_feature = std::move(base_feature);
  m.base_index = base_index;
  m.transform = transform;
  m.inner = inner_trainer(features, relative, seed);
  return m;
}

RelativeRegressionModel fit_relative(const WindowedExampleSet& examples, const std::string& base_feature,
                                     RelativeTransform transform, const Trainer& inner_trainer, std::uint64_t seed) {
  return fit_relative(examples.features, examples.labels, examples.feature_index(base_feature), base_feature, transform,
                      inner_trainer, seed);
}

double predict(const RelativeRegressionModel& model, RowRef row) {
  const double inner = model.inner.predict(row);
  const double base = row[static_cast<Eigen::Index>(model.base_index)];
  return model.transform == RelativeTransform::Ratio ? inner * base : inner + base;
}

void save_model(std::ostream& out, const RelativeRegressionModel& m) {
  out << "relative 1\n"
      << "base_feature " << m.base_feature << '\n'
      << "base_index " << m.base_index << '\n'
      << "transform " << transform_name(m.transform) << '\n';
  save_model(out, m.inner);
  out << "end relative\n";
}

RelativeRegressionModel load_relative(std::istream& in) {
  if (textio::expect(in, "relative") != "1") throw ParseError("unsupported relative model version");
  RelativeRegressionModel m;
  m.base_feature = textio::expect(in, "base_feature");
  m.base_index = textio::read_uint(in, "base_index");
  m.transform = parse_transform(textio::expect(in, "transform"));
  m.inner = load_model(in);
  if (textio::expect(in, "end") != "relative") throw ParseError("missing 'end relative'");
  return m;
}

VoteModel fit_vote(const std::vector<NamedTrainer>& trainers, const Eigen::MatrixXd& features,
                   const Eigen::VectorXd& targets, std::uint64_t base_seed, unsigned threads) {
  if (trainers.empty()) throw ArgumentError("fit_vote: no members");
  const std::size_t count = trainers.size();
  std::vector<AnyModel> members(count);
  std::vector<std::exception_ptr> failures(count);

  const auto train_one = [&](std::size_t i) {
    try {
      members[i] = trainers[i].trainer(features, targets, base_seed + i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) train_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) train_one(i);
      });
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.error_class(), "vote member '" + trainers[i].name + "': " + e.what());
    } catch (const std::exception& e) {
      throw InvariantError("vote member '" + trainers[i].name + "': " + e.what());
    }
  }
  return VoteModel{std::move(members)};
}

double predict(const VoteModel& model, RowRef row) {
  double sum = 0.0;
  for (const auto& m : model.members) sum += m.predict(row);
  return sum / static_cast<double>(model.members.size());
}

std::size_t n_features(const VoteModel& m) { return m.members.empty() ? 0 : m.members.front().n_features(); }

void save_model(std::ostream& out, const VoteModel& m) {
  out << "vote 1\n" << "members " << m.members.size() << '\n';
  for (const auto& member : m.members) save_model(out, member);
  out << "end vote\n";
}

VoteModel load_vote(std::istream& in) {
  if (textio::expect(in, "vote") != "1") throw ParseError("unsupported vote model version");
  const auto count = textio::read_uint(in, "members");
  VoteModel m;
  for (std::uint64_t i = 0; i < count; ++i) m.members.push_back(load_model(in));
  if (textio::expect(in, "end") != "vote") throw ParseError("missing 'end vote'");
  return m;
}

}  // namespace coincast
