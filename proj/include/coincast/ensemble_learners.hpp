#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "coincast/model.hpp"
#include "coincast/windowing.hpp"

namespace coincast {

struct LinearModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
};

/// Ordinary least squares with intercept, solved by a complete orthogonal
/// decomposition of the centred design. Rank-deficient designs get the
/// minimum-norm coefficient vector.
LinearModel fit_linear(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets);

double predict(const LinearModel& model, RowRef row);
inline std::size_t n_features(const LinearModel& m) { return static_cast<std::size_t>(m.coefficients.size()); }
inline std::string_view model_kind(const LinearModel&) { return "linear"; }
void save_model(std::ostream& out, const LinearModel& model);
LinearModel load_linear(std::istream& in);

enum class RelativeTransform { Difference, Ratio };
std::string_view transform_name(RelativeTransform t);
RelativeTransform parse_transform(std::string_view name);

/// Learns the target relative to one of its own feature columns and undoes
/// the transform at prediction time.
struct RelativeRegressionModel {
  std::string base_feature;
  std::size_t base_index = 0;
  RelativeTransform transform = RelativeTransform::Difference;
  AnyModel inner;
};

RelativeRegressionModel fit_relative(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                     std::size_t base_index, std::string base_feature, RelativeTransform transform,
                                     const Trainer& inner_trainer, std::uint64_t seed);
RelativeRegressionModel fit_relative(const WindowedExampleSet& examples, const std::string& base_feature,
                                     RelativeTransform transform, const Trainer& inner_trainer, std::uint64_t seed);

double predict(const RelativeRegressionModel& model, RowRef row);
inline std::size_t n_features(const RelativeRegressionModel& m) { return m.inner.n_features(); }
inline std::string_view model_kind(const RelativeRegressionModel&) { return "relative"; }
void save_model(std::ostream& out, const RelativeRegressionModel& model);
RelativeRegressionModel load_relative(std::istream& in);

/// Unweighted average of member predictions.
struct VoteModel {
  std::vector<AnyModel> members;
};

struct NamedTrainer {
  std::string name;
  Trainer trainer;
};

/// Trains every member on the same data; member i gets seed base_seed + i.
/// With threads > 1 members train concurrently; the result does not depend on it.
VoteModel fit_vote(const std::vector<NamedTrainer>& trainers, const Eigen::MatrixXd& features,
                   const Eigen::VectorXd& targets, std::uint64_t base_seed, unsigned threads = 1);

double predict(const VoteModel& model, RowRef row);
inline double predict_vote(const VoteModel& model, RowRef row) { return predict(model, row); }
std::size_t n_features(const VoteModel& m);
inline std::string_view model_kind(const VoteModel&) { return "vote"; }
void save_model(std::ostream& out, const VoteModel& model);
VoteModel load_vote(std::istream& in);

}  // namespace coincast
