#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "coincast/model.hpp"

namespace coincast {

struct MlpParams {
  std::size_t cycles = 500;
  double learning_rate = 0.03;
  double momentum = 0.9;
  /// Empty means one hidden layer of ceil(n_features / 2) + 1 units.
  std::vector<std::size_t> hidden_sizes;
  std::uint64_t seed = 0;
};

/// Fully connected sigmoid network with min-max input/label scaling.
///
/// Inputs are mapped to [-1, 1] per feature, labels to [0, 1]; the output
/// unit is a sigmoid, so predictions never leave the training label range.
struct MlpModel {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., 1
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is layer_sizes[l+1] x layer_sizes[l]
  std::vector<Eigen::VectorXd> biases;
  Eigen::VectorXd input_min;
  Eigen::VectorXd input_max;
  double label_min = 0.0;
  double label_max = 1.0;
  MlpParams params;
  /// Training RMSE (label units) measured after each cycle.
  std::vector<double> cycle_rmse;

  bool label_degenerate() const { return label_max == label_min; }
};

/// Network with the given layer sizes, weights uniform in [-0.5, 0.5], identity scalers.
MlpModel init_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed);

std::vector<std::size_t> default_hidden_sizes(std::size_t n_features);

/// Per-example SGD with momentum on squared error: dw = -lr * grad + momentum * dw_prev.
MlpModel fit_mlp(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, const MlpParams& params = {});

double predict(const MlpModel& model, RowRef row);
inline double predict_mlp(const MlpModel& model, RowRef row) { return predict(model, row); }
inline std::size_t n_features(const MlpModel& m) { return m.layer_sizes.front(); }
inline std::string_view model_kind(const MlpModel&) { return "neural_net"; }
void save_model(std::ostream& out, const MlpModel& model);
MlpModel load_mlp(std::istream& in);

/// Raw network output for already-scaled inputs (no scalers applied).
double network_output(const MlpModel& model, RowRef scaled_row);

/// 0.5 * sum (network_output(x_i) - y_i)^2, on unscaled network inputs/targets.
double network_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct MlpGradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Backpropagated gradient of network_loss.
MlpGradient network_loss_gradient(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-6) over all
/// weights and biases, numeric gradients by central differences of step eps.
double gradient_check(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double eps);

}  // namespace coincast
