#include "coincast/neural_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "coincast/errors.hpp"
#include "coincast/numeric_text.hpp"
#include "text_io.hpp"

namespace coincast {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

Eigen::VectorXd scale_inputs(const MlpModel& m, RowRef row) {
  Eigen::VectorXd out(row.size());
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    const double span = m.input_max[j] - m.input_min[j];
    out[j] = span > 0.0 ? 2.0 * (row[j] - m.input_min[j]) / span - 1.0 : 0.0;
  }
  return out;
}

double scale_label(const MlpModel& m, double y) {
  return m.label_degenerate() ? 0.0 : (y - m.label_min) / (m.label_max - m.label_min);
}

/// Activations a[0] = input, a[l+1] = sigmoid(W_l a[l] + b_l).
std::vector<Eigen::VectorXd> forward(const MlpModel& m, const Eigen::VectorXd& input) {
  std::vector<Eigen::VectorXd> a;
  a.reserve(m.weights.size() + 1);
  a.push_back(input);
  for (std::size_t l = 0; l < m.weights.size(); ++l) a.push_back(sigmoid(m.weights[l] * a.back() + m.biases[l]));
  return a;
}

/// Accumulates the gradient of 0.5 * (out - target)^2 into g.
void backprop(const MlpModel& m, const std::vector<Eigen::VectorXd>& a, double target, MlpGradient& g) {
  const std::size_t layers = m.weights.size();
  Eigen::VectorXd delta = (a.back().array() - target) * a.back().array() * (1.0 - a.back().array());
  for (std::size_t l = layers; l-- > 0;) {
    g.weights[l].noalias() += delta * a[l].transpose();
    g.biases[l] += delta;
    if (l > 0) delta = ((m.weights[l].transpose() * delta).array() * a[l].array() * (1.0 - a[l].array())).matrix();
  }
}

MlpGradient zero_gradient(const MlpModel& m) {
  MlpGradient g;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(m.biases[l].size()));
  }
  return g;
}

void check_row(const MlpModel& m, RowRef row) {
  if (static_cast<std::size_t>(row.size()) != m.layer_sizes.front())
    throw ArgumentError("neural net predict: expected " + std::to_string(m.layer_sizes.front()) + " features, got " +
                        std::to_string(row.size()));
}

}  // namespace

std::vector<std::size_t> default_hidden_sizes(std::size_t n_features) { return {(n_features + 1) / 2 + 1}; }

MlpModel init_mlp(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw ArgumentError("network needs at least input and output layers");
  for (auto s : layer_sizes)
    if (s == 0) throw ArgumentError("layer sizes must be positive");
  MlpModel m;
  m.layer_sizes = layer_sizes;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-0.5, 0.5);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto rows = static_cast<Eigen::Index>(layer_sizes[l + 1]);
    const auto cols = static_cast<Eigen::Index>(layer_sizes[l]);
    Eigen::MatrixXd w(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = init(rng);
      b[r] = init(rng);
    }
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  const auto n_in = static_cast<Eigen::Index>(layer_sizes.front());
  m.input_min = Eigen::VectorXd::Constant(n_in, -1.0);
  m.input_max = Eigen::VectorXd::Constant(n_in, 1.0);
  return m;
}

MlpModel fit_mlp(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, const MlpParams& params) {
  if (features.rows() != targets.size()) throw ArgumentError("fit_mlp: row count differs from target count");
  if (features.rows() < 2) throw InsufficientDataError("fit_mlp: needs at least 2 rows");
  if (features.cols() == 0) throw ArgumentError("fit_mlp: no features");
  for (Eigen::Index i = 0; i < features.rows(); ++i)
    if (!features.row(i).allFinite() || !std::isfinite(targets[i]))
      throw ArgumentError("fit_mlp: non-finite value in row " + std::to_string(i));

  const auto n_in = static_cast<std::size_t>(features.cols());
  std::vector<std::size_t> sizes{n_in};
  const auto hidden = params.hidden_sizes.empty() ? default_hidden_sizes(n_in) : params.hidden_sizes;
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);

  std::mt19937_64 rng(params.seed);
  MlpModel m = init_mlp(sizes, rng());
  m.params = params;
  m.params.hidden_sizes = hidden;
  m.input_min = features.colwise().minCoeff().transpose();
  m.input_max = features.colwise().maxCoeff().transpose();
  m.label_min = targets.minCoeff();
  m.label_max = targets.maxCoeff();

  const Eigen::Index n = features.rows();
  std::vector<Eigen::VectorXd> inputs;
  Eigen::VectorXd labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inputs.push_back(scale_inputs(m, features.row(i)));
    labels[i] = scale_label(m, targets[i]);
  }

  MlpGradient velocity = zero_gradient(m);
  MlpGradient grad = zero_gradient(m);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const double label_span = m.label_max - m.label_min;

  m.cycle_rmse.reserve(params.cycles);
  for (std::size_t cycle = 0; cycle < params.cycles; ++cycle) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index i : order) {
      for (std::size_t l = 0; l < m.weights.size(); ++l) {
        grad.weights[l].setZero();
        grad.biases[l].setZero();
      }
      backprop(m, forward(m, inputs[static_cast<std::size_t>(i)]), labels[i], grad);
      for (std::size_t l = 0; l < m.weights.size(); ++l) {
        velocity.weights[l] = -params.learning_rate * grad.weights[l] + params.momentum * velocity.weights[l];
        velocity.biases[l] = -params.learning_rate * grad.biases[l] + params.momentum * velocity.biases[l];
        m.weights[l] += velocity.weights[l];
        m.biases[l] += velocity.biases[l];
      }
    }
    double sse = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = forward(m, inputs[static_cast<std::size_t>(i)]).back()[0] - labels[i];
      sse += e * e;
    }
    m.cycle_rmse.push_back(std::sqrt(sse / static_cast<double>(n)) * label_span);
  }
  return m;
}

double network_output(const MlpModel& model, RowRef scaled_row) {
  check_row(model, scaled_row);
  return forward(model, scaled_row.transpose()).back()[0];
}

double predict(const MlpModel& model, RowRef row) {
  check_row(model, row);
  if (model.label_degenerate()) return model.label_min;
  const double out = forward(model, scale_inputs(model, row)).back()[0];
  return model.label_min + out * (model.label_max - model.label_min);
}

double network_loss(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double e = network_output(model, x.row(i)) - y[i];
    loss += 0.5 * e * e;
  }
  return loss;
}

MlpGradient network_loss_gradient(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw ArgumentError("gradient: row count differs from target count");
  MlpGradient g = zero_gradient(model);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    check_row(model, x.row(i));
    backprop(model, forward(model, x.row(i).transpose()), y[i], g);
  }
  return g;
}

double gradient_check(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double eps) {
  if (!(eps > 0.0)) throw ArgumentError("gradient_check: eps must be positive");
  const MlpGradient analytic = network_loss_gradient(model, x, y);
  MlpModel probe = model;
  double worst = 0.0;
  const auto compare = [&](double& param, double a) {
    const double saved = param;
    param = saved + eps;
    const double up = network_loss(probe, x, y);
    param = saved - eps;
    const double down = network_loss(probe, x, y);
    param = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  };
  for (std::size_t l = 0; l < probe.weights.size(); ++l) {
    for (Eigen::Index r = 0; r < probe.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < probe.weights[l].cols(); ++c) compare(probe.weights[l](r, c), analytic.weights[l](r, c));
      compare(probe.biases[l][r], analytic.biases[l][r]);
    }
  }
  return worst;
}

void save_model(std::ostream& out, const MlpModel& m) {
  out << "neural_net 1\n" << "layers";
  for (auto s : m.layer_sizes) out << ' ' << s;
  out << "\ncycles " << m.params.cycles << '\n'
      << "learning_rate " << format_double(m.params.learning_rate) << '\n'
      << "momentum " << format_double(m.params.momentum) << '\n'
      << "seed " << m.params.seed << '\n'
      << "input_min " << textio::join(m.input_min) << '\n'
      << "input_max " << textio::join(m.input_max) << '\n'
      << "label_min " << format_double(m.label_min) << '\n'
      << "label_max " << format_double(m.label_max) << '\n';
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    const Eigen::MatrixXd& w = m.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) out << "w" << l << ' ' << textio::join(w.row(r).transpose()) << '\n';
    out << "b" << l << ' ' << textio::join(m.biases[l]) << '\n';
  }
  out << "end neural_net\n";
}

MlpModel load_mlp(std::istream& in) {
  MlpModel m;
  if (textio::expect(in, "neural_net") != "1") throw ParseError("unsupported neural_net model version");
  for (double s : textio::to_doubles(textio::expect(in, "layers"), "layers")) {
    if (!(s >= 1.0) || s != std::floor(s)) throw ParseError("bad layer size");
    m.layer_sizes.push_back(static_cast<std::size_t>(s));
  }
  if (m.layer_sizes.size() < 2) throw ParseError("network needs at least two layers");
  m.params.cycles = textio::read_uint(in, "cycles");
  m.params.learning_rate = textio::read_double(in, "learning_rate");
  m.params.momentum = textio::read_double(in, "momentum");
  m.params.seed = textio::read_uint(in, "seed");
  m.params.hidden_sizes.assign(m.layer_sizes.begin() + 1, m.layer_sizes.end() - 1);
  const auto n_in = static_cast<Eigen::Index>(m.layer_sizes.front());
  m.input_min = textio::read_vector(in, "input_min", n_in);
  m.input_max = textio::read_vector(in, "input_max", n_in);
  m.label_min = textio::read_double(in, "label_min");
  m.label_max = textio::read_double(in, "label_max");
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    const auto rows = static_cast<Eigen::Index>(m.layer_sizes[l + 1]);
    const auto cols = static_cast<Eigen::Index>(m.layer_sizes[l]);
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) w.row(r) = textio::read_vector(in, "w" + std::to_string(l), cols).transpose();
    m.weights.push_back(std::move(w));
    m.biases.push_back(textio::read_vector(in, "b" + std::to_string(l), rows));
  }
  if (textio::expect(in, "end") != "neural_net") throw ParseError("missing 'end neural_net'");
  return m;
}

}  // namespace coincast
