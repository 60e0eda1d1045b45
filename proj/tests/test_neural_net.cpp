#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "coincast/errors.hpp"
#include "coincast/neural_net.hpp"

using namespace coincast;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Naive layer-by-layer forward pass including the scalers.
double oracle_forward(const MlpModel& m, const Eigen::RowVectorXd& x) {
  std::vector<double> a(static_cast<std::size_t>(x.size()));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double lo = m.input_min[j], hi = m.input_max[j];
    a[static_cast<std::size_t>(j)] = hi == lo ? 0.0 : 2.0 * (x[j] - lo) / (hi - lo) - 1.0;
  }
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    std::vector<double> next(static_cast<std::size_t>(m.weights[l].rows()));
    for (Eigen::Index r = 0; r < m.weights[l].rows(); ++r) {
      double z = m.biases[l][r];
      for (Eigen::Index c = 0; c < m.weights[l].cols(); ++c) z += m.weights[l](r, c) * a[static_cast<std::size_t>(c)];
      next[static_cast<std::size_t>(r)] = sigmoid(z);
    }
    a = next;
  }
  return m.label_min + a[0] * (m.label_max - m.label_min);
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double lo = -1, double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace

TEST(Mlp, DefaultHidden) {
  EXPECT_EQ(default_hidden_sizes(1), std::vector<std::size_t>{2});
  EXPECT_EQ(default_hidden_sizes(5), std::vector<std::size_t>{4});
  EXPECT_EQ(default_hidden_sizes(6), std::vector<std::size_t>{4});
}

TEST(Mlp, InitShapesAndRange) {
  const auto m = init_mlp({3, 4, 2, 1}, 5);
  ASSERT_EQ(m.weights.size(), 3u);
  EXPECT_EQ(m.weights[0].rows(), 4);
  EXPECT_EQ(m.weights[0].cols(), 3);
  EXPECT_EQ(m.weights[2].rows(), 1);
  for (const auto& w : m.weights) EXPECT_LE(w.cwiseAbs().maxCoeff(), 0.5);
}

TEST(Mlp, ConstantTargets) {
  const Eigen::MatrixXd x = random_matrix(20, 2, 1);
  MlpParams p;
  p.cycles = 20;
  const auto m = fit_mlp(x, Eigen::VectorXd::Constant(20, 42.5), p);
  EXPECT_TRUE(m.label_degenerate());
  for (Eigen::Index i = 0; i < x.rows(); ++i) EXPECT_NEAR(predict(m, x.row(i)), 42.5, 1e-9);
}

TEST(Mlp, Deterministic) {
  const Eigen::MatrixXd x = random_matrix(30, 2, 2);
  const Eigen::VectorXd y = x.col(0) - x.col(1);
  MlpParams p;
  p.cycles = 30;
  p.seed = 77;
  const auto a = fit_mlp(x, y, p), b = fit_mlp(x, y, p);
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    EXPECT_EQ(a.weights[l], b.weights[l]);
    EXPECT_EQ(a.biases[l], b.biases[l]);
  }
  p.seed = 78;
  EXPECT_NE(fit_mlp(x, y, p).weights[0], a.weights[0]);
}

TEST(Mlp, LearnsLinearMap) {
  Eigen::VectorXd xs(200);
  for (int i = 0; i < 200; ++i) xs[i] = -1.0 + 2.0 * i / 199.0;
  const auto m = fit_mlp(Eigen::MatrixXd(xs), 0.5 * xs);
  ASSERT_EQ(m.cycle_rmse.size(), 500u);
  EXPECT_LT(m.cycle_rmse.back(), m.cycle_rmse.front() / 10) << m.cycle_rmse.front() << " -> " << m.cycle_rmse.back();
}

TEST(Mlp, ForwardMatchesOracleAndStaysInRange) {
  const Eigen::MatrixXd x = random_matrix(40, 3, 3, 0, 100);
  const Eigen::VectorXd y = random_matrix(40, 1, 4, 10, 20).col(0);
  MlpParams p;
  p.cycles = 15;
  p.hidden_sizes = {5, 3};
  const auto m = fit_mlp(x, y, p);
  const Eigen::MatrixXd probe = random_matrix(30, 3, 5, -50, 150);
  for (Eigen::Index i = 0; i < probe.rows(); ++i) {
    const double v = predict(m, probe.row(i));
    EXPECT_NEAR(v, oracle_forward(m, probe.row(i)), 1e-12);
    EXPECT_GE(v, y.minCoeff());
    EXPECT_LE(v, y.maxCoeff());
  }
  EXPECT_THROW(predict(m, Eigen::RowVectorXd::Zero(2)), ArgumentError);
}

TEST(Mlp, Persistence) {
  const Eigen::MatrixXd x = random_matrix(25, 2, 6, 0, 5);
  MlpParams p;
  p.cycles = 10;
  const auto m = fit_mlp(x, x.col(0), p);
  std::stringstream io;
  save_model(io, m);
  const auto back = load_mlp(io);
  for (Eigen::Index i = 0; i < x.rows(); ++i) EXPECT_EQ(predict(back, x.row(i)), predict(m, x.row(i)));
}

TEST(Mlp, RejectsNonFinite) {
  Eigen::MatrixXd x = random_matrix(5, 1, 1);
  x(2, 0) = INFINITY;
  EXPECT_THROW(fit_mlp(x, Eigen::VectorXd::Zero(5)), ArgumentError);
  EXPECT_THROW(fit_mlp(random_matrix(1, 1, 1), Eigen::VectorXd::Zero(1)), Error);
}

TEST(GradientCheck, TwoThreeOne) {
  const auto m = init_mlp({2, 3, 1}, 9);
  const Eigen::MatrixXd x = random_matrix(10, 2, 10);
  const Eigen::VectorXd y = random_matrix(10, 1, 11, 0, 1).col(0);
  EXPECT_LT(gradient_check(m, x, y, 1e-5), 1e-4);
}

TEST(GradientCheck, ZeroWeightSymmetry) {
  auto m = init_mlp({2, 3, 1}, 1);
  for (auto& w : m.weights) w.setZero();
  for (auto& b : m.biases) b.setZero();
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
  const auto g = network_loss_gradient(m, x, y);
  // every hidden unit sees the same signal, so their gradients coincide
  EXPECT_EQ(g.weights[1](0, 0), g.weights[1](0, 2));
  EXPECT_NEAR(g.biases[1][0], 4 * 0.5 * 0.25, 1e-15);
  EXPECT_LT(gradient_check(m, x, y, 1e-5), 1e-4);
}

TEST(GradientCheck, CentralDifferenceOrder) {
  auto m = init_mlp({2, 2, 1}, 12);
  for (auto& w : m.weights) w *= 0.01;
  const Eigen::MatrixXd x = random_matrix(6, 2, 13);
  const Eigen::VectorXd y = random_matrix(6, 1, 14, 0, 1).col(0);
  // absolute error of the numeric derivative for one weight at two steps
  const auto g = network_loss_gradient(m, x, y);
  auto numeric = [&](double eps) {
    auto p = m, q = m;
    p.weights[0](0, 0) += eps;
    q.weights[0](0, 0) -= eps;
    return (network_loss(p, x, y) - network_loss(q, x, y)) / (2 * eps);
  };
  const double e1 = std::abs(numeric(1e-2) - g.weights[0](0, 0));
  const double e2 = std::abs(numeric(5e-3) - g.weights[0](0, 0));
  EXPECT_NEAR(e1 / e2, 4.0, 0.5) << e1 << ' ' << e2;
}
