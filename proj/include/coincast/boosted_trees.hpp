#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "coincast/model.hpp"

namespace coincast {

/// One node of a regression tree. Internal nodes route `x[feature] <= threshold`
/// to `left`; every node keeps the mean target and sample count it saw.
struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  std::size_t n_samples = 0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Nodes in pre-order; nodes[0] is the root.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double evaluate(RowRef row) const;
  std::size_t leaf_count() const;
  bool operator==(const RegressionTree&) const = default;
};

/// Greedy CART on squared error. Candidate thresholds are midpoints between
/// consecutive distinct feature values; ties go to the lowest feature index,
/// then the smallest threshold.
RegressionTree fit_tree(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, int max_depth,
                        std::size_t min_leaf);

struct GbtParams {
  std::size_t n_trees = 500;
  double shrinkage = 0.1;
  int max_depth = 5;
  std::size_t min_leaf = 10;
  std::uint64_t seed = 0;  // recorded only; no subsampling is performed
};

struct GbtModel {
  GbtParams params;
  std::size_t n_features = 0;
  double init_value = 0.0;
  std::vector<RegressionTree> trees;
  /// Training SSE after F0 and after each stage (length n_trees + 1).
  std::vector<double> stage_sse;
  std::vector<double> stage_rmse;
};

/// Least-squares gradient boosting: F0 = mean(y), each stage fits a tree to
/// the current residuals and adds shrinkage * tree.
GbtModel fit_gbt(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, const GbtParams& params = {});

/// init_value + shrinkage * sum of tree outputs.
double predict(const GbtModel& model, RowRef row);
inline double predict_gbt(const GbtModel& model, RowRef row) { return predict(model, row); }
inline std::size_t n_features(const GbtModel& m) { return m.n_features; }
inline std::string_view model_kind(const GbtModel&) { return "gbt"; }
void save_model(std::ostream& out, const GbtModel& model);
GbtModel load_gbt(std::istream& in);

/// Indented text, one node per line:
///   x[<feature>] <= <threshold>
///   leaf <value> (n=<count>)
/// Children follow their parent two spaces deeper, left before right.
std::string dump_tree(const RegressionTree& tree);
std::string dump_model(const GbtModel& model, std::size_t tree_index);
/// Parses dump_tree output back into a tree. Throws ParseError.
RegressionTree parse_tree_dump(std::string_view text);

}  // namespace coincast
