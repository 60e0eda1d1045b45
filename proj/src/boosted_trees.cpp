#include "coincast/boosted_trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "coincast/errors.hpp"
#include "coincast/numeric_text.hpp"
#include "text_io.hpp"

namespace coincast {

double RegressionTree::evaluate(RowRef row) const {
  int i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(i)];
    i = row[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int max_depth, std::size_t min_leaf)
      : x_(x), y_(y), max_depth_(max_depth), min_leaf_(min_leaf) {}

  RegressionTree build() {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(y_.size()));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    grow(idx, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<Eigen::Index>& idx, int depth) {
    const std::size_t n = idx.size();
    double sum = 0.0;
    for (auto i : idx) sum += y_[i];
    const double mean = sum / static_cast<double>(n);

    const int self = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back(TreeNode{.value = mean, .n_samples = n});

    if (depth >= max_depth_ || n < 2 * min_leaf_) return self;
    const Split best = find_split(idx, mean);
    if (best.feature < 0) return self;

    std::vector<Eigen::Index> left, right;
    for (auto i : idx) (x_(i, best.feature) <= best.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    tree_.nodes[static_cast<std::size_t>(self)].feature = best.feature;
    tree_.nodes[static_cast<std::size_t>(self)].threshold = best.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.nodes[static_cast<std::size_t>(self)].left = l;
    tree_.nodes[static_cast<std::size_t>(self)].right = r;
    return self;
  }

  // SSE reduction of a split equals SL^2/nL + SR^2/nR - S^2/n; with targets
  // centred on the node mean S is ~0, so constant targets give exactly zero gain.
  Split find_split(const std::vector<Eigen::Index>& idx, double mean) const {
    const std::size_t n = idx.size();
    std::vector<Eigen::Index> order(idx);
    Split best;
    double total = 0.0;
    for (auto i : idx) total += y_[i] - mean;

    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double xa = x_(a, f), xb = x_(b, f);
        return xa < xb || (xa == xb && a < b);
      });
      double left_sum = 0.0;
      for (std::size_t k = 1; k < n; ++k) {
        left_sum += y_[order[k - 1]] - mean;
        if (k < min_leaf_ || n - k < min_leaf_) continue;
        const double lo = x_(order[k - 1], f);
        const double hi = x_(order[k], f);
        if (!(lo < hi)) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(k) +
                            right_sum * right_sum / static_cast<double>(n - k) -
                            total * total / static_cast<double>(n);
        if (gain > best.gain) {
          double thr = lo + (hi - lo) / 2.0;
          if (!(thr < hi)) thr = lo;
          best = Split{static_cast<int>(f), thr, gain};
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  int max_depth_;
  std::size_t min_leaf_;
  RegressionTree tree_;
};

// Rows sorted lexicographically by (features, target). Training on this order
// makes every floating-point sum independent of how the caller ordered rows.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> canonical_rows(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(y.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index f = 0; f < x.cols(); ++f)
      if (x(a, f) != x(b, f)) return x(a, f) < x(b, f);
    return y[a] < y[b];
  });
  Eigen::MatrixXd xs(x.rows(), x.cols());
  Eigen::VectorXd ys(y.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    xs.row(static_cast<Eigen::Index>(k)) = x.row(order[k]);
    ys[static_cast<Eigen::Index>(k)] = y[order[k]];
  }
  return {std::move(xs), std::move(ys)};
}

void check_finite(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (!x.row(i).allFinite() || !std::isfinite(y[i]))
      throw ArgumentError("non-finite feature or target in row " + std::to_string(i));
}

}  // namespace

RegressionTree fit_tree(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, int max_depth,
                        std::size_t min_leaf) {
  if (targets.size() == 0) throw ArgumentError("fit_tree: empty input");
  if (features.rows() != targets.size()) throw ArgumentError("fit_tree: row count differs from target count");
  if (min_leaf == 0) throw ArgumentError("fit_tree: min_leaf must be positive");
  if (max_depth < 0) throw ArgumentError("fit_tree: max_depth must be nonnegative");
  const auto [x, y] = canonical_rows(features, targets);
  return TreeBuilder(x, y, max_depth, min_leaf).build();
}

GbtModel fit_gbt(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets, const GbtParams& params) {
  if (features.rows() != targets.size()) throw ArgumentError("fit_gbt: row count differs from target count");
  if (params.min_leaf == 0) throw ArgumentError("fit_gbt: min_leaf must be positive");
  if (static_cast<std::size_t>(targets.size()) < 2 * params.min_leaf)
    throw InsufficientDataError("fit_gbt: needs at least " + std::to_string(2 * params.min_leaf) +
                                " rows (2 * min_leaf), got " + std::to_string(targets.size()));
  if (!(params.shrinkage > 0.0 && params.shrinkage <= 1.0)) throw ArgumentError("fit_gbt: shrinkage must lie in (0,1]");
  check_finite(features, targets);
  const auto [x, y] = canonical_rows(features, targets);

  GbtModel model;
  model.params = params;
  model.n_features = static_cast<std::size_t>(x.cols());
  model.init_value = y.sum() / static_cast<double>(y.size());

  Eigen::VectorXd fitted = Eigen::VectorXd::Constant(y.size(), model.init_value);
  Eigen::VectorXd residual = y - fitted;
  const double n = static_cast<double>(y.size());
  model.stage_sse.push_back(residual.squaredNorm());
  model.stage_rmse.push_back(std::sqrt(model.stage_sse.back() / n));

  model.trees.reserve(params.n_trees);
  for (std::size_t m = 0; m < params.n_trees; ++m) {
    RegressionTree tree = fit_tree(x, residual, params.max_depth, params.min_leaf);
    for (Eigen::Index i = 0; i < x.rows(); ++i) fitted[i] += params.shrinkage * tree.evaluate(x.row(i));
    residual = y - fitted;
    model.stage_sse.push_back(residual.squaredNorm());
    model.stage_rmse.push_back(std::sqrt(model.stage_sse.back() / n));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double predict(const GbtModel& model, RowRef row) {
  if (static_cast<std::size_t>(row.size()) != model.n_features)
    throw ArgumentError("gbt predict: expected " + std::to_string(model.n_features) + " features, got " +
                        std::to_string(row.size()));
  double sum = 0.0;
  for (const auto& t : model.trees) sum += t.evaluate(row);
  return model.init_value + model.params.shrinkage * sum;
}

namespace {

void dump_node(const RegressionTree& tree, int i, int depth, std::string& out) {
  const TreeNode& n = tree.nodes[static_cast<std::size_t>(i)];
  out.append(static_cast<std::size_t>(2 * depth), ' ');
  if (n.is_leaf()) {
    out += "leaf " + format_double(n.value) + " (n=" + std::to_string(n.n_samples) + ")\n";
    return;
  }
  out += "x[" + std::to_string(n.feature) + "] <= " + format_double(n.threshold) + "\n";
  dump_node(tree, n.left, depth + 1, out);
  dump_node(tree, n.right, depth + 1, out);
}

struct DumpParser {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  RegressionTree tree;

  static std::size_t indent_of(const std::string& s) {
    std::size_t k = 0;
    while (k < s.size() && s[k] == ' ') ++k;
    return k;
  }

  int parse(std::size_t depth) {
    if (pos >= lines.size()) throw ParseError("tree dump: truncated");
    const std::string& line = lines[pos];
    const std::size_t line_no = pos + 1;
    if (indent_of(line) != 2 * depth) throw ParseError("tree dump line " + std::to_string(line_no) + ": bad indentation");
    ++pos;
    const std::string body = line.substr(2 * depth);
    const int self = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (body.starts_with("leaf ")) {
      const auto open = body.find(" (n=");
      if (open == std::string::npos || body.back() != ')') throw ParseError("tree dump line " + std::to_string(line_no) + ": bad leaf");
      const auto value = parse_double(std::string_view(body).substr(5, open - 5));
      const std::string count = body.substr(open + 4, body.size() - open - 5);
      if (!value || count.empty() || count.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("tree dump line " + std::to_string(line_no) + ": bad leaf");
      auto& node = tree.nodes[static_cast<std::size_t>(self)];
      node.value = *value;
      node.n_samples = std::stoull(count);
      return self;
    }
    if (!body.starts_with("x[")) throw ParseError("tree dump line " + std::to_string(line_no) + ": unrecognised node");
    const auto close = body.find("] <= ");
    if (close == std::string::npos) throw ParseError("tree dump line " + std::to_string(line_no) + ": bad split");
    const std::string feat = body.substr(2, close - 2);
    const auto thr = parse_double(std::string_view(body).substr(close + 5));
    if (feat.empty() || feat.find_first_not_of("0123456789") != std::string::npos || !thr)
      throw ParseError("tree dump line " + std::to_string(line_no) + ": bad split");
    const int l = parse(depth + 1);
    const int r = parse(depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(self)];
    node.feature = std::stoi(feat);
    node.threshold = *thr;
    node.left = l;
    node.right = r;
    // Internal nodes keep count and mean of their subtree.
    const auto& ln = tree.nodes[static_cast<std::size_t>(l)];
    const auto& rn = tree.nodes[static_cast<std::size_t>(r)];
    node.n_samples = ln.n_samples + rn.n_samples;
    node.value = (ln.value * static_cast<double>(ln.n_samples) + rn.value * static_cast<double>(rn.n_samples)) /
                 static_cast<double>(node.n_samples);
    return self;
  }
};

}  // namespace

std::string dump_tree(const RegressionTree& tree) {
  std::string out;
  if (!tree.nodes.empty()) dump_node(tree, 0, 0, out);
  return out;
}

std::string dump_model(const GbtModel& model, std::size_t tree_index) {
  if (tree_index >= model.trees.size())
    throw ArgumentError("tree index " + std::to_string(tree_index) + " out of range (model has " +
                        std::to_string(model.trees.size()) + " trees)");
  return dump_tree(model.trees[tree_index]);
}

RegressionTree parse_tree_dump(std::string_view text) {
  DumpParser p;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) p.lines.push_back(line);
  }
  if (p.lines.empty()) throw ParseError("tree dump: empty");
  p.parse(0);
  if (p.pos != p.lines.size()) throw ParseError("tree dump: trailing lines after root subtree");
  return std::move(p.tree);
}

void save_model(std::ostream& out, const GbtModel& model) {
  out << "gbt 1\n"
      << "n_features " << model.n_features << '\n'
      << "n_trees " << model.trees.size() << '\n'
      << "shrinkage " << format_double(model.params.shrinkage) << '\n'
      << "max_depth " << model.params.max_depth << '\n'
      << "min_leaf " << model.params.min_leaf << '\n'
      << "seed " << model.params.seed << '\n'
      << "init_value " << format_double(model.init_value) << '\n';
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const std::string dump = dump_tree(model.trees[t]);
    out << "tree " << t << ' ' << std::count(dump.begin(), dump.end(), '\n') << '\n' << dump;
  }
  out << "end gbt\n";
}

GbtModel load_gbt(std::istream& in) {
  GbtModel m;
  if (textio::expect(in, "gbt") != "1") throw ParseError("unsupported gbt model version");
  m.n_features = textio::read_uint(in, "n_features");
  m.params.n_trees = textio::read_uint(in, "n_trees");
  m.params.shrinkage = textio::read_double(in, "shrinkage");
  m.params.max_depth = static_cast<int>(textio::read_uint(in, "max_depth"));
  m.params.min_leaf = textio::read_uint(in, "min_leaf");
  m.params.seed = textio::read_uint(in, "seed");
  m.init_value = textio::read_double(in, "init_value");
  for (std::size_t t = 0; t < m.params.n_trees; ++t) {
    std::istringstream header(textio::expect(in, "tree"));
    std::size_t index = 0, lines = 0;
    if (!(header >> index >> lines) || index != t) throw ParseError("bad tree header for tree " + std::to_string(t));
    std::string dump;
    for (std::size_t k = 0; k < lines; ++k) {
      std::string line;
      if (!std::getline(in, line)) throw ParseError("truncated tree " + std::to_string(t));
      dump += line + '\n';
    }
    m.trees.push_back(parse_tree_dump(dump));
  }
  if (textio::expect(in, "end") != "gbt") throw ParseError("missing 'end gbt'");
  return m;
}

}  // namespace coincast
