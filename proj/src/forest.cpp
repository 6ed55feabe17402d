#include "ctxsal/forest.hpp"

#include "ctxsal/parallel.hpp"
#include "ctxsal/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

namespace ctxsal {

int ForestConfig::resolved_features_per_split(int feature_dim) const {
  return features_per_split > 0 ? features_per_split : (feature_dim + 2) / 3;
}

void ForestConfig::validate(int feature_dim) const {
  if (n_trees < 1) throw Error(ErrorCode::InvalidArgument, "n_trees must be >= 1");
  if (min_samples_leaf < 1) throw Error(ErrorCode::InvalidArgument, "min_samples_leaf must be >= 1");
  if (max_depth < 0) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 0");
  const int fps = resolved_features_per_split(feature_dim);
  if (fps < 1 || fps > feature_dim) {
    throw Error(ErrorCode::InvalidArgument, "features_per_split must lie in [1, D]");
  }
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
              const ForestConfig& cfg, std::uint64_t tree_index)
      : x_(x),
        y_(y),
        cfg_(cfg),
        rng_(cfg.seed, tree_index),
        dim_(static_cast<int>(x.cols())),
        features_per_split_(cfg.resolved_features_per_split(static_cast<int>(x.cols()))) {}

  RegressionTree build() {
    const auto n = static_cast<std::size_t>(x_.rows());
    samples_.resize(n);
    if (cfg_.bootstrap) {
      for (auto& s : samples_) s = static_cast<std::int32_t>(rng_.below(n));
    } else {
      std::iota(samples_.begin(), samples_.end(), 0);
    }

    struct Pending {
      std::int32_t node;
      std::size_t begin;
      std::size_t end;
      int depth;
    };
    RegressionTree tree;
    tree.nodes.emplace_back();
    std::vector<Pending> stack{{0, 0, n, 0}};
    // Depth-first, left before right: the order in which nodes consume
    // random numbers is fixed by the tree shape alone.
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      const auto split = choose_split(p.begin, p.end, p.depth);
      if (!split) {
        tree.nodes[p.node] = leaf(p.begin, p.end);
        continue;
      }
      const auto mid = std::stable_partition(samples_.begin() + static_cast<std::ptrdiff_t>(p.begin),
                                             samples_.begin() + static_cast<std::ptrdiff_t>(p.end),
                                             [&](std::int32_t s) { return x_(s, split->feature) <= split->threshold; });
      const auto mid_index = static_cast<std::size_t>(mid - samples_.begin());
      const auto left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[p.node];
      node.feature = split->feature;
      node.threshold = split->threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, mid_index, p.end, p.depth + 1});
      stack.push_back({left, p.begin, mid_index, p.depth + 1});
    }
    return tree;
  }

 private:
  // Leaf value: labels summed in ascending order so the value depends only
  // on the sample multiset.
  TreeNode leaf(std::size_t begin, std::size_t end) {
    labels_.clear();
    for (std::size_t i = begin; i < end; ++i) labels_.push_back(y_(samples_[i]));
    std::sort(labels_.begin(), labels_.end());
    TreeNode node;
    if (labels_.front() == labels_.back()) {
      node.value = labels_.front();
    } else {
      double total = 0.0;
      for (const double v : labels_) total += v;
      node.value = std::clamp(total / static_cast<double>(labels_.size()), labels_.front(), labels_.back());
    }
    return node;
  }

  std::vector<int> candidate_features() {
    std::vector<int> dims(static_cast<std::size_t>(dim_));
    std::iota(dims.begin(), dims.end(), 0);
    if (features_per_split_ < dim_) {
      // Partial Fisher-Yates: the first k entries are a uniform k-subset.
      for (int i = 0; i < features_per_split_; ++i) {
        const auto j = i + static_cast<int>(rng_.below(static_cast<std::uint64_t>(dim_ - i)));
        std::swap(dims[i], dims[j]);
      }
      dims.resize(static_cast<std::size_t>(features_per_split_));
      std::sort(dims.begin(), dims.end());
    }
    return dims;
  }

  std::optional<SplitChoice> choose_split(std::size_t begin, std::size_t end, int depth) {
    const auto n = end - begin;
    const auto min_leaf = static_cast<std::size_t>(cfg_.min_samples_leaf);
    if (n < 2 * min_leaf) return std::nullopt;
    if (cfg_.max_depth > 0 && depth >= cfg_.max_depth) return std::nullopt;
    double lo = y_(samples_[begin]);
    double hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = std::min(lo, y_(samples_[i]));
      hi = std::max(hi, y_(samples_[i]));
    }
    if (lo == hi) return std::nullopt;

    std::optional<SplitChoice> best;
    for (const int dim : candidate_features()) {
      pairs_.clear();
      for (std::size_t i = begin; i < end; ++i) pairs_.emplace_back(x_(samples_[i], dim), y_(samples_[i]));
      std::sort(pairs_.begin(), pairs_.end());

      double total = 0.0;
      double total_sq = 0.0;
      for (const auto& [v, t] : pairs_) {
        total += t;
        total_sq += t * t;
      }
      double left = 0.0;
      double left_sq = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        left += pairs_[i - 1].second;
        left_sq += pairs_[i - 1].second * pairs_[i - 1].second;
        if (i < min_leaf || n - i < min_leaf) continue;
        if (!(pairs_[i - 1].first < pairs_[i].first)) continue;
        const double nl = static_cast<double>(i);
        const double nr = static_cast<double>(n - i);
        const double right = total - left;
        const double right_sq = total_sq - left_sq;
        const double score = (left_sq - left * left / nl) + (right_sq - right * right / nr);
        // Strict improvement keeps the lowest dimension, then lowest threshold.
        if (!best || score < best->score) {
          double threshold = 0.5 * (pairs_[i - 1].first + pairs_[i].first);
          if (!(threshold < pairs_[i].first)) threshold = pairs_[i - 1].first;
          best = SplitChoice{dim, threshold, score};
        }
      }
    }
    return best;
  }

  const Eigen::Ref<const Eigen::MatrixXd>& x_;
  const Eigen::Ref<const Eigen::VectorXd>& y_;
  const ForestConfig& cfg_;
  CounterRng rng_;
  int dim_;
  int features_per_split_;
  std::vector<std::int32_t> samples_;
  std::vector<std::pair<double, double>> pairs_;
  std::vector<double> labels_;
};

}  // namespace

ForestModel train_forest(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                         const ForestConfig& cfg, int jobs) {
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in count");
  if (x.rows() < 2) throw Error(ErrorCode::InsufficientData, "training needs at least two samples");
  if (x.cols() < 1) throw Error(ErrorCode::InvalidArgument, "training needs at least one feature");
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::NonFiniteInput, "training data contains NaN or Inf");
  cfg.validate(static_cast<int>(x.cols()));

  ForestModel model;
  model.config = cfg;
  model.feature_dim = static_cast<int>(x.cols());
  model.label_min = y.minCoeff();
  model.label_max = y.maxCoeff();
  model.trees.resize(static_cast<std::size_t>(cfg.n_trees));
  parallel_for(model.trees.size(), jobs, [&](std::size_t t) { model.trees[t] = TreeBuilder(x, y, cfg, t).build(); });
  return model;
}

double ForestModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != feature_dim) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(feature_dim) + " features, got " + std::to_string(x.size()));
  }
  if (trees.empty()) throw Error(ErrorCode::InvalidArgument, "forest has no trees");
  double total = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& tree : trees) {
    const double v = tree.predict(x);
    total += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // The rounded mean can stray one ulp outside the leaf range.
  return lo == hi ? lo : std::clamp(total / static_cast<double>(trees.size()), lo, hi);
}

double predict(const ForestModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) { return model.predict(x); }

}  // namespace ctxsal
