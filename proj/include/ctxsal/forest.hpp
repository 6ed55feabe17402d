#pragma once

#include "ctxsal/object_features.hpp"
#include "ctxsal/types.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace ctxsal {

struct ForestConfig {
  int n_trees = 200;
  int max_depth = 0;           // 0 = unlimited
  int min_samples_leaf = 5;
  int features_per_split = 0;  // 0 = ceil(D / 3)
  bool bootstrap = true;
  std::uint64_t seed = 0;

  int resolved_features_per_split(int feature_dim) const;
  void validate(int feature_dim) const;
};

/// Internal nodes send x[feature] <= threshold to `left`. Leaves have
/// feature == -1 and carry `value`.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  template <typename Derived>
  double predict(const Eigen::MatrixBase<Derived>& x) const {
    std::int32_t i = 0;
    while (!nodes[i].is_leaf()) {
      i = static_cast<double>(x(nodes[i].feature)) <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    }
    return nodes[i].value;
  }

  std::size_t leaf_count() const;
  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

struct ForestModel {
  ForestConfig config;
  int feature_dim = 0;
  double label_min = 0.0;
  double label_max = 0.0;
  std::vector<RegressionTree> trees;
  std::optional<WhiteningStats> whitening;  // set on the object forest only

  /// Mean of the per-tree leaf values. Throws DimensionMismatch.
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Grows `cfg.n_trees` variance-reduction regression trees. Tree t draws all
/// of its randomness from CounterRng(cfg.seed, t), so the result does not
/// depend on `jobs`.
ForestModel train_forest(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                         const ForestConfig& cfg, int jobs = 1);

double predict(const ForestModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// The object and context forests, persisted together.
struct SaliencyModel {
  ForestModel object;
  ForestModel context;
};

inline constexpr std::uint32_t kModelVersion = 1;

std::vector<std::uint8_t> encode_model(const SaliencyModel& model);
SaliencyModel decode_model(const std::vector<std::uint8_t>& bytes);
void save_model(const SaliencyModel& model, const std::filesystem::path& path);
SaliencyModel load_model(const std::filesystem::path& path);

}  // namespace ctxsal
