#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsrec/features.hpp"

namespace newsrec {

struct TrainConfig {
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  double min_child_weight = 1.0;
  double l2_reg = 1.0;
  std::uint64_t rng_seed = 0;  // reserved: training has no stochastic steps without subsampling
  /// Initial log-odds; defaults to the log-odds of the positive rate.
  std::optional<double> base_score;

  std::vector<std::string> validate() const;
};

/// Flat-array tree node: internal when feature >= 0, leaf otherwise.
/// Rows with x[feature] < threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double weight = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root; children always follow their parent

  double leaf_value(std::span<const double> x) const {
    const TreeNode* node = nodes.data();
    while (node->feature >= 0) {
      const bool left = x[static_cast<std::size_t>(node->feature)] < node->threshold;
      const int next = left ? node->left : node->right;
      node = nodes.data() + next;
    }
    return node->weight;
  }
  int depth() const;
  bool operator==(const Tree&) const = default;
};

class TreeEnsemble {
 public:
  TreeEnsemble() = default;
  TreeEnsemble(std::vector<Tree> trees, double learning_rate, double base_score, std::uint32_t schema_version,
               std::size_t n_features);

  const std::vector<Tree>& trees() const { return trees_; }
  double learning_rate() const { return learning_rate_; }
  double base_score() const { return base_score_; }
  std::uint32_t schema_version() const { return schema_version_; }
  std::size_t n_features() const { return n_features_; }

  /// base_score + learning_rate * sum of leaf weights. No width check.
  double margin(std::span<const double> x) const;
  /// Throws Error on width mismatch.
  double predict(std::span<const double> x) const;
  double predict(const FeatureVector& fv) const { return predict(std::span<const double>(fv.values)); }

  bool operator==(const TreeEnsemble&) const = default;

 private:
  std::vector<Tree> trees_;
  double learning_rate_ = 0.1;
  double base_score_ = 0.0;
  std::uint32_t schema_version_ = 0;
  std::size_t n_features_ = 0;
};

double sigmoid(double z);

struct TrainReport {
  /// Mean training log loss before the first tree, then after each tree.
  std::vector<double> loss_history;
  bool loss_non_increasing = true;
};

/// Row-major design matrix.
struct Dataset {
  std::size_t n_features = 0;
  std::vector<double> values;  // n_rows * n_features
  std::vector<int> labels;
  std::uint32_t schema_version = 0;

  std::size_t n_rows() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * n_features, n_features}; }
};

Dataset to_dataset(const std::vector<LabeledExample>& examples);

/// Newton boosting on logistic loss with L2-regularized leaves and exact
/// greedy splits. Throws Error on single-class input or width mismatch.
TreeEnsemble train(const Dataset& data, const TrainConfig& cfg, TrainReport* report = nullptr);
TreeEnsemble train(const std::vector<LabeledExample>& examples, const TrainConfig& cfg,
                   TrainReport* report = nullptr);

class ModelError : public Error {
 public:
  using Error::Error;
};

void save_model(const TreeEnsemble& model, const std::filesystem::path& path);

struct LoadedModel {
  TreeEnsemble model;
  /// Set when the stored schema version differs from the expected one.
  bool schema_mismatch = false;
};

/// Throws ModelError on any structural problem; never returns a partial model.
LoadedModel load_model(const std::filesystem::path& path, std::optional<std::uint32_t> expected_schema = std::nullopt);

}  // namespace newsrec
