#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace appeco {

using FeatureRows = std::vector<std::vector<double>>;

struct ForestConfig {
  std::uint32_t n_trees = 200;
  std::uint32_t max_depth = 0;          // 0 = unlimited
  std::uint32_t min_leaf = 2;
  std::uint32_t features_per_split = 0;  // 0 = ceil(sqrt(p))
  std::uint64_t seed = 0;
  bool compute_importance = true;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x[feature] < threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double p1 = 0.0;  // class-1 probability at a leaf; p0 = 1 - p1
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  double leaf_p1(std::span<const double> row) const;
};

struct EvalReport {
  double accuracy = 0.0;
  double precision_pos = 0.0, precision_neg = 0.0;
  double recall_pos = 0.0, recall_neg = 0.0;
};

// Bagged CART forest with Gini splits, per-node feature subsampling, and
// out-of-bag permutation importance. Deterministic for a fixed seed
// regardless of how trees are scheduled across workers.
class Forest {
 public:
  static Forest train(const FeatureRows& x, const std::vector<int>& y, const ForestConfig& cfg,
                      unsigned threads = 0);

  // majority vote over trees (ties to class 0); probability is the mean of
  // per-tree leaf class-1 probabilities
  std::pair<int, double> predict(std::span<const double> row) const;
  EvalReport evaluate(const FeatureRows& x_test, const std::vector<int>& y_test) const;

  const std::vector<double>& oob_importance() const { return oob_importance_; }
  double oob_accuracy() const { return oob_accuracy_; }
  std::optional<int> constant_class() const { return constant_class_; }
  std::size_t feature_count() const { return feature_count_; }
  std::size_t tree_count() const { return trees_.size(); }

  // importance ranking, highest first; ties by feature index
  std::vector<std::size_t> importance_ranking() const;

  std::string to_json() const;
  static Forest from_json(const std::string& text);

 private:
  std::vector<DecisionTree> trees_;
  std::vector<double> oob_importance_;
  double oob_accuracy_ = 0.0;
  std::optional<int> constant_class_;
  std::size_t feature_count_ = 0;
  ForestConfig config_;
};

}  // namespace appeco
