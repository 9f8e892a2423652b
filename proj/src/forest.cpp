#include "appeco/forest.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include <json.hpp>

#include "appeco/rng.hpp"
#include "appeco/util.hpp"

namespace appeco {

double DecisionTree::leaf_p1(std::span<const double> row) const {
  std::int32_t at = 0;
  while (nodes[std::size_t(at)].feature >= 0) {
    const auto& n = nodes[std::size_t(at)];
    at = row[std::size_t(n.feature)] < n.threshold ? n.left : n.right;
  }
  return nodes[std::size_t(at)].p1;
}

namespace {

struct SplitChoice {
  bool found = false;
  std::int32_t feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double gini(std::uint64_t n0, std::uint64_t n1) {
  const double n = double(n0 + n1);
  if (n == 0.0) return 0.0;
  const double f0 = double(n0) / n;
  const double f1 = double(n1) / n;
  return 1.0 - f0 * f0 - f1 * f1;
}

struct TreeGrower {
  const FeatureRows& x;
  const std::vector<int>& y;
  const ForestConfig& cfg;
  std::uint32_t mtry;
  Rng& rng;
  std::vector<std::uint32_t>& rows;  // bootstrap row ids, partitioned in place
  DecisionTree tree;
  std::vector<std::pair<double, int>> scratch;

  SplitChoice best_split(std::size_t begin, std::size_t end, std::uint64_t n0,
                         std::uint64_t n1) {
    SplitChoice best;
    const double parent = gini(n0, n1);
    const double total = double(n0 + n1);
    const auto features = rng.sample_indices(std::uint32_t(x.front().size()), mtry);
    for (const auto f : features) {
      scratch.clear();
      for (std::size_t i = begin; i < end; ++i) {
        scratch.emplace_back(x[rows[i]][f], y[rows[i]]);
      }
      std::sort(scratch.begin(), scratch.end());
      std::uint64_t l0 = 0, l1 = 0;
      for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
        if (scratch[i].second == 1) {
          ++l1;
        } else {
          ++l0;
        }
        if (scratch[i].first == scratch[i + 1].first) continue;  // not a boundary
        const std::uint64_t left_n = l0 + l1;
        const std::uint64_t right_n = std::uint64_t(scratch.size()) - left_n;
        if (left_n < cfg.min_leaf || right_n < cfg.min_leaf) continue;
        const double child = (double(left_n) / total) * gini(l0, l1) +
                             (double(right_n) / total) * gini(n0 - l0, n1 - l1);
        const double gain = parent - child;
        if (gain <= 0.0) continue;
        const double threshold = scratch[i].first + 0.5 * (scratch[i + 1].first - scratch[i].first);
        const bool better =
            !best.found || gain > best.gain ||
            (gain == best.gain && (std::int32_t(f) < best.feature ||
                                   (std::int32_t(f) == best.feature && threshold < best.threshold)));
        if (better) {
          best.found = true;
          best.feature = std::int32_t(f);
          best.threshold = threshold;
          best.gain = gain;
        }
      }
    }
    return best;
  }

  // returns node index
  std::int32_t grow(std::size_t begin, std::size_t end, std::uint32_t depth) {
    std::uint64_t n0 = 0, n1 = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (y[rows[i]] == 1) {
        ++n1;
      } else {
        ++n0;
      }
    }
    const auto make_leaf = [&] {
      TreeNode leaf;
      leaf.feature = -1;
      leaf.p1 = double(n1) / double(n0 + n1);
      tree.nodes.push_back(leaf);
      return std::int32_t(tree.nodes.size()) - 1;
    };
    const std::uint64_t n = n0 + n1;
    if (n0 == 0 || n1 == 0 || n < 2 * std::uint64_t(cfg.min_leaf) ||
        (cfg.max_depth > 0 && depth >= cfg.max_depth)) {
      return make_leaf();
    }
    const auto split = best_split(begin, end, n0, n1);
    if (!split.found) return make_leaf();

    const auto mid_it = std::partition(
        rows.begin() + std::ptrdiff_t(begin), rows.begin() + std::ptrdiff_t(end),
        [&](std::uint32_t r) { return x[r][std::size_t(split.feature)] < split.threshold; });
    const std::size_t mid = std::size_t(mid_it - rows.begin());

    const auto node_idx = std::int32_t(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[std::size_t(node_idx)].feature = split.feature;
    tree.nodes[std::size_t(node_idx)].threshold = split.threshold;
    const auto left = grow(begin, mid, depth + 1);
    const auto right = grow(mid, end, depth + 1);
    tree.nodes[std::size_t(node_idx)].left = left;
    tree.nodes[std::size_t(node_idx)].right = right;
    return node_idx;
  }
};

struct TrainedTree {
  DecisionTree tree;
  std::vector<std::uint32_t> oob_rows;
  double oob_accuracy = 0.0;                // over this tree's OOB rows
  std::vector<double> importance_drop;      // per feature, accuracy drop on OOB
};

TrainedTree train_tree(const FeatureRows& x, const std::vector<int>& y, const ForestConfig& cfg,
                       std::uint32_t mtry, std::uint64_t tree_seed) {
  const std::uint32_t n = std::uint32_t(x.size());
  Rng rng(tree_seed);
  std::vector<std::uint32_t> rows(n);
  std::vector<std::uint8_t> in_bag(n, 0);
  for (auto& r : rows) {
    r = std::uint32_t(rng.below(n));
    in_bag[r] = 1;
  }
  TrainedTree out;
  TreeGrower grower{x, y, cfg, mtry, rng, rows, {}, {}};
  grower.grow(0, rows.size(), 0);
  out.tree = std::move(grower.tree);

  for (std::uint32_t r = 0; r < n; ++r) {
    if (!in_bag[r]) out.oob_rows.push_back(r);
  }
  if (out.oob_rows.empty()) return out;

  const auto hard = [&](double p1) { return p1 > 0.5 ? 1 : 0; };
  std::uint32_t correct = 0;
  for (const auto r : out.oob_rows) {
    if (hard(out.tree.leaf_p1(x[r])) == y[r]) ++correct;
  }
  out.oob_accuracy = double(correct) / double(out.oob_rows.size());

  if (cfg.compute_importance) {
    const std::size_t p = x.front().size();
    out.importance_drop.assign(p, 0.0);
    std::vector<std::uint32_t> perm(out.oob_rows.size());
    std::vector<double> probe;
    for (std::size_t f = 0; f < p; ++f) {
      for (std::uint32_t i = 0; i < perm.size(); ++i) perm[i] = i;
      rng.shuffle(perm);
      std::uint32_t ok = 0;
      for (std::size_t i = 0; i < out.oob_rows.size(); ++i) {
        const auto r = out.oob_rows[i];
        const auto donor = out.oob_rows[perm[i]];
        probe.assign(x[r].begin(), x[r].end());
        probe[f] = x[donor][f];
        if (hard(out.tree.leaf_p1(probe)) == y[r]) ++ok;
      }
      out.importance_drop[f] = out.oob_accuracy - double(ok) / double(out.oob_rows.size());
    }
  }
  return out;
}

}  // namespace

Forest Forest::train(const FeatureRows& x, const std::vector<int>& y, const ForestConfig& cfg,
                     unsigned threads) {
  if (x.empty() || x.size() != y.size()) {
    throw std::invalid_argument("forest: row/label count mismatch");
  }
  const std::size_t p = x.front().size();
  if (p == 0) throw std::invalid_argument("forest: no features");
  for (const auto& row : x) {
    if (row.size() != p) throw std::invalid_argument("forest: ragged feature rows");
    for (const double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("forest: non-finite feature value");
    }
  }
  std::uint64_t n1 = 0;
  for (const int label : y) {
    if (label != 0 && label != 1) throw std::invalid_argument("forest: labels must be 0/1");
    n1 += std::uint64_t(label);
  }

  Forest forest;
  forest.config_ = cfg;
  forest.feature_count_ = p;
  forest.oob_importance_.assign(p, 0.0);

  if (n1 == 0 || n1 == y.size()) {
    // single-class input: a constant classifier, flagged
    forest.constant_class_ = n1 == 0 ? 0 : 1;
    DecisionTree stump;
    stump.nodes.push_back({-1, 0.0, -1, -1, n1 == 0 ? 0.0 : 1.0});
    forest.trees_.assign(std::max<std::size_t>(cfg.n_trees, 1), stump);
    forest.oob_accuracy_ = 1.0;
    return forest;
  }
  if (cfg.n_trees < 1) throw std::invalid_argument("forest: n_trees must be >= 1");
  if (cfg.min_leaf < 1) throw std::invalid_argument("forest: min_leaf must be >= 1");

  const std::uint32_t mtry =
      cfg.features_per_split > 0
          ? std::min<std::uint32_t>(cfg.features_per_split, std::uint32_t(p))
          : std::uint32_t(std::ceil(std::sqrt(double(p))));

  std::vector<TrainedTree> grown(cfg.n_trees);
  parallel_for(cfg.n_trees, threads, [&](std::size_t t) {
    grown[t] = train_tree(x, y, cfg, mtry, mix_seed(cfg.seed, 0x7472, t));
  });

  // reductions in tree order keep results independent of scheduling
  std::vector<std::uint32_t> votes1(x.size(), 0);
  std::vector<std::uint32_t> votes_total(x.size(), 0);
  for (auto& g : grown) {
    forest.trees_.push_back(std::move(g.tree));
    for (const auto r : g.oob_rows) {
      ++votes_total[r];
      if (forest.trees_.back().leaf_p1(x[r]) > 0.5) ++votes1[r];
    }
    if (cfg.compute_importance && !g.importance_drop.empty()) {
      for (std::size_t f = 0; f < p; ++f) forest.oob_importance_[f] += g.importance_drop[f];
    }
  }
  std::uint64_t scored = 0, correct = 0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    if (votes_total[r] == 0) continue;
    ++scored;
    const int vote = 2 * votes1[r] > votes_total[r] ? 1 : 0;
    if (vote == y[r]) ++correct;
  }
  forest.oob_accuracy_ = scored > 0 ? double(correct) / double(scored) : 0.0;
  if (cfg.compute_importance) {
    for (double& imp : forest.oob_importance_) {
      imp = std::max(0.0, imp / double(cfg.n_trees));
    }
  }
  return forest;
}

std::pair<int, double> Forest::predict(std::span<const double> row) const {
  if (row.size() != feature_count_) {
    throw std::invalid_argument("forest: feature count mismatch with training schema");
  }
  std::uint64_t votes1 = 0;
  double prob_sum = 0.0;
  for (const auto& tree : trees_) {
    const double p1 = tree.leaf_p1(row);
    prob_sum += p1;
    if (p1 > 0.5) ++votes1;
  }
  const int label = 2 * votes1 > trees_.size() ? 1 : 0;  // ties to class 0
  return {label, prob_sum / double(trees_.size())};
}

EvalReport Forest::evaluate(const FeatureRows& x_test, const std::vector<int>& y_test) const {
  if (x_test.empty() || x_test.size() != y_test.size()) {
    throw std::invalid_argument("forest: bad evaluation set");
  }
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < x_test.size(); ++i) {
    const int pred = predict(x_test[i]).first;
    if (pred == 1 && y_test[i] == 1) ++tp;
    if (pred == 0 && y_test[i] == 0) ++tn;
    if (pred == 1 && y_test[i] == 0) ++fp;
    if (pred == 0 && y_test[i] == 1) ++fn;
  }
  EvalReport rep;
  rep.accuracy = double(tp + tn) / double(x_test.size());
  rep.precision_pos = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
  rep.precision_neg = tn + fn > 0 ? double(tn) / double(tn + fn) : 0.0;
  rep.recall_pos = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
  rep.recall_neg = tn + fp > 0 ? double(tn) / double(tn + fp) : 0.0;
  return rep;
}

std::vector<std::size_t> Forest::importance_ranking() const {
  std::vector<std::size_t> order(oob_importance_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return oob_importance_[a] > oob_importance_[b];
  });
  return order;
}

std::string Forest::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["n_trees"] = trees_.size();
  j["feature_count"] = feature_count_;
  j["oob_accuracy"] = oob_accuracy_;
  j["oob_importance"] = oob_importance_;
  if (constant_class_) j["constant_class"] = *constant_class_;
  auto& trees = j["trees"] = nlohmann::json::array();
  for (const auto& tree : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.p1});
    }
    trees.push_back(std::move(nodes));
  }
  return j.dump();
}

Forest Forest::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1) throw std::invalid_argument("forest: unknown version");
  Forest f;
  f.feature_count_ = j.at("feature_count").get<std::size_t>();
  f.oob_accuracy_ = j.at("oob_accuracy").get<double>();
  f.oob_importance_ = j.at("oob_importance").get<std::vector<double>>();
  if (j.contains("constant_class")) f.constant_class_ = j.at("constant_class").get<int>();
  for (const auto& nodes : j.at("trees")) {
    DecisionTree tree;
    for (const auto& n : nodes) {
      tree.nodes.push_back({n.at(0).get<std::int32_t>(), n.at(1).get<double>(),
                            n.at(2).get<std::int32_t>(), n.at(3).get<std::int32_t>(),
                            n.at(4).get<double>()});
    }
    f.trees_.push_back(std::move(tree));
  }
  return f;
}

}  // namespace appeco
