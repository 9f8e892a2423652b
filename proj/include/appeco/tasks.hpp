#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "appeco/core.hpp"
#include "appeco/features.hpp"
#include "appeco/forest.hpp"

namespace appeco {

inline DayRange feature_window_ending(Day end) { return DayRange{end - 359, end}; }

struct BinaryLabeling {
  std::vector<AppId> apps;     // apps with MAU@t1 > 0, ascending
  std::vector<int> labels;     // 1 when MAU@t2 / MAU@t1 >= 0.5
  std::vector<double> ratios;
  double positive_fraction = 0.0;
};

// The boundary ratio of exactly 0.5 counts as positive.
BinaryLabeling label_binary(const ActivityLog& log, std::span<const AppId> apps, Day t1, Day t2);

struct TaskReport {
  std::string feature_set;
  double accuracy = 0.0;
  double precision_pos = 0.0, precision_neg = 0.0;
  double recall_pos = 0.0, recall_neg = 0.0;
  double baseline = 0.0;  // majority-class share of the test split
  std::vector<std::string> top_among_all;     // ranked by the all-features model
  std::vector<std::string> top_within_class;  // ranked by this set's own model
};

struct BinaryTaskResult {
  BinaryLabeling labeling;
  std::vector<AppId> train_apps;
  std::vector<AppId> test_apps;
  std::vector<TaskReport> reports;
};

// Features are extracted on the 12-month window ending at t1; the app set is
// split train/test (split = train fraction) at the app level. Feature-set
// names: All, Temporal, Demographic, Retention, Social, and SIRS when the
// options include it.
BinaryTaskResult run_binary_task(const ActivityLog& log, const SocialGraph& graph,
                                 const AttributeTable& attributes, Day t1, Day t2, double split,
                                 const ForestConfig& forest_cfg,
                                 std::span<const std::string> feature_sets,
                                 const FeatureOptions& feature_options, std::uint64_t seed,
                                 unsigned threads = 0);

struct PairExample {
  AppId a = 0;
  AppId b = 0;
  int label = 0;  // 1 when a's outcome MAU exceeds b's
};

// Apps are comparable when they share a start-MAU decile and distinct when
// their outcome-MAU deciles are at least k apart. Up to max_pairs unordered
// pairs are sampled; both orderings are emitted with flipped labels.
std::vector<PairExample> build_pairs(std::span<const AppId> apps,
                                     std::span<const std::uint32_t> start_mau,
                                     std::span<const std::uint32_t> outcome_mau, int k,
                                     std::size_t max_pairs, std::uint64_t seed);

struct PairwisePoint {
  int k = 0;
  double accuracy = 0.0;
  std::size_t train_pairs = 0;  // ordered examples
  std::size_t test_pairs = 0;
  bool skipped = false;  // not enough pairs at this k
};

struct PairwiseTaskResult {
  std::vector<std::string> feature_sets;
  std::vector<std::vector<PairwisePoint>> curves;  // per feature set, per k
};

// Time-shifted protocol: training pairs start at t0 with outcomes at t1;
// test pairs start at t1 with outcomes at t2. Feature windows end at the
// pair's start snapshot, strictly before its outcome window.
PairwiseTaskResult run_pairwise_task(const ActivityLog& log, const SocialGraph& graph,
                                     const AttributeTable& attributes, Day t0, Day t1, Day t2,
                                     int k_min, int k_max, std::size_t max_pairs,
                                     const ForestConfig& forest_cfg,
                                     std::span<const std::string> feature_sets,
                                     const FeatureOptions& feature_options, std::uint64_t seed,
                                     unsigned threads = 0);

std::string binary_report_json(const BinaryTaskResult& result);
void save_pairwise_csv(const std::string& path, const PairwiseTaskResult& result);

// Spearman rank correlation with average ranks on ties; used by the
// monotone-trend checks.
double spearman_rho(std::span<const double> a, std::span<const double> b);

}  // namespace appeco
