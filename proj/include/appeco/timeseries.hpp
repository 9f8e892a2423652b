#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "appeco/core.hpp"

namespace appeco {

struct DailySeries {
  AppId app = 0;
  DayRange window;
  std::vector<double> values;  // one per day of the window
};

DailySeries dau_series(const ActivityLog& log, AppId app, DayRange window);

// Divides by the peak so the maximum becomes exactly 1. All-zero input is an
// error.
std::vector<double> peak_normalize(std::span<const double> values);

struct KMeansResult {
  std::uint32_t k = 0;
  std::vector<std::vector<double>> centroids;
  std::vector<std::uint32_t> assignment;  // centroid per input series (train and test)
  std::vector<std::uint32_t> train_index;
  std::vector<std::uint32_t> test_index;
  double train_score = 0.0;  // mean L2 distance from nearest centroid
  double test_score = 0.0;
  std::uint32_t best_restart = 0;
};

// Lloyd iteration with L2 distance; best of `restarts` seeded initializations
// (distinct uniformly drawn training points), convergence when assignments
// stabilize or after 300 rounds. Scores are reported for a seeded
// train/test split (split = train fraction).
KMeansResult kmeans_cluster(const std::vector<std::vector<double>>& series, std::uint32_t k,
                            std::uint32_t restarts, double split, std::uint64_t seed);

struct DeltaStats {
  double value_med = 0.0, value_min = 0.0, value_max = 0.0;
  double d_med = 0.0, d_min = 0.0, d_max = 0.0;
  double d2_med = 0.0, d2_min = 0.0, d2_max = 0.0;
};

// Months are fixed 30-day blocks: month X covers days [30(X-1), 30X) of the
// series. Differences are taken strictly within the month.
DeltaStats delta_stats(const DailySeries& series, int month_index);

struct MauTransition {
  std::vector<double> bin_edges;  // log-scale; index 0 is the zero-MAU underflow bin
  Grid joint;                     // rows: MAU@t2 bin, cols: MAU@t1 bin
  Grid conditional;               // columns normalized to 1 where nonzero
};

MauTransition mau_transition(const ActivityLog& log, std::span<const AppId> apps, Day t1, Day t2,
                             int bins_per_decade);

void save_kmeans_csv(const std::string& centroid_path, const std::string& score_path,
                     std::span<const KMeansResult> results);

}  // namespace appeco
