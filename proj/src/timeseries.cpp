#include "appeco/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "appeco/rng.hpp"
#include "appeco/util.hpp"

namespace appeco {

DailySeries dau_series(const ActivityLog& log, AppId app, DayRange window) {
  DailySeries s;
  s.app = app;
  s.window = window;
  const auto counts = active_series(log, app, window, 1);
  s.values.assign(counts.begin(), counts.end());
  return s;
}

std::vector<double> peak_normalize(std::span<const double> values) {
  double peak = 0.0;
  for (const double v : values) peak = std::max(peak, v);
  if (peak <= 0.0) throw std::invalid_argument("peak_normalize: series has no positive value");
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v /= peak;
  return out;
}

namespace {

double l2_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::uint32_t nearest_centroid(std::span<const double> x,
                               const std::vector<std::vector<double>>& centroids) {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::uint32_t c = 0; c < centroids.size(); ++c) {
    const double d = l2_distance(x, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

struct LloydOutcome {
  std::vector<std::vector<double>> centroids;
  double train_score = 0.0;
};

LloydOutcome run_lloyd(const std::vector<std::vector<double>>& series,
                       const std::vector<std::uint32_t>& train_index, std::uint32_t k, Rng& rng) {
  const std::size_t dim = series.front().size();
  const auto init = rng.sample_indices(std::uint32_t(train_index.size()), k);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  for (const auto idx : init) centroids.push_back(series[train_index[idx]]);

  std::vector<std::uint32_t> assign(train_index.size(),
                                    std::numeric_limits<std::uint32_t>::max());
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < train_index.size(); ++i) {
      const auto c = nearest_centroid(series[train_index[i]], centroids);
      if (c != assign[i]) {
        assign[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::uint32_t> counts(k, 0);
    for (std::size_t i = 0; i < train_index.size(); ++i) {
      const auto& x = series[train_index[i]];
      auto& s = sums[assign[i]];
      for (std::size_t d = 0; d < dim; ++d) s[d] += x[d];
      ++counts[assign[i]];
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its old centroid
      for (std::size_t d = 0; d < dim; ++d) centroids[c][d] = sums[c][d] / double(counts[c]);
    }
  }

  double score = 0.0;
  for (const auto ti : train_index) {
    score += l2_distance(series[ti], centroids[nearest_centroid(series[ti], centroids)]);
  }
  score /= double(train_index.size());
  return {std::move(centroids), score};
}

}  // namespace

KMeansResult kmeans_cluster(const std::vector<std::vector<double>>& series, std::uint32_t k,
                            std::uint32_t restarts, double split, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("kmeans_cluster: k must be >= 1");
  if (restarts < 1) throw std::invalid_argument("kmeans_cluster: restarts must be >= 1");
  if (split <= 0.0 || split > 1.0) throw std::invalid_argument("kmeans_cluster: bad split");
  if (series.empty()) throw std::invalid_argument("kmeans_cluster: no series");
  const std::size_t dim = series.front().size();
  for (const auto& s : series) {
    if (s.size() != dim) throw std::invalid_argument("kmeans_cluster: unequal series lengths");
  }

  KMeansResult result;
  result.k = k;

  // seeded split; identical across k values for the same seed so score
  // curves over k are comparable
  Rng split_rng(mix_seed(seed, 0x6B73));
  std::vector<std::uint32_t> order(series.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  split_rng.shuffle(order);
  std::size_t n_train = std::size_t(std::llround(split * double(series.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, series.size());
  result.train_index.assign(order.begin(), order.begin() + std::ptrdiff_t(n_train));
  result.test_index.assign(order.begin() + std::ptrdiff_t(n_train), order.end());
  if (result.train_index.size() < k) {
    throw std::invalid_argument("kmeans_cluster: k exceeds training split size");
  }

  double best_score = std::numeric_limits<double>::infinity();
  LloydOutcome best;
  for (std::uint32_t r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(seed, 0x6B6D, r));
    auto outcome = run_lloyd(series, result.train_index, k, rng);
    if (outcome.train_score < best_score) {
      best_score = outcome.train_score;
      best = std::move(outcome);
      result.best_restart = r;
    }
  }

  result.centroids = std::move(best.centroids);
  result.train_score = best.train_score;
  result.assignment.resize(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    result.assignment[i] = nearest_centroid(series[i], result.centroids);
  }
  double test_score = 0.0;
  for (const auto ti : result.test_index) {
    test_score += l2_distance(series[ti], result.centroids[result.assignment[ti]]);
  }
  result.test_score = result.test_index.empty() ? 0.0 : test_score / double(result.test_index.size());
  return result;
}

namespace {

DeltaStats stats_of(std::span<const double> v, std::span<const double> d,
                    std::span<const double> d2) {
  auto summarize = [](std::span<const double> xs, double& med, double& mn, double& mx) {
    std::vector<double> copy(xs.begin(), xs.end());
    med = median_of(copy);
    mn = *std::min_element(copy.begin(), copy.end());
    mx = *std::max_element(copy.begin(), copy.end());
  };
  DeltaStats s;
  summarize(v, s.value_med, s.value_min, s.value_max);
  summarize(d, s.d_med, s.d_min, s.d_max);
  summarize(d2, s.d2_med, s.d2_min, s.d2_max);
  return s;
}

}  // namespace

DeltaStats delta_stats(const DailySeries& series, int month_index) {
  if (month_index < 1 || month_index > 12) {
    throw std::invalid_argument("delta_stats: month_index must lie in 1..12");
  }
  if (series.values.size() < 360) {
    throw std::invalid_argument("delta_stats: series must cover 12 x 30 days");
  }
  const std::size_t lo = std::size_t(30) * std::size_t(month_index - 1);
  const std::size_t hi = lo + 30;
  std::vector<double> v(series.values.begin() + std::ptrdiff_t(lo),
                        series.values.begin() + std::ptrdiff_t(hi));
  std::vector<double> d;
  for (std::size_t i = 1; i < v.size(); ++i) d.push_back(v[i] - v[i - 1]);
  std::vector<double> d2;
  for (std::size_t i = 1; i < d.size(); ++i) d2.push_back(d[i] - d[i - 1]);
  return stats_of(v, d, d2);
}

MauTransition mau_transition(const ActivityLog& log, std::span<const AppId> apps, Day t1, Day t2,
                             int bins_per_decade) {
  if (t1 >= t2) throw std::invalid_argument("mau_transition: t1 must precede t2");
  if (bins_per_decade < 1) throw std::invalid_argument("mau_transition: bins_per_decade >= 1");

  std::vector<std::pair<std::uint32_t, std::uint32_t>> maus;
  std::uint32_t max_mau = 0;
  for (const AppId app : apps) {
    const auto m1 = active_users(log, app, t1, 30);
    const auto m2 = active_users(log, app, t2, 30);
    maus.emplace_back(m1, m2);
    max_mau = std::max({max_mau, m1, m2});
  }

  // bin 0 holds MAU = 0; bin j >= 1 holds [10^((j-1)/bpd), 10^(j/bpd))
  MauTransition tr;
  int top = 1;
  while (std::pow(10.0, double(top) / double(bins_per_decade)) <= double(max_mau)) ++top;
  const std::size_t bins = std::size_t(top) + 1;
  tr.bin_edges.push_back(0.0);
  for (int j = 0; j < top; ++j) {
    tr.bin_edges.push_back(std::pow(10.0, double(j) / double(bins_per_decade)));
  }
  auto bin_of = [&](std::uint32_t mau) -> std::size_t {
    if (mau == 0) return 0;
    const double lg = std::log10(double(mau));
    const auto j = std::size_t(std::floor(lg * double(bins_per_decade))) + 1;
    return std::min(j, bins - 1);
  };

  tr.joint = Grid(bins, bins);
  for (const auto& [m1, m2] : maus) {
    tr.joint.at(bin_of(m2), bin_of(m1)) += 1.0;
  }
  tr.conditional = Grid(bins, bins);
  for (std::size_t j = 0; j < bins; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < bins; ++i) col += tr.joint.at(i, j);
    if (col <= 0.0) continue;
    for (std::size_t i = 0; i < bins; ++i) tr.conditional.at(i, j) = tr.joint.at(i, j) / col;
  }
  return tr;
}

void save_kmeans_csv(const std::string& centroid_path, const std::string& score_path,
                     std::span<const KMeansResult> results) {
  std::ofstream cent(centroid_path, std::ios::binary);
  if (!cent) throw std::runtime_error("cannot write centroid file: " + centroid_path);
  cent << "k,centroid_idx,day,value\n";
  for (const auto& r : results) {
    for (std::size_t c = 0; c < r.centroids.size(); ++c) {
      for (std::size_t d = 0; d < r.centroids[c].size(); ++d) {
        cent << r.k << ',' << c << ',' << d << ',' << format_double(r.centroids[c][d]) << '\n';
      }
    }
  }
  std::ofstream score(score_path, std::ios::binary);
  if (!score) throw std::runtime_error("cannot write score file: " + score_path);
  score << "k,train,test\n";
  for (const auto& r : results) {
    score << r.k << ',' << format_double(r.train_score) << ',' << format_double(r.test_score)
          << '\n';
  }
}

}  // namespace appeco
