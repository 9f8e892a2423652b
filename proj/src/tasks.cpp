#include "appeco/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "appeco/rng.hpp"
#include "appeco/util.hpp"

namespace appeco {

BinaryLabeling label_binary(const ActivityLog& log, std::span<const AppId> apps, Day t1,
                            Day t2) {
  if (t2 <= t1) throw std::invalid_argument("label_binary: t2 must follow t1");
  BinaryLabeling out;
  for (const AppId app : apps) {
    const auto m1 = active_users(log, app, t1, 30);
    if (m1 == 0) continue;
    const auto m2 = active_users(log, app, t2, 30);
    const double ratio = double(m2) / double(m1);
    out.apps.push_back(app);
    out.ratios.push_back(ratio);
    out.labels.push_back(ratio >= 0.5 ? 1 : 0);
  }
  if (out.apps.empty()) throw std::invalid_argument("label_binary: no labelable apps");
  std::uint64_t pos = 0;
  for (const int l : out.labels) pos += std::uint64_t(l);
  out.positive_fraction = double(pos) / double(out.labels.size());
  return out;
}

namespace {

FeatureRows select_columns(const ImputedMatrix& m, std::span<const std::uint32_t> rows,
                           std::span<const std::size_t> cols) {
  FeatureRows out;
  out.reserve(rows.size());
  for (const auto r : rows) {
    std::vector<double> row;
    row.reserve(cols.size());
    for (const auto c : cols) row.push_back(m.rows[r][c]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::size_t> columns_of_set(const ImputedMatrix& m, const std::string& set_name) {
  if (set_name == "All") {
    std::vector<std::size_t> cols(m.names.size());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    return cols;
  }
  std::string group;
  if (set_name == "Temporal") group = "temporal";
  else if (set_name == "Demographic") group = "demographic";
  else if (set_name == "Retention") group = "retention";
  else if (set_name == "Social") group = "social";
  else if (set_name == "SIRS") group = "sirs";
  else throw std::invalid_argument("unknown feature set: " + set_name);
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < m.groups.size(); ++i) {
    if (m.groups[i] == group) cols.push_back(i);
  }
  if (cols.empty()) throw std::invalid_argument("feature set has no columns: " + set_name);
  return cols;
}

std::vector<std::string> top_features(const std::vector<double>& importance,
                                      std::span<const std::size_t> cols,
                                      std::span<const std::string> names, std::size_t top_n) {
  // importance is indexed over `cols` positions when the model was trained
  // on a subset; callers pass a parallel view
  std::vector<std::size_t> order(cols.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(top_n, order.size()); ++i) {
    out.push_back(names[cols[order[i]]]);
  }
  return out;
}

double majority_share(std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  std::uint64_t pos = 0;
  for (const int l : labels) pos += std::uint64_t(l);
  const double f = double(pos) / double(labels.size());
  return std::max(f, 1.0 - f);
}

}  // namespace

BinaryTaskResult run_binary_task(const ActivityLog& log, const SocialGraph& graph,
                                 const AttributeTable& attributes, Day t1, Day t2, double split,
                                 const ForestConfig& forest_cfg,
                                 std::span<const std::string> feature_sets,
                                 const FeatureOptions& feature_options, std::uint64_t seed,
                                 unsigned threads) {
  if (split <= 0.0 || split >= 1.0) throw std::invalid_argument("run_binary_task: bad split");
  const auto all_apps = log.app_ids();
  BinaryTaskResult result;
  result.labeling = label_binary(log, all_apps, t1, t2);
  const auto& labeling = result.labeling;

  const double minority = std::min(labeling.positive_fraction, 1.0 - labeling.positive_fraction);
  if (minority < 0.10) {
    throw std::invalid_argument("run_binary_task: degenerate class balance (minority < 10%)");
  }

  // app-level split
  Rng rng(mix_seed(seed, 0x6274));
  std::vector<std::uint32_t> order(labeling.apps.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  const std::size_t n_train =
      std::clamp<std::size_t>(std::size_t(std::llround(split * double(order.size()))), 1,
                              order.size() - 1);
  std::vector<std::uint32_t> train_rows(order.begin(), order.begin() + std::ptrdiff_t(n_train));
  std::vector<std::uint32_t> test_rows(order.begin() + std::ptrdiff_t(n_train), order.end());
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  for (const auto r : train_rows) result.train_apps.push_back(labeling.apps[r]);
  for (const auto r : test_rows) result.test_apps.push_back(labeling.apps[r]);

  const auto window = feature_window_ending(t1);
  const auto matrix =
      feature_matrix(log, graph, attributes, labeling.apps, window, feature_options, threads);
  const auto imputed = impute_matrix(matrix, train_rows);

  std::vector<int> y_train, y_test;
  for (const auto r : train_rows) y_train.push_back(labeling.labels[r]);
  for (const auto r : test_rows) y_test.push_back(labeling.labels[r]);

  // the all-features model supplies the "among all" importance ranking
  const auto all_cols = columns_of_set(imputed, "All");
  ForestConfig cfg_all = forest_cfg;
  cfg_all.seed = mix_seed(forest_cfg.seed, 0xA11);
  const auto forest_all = Forest::train(select_columns(imputed, train_rows, all_cols), y_train,
                                        cfg_all, threads);

  for (const auto& set_name : feature_sets) {
    const auto cols = columns_of_set(imputed, set_name);
    TaskReport report;
    report.feature_set = set_name;

    const Forest* model = nullptr;
    Forest per_set;
    if (set_name == "All") {
      model = &forest_all;
    } else {
      ForestConfig cfg = forest_cfg;
      cfg.seed = mix_seed(forest_cfg.seed, std::hash<std::string>{}(set_name));
      per_set = Forest::train(select_columns(imputed, train_rows, cols), y_train, cfg, threads);
      model = &per_set;
    }
    const auto eval = model->evaluate(select_columns(imputed, test_rows, cols), y_test);
    report.accuracy = eval.accuracy;
    report.precision_pos = eval.precision_pos;
    report.precision_neg = eval.precision_neg;
    report.recall_pos = eval.recall_pos;
    report.recall_neg = eval.recall_neg;
    report.baseline = majority_share(y_test);

    // among-all: this set's columns ranked by the all-features model
    std::vector<double> among(cols.size(), 0.0);
    for (std::size_t i = 0; i < cols.size(); ++i) among[i] = forest_all.oob_importance()[cols[i]];
    report.top_among_all = top_features(among, cols, imputed.names, 2);
    if (set_name != "All") {
      report.top_within_class = top_features(model->oob_importance(), cols, imputed.names, 2);
    }
    result.reports.push_back(std::move(report));
  }
  return result;
}

namespace {

// rank-based deciles, ties broken by app id for a total order
std::vector<int> decile_of(std::span<const AppId> apps, std::span<const std::uint32_t> mau) {
  std::vector<std::uint32_t> order(apps.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (mau[a] != mau[b]) return mau[a] < mau[b];
    return apps[a] < apps[b];
  });
  std::vector<int> decile(apps.size(), 0);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    decile[order[rank]] = int(rank * 10 / order.size());
  }
  return decile;
}

}  // namespace

std::vector<PairExample> build_pairs(std::span<const AppId> apps,
                                     std::span<const std::uint32_t> start_mau,
                                     std::span<const std::uint32_t> outcome_mau, int k,
                                     std::size_t max_pairs, std::uint64_t seed) {
  if (apps.size() != start_mau.size() || apps.size() != outcome_mau.size()) {
    throw std::invalid_argument("build_pairs: size mismatch");
  }
  if (k < 0 || k > 9) throw std::invalid_argument("build_pairs: k must lie in 0..9");
  const auto start_decile = decile_of(apps, start_mau);
  const auto outcome_decile = decile_of(apps, outcome_mau);

  std::vector<std::pair<std::uint32_t, std::uint32_t>> unordered;
  for (std::uint32_t i = 0; i < apps.size(); ++i) {
    for (std::uint32_t j = i + 1; j < apps.size(); ++j) {
      if (start_decile[i] != start_decile[j]) continue;
      if (std::abs(outcome_decile[i] - outcome_decile[j]) < k) continue;
      if (outcome_mau[i] == outcome_mau[j]) continue;  // no ground-truth winner
      unordered.emplace_back(i, j);
    }
  }
  if (unordered.empty()) return {};
  Rng rng(mix_seed(seed, 0x7077, std::uint64_t(k)));
  rng.shuffle(unordered);
  if (unordered.size() > max_pairs) unordered.resize(max_pairs);

  std::vector<PairExample> out;
  out.reserve(unordered.size() * 2);
  for (const auto& [i, j] : unordered) {
    const int label = outcome_mau[i] > outcome_mau[j] ? 1 : 0;
    out.push_back({apps[i], apps[j], label});
    out.push_back({apps[j], apps[i], 1 - label});
  }
  return out;
}

PairwiseTaskResult run_pairwise_task(const ActivityLog& log, const SocialGraph& graph,
                                     const AttributeTable& attributes, Day t0, Day t1, Day t2,
                                     int k_min, int k_max, std::size_t max_pairs,
                                     const ForestConfig& forest_cfg,
                                     std::span<const std::string> feature_sets,
                                     const FeatureOptions& feature_options, std::uint64_t seed,
                                     unsigned threads) {
  if (!(t0 < t1 && t1 < t2)) {
    throw std::invalid_argument("run_pairwise_task: snapshots must satisfy t0 < t1 < t2");
  }
  // the time-shift protocol: every feature window must close before its
  // outcome snapshot
  const auto train_window = feature_window_ending(t0);
  const auto test_window = feature_window_ending(t1);
  if (!(train_window.last < t1 && test_window.last < t2)) {
    throw std::invalid_argument("run_pairwise_task: feature window overlaps outcome window");
  }

  const auto all_apps = log.app_ids();
  std::vector<AppId> train_apps, test_apps;
  std::vector<std::uint32_t> train_start, train_outcome, test_start, test_outcome;
  for (const AppId app : all_apps) {
    const auto m0 = active_users(log, app, t0, 30);
    if (m0 > 0) {
      train_apps.push_back(app);
      train_start.push_back(m0);
      train_outcome.push_back(active_users(log, app, t1, 30));
    }
    const auto m1 = active_users(log, app, t1, 30);
    if (m1 > 0) {
      test_apps.push_back(app);
      test_start.push_back(m1);
      test_outcome.push_back(active_users(log, app, t2, 30));
    }
  }
  if (train_apps.empty() || test_apps.empty()) {
    throw std::invalid_argument("run_pairwise_task: no eligible apps");
  }

  // one joint matrix so imputation gives train and test identical columns
  std::vector<AppId> joint_apps = train_apps;
  const auto train_count = std::uint32_t(train_apps.size());
  joint_apps.insert(joint_apps.end(), test_apps.begin(), test_apps.end());

  FeatureMatrix joint;
  {
    const auto m_train = feature_matrix(log, graph, attributes, train_apps, train_window,
                                        feature_options, threads);
    const auto m_test =
        feature_matrix(log, graph, attributes, test_apps, test_window, feature_options, threads);
    joint.schema = m_train.schema;
    joint.apps = joint_apps;
    joint.rows = m_train.rows;
    joint.rows.insert(joint.rows.end(), m_test.rows.begin(), m_test.rows.end());
  }
  std::vector<std::uint32_t> impute_train_rows(train_count);
  for (std::uint32_t i = 0; i < train_count; ++i) impute_train_rows[i] = i;
  const auto imputed = impute_matrix(joint, impute_train_rows);

  // app id -> imputed row
  std::vector<std::uint32_t> train_row(train_apps.size()), test_row(test_apps.size());
  for (std::uint32_t i = 0; i < train_apps.size(); ++i) train_row[i] = i;
  for (std::uint32_t i = 0; i < test_apps.size(); ++i) test_row[i] = train_count + i;

  PairwiseTaskResult result;
  for (const auto& set_name : feature_sets) result.feature_sets.push_back(set_name);
  result.curves.resize(feature_sets.size());

  auto pair_rows = [&](std::span<const PairExample> pairs, std::span<const AppId> apps,
                       std::span<const std::uint32_t> rows,
                       std::span<const std::size_t> cols) {
    FeatureRows out;
    out.reserve(pairs.size());
    auto row_of = [&](AppId id) {
      const auto it = std::lower_bound(apps.begin(), apps.end(), id);
      return rows[std::size_t(it - apps.begin())];
    };
    for (const auto& pr : pairs) {
      std::vector<double> row;
      row.reserve(cols.size() * 2);
      const auto ra = row_of(pr.a);
      const auto rb = row_of(pr.b);
      for (const auto c : cols) row.push_back(imputed.rows[ra][c]);
      for (const auto c : cols) row.push_back(imputed.rows[rb][c]);
      out.push_back(std::move(row));
    }
    return out;
  };

  for (int k = k_min; k <= k_max; ++k) {
    const auto train_pairs = build_pairs(train_apps, train_start, train_outcome, k, max_pairs,
                                         mix_seed(seed, 0x7452));
    const auto test_pairs =
        build_pairs(test_apps, test_start, test_outcome, k, max_pairs, mix_seed(seed, 0x7453));
    for (std::size_t s = 0; s < feature_sets.size(); ++s) {
      PairwisePoint point;
      point.k = k;
      point.train_pairs = train_pairs.size();
      point.test_pairs = test_pairs.size();
      if (train_pairs.size() < 4 || test_pairs.empty()) {
        point.skipped = true;
        result.curves[s].push_back(point);
        continue;
      }
      const auto cols = columns_of_set(imputed, feature_sets[s]);
      std::vector<int> y_tr, y_te;
      for (const auto& p : train_pairs) y_tr.push_back(p.label);
      for (const auto& p : test_pairs) y_te.push_back(p.label);
      ForestConfig cfg = forest_cfg;
      cfg.compute_importance = false;
      cfg.seed = mix_seed(forest_cfg.seed, 0x7066, std::uint64_t(k) * 131 + s);
      const auto model = Forest::train(pair_rows(train_pairs, train_apps, train_row, cols), y_tr,
                                       cfg, threads);
      const auto eval =
          model.evaluate(pair_rows(test_pairs, test_apps, test_row, cols), y_te);
      point.accuracy = eval.accuracy;
      result.curves[s].push_back(point);
    }
  }
  return result;
}

std::string binary_report_json(const BinaryTaskResult& result) {
  nlohmann::json j;
  j["positive_fraction"] = result.labeling.positive_fraction;
  j["n_apps"] = result.labeling.apps.size();
  j["n_train"] = result.train_apps.size();
  j["n_test"] = result.test_apps.size();
  auto& reports = j["reports"] = nlohmann::json::array();
  for (const auto& r : result.reports) {
    reports.push_back({{"feature_set", r.feature_set},
                       {"accuracy", r.accuracy},
                       {"precision_pos", r.precision_pos},
                       {"precision_neg", r.precision_neg},
                       {"recall_pos", r.recall_pos},
                       {"recall_neg", r.recall_neg},
                       {"baseline", r.baseline},
                       {"top_among_all", r.top_among_all},
                       {"top_within_class", r.top_within_class}});
  }
  return j.dump(2);
}

void save_pairwise_csv(const std::string& path, const PairwiseTaskResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write pairwise file: " + path);
  out << "feature_set,k,accuracy,train_pairs,test_pairs,skipped\n";
  for (std::size_t s = 0; s < result.feature_sets.size(); ++s) {
    for (const auto& p : result.curves[s]) {
      out << result.feature_sets[s] << ',' << p.k << ',' << format_double(p.accuracy) << ','
          << p.train_pairs << ',' << p.test_pairs << ',' << (p.skipped ? 1 : 0) << '\n';
    }
  }
}

double spearman_rho(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman_rho: need two equal samples of size >= 2");
  }
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> rank(v.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * double(i + j) + 1.0;  // average rank for the tie run
      for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
      i = j + 1;
    }
    return rank;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= double(ra.size());
  mb /= double(rb.size());
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  if (da == 0.0 || db == 0.0) return 0.0;
  return num / std::sqrt(da * db);
}

}  // namespace appeco
