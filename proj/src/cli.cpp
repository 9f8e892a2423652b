#include "appeco/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "appeco/core.hpp"
#include "appeco/features.hpp"
#include "appeco/forest.hpp"
#include "appeco/manifest.hpp"
#include "appeco/neighborhoods.hpp"
#include "appeco/retention.hpp"
#include "appeco/rng.hpp"
#include "appeco/simulator.hpp"
#include "appeco/sirs.hpp"
#include "appeco/sociality.hpp"
#include "appeco/stats.hpp"
#include "appeco/tasks.hpp"
#include "appeco/timeseries.hpp"
#include "appeco/util.hpp"

namespace appeco {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out = ".";
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
  auto* c = cmd->add_option("--config", opts.config_path, "JSON configuration file");
  if (config_required) c->required();
  cmd->add_option("--seed", opts.seed, "master random seed");
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = auto)");
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    throw ParseError(std::string("config parse error: ") + e.what());
  }
}

void finish_run(const CommonOpts& opts, const std::string& command, const json& resolved,
                const std::vector<std::string>& input_paths) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config_json = resolved.dump();
  manifest.seed = opts.seed;
  for (const auto& p : input_paths) manifest.add_input(p);
  manifest.write(opts.out);
}

std::vector<AppId> pick_apps(const json& cfg, const ActivityLog& log) {
  if (cfg.contains("apps")) return cfg.at("apps").get<std::vector<AppId>>();
  return log.app_ids();
}

ForestConfig forest_config_from(const json& cfg, std::uint64_t seed) {
  ForestConfig fc;
  if (cfg.contains("forest")) {
    const json& f = cfg.at("forest");
    fc.n_trees = f.value("n_trees", fc.n_trees);
    fc.max_depth = f.value("max_depth", fc.max_depth);
    fc.min_leaf = f.value("min_leaf", fc.min_leaf);
    fc.features_per_split = f.value("features_per_split", fc.features_per_split);
  }
  fc.seed = seed;
  return fc;
}

json forest_config_json(const ForestConfig& fc) {
  return {{"n_trees", fc.n_trees},
          {"max_depth", fc.max_depth},
          {"min_leaf", fc.min_leaf},
          {"features_per_split", fc.features_per_split}};
}

json graph_config_json(const GraphGenConfig& g) {
  json j;
  switch (g.model) {
    case GraphModel::erdos_renyi:
      j["model"] = "erdos_renyi";
      j["edge_prob"] = g.edge_prob;
      break;
    case GraphModel::watts_strogatz:
      j["model"] = "watts_strogatz";
      j["ring_degree"] = g.ring_degree;
      j["rewire_prob"] = g.rewire_prob;
      break;
    case GraphModel::barabasi_albert:
      j["model"] = "barabasi_albert";
      j["attach_degree"] = g.attach_degree;
      break;
  }
  j["node_count"] = g.node_count;
  j["degree_cap"] = g.degree_cap;
  return j;
}

// ---------------------------------------------------------------------------

int cmd_gen_graph(const CommonOpts& opts) {
  const auto raw = load_config(opts.config_path);
  GraphGenConfig cfg = parse_graph_config(raw.dump());
  cfg.seed = opts.seed;
  std::uint64_t dropped = 0;
  const auto graph = generate_graph(cfg, &dropped);
  fs::create_directories(opts.out);
  graph.save_csv(opts.out + "/graph.csv");
  if (dropped > 0) {
    std::cerr << "gen-graph: dropped " << dropped << " edges at the degree cap\n";
  }
  json resolved = graph_config_json(cfg);
  finish_run(opts, "gen-graph", resolved, {opts.config_path});
  return 0;
}

int cmd_gen_ecosystem(const CommonOpts& opts) {
  const auto raw = load_config(opts.config_path);
  EcosystemConfig cfg = parse_ecosystem_config(raw.dump());
  fs::create_directories(opts.out);

  SocialGraph graph;
  std::vector<std::string> inputs{opts.config_path};
  if (!cfg.graph_path.empty()) {
    graph = SocialGraph::load_csv(cfg.graph_path);
    inputs.push_back(cfg.graph_path);
  } else {
    GraphGenConfig g = cfg.graph;
    g.seed = mix_seed(opts.seed, 0x67);
    std::uint64_t dropped = 0;
    graph = generate_graph(g, &dropped);
    if (dropped > 0) {
      std::cerr << "gen-ecosystem: dropped " << dropped << " edges at the degree cap\n";
    }
  }
  const auto attributes = assign_attributes(graph, cfg.attributes, mix_seed(opts.seed, 0x61));

  EcosystemSpec spec;
  spec.app_count = cfg.app_count;
  spec.mixture = cfg.mixture;
  spec.seed = opts.seed;
  const auto eco = simulate_ecosystem(spec, graph, attributes, opts.threads);

  graph.save_csv(opts.out + "/graph.csv");
  attributes.save_csv(opts.out + "/attributes.csv");
  eco.log.save_csv(opts.out + "/activity.csv");
  save_ground_truth_csv(opts.out + "/ground_truth.csv", eco);
  finish_run(opts, "gen-ecosystem", raw, inputs);
  return 0;
}

int cmd_metrics_sociality(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto graph_path = cfg.at("graph").get<std::string>();
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto graph = SocialGraph::load_csv(graph_path);
  const auto log = ActivityLog::load_csv(activity_path);
  const Day as_of = cfg.value("as_of", log.horizon().last);
  const auto apps = pick_apps(cfg, log);

  const auto map = sociality_map(log, graph, apps, as_of, opts.threads);
  fs::create_directories(opts.out);
  save_sociality_csv(opts.out + "/sociality.csv", map.points);
  save_histogram_csv(opts.out + "/sociality_histogram.csv", map.histogram, map.soc_edges,
                     map.pop_edges);
  save_histogram_csv(opts.out + "/sociality_histogram_normalized.csv",
                     map.histogram_normalized, map.soc_edges, map.pop_edges);
  json resolved = cfg;
  resolved["as_of"] = as_of;
  finish_run(opts, "metrics sociality", resolved, {opts.config_path, graph_path, activity_path});
  return 0;
}

int cmd_analyze_neighborhoods(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto graph_path = cfg.at("graph").get<std::string>();
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto graph = SocialGraph::load_csv(graph_path);
  const auto log = ActivityLog::load_csv(activity_path);
  const int horizon = cfg.value("horizon", 60);
  const UserDef user_def =
      cfg.value("user_def", std::string("ever")) == "active" ? UserDef::active : UserDef::ever;
  const auto apps = pick_apps(cfg, log);

  std::vector<NeighborhoodAdoptionProfile> profiles(apps.size());
  std::vector<std::uint8_t> ok(apps.size(), 0);
  parallel_for(apps.size(), opts.threads, [&](std::size_t i) {
    Day snapshot;
    if (cfg.contains("snapshot")) {
      snapshot = cfg.at("snapshot").get<Day>();
    } else {
      const auto spans = user_spans(log, apps[i]);
      if (spans.empty()) return;
      Day lo = spans.front().first, hi = lo;
      for (const auto& s : spans) {
        lo = std::min(lo, s.first);
        hi = std::max(hi, s.last);
      }
      snapshot = (lo + hi) / 2;  // midpoint of the app's observed lifetime
    }
    if (snapshot + Day(horizon) > log.horizon().last) return;
    profiles[i] = adoption_by_class(graph, log, apps[i], snapshot, horizon, user_def);
    ok[i] = 1;
  });
  std::vector<NeighborhoodAdoptionProfile> kept;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < apps.size(); ++i) {
    if (ok[i]) {
      kept.push_back(profiles[i]);
    } else {
      ++skipped;
    }
  }
  fs::create_directories(opts.out);
  save_class_profile_csv(opts.out + "/neighborhood_classes.csv", kept);
  {
    std::ofstream ratio(opts.out + "/neighborhood_ratios.csv", std::ios::binary);
    ratio << "app_id,r_k2_e2,r_e3_k3,r_p2e1_k3,r_p3_k3\n";
    auto opt = [](const std::optional<double>& v) {
      return v ? format_double(*v) : std::string("nan");
    };
    for (const auto& p : kept) {
      ratio << p.app << ',' << opt(p.ratio_k2_e2) << ',' << opt(p.ratio_e3_k3) << ','
            << opt(p.ratio_p2e1_k3) << ',' << opt(p.ratio_p3_k3) << '\n';
    }
  }
  finish_run(opts, "analyze neighborhoods", cfg, {opts.config_path, graph_path, activity_path});
  if (skipped > 0) {
    std::cerr << "analyze neighborhoods: skipped " << skipped
              << " apps without a usable snapshot\n";
    return 3;
  }
  return 0;
}

int cmd_analyze_age_offsets(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto graph_path = cfg.at("graph").get<std::string>();
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto attr_path = cfg.at("attributes").get<std::string>();
  const auto graph = SocialGraph::load_csv(graph_path);
  const auto log = ActivityLog::load_csv(activity_path);
  const auto attributes = AttributeTable::load_csv(attr_path);
  const int horizon = cfg.value("horizon", 60);
  const int n_boot = cfg.value("n_boot", 1000);
  const int min_bin = cfg.value("min_bin", 5);
  const auto apps = pick_apps(cfg, log);

  fs::create_directories(opts.out);
  std::size_t done = 0, skipped = 0;
  for (const AppId app : apps) {
    Day snapshot;
    if (cfg.contains("snapshot")) {
      snapshot = cfg.at("snapshot").get<Day>();
    } else {
      const auto spans = user_spans(log, app);
      if (spans.empty()) {
        ++skipped;
        continue;
      }
      Day lo = spans.front().first, hi = lo;
      for (const auto& s : spans) {
        lo = std::min(lo, s.first);
        hi = std::max(hi, s.last);
      }
      snapshot = (lo + hi) / 2;
    }
    try {
      const auto curves = age_offset_curves(graph, log, app, attributes, snapshot, horizon,
                                            n_boot, mix_seed(opts.seed, app), min_bin);
      save_age_offset_csv(opts.out + "/age_offsets_app" + std::to_string(app) + ".csv", curves);
      ++done;
    } catch (const std::invalid_argument& e) {
      std::cerr << "age-offsets: app " << app << " skipped: " << e.what() << '\n';
      ++skipped;
    }
  }
  finish_run(opts, "analyze age-offsets", cfg,
             {opts.config_path, graph_path, activity_path, attr_path});
  if (done == 0) {
    std::cerr << "age-offsets: no app produced curves\n";
    return 2;
  }
  return skipped > 0 ? 3 : 0;
}

int cmd_fit_retention(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto log = ActivityLog::load_csv(activity_path);
  const int max_offset = cfg.value("max_offset", 60);
  const auto apps = pick_apps(cfg, log);

  std::vector<AppId> fitted;
  std::vector<RetentionFit> exp_fits, td_fits;
  std::vector<RetentionCurve> curves;
  std::size_t skipped = 0;
  for (const AppId app : apps) {
    const auto curve = compute_retention(log, app, max_offset);
    try {
      auto e = fit_exponential(curve);
      auto t = fit_timedep(curve);
      fitted.push_back(app);
      curves.push_back(curve);
      exp_fits.push_back(e);
      td_fits.push_back(t);
    } catch (const std::invalid_argument& e) {
      std::cerr << "fit retention: app " << app << " skipped: " << e.what() << '\n';
      ++skipped;
    }
  }
  fs::create_directories(opts.out);
  save_retention_fits_csv(opts.out + "/retention_fits.csv", fitted, exp_fits, td_fits);
  {
    std::ofstream out(opts.out + "/retention_curves.csv", std::ios::binary);
    out << "app_id,t,returned,eligible,p\n";
    for (std::size_t i = 0; i < fitted.size(); ++i) {
      const auto& c = curves[i];
      for (std::size_t t = 0; t < c.returned.size(); ++t) {
        out << fitted[i] << ',' << t << ',' << c.returned[t] << ',' << c.eligible[t] << ','
            << format_double(c.probability[t]) << '\n';
      }
    }
  }
  finish_run(opts, "fit retention", cfg, {opts.config_path, activity_path});
  bool nonconverged = skipped > 0;
  for (const auto& f : exp_fits) nonconverged = nonconverged || !f.converged;
  for (const auto& f : td_fits) nonconverged = nonconverged || !f.converged;
  return nonconverged ? 3 : 0;
}

int cmd_fit_sirs(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto log = ActivityLog::load_csv(activity_path);
  const Day w_first = cfg.value("window_first", log.horizon().first);
  const Day w_last = cfg.value("window_last", log.horizon().last);
  const int budget = cfg.value("budget", 20000);
  const int predict_horizon = cfg.value("predict_horizon", 90);
  const auto apps = pick_apps(cfg, log);
  const DayRange window{w_first, w_last};

  std::vector<SirsFit> fits(apps.size());
  parallel_for(apps.size(), opts.threads, [&](std::size_t i) {
    const auto dau = active_series(log, apps[i], window, 1);
    const std::vector<double> observed(dau.begin(), dau.end());
    fits[i] = fit_sirs(observed, window, budget, mix_seed(opts.seed, apps[i]));
  });

  fs::create_directories(opts.out);
  save_sirs_fits_csv(opts.out + "/sirs_fits.csv", apps, fits);
  {
    std::ofstream out(opts.out + "/sirs_predictions.csv", std::ios::binary);
    out << "app_id,day,predicted\n";
    for (std::size_t i = 0; i < apps.size(); ++i) {
      const auto pred = predict_sirs(fits[i], predict_horizon);
      for (std::size_t d = 0; d < pred.size(); ++d) {
        out << apps[i] << ',' << (window.last + 1 + Day(d)) << ',' << format_double(pred[d])
            << '\n';
      }
    }
  }
  json resolved = cfg;
  resolved["window_first"] = w_first;
  resolved["window_last"] = w_last;
  finish_run(opts, "fit sirs", resolved, {opts.config_path, activity_path});
  for (const auto& f : fits) {
    if (!f.converged) return 3;
  }
  return 0;
}

int cmd_cluster_dau(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto log = ActivityLog::load_csv(activity_path);
  const int window_days = cfg.value("window_days", 100);
  const auto restarts = cfg.value("restarts", 100u);
  const double split = cfg.value("split", 0.75);
  std::vector<std::uint32_t> ks = cfg.value("ks", std::vector<std::uint32_t>{1, 2, 3, 4, 5, 6});
  const auto apps = pick_apps(cfg, log);

  // window anchored at each app's first event
  std::vector<std::vector<double>> series;
  std::size_t skipped = 0;
  for (const AppId app : apps) {
    const auto spans = user_spans(log, app);
    if (spans.empty()) {
      ++skipped;
      continue;
    }
    Day lo = spans.front().first;
    for (const auto& s : spans) lo = std::min(lo, s.first);
    if (lo + Day(window_days) - 1 > log.horizon().last) {
      ++skipped;
      continue;
    }
    const auto dau = active_series(log, app, DayRange{lo, lo + Day(window_days) - 1}, 1);
    const std::vector<double> values(dau.begin(), dau.end());
    double peak = 0.0;
    for (const double v : values) peak = std::max(peak, v);
    if (peak <= 0.0) {
      ++skipped;
      continue;
    }
    series.push_back(peak_normalize(values));
  }
  if (series.empty()) {
    std::cerr << "cluster dau: no usable series\n";
    return 2;
  }
  std::vector<KMeansResult> results;
  for (const auto k : ks) {
    results.push_back(kmeans_cluster(series, k, restarts, split, opts.seed));
  }
  fs::create_directories(opts.out);
  save_kmeans_csv(opts.out + "/kmeans_centroids.csv", opts.out + "/kmeans_scores.csv", results);
  finish_run(opts, "cluster dau", cfg, {opts.config_path, activity_path});
  if (skipped > 0) {
    std::cerr << "cluster dau: skipped " << skipped << " apps\n";
    return 3;
  }
  return 0;
}

int cmd_matrix_mau_transition(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto log = ActivityLog::load_csv(activity_path);
  const Day t1 = cfg.at("t1").get<Day>();
  const Day t2 = cfg.at("t2").get<Day>();
  const int bins_per_decade = cfg.value("bins_per_decade", 4);
  const auto apps = pick_apps(cfg, log);

  const auto tr = mau_transition(log, apps, t1, t2, bins_per_decade);
  fs::create_directories(opts.out);
  save_histogram_csv(opts.out + "/mau_joint.csv", tr.joint, tr.bin_edges, tr.bin_edges);
  save_histogram_csv(opts.out + "/mau_conditional.csv", tr.conditional, tr.bin_edges,
                     tr.bin_edges);
  finish_run(opts, "matrix mau-transition", cfg, {opts.config_path, activity_path});
  return 0;
}

int cmd_matrix_first_last(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto log = ActivityLog::load_csv(activity_path);
  const int bin_days = cfg.value("bin_days", 7);
  const auto apps = pick_apps(cfg, log);

  fs::create_directories(opts.out);
  for (const AppId app : apps) {
    const auto spans = user_spans(log, app);
    const auto grid = first_last_matrix(spans, bin_days);
    const std::vector<double> no_edges;
    save_histogram_csv(opts.out + "/first_last_app" + std::to_string(app) + ".csv", grid,
                       no_edges, no_edges);
  }
  finish_run(opts, "matrix first-last", cfg, {opts.config_path, activity_path});
  return 0;
}

FeatureOptions feature_options_from(const json& cfg, std::uint64_t seed) {
  FeatureOptions fo;
  fo.include_sirs = cfg.value("include_sirs", false);
  fo.sirs_budget = cfg.value("sirs_budget", fo.sirs_budget);
  fo.sirs_predict_horizon = cfg.value("sirs_predict_horizon", fo.sirs_predict_horizon);
  fo.seed = seed;
  return fo;
}

int cmd_features_extract(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto graph_path = cfg.at("graph").get<std::string>();
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto attr_path = cfg.at("attributes").get<std::string>();
  const auto graph = SocialGraph::load_csv(graph_path);
  const auto log = ActivityLog::load_csv(activity_path);
  const auto attributes = AttributeTable::load_csv(attr_path);
  const Day window_end = cfg.value("window_end", log.horizon().last);
  const auto apps = pick_apps(cfg, log);

  const auto matrix = feature_matrix(log, graph, attributes, apps,
                                     feature_window_ending(window_end),
                                     feature_options_from(cfg, opts.seed), opts.threads);
  fs::create_directories(opts.out);
  save_feature_matrix_csv(opts.out + "/features.csv", matrix);
  json resolved = cfg;
  resolved["window_end"] = window_end;
  finish_run(opts, "features extract", resolved,
             {opts.config_path, graph_path, activity_path, attr_path});
  return 0;
}

int cmd_task_binary(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto graph_path = cfg.at("graph").get<std::string>();
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto attr_path = cfg.at("attributes").get<std::string>();
  const auto graph = SocialGraph::load_csv(graph_path);
  const auto log = ActivityLog::load_csv(activity_path);
  const auto attributes = AttributeTable::load_csv(attr_path);
  const Day t1 = cfg.at("t1").get<Day>();
  const Day t2 = cfg.at("t2").get<Day>();
  const double split = cfg.value("split", 0.75);
  std::vector<std::string> sets = cfg.value(
      "feature_sets",
      std::vector<std::string>{"All", "Temporal", "Demographic", "Retention", "Social"});
  const auto fo = feature_options_from(cfg, opts.seed);
  const auto fc = forest_config_from(cfg, mix_seed(opts.seed, 0xF0F));

  const auto result = run_binary_task(log, graph, attributes, t1, t2, split, fc, sets, fo,
                                      opts.seed, opts.threads);
  fs::create_directories(opts.out);
  {
    std::ofstream out(opts.out + "/binary_report.json", std::ios::binary);
    out << binary_report_json(result) << '\n';
  }
  const auto matrix = feature_matrix(log, graph, attributes, result.labeling.apps,
                                     feature_window_ending(t1), fo, opts.threads);
  save_feature_matrix_csv(opts.out + "/features.csv", matrix);
  json resolved = cfg;
  resolved["split"] = split;
  resolved["feature_sets"] = sets;
  resolved["forest"] = forest_config_json(fc);
  finish_run(opts, "task binary", resolved,
             {opts.config_path, graph_path, activity_path, attr_path});
  return 0;
}

int cmd_task_pairwise(const CommonOpts& opts) {
  const auto cfg = load_config(opts.config_path);
  const auto graph_path = cfg.at("graph").get<std::string>();
  const auto activity_path = cfg.at("activity").get<std::string>();
  const auto attr_path = cfg.at("attributes").get<std::string>();
  const auto graph = SocialGraph::load_csv(graph_path);
  const auto log = ActivityLog::load_csv(activity_path);
  const auto attributes = AttributeTable::load_csv(attr_path);
  const Day t0 = cfg.at("t0").get<Day>();
  const Day t1 = cfg.at("t1").get<Day>();
  const Day t2 = cfg.at("t2").get<Day>();
  const int k_min = cfg.value("k_min", 1);
  const int k_max = cfg.value("k_max", 9);
  const auto max_pairs = cfg.value("max_pairs", std::size_t(5000));
  std::vector<std::string> sets =
      cfg.value("feature_sets", std::vector<std::string>{"Temporal"});
  const auto fo = feature_options_from(cfg, opts.seed);
  const auto fc = forest_config_from(cfg, mix_seed(opts.seed, 0xF1F));

  const auto result = run_pairwise_task(log, graph, attributes, t0, t1, t2, k_min, k_max,
                                        max_pairs, fc, sets, fo, opts.seed, opts.threads);
  fs::create_directories(opts.out);
  save_pairwise_csv(opts.out + "/pairwise_accuracy.csv", result);
  json resolved = cfg;
  resolved["k_min"] = k_min;
  resolved["k_max"] = k_max;
  resolved["max_pairs"] = max_pairs;
  resolved["feature_sets"] = sets;
  resolved["forest"] = forest_config_json(fc);
  finish_run(opts, "task pairwise", resolved,
             {opts.config_path, graph_path, activity_path, attr_path});
  bool any_skipped = false;
  for (const auto& curve : result.curves) {
    for (const auto& p : curve) any_skipped = any_skipped || p.skipped;
  }
  if (any_skipped) std::cerr << "task pairwise: some k values had too few pairs\n";
  return any_skipped ? 3 : 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
  CLI::App app{"app-ecosystem simulation and analytics toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  int (*handler)(const CommonOpts&) = nullptr;
  auto bind = [&](CLI::App* cmd, int (*fn)(const CommonOpts&)) {
    cmd->callback([&handler, fn] { handler = fn; });
  };

  auto* gen_graph = app.add_subcommand("gen-graph", "generate a synthetic social graph");
  add_common(gen_graph, opts);
  bind(gen_graph, cmd_gen_graph);

  auto* gen_eco = app.add_subcommand("gen-ecosystem", "simulate a synthetic app ecosystem");
  add_common(gen_eco, opts);
  bind(gen_eco, cmd_gen_ecosystem);

  auto* metrics = app.add_subcommand("metrics", "app-level metrics");
  metrics->require_subcommand(1);
  auto* soc = metrics->add_subcommand("sociality", "popularity/sociality map");
  add_common(soc, opts);
  bind(soc, cmd_metrics_sociality);

  auto* analyze = app.add_subcommand("analyze", "neighborhood analyses");
  analyze->require_subcommand(1);
  auto* nb = analyze->add_subcommand("neighborhoods", "adoption by neighborhood class");
  add_common(nb, opts);
  bind(nb, cmd_analyze_neighborhoods);
  auto* ao = analyze->add_subcommand("age-offsets", "adoption by age offset");
  add_common(ao, opts);
  bind(ao, cmd_analyze_age_offsets);

  auto* fit = app.add_subcommand("fit", "model fitting");
  fit->require_subcommand(1);
  auto* ret = fit->add_subcommand("retention", "retention curve fits");
  add_common(ret, opts);
  bind(ret, cmd_fit_retention);
  auto* sirs = fit->add_subcommand("sirs", "SIRS model fits");
  add_common(sirs, opts);
  bind(sirs, cmd_fit_sirs);

  auto* cluster = app.add_subcommand("cluster", "time-series clustering");
  cluster->require_subcommand(1);
  auto* dau = cluster->add_subcommand("dau", "k-means over normalized DAU");
  add_common(dau, opts);
  bind(dau, cmd_cluster_dau);

  auto* matrix = app.add_subcommand("matrix", "count matrices");
  matrix->require_subcommand(1);
  auto* mau_tr = matrix->add_subcommand("mau-transition", "two-point MAU transition matrix");
  add_common(mau_tr, opts);
  bind(mau_tr, cmd_matrix_mau_transition);
  auto* fl = matrix->add_subcommand("first-last", "first/last login matrices");
  add_common(fl, opts);
  bind(fl, cmd_matrix_first_last);

  auto* features = app.add_subcommand("features", "feature extraction");
  features->require_subcommand(1);
  auto* extract = features->add_subcommand("extract", "per-app feature matrix");
  add_common(extract, opts);
  bind(extract, cmd_features_extract);

  auto* task = app.add_subcommand("task", "prediction tasks");
  task->require_subcommand(1);
  auto* binary = task->add_subcommand("binary", "binary long-term success prediction");
  add_common(binary, opts);
  bind(binary, cmd_task_binary);
  auto* pairwise = task->add_subcommand("pairwise", "pairwise relative success prediction");
  add_common(pairwise, opts);
  bind(pairwise, cmd_task_pairwise);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << app.help() << '\n';
    return 1;
  }
  if (!handler) return 1;
  try {
    return handler(opts);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace appeco
