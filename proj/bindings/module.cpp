#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "appeco/core.hpp"
#include "appeco/features.hpp"
#include "appeco/forest.hpp"
#include "appeco/retention.hpp"
#include "appeco/simulator.hpp"
#include "appeco/sirs.hpp"
#include "appeco/sociality.hpp"
#include "appeco/stats.hpp"
#include "appeco/tasks.hpp"
#include "appeco/timeseries.hpp"

namespace py = pybind11;
using namespace appeco;

PYBIND11_MODULE(_appeco, m) {
  m.doc() = "app ecosystem simulation and analytics core";

  py::class_<DayRange>(m, "DayRange")
      .def(py::init<Day, Day>(), py::arg("first"), py::arg("last"))
      .def_readonly("first", &DayRange::first)
      .def_readonly("last", &DayRange::last)
      .def("__len__", [](const DayRange& r) { return std::max(r.length(), 0); });

  py::class_<SocialGraph>(m, "SocialGraph")
      .def_static("load_csv", &SocialGraph::load_csv, py::arg("path"),
                  py::arg("degree_cap") = SocialGraph::kDefaultDegreeCap,
                  py::arg("node_count") = std::nullopt)
      .def("save_csv", &SocialGraph::save_csv)
      .def_property_readonly("node_count", &SocialGraph::node_count)
      .def_property_readonly("edge_count", &SocialGraph::edge_count)
      .def("degree", &SocialGraph::degree)
      .def("neighbors", [](const SocialGraph& g, UserId u) {
        const auto nb = g.neighbors(u);
        return std::vector<UserId>(nb.begin(), nb.end());
      })
      .def("has_edge", &SocialGraph::has_edge);

  py::class_<ActivityLog>(m, "ActivityLog")
      .def_static("load_csv", &ActivityLog::load_csv, py::arg("path"),
                  py::arg("horizon") = std::nullopt)
      .def("save_csv", &ActivityLog::save_csv)
      .def_property_readonly("horizon", &ActivityLog::horizon)
      .def_property_readonly("app_ids", &ActivityLog::app_ids)
      .def("event_count", &ActivityLog::event_count);

  py::class_<AttributeTable>(m, "AttributeTable")
      .def_static("load_csv", &AttributeTable::load_csv)
      .def("save_csv", &AttributeTable::save_csv)
      .def("__len__", &AttributeTable::size);

  m.def("active_users", &active_users, py::arg("log"), py::arg("app"), py::arg("window_end"),
        py::arg("window_len"));

  py::enum_<GraphModel>(m, "GraphModel")
      .value("erdos_renyi", GraphModel::erdos_renyi)
      .value("watts_strogatz", GraphModel::watts_strogatz)
      .value("barabasi_albert", GraphModel::barabasi_albert);

  py::class_<GraphGenConfig>(m, "GraphGenConfig")
      .def(py::init<>())
      .def_readwrite("model", &GraphGenConfig::model)
      .def_readwrite("node_count", &GraphGenConfig::node_count)
      .def_readwrite("edge_prob", &GraphGenConfig::edge_prob)
      .def_readwrite("ring_degree", &GraphGenConfig::ring_degree)
      .def_readwrite("rewire_prob", &GraphGenConfig::rewire_prob)
      .def_readwrite("attach_degree", &GraphGenConfig::attach_degree)
      .def_readwrite("degree_cap", &GraphGenConfig::degree_cap)
      .def_readwrite("seed", &GraphGenConfig::seed);

  m.def("generate_graph",
        [](const GraphGenConfig& cfg) { return generate_graph(cfg, nullptr); });

  py::class_<AttributeGenConfig>(m, "AttributeGenConfig")
      .def(py::init<>())
      .def_readwrite("age_min", &AttributeGenConfig::age_min)
      .def_readwrite("age_max", &AttributeGenConfig::age_max)
      .def_readwrite("is_mau_prob", &AttributeGenConfig::is_mau_prob)
      .def_readwrite("homophily_weight", &AttributeGenConfig::homophily_weight);

  m.def("assign_attributes", &assign_attributes, py::arg("graph"), py::arg("config"),
        py::arg("seed"));

  py::enum_<SocialMode>(m, "SocialMode")
      .value("count", SocialMode::count)
      .value("edges", SocialMode::edges)
      .value("components", SocialMode::components);

  py::class_<AppRegime>(m, "AppRegime")
      .def(py::init<>())
      .def_readwrite("alpha", &AppRegime::alpha)
      .def_readwrite("beta", &AppRegime::beta)
      .def_readwrite("social_mode", &AppRegime::social_mode)
      .def_readwrite("target_country", &AppRegime::target_country)
      .def_readwrite("target_age", &AppRegime::target_age)
      .def_readwrite("affinity_boost", &AppRegime::affinity_boost)
      .def_readwrite("retention_a", &AppRegime::retention_a)
      .def_readwrite("retention_xa", &AppRegime::retention_xa)
      .def_readwrite("engagement_rho", &AppRegime::engagement_rho)
      .def_readwrite("reactivation_eps", &AppRegime::reactivation_eps)
      .def_readwrite("horizon", &AppRegime::horizon);

  m.def("simulate_app", &simulate_app, py::arg("graph"), py::arg("attributes"),
        py::arg("regime"), py::arg("seed"));

  py::class_<RegimeMix>(m, "RegimeMix")
      .def(py::init<>())
      .def_readwrite("name", &RegimeMix::name)
      .def_readwrite("weight", &RegimeMix::weight)
      .def_readwrite("regime", &RegimeMix::regime);

  py::class_<EcosystemSpec>(m, "EcosystemSpec")
      .def(py::init<>())
      .def_readwrite("app_count", &EcosystemSpec::app_count)
      .def_readwrite("mixture", &EcosystemSpec::mixture)
      .def_readwrite("seed", &EcosystemSpec::seed);

  py::class_<Ecosystem>(m, "Ecosystem")
      .def_readonly("log", &Ecosystem::log)
      .def_readonly("regime_names", &Ecosystem::regime_names)
      .def_readonly("regime_index", &Ecosystem::regime_index);

  m.def("simulate_ecosystem", &simulate_ecosystem, py::arg("spec"), py::arg("graph"),
        py::arg("attributes"), py::arg("threads") = 0);

  py::class_<SocialityPoint>(m, "SocialityPoint")
      .def_readonly("app", &SocialityPoint::app)
      .def_readonly("n_users", &SocialityPoint::n_users)
      .def_readonly("popularity", &SocialityPoint::popularity)
      .def_readonly("sociality_conditional", &SocialityPoint::sociality_conditional)
      .def_readonly("sociality_meanfrac", &SocialityPoint::sociality_meanfrac)
      .def_readonly("ratio", &SocialityPoint::ratio);

  m.def("popularity", &popularity);
  m.def("sociality_point", &sociality_point, py::arg("log"), py::arg("graph"), py::arg("app"),
        py::arg("as_of"));

  py::class_<RetentionCurve>(m, "RetentionCurve")
      .def_readonly("n0", &RetentionCurve::n0)
      .def_readonly("returned", &RetentionCurve::returned)
      .def_readonly("eligible", &RetentionCurve::eligible)
      .def_readonly("probability", &RetentionCurve::probability);

  py::class_<RetentionFit>(m, "RetentionFit")
      .def_readonly("amplitude", &RetentionFit::amplitude)
      .def_readonly("x0", &RetentionFit::x0)
      .def_readonly("a", &RetentionFit::a)
      .def_readonly("xa", &RetentionFit::xa)
      .def_readonly("rmse", &RetentionFit::rmse)
      .def_readonly("converged", &RetentionFit::converged);

  m.def("compute_retention", &compute_retention, py::arg("log"), py::arg("app"),
        py::arg("max_offset"), py::arg("window") = std::nullopt);
  m.def("fit_exponential", &fit_exponential);
  m.def("fit_timedep", &fit_timedep, py::arg("curve"), py::arg("pin_a") = std::nullopt);
  m.def("predict_retention", &predict_retention);

  m.def("peak_normalize", [](const std::vector<double>& v) { return peak_normalize(v); });

  py::class_<KMeansResult>(m, "KMeansResult")
      .def_readonly("k", &KMeansResult::k)
      .def_readonly("centroids", &KMeansResult::centroids)
      .def_readonly("assignment", &KMeansResult::assignment)
      .def_readonly("train_score", &KMeansResult::train_score)
      .def_readonly("test_score", &KMeansResult::test_score);

  m.def("kmeans_cluster", &kmeans_cluster, py::arg("series"), py::arg("k"), py::arg("restarts"),
        py::arg("split"), py::arg("seed"));

  py::class_<SirsParams>(m, "SirsParams")
      .def(py::init<>())
      .def_readwrite("s0", &SirsParams::s0)
      .def_readwrite("alpha", &SirsParams::alpha)
      .def_readwrite("beta", &SirsParams::beta)
      .def_readwrite("gamma", &SirsParams::gamma)
      .def_readwrite("epsilon", &SirsParams::epsilon);

  py::class_<SirsFit>(m, "SirsFit")
      .def_readonly("params", &SirsFit::params)
      .def_readonly("rmse", &SirsFit::rmse)
      .def_readonly("converged", &SirsFit::converged)
      .def_readonly("fitted", &SirsFit::fitted);

  m.def("simulate_sirs", &simulate_sirs, py::arg("params"), py::arg("horizon"), py::arg("a0"),
        py::arg("i0") = 0.0);
  m.def("fit_sirs",
        [](const std::vector<double>& observed, DayRange window, int budget,
           std::uint64_t seed) { return fit_sirs(observed, window, budget, seed); },
        py::arg("observed"), py::arg("window"), py::arg("budget"), py::arg("seed"));
  m.def("predict_sirs", &predict_sirs, py::arg("fit"), py::arg("horizon"));

  py::class_<KsResult>(m, "KsResult")
      .def_readonly("d", &KsResult::d)
      .def_readonly("p_value", &KsResult::p_value);
  m.def("ks_test", [](const std::vector<double>& a, const std::vector<double>& b) {
    return ks_test(a, b);
  });
  py::class_<BootstrapBands>(m, "BootstrapBands")
      .def_readonly("center", &BootstrapBands::center)
      .def_readonly("lo68", &BootstrapBands::lo68)
      .def_readonly("hi68", &BootstrapBands::hi68)
      .def_readonly("lo95", &BootstrapBands::lo95)
      .def_readonly("hi95", &BootstrapBands::hi95)
      .def_readonly("lo997", &BootstrapBands::lo997)
      .def_readonly("hi997", &BootstrapBands::hi997);
  m.def("bootstrap_mean_ci", [](const std::vector<double>& xs, int n_boot, std::uint64_t seed) {
    return bootstrap_mean_ci(xs, n_boot, seed);
  });
  m.def("binomial_band", &binomial_band);
  m.def("entropy_bits",
        [](const std::vector<double>& p) { return entropy_bits(p); });

  py::class_<ForestConfig>(m, "ForestConfig")
      .def(py::init<>())
      .def_readwrite("n_trees", &ForestConfig::n_trees)
      .def_readwrite("max_depth", &ForestConfig::max_depth)
      .def_readwrite("min_leaf", &ForestConfig::min_leaf)
      .def_readwrite("features_per_split", &ForestConfig::features_per_split)
      .def_readwrite("seed", &ForestConfig::seed)
      .def_readwrite("compute_importance", &ForestConfig::compute_importance);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("accuracy", &EvalReport::accuracy)
      .def_readonly("precision_pos", &EvalReport::precision_pos)
      .def_readonly("precision_neg", &EvalReport::precision_neg)
      .def_readonly("recall_pos", &EvalReport::recall_pos)
      .def_readonly("recall_neg", &EvalReport::recall_neg);

  py::class_<Forest>(m, "Forest")
      .def_static("train", &Forest::train, py::arg("x"), py::arg("y"), py::arg("config"),
                  py::arg("threads") = 0)
      .def("predict",
           [](const Forest& f, const std::vector<double>& row) { return f.predict(row); })
      .def("evaluate", &Forest::evaluate)
      .def_property_readonly("oob_importance", &Forest::oob_importance)
      .def_property_readonly("oob_accuracy", &Forest::oob_accuracy)
      .def("to_json", &Forest::to_json)
      .def_static("from_json", &Forest::from_json);

  py::class_<BinaryLabeling>(m, "BinaryLabeling")
      .def_readonly("apps", &BinaryLabeling::apps)
      .def_readonly("labels", &BinaryLabeling::labels)
      .def_readonly("ratios", &BinaryLabeling::ratios)
      .def_readonly("positive_fraction", &BinaryLabeling::positive_fraction);

  m.def("label_binary", [](const ActivityLog& log, const std::vector<AppId>& apps, Day t1,
                           Day t2) { return label_binary(log, apps, t1, t2); });
  m.def("spearman_rho", [](const std::vector<double>& a, const std::vector<double>& b) {
    return spearman_rho(a, b);
  });
}
