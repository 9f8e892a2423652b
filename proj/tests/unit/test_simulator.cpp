#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "appeco/simulator.hpp"

using namespace appeco;

TEST_CASE("erdos-renyi boundary probabilities") {
  GraphGenConfig cfg;
  cfg.model = GraphModel::erdos_renyi;
  cfg.node_count = 10;
  cfg.edge_prob = 0.0;
  cfg.seed = 1;
  CHECK(generate_graph(cfg).edge_count() == 0);
  cfg.edge_prob = 1.0;
  CHECK(generate_graph(cfg).edge_count() == 45);
}

TEST_CASE("erdos-renyi edge count near expectation") {
  GraphGenConfig cfg;
  cfg.model = GraphModel::erdos_renyi;
  cfg.node_count = 2000;
  cfg.edge_prob = 0.004;
  cfg.seed = 5;
  const auto g = generate_graph(cfg);
  const double expected = 0.004 * 2000.0 * 1999.0 / 2.0;
  const double sigma = std::sqrt(expected * (1.0 - 0.004));
  CHECK(std::abs(double(g.edge_count()) - expected) < 4.0 * sigma);
}

TEST_CASE("barabasi-albert mean degree and determinism") {
  GraphGenConfig cfg;
  cfg.model = GraphModel::barabasi_albert;
  cfg.node_count = 1000;
  cfg.attach_degree = 3;
  cfg.seed = 7;
  const auto g1 = generate_graph(cfg);
  const auto g2 = generate_graph(cfg);
  REQUIRE(g1.edge_count() == g2.edge_count());
  const auto e1 = g1.edges();
  const auto e2 = g2.edges();
  CHECK(std::equal(e1.begin(), e1.end(), e2.begin()));
  const double mean_degree = 2.0 * double(g1.edge_count()) / 1000.0;
  CHECK(mean_degree == doctest::Approx(6.0).epsilon(0.05));
}

TEST_CASE("watts-strogatz keeps the ring edge budget") {
  GraphGenConfig cfg;
  cfg.model = GraphModel::watts_strogatz;
  cfg.node_count = 500;
  cfg.ring_degree = 8;
  cfg.rewire_prob = 0.0;
  cfg.seed = 3;
  CHECK(generate_graph(cfg).edge_count() == 500 * 4);
  cfg.rewire_prob = 0.1;
  const auto g = generate_graph(cfg);
  CHECK(g.edge_count() > 500 * 4 - 50);  // only duplicate rejections drop edges
  CHECK(g.edge_count() <= 500 * 4);
}

TEST_CASE("generator rejects infeasible parameters") {
  GraphGenConfig cfg;
  cfg.model = GraphModel::barabasi_albert;
  cfg.node_count = 5;
  cfg.attach_degree = 5;
  CHECK_THROWS_AS(generate_graph(cfg), std::invalid_argument);
  cfg.model = GraphModel::watts_strogatz;
  cfg.node_count = 10;
  cfg.ring_degree = 3;  // odd
  CHECK_THROWS_AS(generate_graph(cfg), std::invalid_argument);
  cfg.model = GraphModel::erdos_renyi;
  cfg.node_count = 1;
  CHECK_THROWS_AS(generate_graph(cfg), std::invalid_argument);
}

TEST_CASE("degree cap drops edges with a count") {
  GraphGenConfig cfg;
  cfg.model = GraphModel::erdos_renyi;
  cfg.node_count = 30;
  cfg.edge_prob = 1.0;
  cfg.degree_cap = 5;
  cfg.seed = 9;
  std::uint64_t dropped = 0;
  const auto g = generate_graph(cfg, &dropped);
  CHECK(dropped > 0);
  CHECK(dropped + g.edge_count() == 435);
  for (UserId u = 0; u < 30; ++u) CHECK(g.degree(u) <= 5);
}

namespace {

AttributeGenConfig attr_config() {
  AttributeGenConfig cfg;
  cfg.countries = Categorical{{0, 1, 2}, {0.5, 0.3, 0.2}};
  cfg.genders = Categorical{{0, 1}, {0.5, 0.5}};
  return cfg;
}

}  // namespace

TEST_CASE("attribute marginals match without homophily") {
  GraphGenConfig gcfg;
  gcfg.model = GraphModel::erdos_renyi;
  gcfg.node_count = 20000;
  gcfg.edge_prob = 2.0 / 20000.0;
  gcfg.seed = 11;
  const auto graph = generate_graph(gcfg);
  const auto attrs = assign_attributes(graph, attr_config(), 21);
  std::map<int, int> counts;
  for (const auto& row : attrs.rows()) ++counts[row.country];
  const double n = double(attrs.size());
  for (const auto& [value, expected] : std::map<int, double>{{0, 0.5}, {1, 0.3}, {2, 0.2}}) {
    const double sigma = std::sqrt(expected * (1.0 - expected) * n);
    CHECK(std::abs(double(counts[value]) - expected * n) < 3.0 * sigma);
  }
}

TEST_CASE("full homophily floods a connected graph from one seed") {
  GraphGenConfig gcfg;
  gcfg.model = GraphModel::watts_strogatz;
  gcfg.node_count = 400;
  gcfg.ring_degree = 4;
  gcfg.rewire_prob = 0.0;  // connected ring
  gcfg.seed = 2;
  const auto graph = generate_graph(gcfg);
  auto acfg = attr_config();
  acfg.homophily_weight = 1.0;
  const auto attrs = assign_attributes(graph, acfg, 33);
  std::set<int> countries;
  for (const auto& row : attrs.rows()) countries.insert(row.country);
  CHECK(countries.size() == 1);
}

TEST_CASE("fb_l7 point mass assigns seven to everyone") {
  GraphGenConfig gcfg;
  gcfg.model = GraphModel::erdos_renyi;
  gcfg.node_count = 200;
  gcfg.edge_prob = 0.01;
  gcfg.seed = 4;
  const auto graph = generate_graph(gcfg);
  auto acfg = attr_config();
  acfg.fb_l7 = {0, 0, 0, 0, 0, 0, 0, 1.0};
  const auto attrs = assign_attributes(graph, acfg, 5);
  for (const auto& row : attrs.rows()) CHECK(row.fb_active_days_of_7 == 7);
}

namespace {

struct SmallWorld {
  SocialGraph graph;
  AttributeTable attrs;
};

SmallWorld small_world(std::uint32_t n, std::uint64_t seed) {
  GraphGenConfig gcfg;
  gcfg.model = GraphModel::watts_strogatz;
  gcfg.node_count = n;
  gcfg.ring_degree = 8;
  gcfg.rewire_prob = 0.1;
  gcfg.seed = seed;
  auto graph = generate_graph(gcfg);
  auto attrs = assign_attributes(graph, attr_config(), seed + 1);
  return {std::move(graph), std::move(attrs)};
}

}  // namespace

TEST_CASE("no adoption channel produces an empty log") {
  const auto world = small_world(300, 6);
  AppRegime regime;
  regime.alpha = 0.0;
  regime.beta = 0.0;
  regime.horizon = 50;
  CHECK(simulate_app(world.graph, world.attrs, regime, 9).empty());
}

TEST_CASE("alpha=1 with full engagement saturates every user-day") {
  const auto world = small_world(120, 8);
  AppRegime regime;
  regime.alpha = 1.0;
  regime.engagement_rho = 1.0;
  regime.retention_xa = 0.0;  // unbounded lifetimes
  regime.horizon = 20;
  const auto events = simulate_app(world.graph, world.attrs, regime, 1);
  CHECK(events.size() == std::size_t(120) * 20);
}

TEST_CASE("per-user events start at adoption and stay within the horizon") {
  const auto world = small_world(500, 12);
  AppRegime regime;
  regime.alpha = 0.01;
  regime.beta = 0.02;
  regime.retention_a = 0.3;
  regime.retention_xa = 0.2;
  regime.engagement_rho = 0.6;
  regime.reactivation_eps = 0.05;
  regime.horizon = 80;
  const auto events = simulate_app(world.graph, world.attrs, regime, 77);
  REQUIRE_FALSE(events.empty());
  std::map<UserId, Day> first;
  for (const auto& [u, d] : events) {
    CHECK(d >= 0);
    CHECK(d < 80);
    const auto it = first.find(u);
    if (it == first.end() || d < it->second) first[u] = d;
  }
  for (const auto& [u, d] : events) CHECK(d >= first[u]);
}

TEST_CASE("simulate_app is deterministic for a fixed seed") {
  const auto world = small_world(300, 14);
  AppRegime regime;
  regime.alpha = 0.02;
  regime.beta = 0.05;
  regime.retention_xa = 0.3;
  regime.engagement_rho = 0.5;
  regime.horizon = 40;
  const auto e1 = simulate_app(world.graph, world.attrs, regime, 5);
  const auto e2 = simulate_app(world.graph, world.attrs, regime, 5);
  CHECK(e1 == e2);
  const auto e3 = simulate_app(world.graph, world.attrs, regime, 6);
  CHECK(e1 != e3);
}

TEST_CASE("ecosystem with zero apps is empty") {
  const auto world = small_world(100, 16);
  EcosystemSpec spec;
  spec.app_count = 0;
  AppRegime regime;
  regime.alpha = 0.01;
  regime.horizon = 10;
  spec.mixture.push_back({"only", 1.0, regime});
  const auto eco = simulate_ecosystem(spec, world.graph, world.attrs);
  CHECK(eco.log.app_count() == 0);
}

TEST_CASE("regime mixture counts stay within 3 sigma") {
  const auto world = small_world(60, 18);
  AppRegime a;
  a.alpha = 0.01;
  a.horizon = 5;
  AppRegime b = a;
  EcosystemSpec spec;
  spec.app_count = 500;
  spec.seed = 99;
  spec.mixture.push_back({"a", 0.5, a});
  spec.mixture.push_back({"b", 0.5, b});
  const auto eco = simulate_ecosystem(spec, world.graph, world.attrs);
  std::size_t count_a = 0;
  for (const auto& name : eco.regime_names) count_a += name == "a" ? 1 : 0;
  const double sigma = std::sqrt(500.0 * 0.25);
  CHECK(std::abs(double(count_a) - 250.0) < 3.0 * sigma);
}

TEST_CASE("ecosystem reruns are byte-identical and worker-count independent") {
  const auto world = small_world(250, 20);
  AppRegime regime;
  regime.alpha = 0.01;
  regime.beta = 0.03;
  regime.retention_xa = 0.2;
  regime.engagement_rho = 0.7;
  regime.horizon = 30;
  EcosystemSpec spec;
  spec.app_count = 12;
  spec.seed = 7;
  spec.mixture.push_back({"r", 1.0, regime});

  const auto save = [&](const Ecosystem& eco, const std::string& name) {
    const auto path = std::filesystem::temp_directory_path() / name;
    eco.log.save_csv(path.string());
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto one = save(simulate_ecosystem(spec, world.graph, world.attrs, 1), "eco1.csv");
  const auto four = save(simulate_ecosystem(spec, world.graph, world.attrs, 4), "eco4.csv");
  CHECK(one == four);
  const auto again = save(simulate_ecosystem(spec, world.graph, world.attrs, 2), "eco2.csv");
  CHECK(one == again);
}

TEST_CASE("ecosystem config json round trip") {
  const std::string text = R"({
    "graph": {"model": "watts_strogatz", "node_count": 100, "ring_degree": 6, "rewire_prob": 0.05},
    "attributes": {"countries": {"values": [0, 1], "probs": [0.7, 0.3]}, "homophily": 0.5},
    "app_count": 4,
    "horizon": 30,
    "regimes": [
      {"name": "social", "weight": 1.0, "alpha": 0.01, "beta": 0.05, "social_mode": "edges"},
      {"name": "flat", "weight": 1.0, "alpha": 0.02, "horizon": 20}
    ]
  })";
  const auto cfg = parse_ecosystem_config(text);
  CHECK(cfg.graph.model == GraphModel::watts_strogatz);
  CHECK(cfg.app_count == 4);
  REQUIRE(cfg.mixture.size() == 2);
  CHECK(cfg.mixture[0].regime.social_mode == SocialMode::edges);
  CHECK(cfg.mixture[0].regime.horizon == 30);  // inherited
  CHECK(cfg.mixture[1].regime.horizon == 20);
}

TEST_CASE("bad ecosystem config raises ParseError") {
  CHECK_THROWS_AS(parse_ecosystem_config("{"), ParseError);
  CHECK_THROWS_AS(parse_ecosystem_config(R"({"app_count": 1})"), ParseError);
}
