#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "appeco/core.hpp"

namespace appeco {

enum class GraphModel { erdos_renyi, watts_strogatz, barabasi_albert };

struct GraphGenConfig {
  GraphModel model = GraphModel::erdos_renyi;
  std::uint32_t node_count = 0;
  double edge_prob = 0.0;           // erdos_renyi
  std::uint32_t ring_degree = 0;    // watts_strogatz, even
  double rewire_prob = 0.0;         // watts_strogatz
  std::uint32_t attach_degree = 0;  // barabasi_albert
  std::uint32_t degree_cap = SocialGraph::kDefaultDegreeCap;
  std::uint64_t seed = 0;
};

// Deterministic for a fixed config. Edges that would push a node past the
// degree cap are dropped; the count of drops is reported via dropped_by_cap.
SocialGraph generate_graph(const GraphGenConfig& cfg, std::uint64_t* dropped_by_cap = nullptr);

struct Categorical {
  std::vector<std::int32_t> values;
  std::vector<double> probs;  // normalized on validate()

  void validate();
  std::int32_t sample(class Rng& rng) const;
};

struct AttributeGenConfig {
  Categorical countries{{0}, {1.0}};
  Categorical genders{{0, 1}, {0.5, 0.5}};
  std::int32_t age_min = 13;
  std::int32_t age_max = 80;
  std::array<double, 8> fb_l7{0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.3};
  double is_mau_prob = 0.8;
  double homophily_weight = 0.0;  // probability a country is copied from a labeled neighbor
};

// Assigns attributes to every node. Countries spread by a single
// label-propagation pass in random node order: with probability
// homophily_weight a node copies a uniformly chosen already-labeled
// neighbor; nodes whose neighbors are all unlabeled are revisited after the
// rest of the queue, and a full cycle without progress seeds a fresh label
// from the marginal distribution (one seed per connected component).
AttributeTable assign_attributes(const SocialGraph& graph, const AttributeGenConfig& cfg,
                                 std::uint64_t seed);

enum class SocialMode { count, edges, components };

struct AppRegime {
  double alpha = 0.0;  // daily spontaneous adoption probability
  double beta = 0.0;   // per-unit social hazard increment
  SocialMode social_mode = SocialMode::count;
  std::int32_t target_country = -1;  // -1 disables country targeting
  std::int32_t target_age = -1;      // -1 disables age targeting (match: |age-target| <= 5)
  double affinity_boost = 1.0;
  double retention_a = 0.0;    // [0,1)
  double retention_xa = 0.1;   // >= 0; 0 means unbounded lifetimes
  double engagement_rho = 1.0;  // (0,1]
  double reactivation_eps = 0.0;
  int horizon = 0;  // simulated days 0..horizon-1

  void validate() const;
};

// One app's daily adoption/engagement process on the graph. A non-adopter u
// adopts on a given day with probability clamp(alpha*aff(u) + beta*g(u), 0, 1)
// where g(u) depends on social_mode over u's ever-adopter friends:
//   count      -> number of adopter friends
//   edges      -> adopter friends + edges among them
//   components -> connected components among adopter friends
// Adoption day always emits an event. A lifetime L with survival
// exp(-x_a t^(1-a)/(1-a)) bounds engagement: days at offset <= L are active
// independently with probability engagement_rho. Afterwards the user may
// reactivate for single days with probability reactivation_eps when at least
// one friend is active that day.
std::vector<std::pair<UserId, Day>> simulate_app(const SocialGraph& graph,
                                                 const AttributeTable& attributes,
                                                 const AppRegime& regime, std::uint64_t seed);

struct RegimeMix {
  std::string name;
  double weight = 1.0;
  AppRegime regime;
};

struct EcosystemSpec {
  std::uint32_t app_count = 0;
  std::vector<RegimeMix> mixture;
  std::uint64_t seed = 0;
};

struct Ecosystem {
  ActivityLog log;  // app ids 0..app_count-1
  std::vector<std::string> regime_names;
  std::vector<std::uint32_t> regime_index;
};

// Apps simulate independently on per-app seed substreams and may run in
// parallel; the merged result is byte-identical for any worker count.
Ecosystem simulate_ecosystem(const EcosystemSpec& spec, const SocialGraph& graph,
                             const AttributeTable& attributes, unsigned threads = 0);

// `app_id,regime_name` rows, used as ground truth by the planted-regime tests.
void save_ground_truth_csv(const std::string& path, const Ecosystem& eco);

// JSON configuration used by the CLI (gen-graph / gen-ecosystem).
struct EcosystemConfig {
  GraphGenConfig graph;
  std::string graph_path;  // when set, load instead of generating
  AttributeGenConfig attributes;
  std::uint32_t app_count = 0;
  int horizon = 0;  // default for regimes that do not set one
  std::vector<RegimeMix> mixture;
};

GraphGenConfig parse_graph_config(const std::string& json_text);
EcosystemConfig parse_ecosystem_config(const std::string& json_text);

}  // namespace appeco
