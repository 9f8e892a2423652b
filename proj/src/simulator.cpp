#include "appeco/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "appeco/rng.hpp"
#include "appeco/util.hpp"

namespace appeco {

namespace {

// Named RNG substreams hanging off a master seed.
constexpr std::uint64_t kStreamGraph = 0x6772;      // graph generation
constexpr std::uint64_t kStreamAttr = 0x6174;       // attribute assignment
constexpr std::uint64_t kStreamRegime = 0x7267;     // regime mixture draws
constexpr std::uint64_t kStreamApp = 0x6170;        // per-app simulation

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void Categorical::validate() {
  if (values.empty() || values.size() != probs.size()) {
    throw std::invalid_argument("categorical distribution: values/probs mismatch");
  }
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("categorical distribution: negative probability");
    total += p;
  }
  if (total <= 0.0) throw std::invalid_argument("categorical distribution: zero mass");
  for (double& p : probs) p /= total;
}

std::int32_t Categorical::sample(Rng& rng) const {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return values[i];
  }
  return values.back();
}

// ---------------------------------------------------------------------------
// Graph generation

namespace {

SocialGraph finish_graph(std::uint32_t n, std::vector<std::pair<UserId, UserId>> edges,
                         std::uint32_t degree_cap, std::uint64_t dropped,
                         std::uint64_t* dropped_by_cap) {
  if (dropped_by_cap) *dropped_by_cap = dropped;
  return SocialGraph(n, std::move(edges), degree_cap);
}

SocialGraph gen_erdos_renyi(const GraphGenConfig& cfg, std::uint64_t* dropped_by_cap) {
  const std::uint32_t n = cfg.node_count;
  const double p = cfg.edge_prob;
  Rng rng(mix_seed(cfg.seed, kStreamGraph));
  std::vector<std::pair<UserId, UserId>> edges;
  std::vector<std::uint32_t> degree(n, 0);
  std::uint64_t dropped = 0;
  auto try_add = [&](UserId a, UserId b) {
    if (degree[a] >= cfg.degree_cap || degree[b] >= cfg.degree_cap) {
      ++dropped;
      return;
    }
    ++degree[a];
    ++degree[b];
    edges.emplace_back(a, b);
  };
  if (p >= 1.0) {
    for (UserId v = 1; v < n; ++v) {
      for (UserId w = 0; w < v; ++w) try_add(v, w);
    }
  } else if (p > 0.0) {
    // skip-based G(n,p): walk the (v,w) pair enumeration by geometric gaps
    std::uint64_t v = 1, w = std::uint64_t(-1);
    while (v < n) {
      const std::uint64_t skip = rng.geometric_skip(p);
      if (skip == std::numeric_limits<std::uint64_t>::max()) break;
      w += 1 + skip;
      while (v < n && w >= v) {
        w -= v;
        ++v;
      }
      if (v < n) try_add(UserId(v), UserId(w));
    }
  }
  return finish_graph(n, std::move(edges), cfg.degree_cap, dropped, dropped_by_cap);
}

SocialGraph gen_watts_strogatz(const GraphGenConfig& cfg, std::uint64_t* dropped_by_cap) {
  const std::uint32_t n = cfg.node_count;
  const std::uint32_t k = cfg.ring_degree;
  if (k % 2 != 0 || k == 0) throw std::invalid_argument("watts_strogatz: ring_degree must be even");
  if (k >= n) throw std::invalid_argument("watts_strogatz: ring_degree must be < node_count");
  Rng rng(mix_seed(cfg.seed, kStreamGraph));
  std::unordered_set<std::uint64_t> present;
  auto key = [](UserId a, UserId b) {
    if (a > b) std::swap(a, b);
    return (std::uint64_t(a) << 32) | b;
  };
  std::vector<std::pair<UserId, UserId>> edges;
  std::vector<std::uint32_t> degree(n, 0);
  for (std::uint32_t j = 1; j <= k / 2; ++j) {
    for (UserId i = 0; i < n; ++i) {
      const UserId t = UserId((i + j) % n);
      UserId a = i, b = t;
      if (cfg.rewire_prob > 0.0 && rng.bernoulli(cfg.rewire_prob)) {
        // keep endpoint i, rewire the far end; give up after a few rejections
        for (int attempt = 0; attempt < 16; ++attempt) {
          const UserId cand = UserId(rng.below(n));
          if (cand == i || present.count(key(i, cand))) continue;
          b = cand;
          break;
        }
        if (present.count(key(a, b))) continue;  // rejections exhausted on a dense node
      }
      if (present.count(key(a, b))) continue;
      if (degree[a] >= cfg.degree_cap || degree[b] >= cfg.degree_cap) continue;
      present.insert(key(a, b));
      ++degree[a];
      ++degree[b];
      edges.emplace_back(a, b);
    }
  }
  const std::uint64_t dropped = std::uint64_t(n) * (k / 2) - edges.size();
  return finish_graph(n, std::move(edges), cfg.degree_cap, dropped, dropped_by_cap);
}

SocialGraph gen_barabasi_albert(const GraphGenConfig& cfg, std::uint64_t* dropped_by_cap) {
  const std::uint32_t n = cfg.node_count;
  const std::uint32_t m = cfg.attach_degree;
  if (m == 0) throw std::invalid_argument("barabasi_albert: attach_degree must be >= 1");
  if (m >= n) throw std::invalid_argument("barabasi_albert: attach_degree must be < node_count");
  Rng rng(mix_seed(cfg.seed, kStreamGraph));
  std::vector<std::pair<UserId, UserId>> edges;
  std::vector<std::uint32_t> degree(n, 0);
  // endpoints of every edge; sampling from it is degree-proportional
  std::vector<UserId> endpoints;
  endpoints.reserve(std::size_t(2) * m * n);
  std::uint64_t dropped = 0;
  for (UserId v = m; v < n; ++v) {
    std::vector<UserId> targets;
    targets.reserve(m);
    if (v == m) {
      for (UserId t = 0; t < m; ++t) targets.push_back(t);
    } else {
      int attempts = 0;
      while (targets.size() < m && attempts < 1000) {
        ++attempts;
        const UserId t = endpoints[std::size_t(rng.below(endpoints.size()))];
        if (std::find(targets.begin(), targets.end(), t) != targets.end()) continue;
        if (degree[t] >= cfg.degree_cap) {
          ++dropped;
          continue;
        }
        targets.push_back(t);
      }
    }
    for (const UserId t : targets) {
      ++degree[v];
      ++degree[t];
      edges.emplace_back(v, t);
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
  return finish_graph(n, std::move(edges), cfg.degree_cap, dropped, dropped_by_cap);
}

}  // namespace

SocialGraph generate_graph(const GraphGenConfig& cfg, std::uint64_t* dropped_by_cap) {
  if (cfg.node_count < 2) throw std::invalid_argument("generate_graph: node_count must be >= 2");
  if (cfg.edge_prob < 0.0 || cfg.edge_prob > 1.0 || cfg.rewire_prob < 0.0 ||
      cfg.rewire_prob > 1.0) {
    throw std::invalid_argument("generate_graph: probabilities must lie in [0,1]");
  }
  switch (cfg.model) {
    case GraphModel::erdos_renyi:
      return gen_erdos_renyi(cfg, dropped_by_cap);
    case GraphModel::watts_strogatz:
      return gen_watts_strogatz(cfg, dropped_by_cap);
    case GraphModel::barabasi_albert:
      return gen_barabasi_albert(cfg, dropped_by_cap);
  }
  throw std::invalid_argument("generate_graph: unknown model");
}

// ---------------------------------------------------------------------------
// Attribute assignment

AttributeTable assign_attributes(const SocialGraph& graph, const AttributeGenConfig& cfg,
                                 std::uint64_t seed) {
  AttributeGenConfig c = cfg;
  c.countries.validate();
  c.genders.validate();
  if (c.age_min < 0 || c.age_max < c.age_min) {
    throw std::invalid_argument("assign_attributes: bad age range");
  }
  if (c.homophily_weight < 0.0 || c.homophily_weight > 1.0) {
    throw std::invalid_argument("assign_attributes: homophily_weight must lie in [0,1]");
  }
  double l7_total = 0.0;
  for (double p : c.fb_l7) {
    if (p < 0.0) throw std::invalid_argument("assign_attributes: negative fb_l7 mass");
    l7_total += p;
  }
  if (l7_total <= 0.0) throw std::invalid_argument("assign_attributes: empty fb_l7");
  for (double& p : c.fb_l7) p /= l7_total;

  const std::uint32_t n = graph.node_count();
  Rng rng(mix_seed(seed, kStreamAttr));

  // countries first: one label-propagation pass over a shuffled queue
  constexpr std::int32_t kUnlabeled = std::numeric_limits<std::int32_t>::min();
  std::vector<std::int32_t> country(n, kUnlabeled);
  std::vector<UserId> order(n);
  for (UserId u = 0; u < n; ++u) order[u] = u;
  rng.shuffle(order);
  std::deque<UserId> queue(order.begin(), order.end());
  std::vector<std::uint8_t> decided(n, 0);
  std::vector<std::uint8_t> wants_copy(n, 0);
  std::size_t stall_budget = 0;  // deferrals allowed before force-seeding
  std::vector<UserId> labeled_nb;
  while (!queue.empty()) {
    const UserId u = queue.front();
    queue.pop_front();
    if (!decided[u]) {
      decided[u] = 1;
      wants_copy[u] = c.homophily_weight > 0.0 && rng.bernoulli(c.homophily_weight) ? 1 : 0;
    }
    bool labeled = false;
    if (wants_copy[u]) {
      labeled_nb.clear();
      for (const UserId v : graph.neighbors(u)) {
        if (country[v] != kUnlabeled) labeled_nb.push_back(v);
      }
      if (!labeled_nb.empty()) {
        country[u] = country[labeled_nb[std::size_t(rng.below(labeled_nb.size()))]];
        labeled = true;
      } else if (stall_budget == 0) {
        country[u] = c.countries.sample(rng);  // fresh component seed
        labeled = true;
      } else {
        --stall_budget;
        queue.push_back(u);
      }
    } else {
      country[u] = c.countries.sample(rng);
      labeled = true;
    }
    if (labeled) stall_budget = queue.size();
  }

  std::vector<UserAttributes> rows(n);
  Categorical l7{{0, 1, 2, 3, 4, 5, 6, 7},
                 {c.fb_l7[0], c.fb_l7[1], c.fb_l7[2], c.fb_l7[3], c.fb_l7[4], c.fb_l7[5],
                  c.fb_l7[6], c.fb_l7[7]}};
  for (UserId u = 0; u < n; ++u) {
    rows[u].country = country[u];
    rows[u].gender = c.genders.sample(rng);
    rows[u].age = c.age_min + std::int32_t(rng.below(std::uint64_t(c.age_max - c.age_min) + 1));
    rows[u].fb_active_days_of_7 = l7.sample(rng);
    rows[u].is_mau = rng.bernoulli(c.is_mau_prob);
  }
  return AttributeTable(std::move(rows));
}

// ---------------------------------------------------------------------------
// App simulation

void AppRegime::validate() const {
  auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in01(alpha) || !in01(beta) || !in01(reactivation_eps)) {
    throw std::invalid_argument("regime: alpha, beta, reactivation_eps must lie in [0,1]");
  }
  if (retention_a < 0.0 || retention_a >= 1.0) {
    throw std::invalid_argument("regime: retention_a must lie in [0,1)");
  }
  if (retention_xa < 0.0) throw std::invalid_argument("regime: retention_xa must be >= 0");
  if (engagement_rho <= 0.0 || engagement_rho > 1.0) {
    throw std::invalid_argument("regime: engagement_rho must lie in (0,1]");
  }
  if (affinity_boost < 1.0) throw std::invalid_argument("regime: affinity_boost must be >= 1");
  if (horizon < 1) throw std::invalid_argument("regime: horizon must be >= 1");
}

namespace {

// Non-adopters with identical hazard, walked with geometric skips so a day
// costs O(successes) instead of O(members).
struct Cohort {
  double hazard = 0.0;
  std::vector<UserId> members;
};

struct CohortIndex {
  std::vector<Cohort> cohorts;
  std::unordered_map<std::uint64_t, std::uint32_t> by_key;
  // per-user location
  std::vector<std::uint32_t> cohort_of;
  std::vector<std::uint32_t> pos_in;

  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  explicit CohortIndex(std::uint32_t n) : cohort_of(n, kNone), pos_in(n, 0) {}

  std::uint32_t ensure(std::uint64_t key, double hazard) {
    const auto it = by_key.find(key);
    if (it != by_key.end()) return it->second;
    const auto idx = std::uint32_t(cohorts.size());
    cohorts.push_back({hazard, {}});
    by_key.emplace(key, idx);
    return idx;
  }

  void insert(UserId u, std::uint32_t cohort) {
    cohort_of[u] = cohort;
    pos_in[u] = std::uint32_t(cohorts[cohort].members.size());
    cohorts[cohort].members.push_back(u);
  }

  void remove(UserId u) {
    const std::uint32_t ci = cohort_of[u];
    if (ci == kNone) return;
    auto& mem = cohorts[ci].members;
    const std::uint32_t p = pos_in[u];
    const UserId moved = mem.back();
    mem[p] = moved;
    pos_in[moved] = p;
    mem.pop_back();
    cohort_of[u] = kNone;
  }
};

double draw_lifetime(Rng& rng, double a, double xa) {
  if (xa <= 0.0) return std::numeric_limits<double>::infinity();
  const double e = rng.exponential();
  return std::pow((1.0 - a) * e / xa, 1.0 / (1.0 - a));
}

}  // namespace

std::vector<std::pair<UserId, Day>> simulate_app(const SocialGraph& graph,
                                                 const AttributeTable& attributes,
                                                 const AppRegime& regime, std::uint64_t seed) {
  regime.validate();
  const std::uint32_t n = graph.node_count();
  if (attributes.size() != n) {
    throw std::invalid_argument("simulate_app: attribute table size mismatch");
  }
  Rng rng(mix_seed(seed, kStreamApp));

  const bool targeting = regime.target_country >= 0 || regime.target_age >= 0;
  auto affinity_flag = [&](UserId u) -> bool {
    if (!targeting) return false;
    const auto& a = attributes[u];
    if (regime.target_country >= 0 && a.country != regime.target_country) return false;
    if (regime.target_age >= 0 && std::abs(a.age - regime.target_age) > 5) return false;
    return true;
  };

  enum : std::uint8_t { kNever = 0, kAlive = 1, kDead = 2 };
  std::vector<std::uint8_t> status(n, kNever);
  std::vector<std::uint32_t> adopter_friends(n, 0);
  std::vector<double> life_end(n, 0.0);
  std::vector<std::uint8_t> aff(n, 0);
  for (UserId u = 0; u < n; ++u) aff[u] = affinity_flag(u) ? 1 : 0;

  const bool bucket_by_count = regime.social_mode == SocialMode::count;
  CohortIndex cohorts(n);
  auto cohort_key = [&](bool boosted, std::uint32_t cnt) {
    return (std::uint64_t(cnt) << 1) | std::uint64_t(boosted ? 1 : 0);
  };
  auto cohort_hazard = [&](bool boosted, std::uint32_t cnt) {
    const double a = regime.alpha * (boosted ? regime.affinity_boost : 1.0);
    return clamp01(a + regime.beta * double(cnt));
  };
  // exposed users handled individually in the structural modes
  std::vector<UserId> exposed;
  std::vector<std::uint32_t> exposed_pos(n, CohortIndex::kNone);
  auto exposed_insert = [&](UserId u) {
    exposed_pos[u] = std::uint32_t(exposed.size());
    exposed.push_back(u);
  };
  auto exposed_remove = [&](UserId u) {
    const std::uint32_t p = exposed_pos[u];
    if (p == CohortIndex::kNone) return;
    const UserId moved = exposed.back();
    exposed[p] = moved;
    exposed_pos[moved] = p;
    exposed.pop_back();
    exposed_pos[u] = CohortIndex::kNone;
  };

  for (UserId u = 0; u < n; ++u) {
    const auto ci = cohorts.ensure(cohort_key(aff[u], 0), cohort_hazard(aff[u], 0));
    cohorts.insert(u, ci);
  }

  // moves a non-adopter to the container matching its new adopter-friend count
  auto reindex_nonadopter = [&](UserId u) {
    const std::uint32_t cnt = adopter_friends[u];
    if (bucket_by_count || cnt == 0) {
      cohorts.remove(u);
      exposed_remove(u);
      const auto ci = cohorts.ensure(cohort_key(aff[u], cnt), cohort_hazard(aff[u], cnt));
      cohorts.insert(u, ci);
    } else {
      cohorts.remove(u);
      if (exposed_pos[u] == CohortIndex::kNone) exposed_insert(u);
    }
  };

  // g(u) for the structural modes; adopter friends collected on demand
  std::vector<UserId> adopter_nb;
  auto structural_g = [&](UserId u) -> double {
    adopter_nb.clear();
    for (const UserId v : graph.neighbors(u)) {
      if (status[v] != kNever) adopter_nb.push_back(v);
    }
    const std::size_t k = adopter_nb.size();
    if (k == 0) return 0.0;
    if (regime.social_mode == SocialMode::edges) {
      std::size_t within = 0;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
          if (graph.has_edge(adopter_nb[i], adopter_nb[j])) ++within;
        }
      }
      return double(k) + double(within);
    }
    // connected components among adopter friends (union-find over k nodes)
    std::vector<std::uint32_t> parent(k);
    for (std::uint32_t i = 0; i < k; ++i) parent[i] = std::uint32_t(i);
    auto find = [&parent](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::size_t comps = k;
    for (std::uint32_t i = 0; i < k; ++i) {
      for (std::uint32_t j = i + 1; j < k; ++j) {
        if (graph.has_edge(adopter_nb[i], adopter_nb[j])) {
          const auto ri = find(i), rj = find(j);
          if (ri != rj) {
            parent[ri] = rj;
            --comps;
          }
        }
      }
    }
    return double(comps);
  };

  std::vector<std::pair<UserId, Day>> events;
  std::vector<UserId> alive;
  std::vector<UserId> dead;
  std::vector<std::uint8_t> active_today(n, 0);
  std::vector<UserId> touched;
  std::vector<UserId> new_adopters;
  std::vector<UserId> still_alive;

  for (Day day = 0; day < Day(regime.horizon); ++day) {
    // 1. adoption draws against start-of-day adopter sets
    new_adopters.clear();
    for (std::uint32_t ci = 0; ci < cohorts.cohorts.size(); ++ci) {
      const auto& cohort = cohorts.cohorts[ci];
      if (cohort.members.empty() || cohort.hazard <= 0.0) continue;
      std::uint64_t i = rng.geometric_skip(cohort.hazard);
      while (i < cohort.members.size()) {
        new_adopters.push_back(cohort.members[i]);
        const std::uint64_t skip = rng.geometric_skip(cohort.hazard);
        if (skip == std::numeric_limits<std::uint64_t>::max()) break;
        i += 1 + skip;
      }
    }
    if (!bucket_by_count) {
      const double base_cap = 1.0;  // hazard already capped at 1 inside clamp
      (void)base_cap;
      for (const UserId u : exposed) {
        const double base = regime.alpha * (aff[u] ? regime.affinity_boost : 1.0);
        double hazard;
        if (regime.beta <= 0.0) {
          hazard = clamp01(base);
        } else if (base + regime.beta * double(adopter_friends[u]) >= 1.0 &&
                   regime.social_mode == SocialMode::edges) {
          hazard = 1.0;  // edges mode only grows g beyond the count
        } else {
          hazard = clamp01(base + regime.beta * structural_g(u));
        }
        if (rng.bernoulli(hazard)) new_adopters.push_back(u);
      }
    }

    // 2. engagement of existing adopters (before today's adopters join)
    touched.clear();
    still_alive.clear();
    still_alive.reserve(alive.size());
    for (const UserId u : alive) {
      if (double(day) > life_end[u]) {
        status[u] = kDead;
        dead.push_back(u);
        continue;
      }
      still_alive.push_back(u);
      if (rng.bernoulli(regime.engagement_rho)) {
        events.emplace_back(u, day);
        active_today[u] = 1;
        touched.push_back(u);
      }
    }
    alive.swap(still_alive);

    // 3. today's adopters: guaranteed event, lifetime drawn at adoption
    for (const UserId u : new_adopters) {
      status[u] = kAlive;
      life_end[u] = double(day) + draw_lifetime(rng, regime.retention_a, regime.retention_xa);
      events.emplace_back(u, day);
      active_today[u] = 1;
      touched.push_back(u);
      alive.push_back(u);
      cohorts.remove(u);
      exposed_remove(u);
    }
    for (const UserId u : new_adopters) {
      for (const UserId v : graph.neighbors(u)) {
        if (status[v] != kNever) continue;
        ++adopter_friends[v];
        reindex_nonadopter(v);
      }
    }

    // 4. reactivation of dead users; checks today's organically active set,
    //    so reactivated users do not trigger further reactivations today
    if (regime.reactivation_eps > 0.0 && !dead.empty()) {
      std::uint64_t i = rng.geometric_skip(regime.reactivation_eps);
      while (i < dead.size()) {
        const UserId u = dead[i];
        for (const UserId v : graph.neighbors(u)) {
          if (active_today[v]) {
            events.emplace_back(u, day);
            break;
          }
        }
        const std::uint64_t skip = rng.geometric_skip(regime.reactivation_eps);
        if (skip == std::numeric_limits<std::uint64_t>::max()) break;
        i += 1 + skip;
      }
    }

    for (const UserId u : touched) active_today[u] = 0;
  }
  return events;
}

Ecosystem simulate_ecosystem(const EcosystemSpec& spec, const SocialGraph& graph,
                             const AttributeTable& attributes, unsigned threads) {
  if (spec.mixture.empty() && spec.app_count > 0) {
    throw std::invalid_argument("simulate_ecosystem: empty regime mixture");
  }
  double total = 0.0;
  for (const auto& m : spec.mixture) {
    if (m.weight <= 0.0) throw std::invalid_argument("simulate_ecosystem: weights must be > 0");
    total += m.weight;
  }
  int horizon = 1;
  for (const auto& m : spec.mixture) {
    m.regime.validate();
    horizon = std::max(horizon, m.regime.horizon);
  }

  Ecosystem eco;
  eco.log = ActivityLog(DayRange{0, Day(horizon) - 1});
  eco.regime_index.resize(spec.app_count);
  eco.regime_names.resize(spec.app_count);

  Rng regime_rng(mix_seed(spec.seed, kStreamRegime));
  for (std::uint32_t i = 0; i < spec.app_count; ++i) {
    const double u = regime_rng.uniform01() * total;
    double acc = 0.0;
    std::uint32_t pick = std::uint32_t(spec.mixture.size()) - 1;
    for (std::uint32_t j = 0; j < spec.mixture.size(); ++j) {
      acc += spec.mixture[j].weight;
      if (u < acc) {
        pick = j;
        break;
      }
    }
    eco.regime_index[i] = pick;
    eco.regime_names[i] = spec.mixture[pick].name;
  }

  std::vector<std::vector<std::pair<UserId, Day>>> per_app(spec.app_count);
  parallel_for(spec.app_count, threads, [&](std::size_t i) {
    const auto& regime = spec.mixture[eco.regime_index[i]].regime;
    per_app[i] = simulate_app(graph, attributes, regime, mix_seed(spec.seed, kStreamApp, i));
  });
  for (std::uint32_t i = 0; i < spec.app_count; ++i) {
    eco.log.add_events(AppId(i), std::move(per_app[i]));
  }
  return eco;
}

void save_ground_truth_csv(const std::string& path, const Ecosystem& eco) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write ground truth file: " + path);
  out << "app_id,regime_name\n";
  for (std::size_t i = 0; i < eco.regime_names.size(); ++i) {
    out << i << ',' << eco.regime_names[i] << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace {

using nlohmann::json;

GraphModel parse_model(const std::string& name) {
  if (name == "erdos_renyi") return GraphModel::erdos_renyi;
  if (name == "watts_strogatz") return GraphModel::watts_strogatz;
  if (name == "barabasi_albert") return GraphModel::barabasi_albert;
  throw ParseError("unknown graph model: " + name);
}

SocialMode parse_social_mode(const std::string& name) {
  if (name == "count") return SocialMode::count;
  if (name == "edges") return SocialMode::edges;
  if (name == "components") return SocialMode::components;
  throw ParseError("unknown social_mode: " + name);
}

GraphGenConfig graph_config_from(const json& j) {
  GraphGenConfig cfg;
  cfg.model = parse_model(j.at("model").get<std::string>());
  cfg.node_count = j.at("node_count").get<std::uint32_t>();
  cfg.edge_prob = j.value("edge_prob", 0.0);
  cfg.ring_degree = j.value("ring_degree", 0u);
  cfg.rewire_prob = j.value("rewire_prob", 0.0);
  cfg.attach_degree = j.value("attach_degree", 0u);
  cfg.degree_cap = j.value("degree_cap", SocialGraph::kDefaultDegreeCap);
  return cfg;
}

Categorical categorical_from(const json& j) {
  Categorical c;
  c.values = j.at("values").get<std::vector<std::int32_t>>();
  c.probs = j.at("probs").get<std::vector<double>>();
  c.validate();
  return c;
}

AppRegime regime_from(const json& j, int default_horizon) {
  AppRegime r;
  r.alpha = j.value("alpha", 0.0);
  r.beta = j.value("beta", 0.0);
  r.social_mode = parse_social_mode(j.value("social_mode", std::string("count")));
  r.target_country = j.value("target_country", -1);
  r.target_age = j.value("target_age", -1);
  r.affinity_boost = j.value("affinity_boost", 1.0);
  r.retention_a = j.value("retention_a", 0.0);
  r.retention_xa = j.value("retention_xa", 0.1);
  r.engagement_rho = j.value("engagement_rho", 1.0);
  r.reactivation_eps = j.value("reactivation_eps", 0.0);
  r.horizon = j.value("horizon", default_horizon);
  return r;
}

}  // namespace

GraphGenConfig parse_graph_config(const std::string& json_text) {
  try {
    return graph_config_from(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("graph config: ") + e.what());
  }
}

EcosystemConfig parse_ecosystem_config(const std::string& json_text) {
  try {
    const json j = json::parse(json_text);
    EcosystemConfig cfg;
    if (j.contains("graph_path")) {
      cfg.graph_path = j.at("graph_path").get<std::string>();
    } else {
      cfg.graph = graph_config_from(j.at("graph"));
    }
    if (j.contains("attributes")) {
      const json& a = j.at("attributes");
      if (a.contains("countries")) cfg.attributes.countries = categorical_from(a.at("countries"));
      if (a.contains("genders")) cfg.attributes.genders = categorical_from(a.at("genders"));
      cfg.attributes.age_min = a.value("age_min", cfg.attributes.age_min);
      cfg.attributes.age_max = a.value("age_max", cfg.attributes.age_max);
      if (a.contains("fb_l7")) {
        const auto v = a.at("fb_l7").get<std::vector<double>>();
        if (v.size() != 8) throw ParseError("attributes.fb_l7 must list 8 probabilities");
        std::copy(v.begin(), v.end(), cfg.attributes.fb_l7.begin());
      }
      cfg.attributes.is_mau_prob = a.value("is_mau_prob", cfg.attributes.is_mau_prob);
      cfg.attributes.homophily_weight = a.value("homophily", cfg.attributes.homophily_weight);
    }
    cfg.app_count = j.at("app_count").get<std::uint32_t>();
    cfg.horizon = j.value("horizon", 0);
    for (const json& rj : j.at("regimes")) {
      RegimeMix mix;
      mix.name = rj.at("name").get<std::string>();
      mix.weight = rj.value("weight", 1.0);
      mix.regime = regime_from(rj, cfg.horizon);
      cfg.mixture.push_back(std::move(mix));
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(std::string("ecosystem config: ") + e.what());
  }
}

}  // namespace appeco
