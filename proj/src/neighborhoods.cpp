#include "appeco/neighborhoods.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "appeco/rng.hpp"
#include "appeco/util.hpp"

namespace appeco {

const char* to_string(NeighborhoodClass c) {
  switch (c) {
    case NeighborhoodClass::E2: return "E2";
    case NeighborhoodClass::K2: return "K2";
    case NeighborhoodClass::E3: return "E3";
    case NeighborhoodClass::P2uE1: return "P2uE1";
    case NeighborhoodClass::P3: return "P3";
    case NeighborhoodClass::K3: return "K3";
  }
  return "?";
}

NeighborhoodClass classify_neighborhood(const SocialGraph& graph,
                                        std::span<const UserId> friends) {
  if (friends.size() != 2 && friends.size() != 3) {
    throw std::invalid_argument("classify_neighborhood: need 2 or 3 friends");
  }
  int edges = 0;
  for (std::size_t i = 0; i < friends.size(); ++i) {
    for (std::size_t j = i + 1; j < friends.size(); ++j) {
      if (graph.has_edge(friends[i], friends[j])) ++edges;
    }
  }
  if (friends.size() == 2) {
    return edges == 0 ? NeighborhoodClass::E2 : NeighborhoodClass::K2;
  }
  switch (edges) {
    case 0: return NeighborhoodClass::E3;
    case 1: return NeighborhoodClass::P2uE1;
    case 2: return NeighborhoodClass::P3;  // two edges on three nodes always share a node
    default: return NeighborhoodClass::K3;
  }
}

namespace {

// Per-node app-user flags at the snapshot under the chosen user definition,
// plus per-node adoption day (first event) for outcome checks.
struct SnapshotView {
  std::vector<std::uint8_t> is_user;      // per user_def
  std::vector<Day> first_event;           // INT32_MAX when never active
};

SnapshotView snapshot_view(const SocialGraph& graph, const ActivityLog& log, AppId app,
                           Day snapshot, UserDef user_def) {
  if (!log.horizon().contains(snapshot)) {
    throw std::invalid_argument("snapshot day outside log horizon");
  }
  SnapshotView view;
  view.is_user.assign(graph.node_count(), 0);
  view.first_event.assign(graph.node_count(), std::numeric_limits<Day>::max());
  const auto users = log.event_users(app);
  const auto days = log.event_days(app);
  const Day active_lo = snapshot - 29;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const UserId u = users[i];
    if (u >= graph.node_count()) continue;
    const Day d = days[i];
    view.first_event[u] = std::min(view.first_event[u], d);
    if (user_def == UserDef::ever) {
      if (d <= snapshot) view.is_user[u] = 1;
    } else {
      if (d >= active_lo && d <= snapshot) view.is_user[u] = 1;
    }
  }
  return view;
}

bool adopts_in_horizon(const SnapshotView& view, UserId u, Day snapshot, int horizon) {
  // non-users at the snapshot have first_event > snapshot by construction
  return view.first_event[u] > snapshot && view.first_event[u] <= snapshot + Day(horizon);
}

std::optional<double> safe_ratio(const std::optional<double>& num,
                                 const std::optional<double>& den) {
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

}  // namespace

NeighborhoodAdoptionProfile adoption_by_class(const SocialGraph& graph, const ActivityLog& log,
                                              AppId app, Day snapshot, int horizon,
                                              UserDef user_def) {
  if (horizon < 1) throw std::invalid_argument("adoption_by_class: horizon must be >= 1");
  if (!log.horizon().contains(snapshot + Day(horizon))) {
    throw std::invalid_argument("adoption_by_class: snapshot + horizon outside log horizon");
  }
  const auto view = snapshot_view(graph, log, app, snapshot, user_def);

  NeighborhoodAdoptionProfile profile;
  profile.app = app;
  std::vector<UserId> adopter_friends;
  for (UserId u = 0; u < graph.node_count(); ++u) {
    if (view.first_event[u] <= snapshot) continue;  // already a user (any definition)
    adopter_friends.clear();
    for (const UserId v : graph.neighbors(u)) {
      if (view.is_user[v]) {
        adopter_friends.push_back(v);
        if (adopter_friends.size() > 3) break;
      }
    }
    if (adopter_friends.size() != 2 && adopter_friends.size() != 3) continue;
    const auto cls = classify_neighborhood(graph, adopter_friends);
    auto& cell = profile.cells[std::size_t(cls)];
    ++cell.exposed;
    if (adopts_in_horizon(view, u, snapshot, horizon)) ++cell.adopted;
  }
  for (auto& cell : profile.cells) {
    if (cell.exposed > 0) cell.probability = double(cell.adopted) / double(cell.exposed);
  }
  profile.ratio_k2_e2 = safe_ratio(profile.cell(NeighborhoodClass::K2).probability,
                                   profile.cell(NeighborhoodClass::E2).probability);
  profile.ratio_e3_k3 = safe_ratio(profile.cell(NeighborhoodClass::E3).probability,
                                   profile.cell(NeighborhoodClass::K3).probability);
  profile.ratio_p2e1_k3 = safe_ratio(profile.cell(NeighborhoodClass::P2uE1).probability,
                                     profile.cell(NeighborhoodClass::K3).probability);
  profile.ratio_p3_k3 = safe_ratio(profile.cell(NeighborhoodClass::P3).probability,
                                   profile.cell(NeighborhoodClass::K3).probability);
  return profile;
}

std::optional<double> AttributeAdoptionTable::cell_probability(std::size_t i,
                                                               std::size_t j) const {
  const double n = exposed.at(i, j);
  if (n < double(min_cell)) return std::nullopt;
  return adopted.at(i, j) / n;
}

namespace {

struct PooledCell {
  double exposed = 0.0;
  double adopted = 0.0;
  void add(double e, double a) {
    exposed += e;
    adopted += a;
  }
  std::optional<double> probability(int min_cell) const {
    if (exposed < double(min_cell)) return std::nullopt;
    return adopted / exposed;
  }
};

}  // namespace

std::optional<double> AttributeAdoptionTable::ratio_modal_user() const {
  if (exposed.rows < 2) return std::nullopt;
  PooledCell same, other;
  same.add(exposed.at(0, 0), adopted.at(0, 0));
  for (std::size_t j = 1; j < exposed.cols; ++j) other.add(exposed.at(0, j), adopted.at(0, j));
  return safe_ratio(same.probability(min_cell), other.probability(min_cell));
}

std::optional<double> AttributeAdoptionTable::ratio_minority_same_vs_modal() const {
  if (exposed.rows < 2) return std::nullopt;
  PooledCell same, modal;
  for (std::size_t i = 1; i < exposed.rows; ++i) {
    same.add(exposed.at(i, i), adopted.at(i, i));
    modal.add(exposed.at(i, 0), adopted.at(i, 0));
  }
  return safe_ratio(same.probability(min_cell), modal.probability(min_cell));
}

std::optional<double> AttributeAdoptionTable::ratio_minority_same_vs_other() const {
  if (exposed.rows < 3) return std::nullopt;
  PooledCell same, other;
  for (std::size_t i = 1; i < exposed.rows; ++i) {
    same.add(exposed.at(i, i), adopted.at(i, i));
    for (std::size_t j = 1; j < exposed.cols; ++j) {
      if (j != i) other.add(exposed.at(i, j), adopted.at(i, j));
    }
  }
  return safe_ratio(same.probability(min_cell), other.probability(min_cell));
}

AttributeAdoptionTable attribute_adoption(const SocialGraph& graph, const ActivityLog& log,
                                          AppId app, const AttributeTable& attributes,
                                          Day snapshot, int horizon, int min_cell) {
  if (horizon < 1) throw std::invalid_argument("attribute_adoption: horizon must be >= 1");
  if (!log.horizon().contains(snapshot + Day(horizon))) {
    throw std::invalid_argument("attribute_adoption: snapshot + horizon outside log horizon");
  }
  if (attributes.size() != graph.node_count()) {
    throw std::invalid_argument("attribute_adoption: attribute table size mismatch");
  }
  const auto view = snapshot_view(graph, log, app, snapshot, UserDef::ever);

  // country index: modal among the app's users at the snapshot is 0
  std::map<std::int32_t, std::uint64_t> user_counts;
  for (UserId u = 0; u < graph.node_count(); ++u) {
    if (view.is_user[u]) ++user_counts[attributes[u].country];
  }
  AttributeAdoptionTable table;
  table.app = app;
  table.min_cell = min_cell;
  if (user_counts.empty()) return table;

  std::vector<std::pair<std::int32_t, std::uint64_t>> by_count(user_counts.begin(),
                                                               user_counts.end());
  std::stable_sort(by_count.begin(), by_count.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::map<std::int32_t, std::size_t> value_to_index;
  for (const auto& [value, count] : by_count) {
    table.index_to_value.push_back(value);
    value_to_index[value] = table.index_to_value.size() - 1;
  }
  table.modal_value = table.index_to_value.front();

  const std::size_t k = table.index_to_value.size();
  table.exposed = Grid(k, k);
  table.adopted = Grid(k, k);
  for (UserId u = 0; u < graph.node_count(); ++u) {
    if (view.first_event[u] <= snapshot) continue;
    UserId the_friend = 0;
    std::uint32_t adopter_friends = 0;
    for (const UserId v : graph.neighbors(u)) {
      if (view.is_user[v]) {
        the_friend = v;
        if (++adopter_friends > 1) break;
      }
    }
    if (adopter_friends != 1) continue;
    const auto it_u = value_to_index.find(attributes[u].country);
    const auto it_f = value_to_index.find(attributes[the_friend].country);
    if (it_u == value_to_index.end() || it_f == value_to_index.end()) continue;
    table.exposed.at(it_u->second, it_f->second) += 1.0;
    if (adopts_in_horizon(view, u, snapshot, horizon)) {
      table.adopted.at(it_u->second, it_f->second) += 1.0;
    }
  }
  return table;
}

namespace {

AgeOffsetCurve build_curve(std::vector<std::pair<double, double>>& samples, int n_boot,
                           std::uint64_t seed, int bins) {
  // equal-population bins over the offset axis
  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  AgeOffsetCurve curve;
  const std::size_t n = samples.size();
  for (int b = 0; b < bins; ++b) {
    const std::size_t lo = n * std::size_t(b) / std::size_t(bins);
    const std::size_t hi = n * std::size_t(b + 1) / std::size_t(bins);
    std::vector<double> outcomes;
    outcomes.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) outcomes.push_back(samples[i].second);
    curve.bin_lo.push_back(samples[lo].first);
    curve.bin_hi.push_back(samples[hi - 1].first);
    curve.bands.push_back(bootstrap_mean_ci(outcomes, n_boot, mix_seed(seed, std::uint64_t(b))));
  }
  return curve;
}

}  // namespace

AgeOffsetCurves age_offset_curves(const SocialGraph& graph, const ActivityLog& log, AppId app,
                                  const AttributeTable& attributes, Day snapshot, int horizon,
                                  int n_boot, std::uint64_t seed, int min_bin_size) {
  constexpr int kBins = 20;
  if (attributes.size() != graph.node_count()) {
    throw std::invalid_argument("age_offset_curves: attribute table size mismatch");
  }
  const auto view = snapshot_view(graph, log, app, snapshot, UserDef::ever);

  std::vector<double> user_ages;
  for (UserId u = 0; u < graph.node_count(); ++u) {
    if (view.is_user[u]) user_ages.push_back(double(attributes[u].age));
  }
  if (user_ages.empty()) throw std::invalid_argument("age_offset_curves: app has no users");
  const double median_age = median_of(user_ages);

  std::vector<std::pair<double, double>> friend_samples;  // (offset, adopted)
  std::vector<std::pair<double, double>> user_samples;
  for (UserId u = 0; u < graph.node_count(); ++u) {
    if (view.first_event[u] <= snapshot) continue;
    UserId the_friend = 0;
    std::uint32_t adopter_friends = 0;
    for (const UserId v : graph.neighbors(u)) {
      if (view.is_user[v]) {
        the_friend = v;
        if (++adopter_friends > 1) break;
      }
    }
    if (adopter_friends != 1) continue;
    const double outcome = adopts_in_horizon(view, u, snapshot, horizon) ? 1.0 : 0.0;
    friend_samples.emplace_back(double(attributes[the_friend].age) - median_age, outcome);
    user_samples.emplace_back(double(attributes[u].age) - median_age, outcome);
  }
  if (friend_samples.size() < std::size_t(kBins) * std::size_t(min_bin_size)) {
    throw std::invalid_argument("age_offset_curves: too few exposed users to form 20 bins");
  }
  AgeOffsetCurves curves;
  curves.friend_offset = build_curve(friend_samples, n_boot, mix_seed(seed, 0xF0), kBins);
  curves.user_offset = build_curve(user_samples, n_boot, mix_seed(seed, 0xF1), kBins);
  return curves;
}

void save_class_profile_csv(const std::string& path,
                            std::span<const NeighborhoodAdoptionProfile> profiles) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write profile file: " + path);
  out << "app_id,class,exposed,adopted,prob\n";
  constexpr NeighborhoodClass order[] = {NeighborhoodClass::E2,    NeighborhoodClass::K2,
                                         NeighborhoodClass::E3,    NeighborhoodClass::P2uE1,
                                         NeighborhoodClass::P3,    NeighborhoodClass::K3};
  for (const auto& p : profiles) {
    for (const auto cls : order) {
      const auto& cell = p.cell(cls);
      out << p.app << ',' << to_string(cls) << ',' << cell.exposed << ',' << cell.adopted << ','
          << (cell.probability ? format_double(*cell.probability) : std::string("nan")) << '\n';
    }
  }
}

void save_age_offset_csv(const std::string& path, const AgeOffsetCurves& curves) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write age offset file: " + path);
  out << "curve,bin,offset_lo,offset_hi,center,lo68,hi68,lo95,hi95,lo997,hi997\n";
  auto dump = [&](const char* name, const AgeOffsetCurve& c) {
    for (std::size_t b = 0; b < c.bands.size(); ++b) {
      const auto& bb = c.bands[b];
      out << name << ',' << b << ',' << format_double(c.bin_lo[b]) << ','
          << format_double(c.bin_hi[b]) << ',' << format_double(bb.center) << ','
          << format_double(bb.lo68) << ',' << format_double(bb.hi68) << ','
          << format_double(bb.lo95) << ',' << format_double(bb.hi95) << ','
          << format_double(bb.lo997) << ',' << format_double(bb.hi997) << '\n';
    }
  };
  dump("friend_offset", curves.friend_offset);
  dump("user_offset", curves.user_offset);
}

}  // namespace appeco
