#include "appeco/sociality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "appeco/util.hpp"

namespace appeco {

namespace {

std::vector<std::uint8_t> adopter_flags(const ActivityLog& log, const SocialGraph& graph,
                                        AppId app, Day as_of) {
  if (!log.horizon().contains(as_of)) {
    throw std::invalid_argument("as_of day outside log horizon");
  }
  std::vector<std::uint8_t> is_user(graph.node_count(), 0);
  const auto users = log.event_users(app);
  const auto days = log.event_days(app);
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (days[i] <= as_of && users[i] < graph.node_count()) is_user[users[i]] = 1;
  }
  return is_user;
}

}  // namespace

double popularity(const ActivityLog& log, const SocialGraph& graph, AppId app, Day as_of) {
  const auto is_user = adopter_flags(log, graph, app, as_of);
  std::size_t adopters = 0;
  for (const auto f : is_user) adopters += f;
  return graph.node_count() == 0 ? 0.0 : double(adopters) / double(graph.node_count());
}

SocialityEstimate sociality(const ActivityLog& log, const SocialGraph& graph, AppId app,
                            Day as_of) {
  const auto is_user = adopter_flags(log, graph, app, as_of);
  const std::uint32_t n = graph.node_count();

  std::uint64_t with_user_friend = 0;
  std::uint64_t users_with_user_friend = 0;
  std::uint64_t user_count = 0;
  double fraction_sum = 0.0;
  for (UserId u = 0; u < n; ++u) {
    std::uint32_t user_friends = 0;
    for (const UserId v : graph.neighbors(u)) user_friends += is_user[v];
    if (user_friends > 0) {
      ++with_user_friend;
      if (is_user[u]) ++users_with_user_friend;
    }
    if (is_user[u]) {
      ++user_count;
      const auto deg = graph.degree(u);
      if (deg > 0) fraction_sum += double(user_friends) / double(deg);
    }
  }

  SocialityEstimate est;
  if (with_user_friend > 0) {
    est.conditional = double(users_with_user_friend) / double(with_user_friend);
  }
  if (user_count > 0) {
    est.mean_fraction = fraction_sum / double(user_count);
  }
  return est;
}

SocialityPoint sociality_point(const ActivityLog& log, const SocialGraph& graph, AppId app,
                               Day as_of) {
  SocialityPoint pt;
  pt.app = app;
  const auto is_user = adopter_flags(log, graph, app, as_of);
  std::uint32_t adopters = 0;
  for (const auto f : is_user) adopters += f;
  pt.n_users = adopters;
  pt.popularity = graph.node_count() == 0 ? 0.0 : double(adopters) / double(graph.node_count());
  const auto est = sociality(log, graph, app, as_of);
  pt.sociality_conditional = est.conditional;
  pt.sociality_meanfrac = est.mean_fraction;
  if (pt.popularity > 0.0 && est.conditional.has_value()) {
    pt.ratio = *est.conditional / pt.popularity;
  }
  return pt;
}

namespace {

std::vector<double> log_edges(double lo, double hi, int bins) {
  // widen degenerate ranges a hair so max values land in the last bin
  double llo = std::log10(lo);
  double lhi = std::log10(hi);
  if (lhi - llo < 1e-12) {
    llo -= 0.5;
    lhi += 0.5;
  }
  std::vector<double> edges(std::size_t(bins) + 1);
  for (int i = 0; i <= bins; ++i) {
    edges[std::size_t(i)] = std::pow(10.0, llo + (lhi - llo) * double(i) / double(bins));
  }
  return edges;
}

std::size_t bin_of(const std::vector<double>& edges, double x) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  std::size_t idx = it == edges.begin() ? 0 : std::size_t(it - edges.begin()) - 1;
  return std::min(idx, edges.size() - 2);
}

}  // namespace

SocialityMap sociality_map(const ActivityLog& log, const SocialGraph& graph,
                           std::span<const AppId> apps, Day as_of, unsigned threads) {
  if (apps.empty()) throw std::invalid_argument("sociality_map: empty app list");
  SocialityMap map;
  map.points.resize(apps.size());
  parallel_for(apps.size(), threads, [&](std::size_t i) {
    map.points[i] = sociality_point(log, graph, apps[i], as_of);
  });

  constexpr int kBins = 40;
  double pop_lo = 1.0, pop_hi = 0.0, soc_lo = 1.0, soc_hi = 0.0;
  std::size_t plotted = 0;
  for (const auto& pt : map.points) {
    if (!pt.sociality_conditional || pt.popularity <= 0.0 || *pt.sociality_conditional <= 0.0) {
      continue;
    }
    ++plotted;
    pop_lo = std::min(pop_lo, pt.popularity);
    pop_hi = std::max(pop_hi, pt.popularity);
    soc_lo = std::min(soc_lo, *pt.sociality_conditional);
    soc_hi = std::max(soc_hi, *pt.sociality_conditional);
  }
  if (plotted == 0) {
    map.histogram = Grid(kBins, kBins);
    map.histogram_normalized = Grid(kBins, kBins);
    return map;
  }
  map.pop_edges = log_edges(pop_lo, pop_hi, kBins);
  map.soc_edges = log_edges(soc_lo, soc_hi, kBins);
  map.histogram = Grid(kBins, kBins);
  for (const auto& pt : map.points) {
    if (!pt.sociality_conditional || pt.popularity <= 0.0 || *pt.sociality_conditional <= 0.0) {
      continue;
    }
    map.histogram.at(bin_of(map.soc_edges, *pt.sociality_conditional),
                     bin_of(map.pop_edges, pt.popularity)) += 1.0;
  }
  double min_nonzero = 0.0;
  for (const double c : map.histogram.v) {
    if (c > 0.0 && (min_nonzero == 0.0 || c < min_nonzero)) min_nonzero = c;
  }
  map.histogram_normalized = map.histogram;
  if (min_nonzero > 0.0) {
    for (double& c : map.histogram_normalized.v) c /= min_nonzero;
  }
  return map;
}

void save_sociality_csv(const std::string& path, std::span<const SocialityPoint> points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write sociality file: " + path);
  out << "app_id,n_users,popularity,sociality_cond,sociality_meanfrac,ratio\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("nan");
  };
  for (const auto& pt : points) {
    out << pt.app << ',' << pt.n_users << ',' << format_double(pt.popularity) << ','
        << opt(pt.sociality_conditional) << ',' << opt(pt.sociality_meanfrac) << ','
        << opt(pt.ratio) << '\n';
  }
}

void save_histogram_csv(const std::string& path, const Grid& grid,
                        std::span<const double> row_edges, std::span<const double> col_edges) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write histogram file: " + path);
  out << "# row_edges:";
  for (const double e : row_edges) out << ' ' << format_double(e);
  out << "\n# col_edges:";
  for (const double e : col_edges) out << ' ' << format_double(e);
  out << '\n';
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      if (j) out << ',';
      out << format_double(grid.at(i, j));
    }
    out << '\n';
  }
}

}  // namespace appeco
