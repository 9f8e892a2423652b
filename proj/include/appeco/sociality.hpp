#pragma once

#include <optional>
#include <string>
#include <vector>

#include "appeco/core.hpp"

namespace appeco {

// A user "uses the app" as of day t when they have at least one event at or
// before t (ever-adopter).
struct SocialityPoint {
  AppId app = 0;
  std::uint32_t n_users = 0;
  double popularity = 0.0;  // p(x)
  std::optional<double> sociality_conditional;  // p(x|y); empty when no one has a user friend
  std::optional<double> sociality_meanfrac;     // mean adopter-friend fraction over users
  std::optional<double> ratio;                  // p(x|y)/p(x); empty when p(x)=0
};

double popularity(const ActivityLog& log, const SocialGraph& graph, AppId app, Day as_of);

struct SocialityEstimate {
  std::optional<double> conditional;
  std::optional<double> mean_fraction;
};

// conditional  = P(user | >=1 user friend), the prose definition;
// mean_fraction = average over app users of adopter-friend share of degree
// (degree-0 users contribute 0).
SocialityEstimate sociality(const ActivityLog& log, const SocialGraph& graph, AppId app,
                            Day as_of);

SocialityPoint sociality_point(const ActivityLog& log, const SocialGraph& graph, AppId app,
                               Day as_of);

struct SocialityMap {
  std::vector<SocialityPoint> points;
  // log10-binned density over (popularity, conditional sociality); 40 bins
  // per axis; raw counts sum to the number of histogrammed points.
  std::vector<double> pop_edges;
  std::vector<double> soc_edges;
  Grid histogram;
  Grid histogram_normalized;  // scaled so the smallest nonzero count is 1
};

SocialityMap sociality_map(const ActivityLog& log, const SocialGraph& graph,
                           std::span<const AppId> apps, Day as_of, unsigned threads = 0);

void save_sociality_csv(const std::string& path, std::span<const SocialityPoint> points);
void save_histogram_csv(const std::string& path, const Grid& grid,
                        std::span<const double> row_edges, std::span<const double> col_edges);

}  // namespace appeco
