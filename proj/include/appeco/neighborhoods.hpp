#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "appeco/core.hpp"
#include "appeco/stats.hpp"

namespace appeco {

// Isomorphism class of the subgraph induced on a non-user's adopter friends.
enum class NeighborhoodClass { E2, K2, E3, P2uE1, P3, K3 };

const char* to_string(NeighborhoodClass c);

// Whether "friends using the app" means ever-adopters or users active in the
// trailing 30 days.
enum class UserDef { ever, active };

NeighborhoodClass classify_neighborhood(const SocialGraph& graph,
                                        std::span<const UserId> friends);

struct ClassCell {
  std::uint64_t exposed = 0;
  std::uint64_t adopted = 0;
  std::optional<double> probability;  // empty when exposed == 0
};

struct NeighborhoodAdoptionProfile {
  AppId app = 0;
  // indexed by NeighborhoodClass
  std::array<ClassCell, 6> cells;
  std::optional<double> ratio_k2_e2;     // a(K2)/a(E2)
  std::optional<double> ratio_e3_k3;     // a(E3)/a(K3)
  std::optional<double> ratio_p2e1_k3;   // a(P2uE1)/a(K3)
  std::optional<double> ratio_p3_k3;     // a(P3)/a(K3)

  const ClassCell& cell(NeighborhoodClass c) const { return cells[std::size_t(c)]; }
};

// Exposed set: non-users at `snapshot` with exactly 2 (resp. 3) friends using
// the app per user_def. a(G) is the share of each class adopting within
// (snapshot, snapshot + horizon].
NeighborhoodAdoptionProfile adoption_by_class(const SocialGraph& graph, const ActivityLog& log,
                                              AppId app, Day snapshot, int horizon,
                                              UserDef user_def = UserDef::ever);

struct AttributeAdoptionTable {
  AppId app = 0;
  std::int32_t modal_value = 0;          // attribute value indexed as 0
  std::vector<std::int32_t> index_to_value;  // index -> raw attribute value
  Grid exposed;  // (user attr index, friend attr index) exposure counts
  Grid adopted;
  int min_cell = 10;

  std::optional<double> cell_probability(std::size_t i, std::size_t j) const;
  // Pooled ratio summaries over unflagged cells:
  std::optional<double> ratio_modal_user() const;          // a(0,0) / a(0,j!=0)
  std::optional<double> ratio_minority_same_vs_modal() const;  // a(i,i) / a(i,0), i!=0
  std::optional<double> ratio_minority_same_vs_other() const;  // a(i,i) / a(i,j!=i,0)
};

// Exposed set: non-users at `snapshot` with exactly one adopter friend.
// Index 0 is the modal country among the app's users at the snapshot; other
// observed values are indexed by descending user count (ties by value).
AttributeAdoptionTable attribute_adoption(const SocialGraph& graph, const ActivityLog& log,
                                          AppId app, const AttributeTable& attributes,
                                          Day snapshot, int horizon, int min_cell = 10);

struct AgeOffsetCurve {
  std::vector<double> bin_lo;  // offset range per bin (equal population)
  std::vector<double> bin_hi;
  std::vector<BootstrapBands> bands;  // adoption probability with bootstrap bands
};

struct AgeOffsetCurves {
  AgeOffsetCurve friend_offset;
  AgeOffsetCurve user_offset;
};

// Offsets are measured against the median age of the app's users at the
// snapshot. 20 equal-population bins; bands via bootstrap_mean_ci.
AgeOffsetCurves age_offset_curves(const SocialGraph& graph, const ActivityLog& log, AppId app,
                                  const AttributeTable& attributes, Day snapshot, int horizon,
                                  int n_boot, std::uint64_t seed, int min_bin_size = 5);

void save_class_profile_csv(const std::string& path,
                            std::span<const NeighborhoodAdoptionProfile> profiles);
void save_age_offset_csv(const std::string& path, const AgeOffsetCurves& curves);

}  // namespace appeco
