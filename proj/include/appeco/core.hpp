#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "appeco/util.hpp"

namespace appeco {

using UserId = std::uint32_t;
using AppId = std::uint32_t;
using Day = std::int32_t;  // days since the dataset epoch (day 0)

// Malformed input files and invariant violations found while loading.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DayRange {
  Day first = 0;
  Day last = -1;  // inclusive; last < first means empty
  int length() const { return int(last) - int(first) + 1; }
  bool contains(Day d) const { return d >= first && d <= last; }
  bool contains(DayRange r) const { return r.first >= first && r.last <= last; }
};

// Undirected friendship graph over dense 0-based user ids, with the hard
// per-node friend cap applied at construction.
class SocialGraph {
 public:
  static constexpr std::uint32_t kDefaultDegreeCap = 5000;

  SocialGraph() = default;
  // Edges may arrive in either orientation and with duplicates; they are
  // canonicalized to (min,max) and deduplicated. Self-loops, out-of-range
  // endpoints and degrees above the cap are errors.
  SocialGraph(std::uint32_t node_count, std::vector<std::pair<UserId, UserId>> edges,
              std::uint32_t degree_cap = kDefaultDegreeCap);

  std::uint32_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint32_t degree_cap() const { return degree_cap_; }
  std::uint32_t degree(UserId u) const { return offsets_[u + 1] - offsets_[u]; }
  std::span<const UserId> neighbors(UserId u) const {
    return {adj_.data() + offsets_[u], adj_.data() + offsets_[u + 1]};
  }
  bool has_edge(UserId a, UserId b) const;
  std::span<const std::pair<UserId, UserId>> edges() const { return edges_; }

  // CSV with header `user_a,user_b`. node_count, when not given, is
  // max id + 1. Canonical save order: (min,max) pairs, sorted.
  static SocialGraph load_csv(const std::string& path,
                              std::uint32_t degree_cap = kDefaultDegreeCap,
                              std::optional<std::uint32_t> node_count = {});
  void save_csv(const std::string& path) const;

 private:
  std::uint32_t node_count_ = 0;
  std::uint32_t degree_cap_ = kDefaultDegreeCap;
  std::vector<std::pair<UserId, UserId>> edges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<UserId> adj_;
};

struct UserAttributes {
  std::int32_t country = 0;
  std::int32_t gender = 0;
  std::int32_t age = 0;
  std::int32_t fb_active_days_of_7 = 0;  // 0..7
  bool is_mau = false;
};

// One row per user, indexed by user id.
class AttributeTable {
 public:
  AttributeTable() = default;
  explicit AttributeTable(std::vector<UserAttributes> rows);

  std::size_t size() const { return rows_.size(); }
  const UserAttributes& operator[](UserId u) const { return rows_[u]; }
  std::span<const UserAttributes> rows() const { return rows_; }

  // CSV with header `user_id,country,gender,age,fb_l7,is_mau`.
  static AttributeTable load_csv(const std::string& path);
  void save_csv(const std::string& path) const;

 private:
  std::vector<UserAttributes> rows_;
};

struct UserSpan {
  UserId user = 0;
  Day first = 0;
  Day last = 0;
};

// Per-app sets of (user, day) activity events at day granularity.
class ActivityLog {
 public:
  ActivityLog() = default;
  explicit ActivityLog(DayRange horizon) : horizon_(horizon) {}

  DayRange horizon() const { return horizon_; }
  // Sorts by (user, day), deduplicates, validates against the horizon.
  void add_events(AppId app, std::vector<std::pair<UserId, Day>> events);

  bool has_app(AppId app) const { return apps_.count(app) != 0; }
  std::vector<AppId> app_ids() const;
  std::size_t app_count() const { return apps_.size(); }
  std::size_t event_count(AppId app) const { return events_for(app).users.size(); }
  std::span<const UserId> event_users(AppId app) const { return events_for(app).users; }
  std::span<const Day> event_days(AppId app) const { return events_for(app).days; }

  // CSV with header `app_id,user_id,day`. Canonical order (app, user, day).
  // Horizon defaults to [0, max event day] ([0,0] for an empty file).
  static ActivityLog load_csv(const std::string& path, std::optional<DayRange> horizon = {});
  void save_csv(const std::string& path) const;

 private:
  struct AppEvents {
    std::vector<UserId> users;
    std::vector<Day> days;  // parallel to users
  };
  const AppEvents& events_for(AppId app) const;

  std::map<AppId, AppEvents> apps_;
  DayRange horizon_{0, 0};
};

// Distinct users with at least one event in the trailing window of
// window_len days ending at window_end (inclusive). Lengths 1/7/30 realize
// DAU/WAU/MAU.
std::uint32_t active_users(const ActivityLog& log, AppId app, Day window_end, int window_len);

// Trailing-window counts for every window end in `out`, O(events + days).
std::vector<std::uint32_t> active_series(const ActivityLog& log, AppId app, DayRange out,
                                         int window_len);

// Users whose first event falls on each day of `out`.
std::vector<std::uint32_t> new_user_series(const ActivityLog& log, AppId app, DayRange out);

// Distinct users with any event at or before each day of `out`.
std::vector<std::uint32_t> cumulative_user_series(const ActivityLog& log, AppId app, DayRange out);

// One (first, last) span per distinct user, sorted by user id.
std::vector<UserSpan> user_spans(const ActivityLog& log, AppId app);

// Cell (i,j) counts users with first login in bin i and last in bin j;
// only j >= i is ever populated and the grand total is the user count.
Grid first_last_matrix(std::span<const UserSpan> spans, int bin_days);

}  // namespace appeco
