#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "appeco/core.hpp"
#include "appeco/rng.hpp"

using namespace appeco;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << contents;
  return path;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("load_graph deduplicates symmetric pairs") {
  const auto path = temp_file("g_dedup.csv", "user_a,user_b\n1,2\n2,1\n2,3\n");
  const auto g = SocialGraph::load_csv(path.string());
  CHECK(g.edge_count() == 2);
  CHECK(g.node_count() == 4);  // ids are dense 0-based, max id 3
  CHECK(g.degree(2) == 2);
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(3, 2));
  CHECK_FALSE(g.has_edge(1, 3));
}

TEST_CASE("load_graph accepts an empty file") {
  const auto path = temp_file("g_empty.csv", "user_a,user_b\n");
  const auto g = SocialGraph::load_csv(path.string());
  CHECK(g.edge_count() == 0);
  CHECK(g.node_count() == 0);
}

TEST_CASE("load_graph rejects self-loops and bad rows") {
  const auto loop = temp_file("g_loop.csv", "user_a,user_b\n1,1\n");
  CHECK_THROWS_AS(SocialGraph::load_csv(loop.string()), ParseError);
  const auto junk = temp_file("g_junk.csv", "user_a,user_b\n1,x\n");
  CHECK_THROWS_AS(SocialGraph::load_csv(junk.string()), ParseError);
  const auto header = temp_file("g_header.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(SocialGraph::load_csv(header.string()), ParseError);
}

TEST_CASE("load_graph enforces the degree cap") {
  std::string csv = "user_a,user_b\n";
  for (int i = 1; i <= 6; ++i) csv += "0," + std::to_string(i) + "\n";
  const auto path = temp_file("g_cap.csv", csv);
  CHECK_THROWS_AS(SocialGraph::load_csv(path.string(), 5), ParseError);
  CHECK_NOTHROW(SocialGraph::load_csv(path.string(), 6));
}

TEST_CASE("active_users trailing windows") {
  ActivityLog log(DayRange{0, 49});
  log.add_events(1, {{10, 3}, {10, 4}});
  CHECK(active_users(log, 1, 4, 1) == 1);
  CHECK(active_users(log, 1, 4, 30) == 1);  // distinct users, not events

  ActivityLog log2(DayRange{0, 49});
  log2.add_events(1, {{1, 10}, {2, 10}});
  CHECK(active_users(log2, 1, 40, 30) == 0);  // day 10 outside window 11..40

  CHECK_THROWS_AS(active_users(log, 99, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(active_users(log, 1, 50, 1), std::invalid_argument);  // end past horizon
}

TEST_CASE("user_spans per-user min and max") {
  ActivityLog log(DayRange{0, 20});
  log.add_events(7, {{5, 3}, {5, 5}, {5, 7}, {2, 4}});
  const auto spans = user_spans(log, 7);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].user == 2);  // sorted by user id
  CHECK(spans[0].first == 4);
  CHECK(spans[0].last == 4);
  CHECK(spans[1].user == 5);
  CHECK(spans[1].first == 3);
  CHECK(spans[1].last == 7);
}

TEST_CASE("first_last_matrix shape and totals") {
  const std::vector<UserSpan> one{{1, 3, 7}};
  const auto g1 = first_last_matrix(one, 1);
  CHECK(g1.at(3, 7) == 1.0);
  CHECK(g1.sum() == 1.0);

  const std::vector<UserSpan> two{{1, 0, 0}, {2, 0, 0}};
  const auto g2 = first_last_matrix(two, 1);
  CHECK(g2.at(0, 0) == 2.0);

  // random spans: grand total equals the user count; lower triangle empty
  Rng rng(42);
  std::vector<UserSpan> spans;
  for (UserId u = 0; u < 100; ++u) {
    const Day a = Day(rng.below(50));
    const Day b = a + Day(rng.below(30));
    spans.push_back({u, a, b});
  }
  const auto grid = first_last_matrix(spans, 3);
  CHECK(grid.sum() == 100.0);
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < i; ++j) CHECK(grid.at(i, j) == 0.0);
  }
}

TEST_CASE("DAU equals a raw per-day distinct scan") {
  Rng rng(7);
  ActivityLog log(DayRange{0, 39});
  std::vector<std::pair<UserId, Day>> events;
  for (int i = 0; i < 300; ++i) {
    events.emplace_back(UserId(rng.below(25)), Day(rng.below(40)));
  }
  log.add_events(3, events);
  const auto series = active_series(log, 3, DayRange{0, 39}, 1);
  for (Day d = 0; d < 40; ++d) {
    std::set<UserId> seen;
    for (const auto& [u, day] : events) {
      if (day == d) seen.insert(u);
    }
    CHECK(series[std::size_t(d)] == seen.size());
    CHECK(active_users(log, 3, d, 1) == seen.size());
  }
}

TEST_CASE("trailing-window series equals the brute-force window scan") {
  Rng rng(11);
  ActivityLog log(DayRange{0, 59});
  std::vector<std::pair<UserId, Day>> events;
  for (int i = 0; i < 400; ++i) {
    events.emplace_back(UserId(rng.below(30)), Day(rng.below(60)));
  }
  log.add_events(1, events);
  for (const int len : {7, 30}) {
    const auto series = active_series(log, 1, DayRange{0, 59}, len);
    for (Day d = 0; d < 60; ++d) {
      std::set<UserId> seen;
      for (const auto& [u, day] : events) {
        if (day >= d - len + 1 && day <= d) seen.insert(u);
      }
      CHECK(series[std::size_t(d)] == seen.size());
    }
  }
}

TEST_CASE("graph and log serialization is idempotent") {
  Rng rng(3);
  std::vector<std::pair<UserId, UserId>> edges;
  for (int i = 0; i < 60; ++i) {
    const UserId a = UserId(rng.below(30));
    const UserId b = UserId(rng.below(30));
    if (a != b) edges.emplace_back(a, b);
  }
  const SocialGraph g(30, edges);
  const auto p1 = std::filesystem::temp_directory_path() / "round1.csv";
  const auto p2 = std::filesystem::temp_directory_path() / "round2.csv";
  g.save_csv(p1.string());
  SocialGraph::load_csv(p1.string()).save_csv(p2.string());
  CHECK(slurp(p1) == slurp(p2));

  ActivityLog log(DayRange{0, 29});
  std::vector<std::pair<UserId, Day>> events;
  for (int i = 0; i < 200; ++i) {
    events.emplace_back(UserId(rng.below(40)), Day(rng.below(30)));
  }
  log.add_events(2, events);
  log.add_events(9, {{1, 0}, {2, 5}});
  const auto l1 = std::filesystem::temp_directory_path() / "log1.csv";
  const auto l2 = std::filesystem::temp_directory_path() / "log2.csv";
  log.save_csv(l1.string());
  ActivityLog::load_csv(l1.string()).save_csv(l2.string());
  CHECK(slurp(l1) == slurp(l2));
}

TEST_CASE("attribute table round trip") {
  std::vector<UserAttributes> rows(4);
  rows[1].country = 3;
  rows[1].age = 25;
  rows[2].fb_active_days_of_7 = 7;
  rows[3].is_mau = true;
  const AttributeTable table(rows);
  const auto path = std::filesystem::temp_directory_path() / "attrs.csv";
  table.save_csv(path.string());
  const auto loaded = AttributeTable::load_csv(path.string());
  REQUIRE(loaded.size() == 4);
  CHECK(loaded[1].country == 3);
  CHECK(loaded[1].age == 25);
  CHECK(loaded[2].fb_active_days_of_7 == 7);
  CHECK(loaded[3].is_mau);
}
