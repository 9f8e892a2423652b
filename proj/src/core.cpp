#include "appeco/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace appeco {

namespace {

// Minimal strict CSV line splitter: integer fields, no quoting.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_int(std::string_view s, const std::string& context) {
  T value{};
  const char* beg = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(beg, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("bad integer field '" + std::string(s) + "' in " + context);
  }
  return value;
}

std::string chop_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

SocialGraph::SocialGraph(std::uint32_t node_count, std::vector<std::pair<UserId, UserId>> edges,
                         std::uint32_t degree_cap)
    : node_count_(node_count), degree_cap_(degree_cap) {
  for (auto& [a, b] : edges) {
    if (a == b) throw ParseError("self-loop on node " + std::to_string(a));
    if (a >= node_count || b >= node_count) {
      throw ParseError("edge endpoint out of range: " + std::to_string(std::max(a, b)));
    }
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  offsets_.assign(std::size_t(node_count_) + 1, 0);
  for (const auto& [a, b] : edges_) {
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
  adj_.resize(offsets_.back());
  std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges_) {
    adj_[cursor[a]++] = b;
    adj_[cursor[b]++] = a;
  }
  for (std::uint32_t u = 0; u < node_count_; ++u) {
    std::sort(adj_.begin() + offsets_[u], adj_.begin() + offsets_[u + 1]);
    if (degree(u) > degree_cap_) {
      throw ParseError("node " + std::to_string(u) + " exceeds degree cap " +
                       std::to_string(degree_cap_));
    }
  }
}

bool SocialGraph::has_edge(UserId a, UserId b) const {
  if (a >= node_count_ || b >= node_count_) return false;
  const UserId probe = degree(a) <= degree(b) ? a : b;
  const UserId other = probe == a ? b : a;
  const auto nb = neighbors(probe);
  return std::binary_search(nb.begin(), nb.end(), other);
}

SocialGraph SocialGraph::load_csv(const std::string& path, std::uint32_t degree_cap,
                                  std::optional<std::uint32_t> node_count) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file: " + path);
  std::string line;
  if (!std::getline(in, line) || chop_cr(line) != "user_a,user_b") {
    throw ParseError("graph file missing `user_a,user_b` header: " + path);
  }
  std::vector<std::pair<UserId, UserId>> edges;
  std::uint32_t max_id = 0;
  bool any = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = chop_cr(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw ParseError("expected 2 fields at " + path + ":" + std::to_string(line_no));
    }
    const std::string ctx = path + ":" + std::to_string(line_no);
    const UserId a = parse_int<UserId>(fields[0], ctx);
    const UserId b = parse_int<UserId>(fields[1], ctx);
    edges.emplace_back(a, b);
    max_id = std::max({max_id, a, b});
    any = true;
  }
  const std::uint32_t n = node_count.value_or(any ? max_id + 1 : 0);
  return SocialGraph(n, std::move(edges), degree_cap);
}

void SocialGraph::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  out << "user_a,user_b\n";
  for (const auto& [a, b] : edges_) out << a << ',' << b << '\n';
}

AttributeTable::AttributeTable(std::vector<UserAttributes> rows) : rows_(std::move(rows)) {
  for (std::size_t u = 0; u < rows_.size(); ++u) {
    const auto& r = rows_[u];
    if (r.fb_active_days_of_7 < 0 || r.fb_active_days_of_7 > 7 || r.age < 0) {
      throw ParseError("invalid attributes for user " + std::to_string(u));
    }
  }
}

AttributeTable AttributeTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open attributes file: " + path);
  std::string line;
  if (!std::getline(in, line) || chop_cr(line) != "user_id,country,gender,age,fb_l7,is_mau") {
    throw ParseError("attributes file missing expected header: " + path);
  }
  std::vector<UserAttributes> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = chop_cr(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6) {
      throw ParseError("expected 6 fields at " + path + ":" + std::to_string(line_no));
    }
    const std::string ctx = path + ":" + std::to_string(line_no);
    const auto user = parse_int<std::uint32_t>(f[0], ctx);
    if (user != rows.size()) {
      throw ParseError("attribute rows must be dense and sorted by user id at " + ctx);
    }
    UserAttributes a;
    a.country = parse_int<std::int32_t>(f[1], ctx);
    a.gender = parse_int<std::int32_t>(f[2], ctx);
    a.age = parse_int<std::int32_t>(f[3], ctx);
    a.fb_active_days_of_7 = parse_int<std::int32_t>(f[4], ctx);
    a.is_mau = parse_int<std::int32_t>(f[5], ctx) != 0;
    rows.push_back(a);
  }
  return AttributeTable(std::move(rows));
}

void AttributeTable::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write attributes file: " + path);
  out << "user_id,country,gender,age,fb_l7,is_mau\n";
  for (std::size_t u = 0; u < rows_.size(); ++u) {
    const auto& a = rows_[u];
    out << u << ',' << a.country << ',' << a.gender << ',' << a.age << ','
        << a.fb_active_days_of_7 << ',' << (a.is_mau ? 1 : 0) << '\n';
  }
}

void ActivityLog::add_events(AppId app, std::vector<std::pair<UserId, Day>> events) {
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  auto& slot = apps_[app];
  slot.users.clear();
  slot.days.clear();
  slot.users.reserve(events.size());
  slot.days.reserve(events.size());
  for (const auto& [user, day] : events) {
    if (!horizon_.contains(day)) {
      throw ParseError("event day " + std::to_string(day) + " outside horizon for app " +
                       std::to_string(app));
    }
    slot.users.push_back(user);
    slot.days.push_back(day);
  }
}

std::vector<AppId> ActivityLog::app_ids() const {
  std::vector<AppId> out;
  out.reserve(apps_.size());
  for (const auto& [id, _] : apps_) out.push_back(id);
  return out;
}

const ActivityLog::AppEvents& ActivityLog::events_for(AppId app) const {
  const auto it = apps_.find(app);
  if (it == apps_.end()) throw std::invalid_argument("unknown app id " + std::to_string(app));
  return it->second;
}

ActivityLog ActivityLog::load_csv(const std::string& path, std::optional<DayRange> horizon) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open activity file: " + path);
  std::string line;
  if (!std::getline(in, line) || chop_cr(line) != "app_id,user_id,day") {
    throw ParseError("activity file missing `app_id,user_id,day` header: " + path);
  }
  std::map<AppId, std::vector<std::pair<UserId, Day>>> staged;
  Day max_day = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = chop_cr(line);
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 3) {
      throw ParseError("expected 3 fields at " + path + ":" + std::to_string(line_no));
    }
    const std::string ctx = path + ":" + std::to_string(line_no);
    const AppId app = parse_int<AppId>(f[0], ctx);
    const UserId user = parse_int<UserId>(f[1], ctx);
    const Day day = parse_int<Day>(f[2], ctx);
    if (day < 0) throw ParseError("negative day at " + ctx);
    staged[app].emplace_back(user, day);
    max_day = std::max(max_day, day);
  }
  ActivityLog log(horizon.value_or(DayRange{0, max_day}));
  for (auto& [app, events] : staged) log.add_events(app, std::move(events));
  return log;
}

void ActivityLog::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write activity file: " + path);
  out << "app_id,user_id,day\n";
  for (const auto& [app, ev] : apps_) {
    for (std::size_t i = 0; i < ev.users.size(); ++i) {
      out << app << ',' << ev.users[i] << ',' << ev.days[i] << '\n';
    }
  }
}

std::uint32_t active_users(const ActivityLog& log, AppId app, Day window_end, int window_len) {
  if (window_len < 1) throw std::invalid_argument("window_len must be >= 1");
  if (!log.horizon().contains(window_end)) {
    throw std::invalid_argument("window end " + std::to_string(window_end) +
                                " outside log horizon");
  }
  // the trailing window is clipped at the horizon start
  const DayRange window{std::max(window_end - Day(window_len) + 1, log.horizon().first),
                        window_end};
  const auto users = log.event_users(app);
  const auto days = log.event_days(app);
  std::uint32_t count = 0;
  std::size_t i = 0;
  while (i < users.size()) {
    const UserId u = users[i];
    bool hit = false;
    for (; i < users.size() && users[i] == u; ++i) {
      if (window.contains(days[i])) hit = true;
    }
    if (hit) ++count;
  }
  return count;
}

std::vector<std::uint32_t> active_series(const ActivityLog& log, AppId app, DayRange out,
                                         int window_len) {
  if (window_len < 1) throw std::invalid_argument("window_len must be >= 1");
  if (out.length() <= 0) return {};
  const auto users = log.event_users(app);
  const auto days = log.event_days(app);
  // An event on day e makes its user count for window ends in [e, e+len-1].
  // Merge those intervals per user, then accumulate interval differences.
  std::vector<std::int64_t> diff(std::size_t(out.length()) + 1, 0);
  auto deposit = [&](Day lo, Day hi) {
    lo = std::max(lo, out.first);
    hi = std::min(hi, out.last);
    if (lo > hi) return;
    diff[std::size_t(lo - out.first)] += 1;
    diff[std::size_t(hi - out.first) + 1] -= 1;
  };
  std::size_t i = 0;
  while (i < users.size()) {
    const UserId u = users[i];
    Day span_lo = days[i];
    Day span_hi = days[i] + Day(window_len) - 1;
    ++i;
    for (; i < users.size() && users[i] == u; ++i) {
      const Day e = days[i];
      if (e <= span_hi + 1) {
        span_hi = std::max(span_hi, e + Day(window_len) - 1);
      } else {
        deposit(span_lo, span_hi);
        span_lo = e;
        span_hi = e + Day(window_len) - 1;
      }
    }
    deposit(span_lo, span_hi);
  }
  std::vector<std::uint32_t> series(std::size_t(out.length()));
  std::int64_t acc = 0;
  for (std::size_t d = 0; d < series.size(); ++d) {
    acc += diff[d];
    series[d] = std::uint32_t(acc);
  }
  return series;
}

std::vector<std::uint32_t> new_user_series(const ActivityLog& log, AppId app, DayRange out) {
  if (out.length() <= 0) return {};
  std::vector<std::uint32_t> series(std::size_t(out.length()), 0);
  for (const auto& span : user_spans(log, app)) {
    if (out.contains(span.first)) ++series[std::size_t(span.first - out.first)];
  }
  return series;
}

std::vector<std::uint32_t> cumulative_user_series(const ActivityLog& log, AppId app,
                                                  DayRange out) {
  if (out.length() <= 0) return {};
  std::vector<std::uint32_t> births(std::size_t(out.length()), 0);
  std::uint32_t before = 0;
  for (const auto& span : user_spans(log, app)) {
    if (span.first < out.first) {
      ++before;
    } else if (out.contains(span.first)) {
      ++births[std::size_t(span.first - out.first)];
    }
  }
  std::vector<std::uint32_t> series(std::size_t(out.length()));
  std::uint32_t acc = before;
  for (std::size_t d = 0; d < series.size(); ++d) {
    acc += births[d];
    series[d] = acc;
  }
  return series;
}

std::vector<UserSpan> user_spans(const ActivityLog& log, AppId app) {
  const auto users = log.event_users(app);
  const auto days = log.event_days(app);
  std::vector<UserSpan> spans;
  std::size_t i = 0;
  while (i < users.size()) {
    const UserId u = users[i];
    UserSpan s{u, days[i], days[i]};
    for (; i < users.size() && users[i] == u; ++i) {
      s.first = std::min(s.first, days[i]);
      s.last = std::max(s.last, days[i]);
    }
    spans.push_back(s);
  }
  return spans;  // already sorted: events are ordered by user id
}

Grid first_last_matrix(std::span<const UserSpan> spans, int bin_days) {
  if (bin_days < 1) throw std::invalid_argument("bin_days must be >= 1");
  Day max_day = 0;
  for (const auto& s : spans) max_day = std::max(max_day, s.last);
  const std::size_t bins = spans.empty() ? 0 : std::size_t(max_day) / std::size_t(bin_days) + 1;
  Grid grid(bins, bins);
  for (const auto& s : spans) {
    grid.at(std::size_t(s.first) / std::size_t(bin_days),
            std::size_t(s.last) / std::size_t(bin_days)) += 1.0;
  }
  return grid;
}

}  // namespace appeco
