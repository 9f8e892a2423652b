#include "appeco/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "appeco/retention.hpp"
#include "appeco/rng.hpp"
#include "appeco/sirs.hpp"
#include "appeco/sociality.hpp"
#include "appeco/stats.hpp"
#include "appeco/timeseries.hpp"
#include "appeco/util.hpp"

namespace appeco {

namespace {

constexpr int kTopCategories = 10;
constexpr int kPredWeeks = 51;
const char* const kBases[] = {"dau", "wau", "mau", "users", "newusers"};

// top categories by population count, ties by value; schema order
std::vector<std::int32_t> top_values(const std::map<std::int32_t, std::uint64_t>& counts) {
  std::vector<std::pair<std::int32_t, std::uint64_t>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::int32_t> out;
  for (const auto& [value, count] : sorted) {
    if (int(out.size()) >= kTopCategories) break;
    out.push_back(value);
  }
  return out;
}

}  // namespace

FeatureSchema FeatureSchema::build(const AttributeTable& attributes, bool include_sirs) {
  FeatureSchema schema;
  auto push = [&](const std::string& name, const char* group) {
    schema.names.push_back(name);
    schema.groups.emplace_back(group);
  };

  for (const char* base : kBases) {
    const std::string b(base);
    for (int m = 1; m <= 12; ++m) {
      const std::string mm = "_m" + std::to_string(m) + "_";
      for (const char* stat : {"med", "min", "max"}) push(b + mm + stat, "temporal");
      for (const char* stat : {"med", "min", "max"}) push("d_" + b + mm + stat, "temporal");
      for (const char* stat : {"med", "min", "max"}) push("d2_" + b + mm + stat, "temporal");
    }
    for (const char* stat : {"med", "min", "max"}) {
      push(b + "_year_" + stat, "temporal");
    }
    for (const char* stat : {"med", "min", "max"}) push("d_" + b + "_year_" + stat, "temporal");
    for (const char* stat : {"med", "min", "max"}) push("d2_" + b + "_year_" + stat, "temporal");
    push("dyear_" + b, "temporal");
    push("dyear_d_" + b, "temporal");
    push("dyear_d2_" + b, "temporal");
  }

  std::map<std::int32_t, std::uint64_t> countries, genders, ages;
  for (const auto& row : attributes.rows()) {
    ++countries[row.country];
    ++genders[row.gender];
    ++ages[row.age];
  }
  auto push_categorical = [&](const std::string& prefix,
                              const std::map<std::int32_t, std::uint64_t>& counts) {
    for (const auto v : top_values(counts)) {
      push(prefix + "_" + std::to_string(v) + "_n", "demographic");
      push(prefix + "_" + std::to_string(v) + "_p", "demographic");
    }
    push(prefix + "_other_n", "demographic");
    push(prefix + "_other_p", "demographic");
  };
  push_categorical("country", countries);
  push_categorical("gender", genders);
  push_categorical("age", ages);
  for (int k = 0; k <= 7; ++k) {
    push("l7_" + std::to_string(k) + "_n", "demographic");
    push("l7_" + std::to_string(k) + "_p", "demographic");
  }
  push("is30_n", "demographic");
  push("isnot30_n", "demographic");
  push("is30_p", "demographic");
  for (const char* e : {"country", "gender", "age", "l7", "is30"}) {
    push(std::string("entropy_") + e, "demographic");
  }

  for (int t = 1; t <= 30; ++t) push("ret_n_t" + std::to_string(t), "retention");
  for (int t = 1; t <= 30; ++t) push("ret_p_t" + std::to_string(t), "retention");
  push("ret_a", "retention");
  push("ret_xa", "retention");
  push("ret_A", "retention");
  push("ret_x0", "retention");

  push("soc_deg_med", "social");
  push("soc_deg_max", "social");
  push("soc_using_med", "social");
  push("soc_using_max", "social");
  push("soc_pxy", "social");
  push("soc_pxy_over_px", "social");

  if (include_sirs) {
    for (const char* p : {"S0", "alpha", "beta", "gamma", "epsilon"}) {
      push(std::string("sirs_") + p, "sirs");
    }
    for (int w = 1; w <= kPredWeeks; ++w) push("sirs_pred_w" + std::to_string(w), "sirs");
  }
  return schema;
}

std::vector<std::size_t> FeatureSchema::group_columns(const std::string& group) const {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i] == group) cols.push_back(i);
  }
  return cols;
}

namespace {

class Writer {
 public:
  Writer(const FeatureSchema& schema, std::vector<double>& out) : schema_(schema), out_(out) {}
  void set(const std::string& name, double value) {
    // schema order matches emission order; a moving cursor keeps this O(1)
    while (cursor_ < schema_.names.size() && schema_.names[cursor_] != name) ++cursor_;
    if (cursor_ >= schema_.names.size()) {
      throw std::logic_error("feature not in schema: " + name);
    }
    out_[cursor_++] = value;
  }

 private:
  const FeatureSchema& schema_;
  std::vector<double>& out_;
  std::size_t cursor_ = 0;
};

void emit_temporal(Writer& w, const std::string& base, const DailySeries& series) {
  std::vector<double> med_v, med_d, med_d2;
  for (int m = 1; m <= 12; ++m) {
    const auto s = delta_stats(series, m);
    const std::string mm = "_m" + std::to_string(m) + "_";
    w.set(base + mm + "med", s.value_med);
    w.set(base + mm + "min", s.value_min);
    w.set(base + mm + "max", s.value_max);
    w.set("d_" + base + mm + "med", s.d_med);
    w.set("d_" + base + mm + "min", s.d_min);
    w.set("d_" + base + mm + "max", s.d_max);
    w.set("d2_" + base + mm + "med", s.d2_med);
    w.set("d2_" + base + mm + "min", s.d2_min);
    w.set("d2_" + base + mm + "max", s.d2_max);
    med_v.push_back(s.value_med);
    med_d.push_back(s.d_med);
    med_d2.push_back(s.d2_med);
  }
  auto year = [&](const std::string& prefix, const std::vector<double>& months) {
    w.set(prefix + "_year_med", median_of(months));
    w.set(prefix + "_year_min", *std::min_element(months.begin(), months.end()));
    w.set(prefix + "_year_max", *std::max_element(months.begin(), months.end()));
  };
  year(base, med_v);
  year("d_" + base, med_d);
  year("d2_" + base, med_d2);
  w.set("dyear_" + base, med_v.back() - med_v.front());
  w.set("dyear_d_" + base, med_d.back() - med_d.front());
  w.set("dyear_d2_" + base, med_d2.back() - med_d2.front());
}

struct CategoryStats {
  std::vector<double> counts;  // per emitted category + other
  double total = 0.0;
  std::vector<double> full_distribution;  // untruncated, for entropy
};

CategoryStats categorize(const std::vector<std::int32_t>& emitted,
                         const std::map<std::int32_t, std::uint64_t>& app_counts) {
  CategoryStats st;
  st.counts.assign(emitted.size() + 1, 0.0);
  for (const auto& [value, count] : app_counts) {
    st.total += double(count);
    const auto it = std::find(emitted.begin(), emitted.end(), value);
    if (it != emitted.end()) {
      st.counts[std::size_t(it - emitted.begin())] += double(count);
    } else {
      st.counts.back() += double(count);
    }
  }
  for (const auto& [value, count] : app_counts) {
    st.full_distribution.push_back(double(count) / st.total);
  }
  return st;
}

}  // namespace

FeatureVector extract_features(const FeatureSchema& schema, const ActivityLog& log,
                               const SocialGraph& graph, const AttributeTable& attributes,
                               AppId app, DayRange window, const FeatureOptions& options) {
  if (window.length() != 360) {
    throw std::invalid_argument("extract_features: window must cover 12 x 30 days");
  }
  if (!log.horizon().contains(window)) {
    throw std::invalid_argument("extract_features: window outside log horizon");
  }
  if (attributes.size() != graph.node_count()) {
    throw std::invalid_argument("extract_features: attribute table size mismatch");
  }

  FeatureVector fv;
  fv.values.assign(schema.size(), std::nan(""));
  Writer w(schema, fv.values);

  // temporal -----------------------------------------------------------
  auto as_series = [&](std::vector<std::uint32_t> counts) {
    DailySeries s;
    s.app = app;
    s.window = window;
    s.values.assign(counts.begin(), counts.end());
    return s;
  };
  emit_temporal(w, "dau", as_series(active_series(log, app, window, 1)));
  emit_temporal(w, "wau", as_series(active_series(log, app, window, 7)));
  emit_temporal(w, "mau", as_series(active_series(log, app, window, 30)));
  emit_temporal(w, "users", as_series(cumulative_user_series(log, app, window)));
  emit_temporal(w, "newusers", as_series(new_user_series(log, app, window)));
  fv.has_temporal = true;

  // demographic ---------------------------------------------------------
  std::vector<UserId> app_users;
  {
    const auto users = log.event_users(app);
    const auto days = log.event_days(app);
    std::size_t i = 0;
    while (i < users.size()) {
      const UserId u = users[i];
      bool adopted = false;
      for (; i < users.size() && users[i] == u; ++i) {
        if (days[i] <= window.last) adopted = true;
      }
      if (adopted && u < graph.node_count()) app_users.push_back(u);
    }
  }

  std::map<std::int32_t, std::uint64_t> pop_countries, pop_genders, pop_ages;
  for (const auto& row : attributes.rows()) {
    ++pop_countries[row.country];
    ++pop_genders[row.gender];
    ++pop_ages[row.age];
  }

  if (!app_users.empty()) {
    fv.has_demographic = true;
    std::map<std::int32_t, std::uint64_t> countries, genders, ages;
    std::array<double, 8> l7{};
    double is30 = 0.0;
    for (const UserId u : app_users) {
      const auto& a = attributes[u];
      ++countries[a.country];
      ++genders[a.gender];
      ++ages[a.age];
      l7[std::size_t(a.fb_active_days_of_7)] += 1.0;
      if (a.is_mau) is30 += 1.0;
    }
    const double n = double(app_users.size());

    auto emit_categorical = [&](const std::string& prefix,
                                const std::map<std::int32_t, std::uint64_t>& pop,
                                const std::map<std::int32_t, std::uint64_t>& app_counts) {
      const auto emitted = top_values(pop);
      const auto st = categorize(emitted, app_counts);
      for (std::size_t i = 0; i < emitted.size(); ++i) {
        w.set(prefix + "_" + std::to_string(emitted[i]) + "_n", st.counts[i]);
        w.set(prefix + "_" + std::to_string(emitted[i]) + "_p", st.counts[i] / n);
      }
      w.set(prefix + "_other_n", st.counts.back());
      w.set(prefix + "_other_p", st.counts.back() / n);
      return st.full_distribution;
    };
    const auto country_dist = emit_categorical("country", pop_countries, countries);
    const auto gender_dist = emit_categorical("gender", pop_genders, genders);
    const auto age_dist = emit_categorical("age", pop_ages, ages);
    for (int k = 0; k <= 7; ++k) {
      w.set("l7_" + std::to_string(k) + "_n", l7[std::size_t(k)]);
      w.set("l7_" + std::to_string(k) + "_p", l7[std::size_t(k)] / n);
    }
    w.set("is30_n", is30);
    w.set("isnot30_n", n - is30);
    w.set("is30_p", is30 / n);
    std::vector<double> l7_dist;
    for (const double c : l7) l7_dist.push_back(c / n);
    const std::vector<double> is30_dist{is30 / n, 1.0 - is30 / n};
    w.set("entropy_country", entropy_bits(country_dist));
    w.set("entropy_gender", entropy_bits(gender_dist));
    w.set("entropy_age", entropy_bits(age_dist));
    w.set("entropy_l7", entropy_bits(l7_dist));
    w.set("entropy_is30", entropy_bits(is30_dist));
  }

  // retention -----------------------------------------------------------
  const auto curve = compute_retention(log, app, options.retention_max_offset, window);
  for (int t = 1; t <= 30; ++t) {
    const auto idx = std::size_t(t);
    w.set("ret_n_t" + std::to_string(t),
          idx < curve.returned.size() ? double(curve.returned[idx]) : std::nan(""));
  }
  for (int t = 1; t <= 30; ++t) {
    const auto idx = std::size_t(t);
    w.set("ret_p_t" + std::to_string(t),
          idx < curve.probability.size() ? curve.probability[idx] : std::nan(""));
  }
  try {
    const auto exp_fit = fit_exponential(curve);
    const auto td_fit = fit_timedep(curve);
    w.set("ret_a", td_fit.a);
    w.set("ret_xa", td_fit.xa);
    w.set("ret_A", exp_fit.amplitude);
    w.set("ret_x0", exp_fit.x0);
    fv.has_retention_fit = true;
  } catch (const std::invalid_argument&) {
    w.set("ret_a", std::nan(""));
    w.set("ret_xa", std::nan(""));
    w.set("ret_A", std::nan(""));
    w.set("ret_x0", std::nan(""));
  }

  // social ---------------------------------------------------------------
  if (!app_users.empty()) {
    fv.has_social = true;
    std::vector<std::uint8_t> is_user(graph.node_count(), 0);
    for (const UserId u : app_users) is_user[u] = 1;
    std::vector<double> degrees, using_counts;
    degrees.reserve(app_users.size());
    using_counts.reserve(app_users.size());
    for (const UserId u : app_users) {
      degrees.push_back(double(graph.degree(u)));
      std::uint32_t using_cnt = 0;
      for (const UserId v : graph.neighbors(u)) using_cnt += is_user[v];
      using_counts.push_back(double(using_cnt));
    }
    w.set("soc_deg_med", median_of(degrees));
    w.set("soc_deg_max", *std::max_element(degrees.begin(), degrees.end()));
    w.set("soc_using_med", median_of(using_counts));
    w.set("soc_using_max", *std::max_element(using_counts.begin(), using_counts.end()));
    const auto pt = sociality_point(log, graph, app, window.last);
    w.set("soc_pxy", pt.sociality_conditional ? *pt.sociality_conditional : std::nan(""));
    w.set("soc_pxy_over_px", pt.ratio ? *pt.ratio : std::nan(""));
  } else {
    for (const char* name : {"soc_deg_med", "soc_deg_max", "soc_using_med", "soc_using_max",
                             "soc_pxy", "soc_pxy_over_px"}) {
      w.set(name, std::nan(""));
    }
  }

  // sirs -------------------------------------------------------------------
  if (options.include_sirs) {
    const auto dau = active_series(log, app, window, 1);
    std::vector<double> observed(dau.begin(), dau.end());
    const auto fit = fit_sirs(observed, window, options.sirs_budget,
                              mix_seed(options.seed, 0x5F5, app));
    if (fit.converged) {
      fv.has_sirs = true;
      w.set("sirs_S0", fit.params.s0);
      w.set("sirs_alpha", fit.params.alpha);
      w.set("sirs_beta", fit.params.beta);
      w.set("sirs_gamma", fit.params.gamma);
      w.set("sirs_epsilon", fit.params.epsilon);
      const auto pred = predict_sirs(fit, options.sirs_predict_horizon);
      for (int week = 1; week <= kPredWeeks; ++week) {
        const std::size_t idx = std::size_t(week) * 7 - 1;
        w.set("sirs_pred_w" + std::to_string(week),
              idx < pred.size() ? pred[idx] : std::nan(""));
      }
    }
    // unconverged fits leave the whole group missing
  }
  return fv;
}

FeatureMatrix feature_matrix(const ActivityLog& log, const SocialGraph& graph,
                             const AttributeTable& attributes, std::span<const AppId> apps,
                             DayRange window, const FeatureOptions& options, unsigned threads) {
  if (apps.empty()) throw std::invalid_argument("feature_matrix: empty app list");
  FeatureMatrix m;
  m.schema = FeatureSchema::build(attributes, options.include_sirs);
  m.apps.assign(apps.begin(), apps.end());
  m.rows.resize(apps.size());
  parallel_for(apps.size(), threads, [&](std::size_t i) {
    m.rows[i] =
        extract_features(m.schema, log, graph, attributes, apps[i], window, options).values;
  });
  return m;
}

ImputedMatrix impute_matrix(const FeatureMatrix& matrix,
                            std::span<const std::uint32_t> train_rows) {
  const std::size_t p = matrix.schema.size();
  ImputedMatrix out;
  out.names = matrix.schema.names;
  out.groups = matrix.schema.groups;
  out.rows.assign(matrix.rows.size(), {});

  std::vector<std::uint8_t> any_missing(p, 0);
  std::vector<double> medians(p, 0.0);
  std::vector<double> scratch;
  for (std::size_t j = 0; j < p; ++j) {
    for (const auto& row : matrix.rows) {
      if (std::isnan(row[j])) {
        any_missing[j] = 1;
        break;
      }
    }
    scratch.clear();
    for (const auto r : train_rows) {
      const double v = matrix.rows[r][j];
      if (!std::isnan(v)) scratch.push_back(v);
    }
    medians[j] = scratch.empty() ? 0.0 : median_of(scratch);
  }

  for (std::size_t j = 0; j < p; ++j) {
    if (any_missing[j]) {
      out.names.push_back("miss_" + matrix.schema.names[j]);
      out.groups.push_back(matrix.schema.groups[j]);
    }
  }
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    auto& row = out.rows[i];
    row.reserve(out.names.size());
    for (std::size_t j = 0; j < p; ++j) {
      const double v = matrix.rows[i][j];
      row.push_back(std::isnan(v) ? medians[j] : v);
    }
    for (std::size_t j = 0; j < p; ++j) {
      if (any_missing[j]) row.push_back(std::isnan(matrix.rows[i][j]) ? 1.0 : 0.0);
    }
  }
  return out;
}

void save_feature_matrix_csv(const std::string& path, const FeatureMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write feature matrix: " + path);
  out << "# schema_version: " << kFeatureSchemaVersion << '\n';
  out << "app_id";
  for (const auto& name : matrix.schema.names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    out << matrix.apps[i];
    for (const double v : matrix.rows[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace appeco
