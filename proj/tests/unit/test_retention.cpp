#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "appeco/retention.hpp"
#include "appeco/rng.hpp"

using namespace appeco;

namespace {

// exact analytic curve: probabilities set directly, heavy uniform weights
RetentionCurve analytic_curve(int max_offset, const std::function<double(double)>& p) {
  RetentionCurve c;
  c.n0 = 100000;
  for (int t = 0; t <= max_offset; ++t) {
    const double pt = t == 0 ? 1.0 : p(double(t));
    c.probability.push_back(pt);
    c.eligible.push_back(100000);
    c.returned.push_back(std::uint64_t(std::llround(pt * 100000.0)));
  }
  return c;
}

// cohort of planted lifetimes with survival exp(-xa t^(1-a)/(1-a))
RetentionCurve planted_cohort(std::size_t n, double a, double xa, int max_offset,
                              std::uint64_t seed) {
  Rng rng(seed);
  RetentionCurve c;
  c.n0 = n;
  std::vector<std::uint64_t> survivors(std::size_t(max_offset) + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double life = std::pow((1.0 - a) * rng.exponential() / xa, 1.0 / (1.0 - a));
    const int cap = std::min(max_offset, int(std::floor(std::min(life, 1.0e9))));
    for (int t = 0; t <= cap; ++t) ++survivors[std::size_t(t)];
  }
  for (int t = 0; t <= max_offset; ++t) {
    c.returned.push_back(survivors[std::size_t(t)]);
    c.eligible.push_back(n);
    c.probability.push_back(double(survivors[std::size_t(t)]) / double(n));
  }
  c.probability[0] = 1.0;
  return c;
}

}  // namespace

TEST_CASE("compute_retention counts offsets and censors") {
  ActivityLog log(DayRange{0, 13});
  log.add_events(1, {{42, 5}, {42, 6}, {42, 8}});
  const auto c = compute_retention(log, 1, 5);
  REQUIRE(c.returned.size() == 6);
  CHECK(c.n0 == 1);
  const std::vector<std::uint64_t> expected{1, 1, 0, 1, 0, 0};
  for (int t = 0; t <= 5; ++t) {
    CHECK(c.returned[std::size_t(t)] == expected[std::size_t(t)]);
    CHECK(c.eligible[std::size_t(t)] == 1);
    CHECK(c.probability[std::size_t(t)] == double(expected[std::size_t(t)]));
  }
  CHECK(c.probability[0] == 1.0);
}

TEST_CASE("late cohorts leave the eligible denominator") {
  ActivityLog log(DayRange{0, 10});
  log.add_events(1, {{1, 0}, {2, 8}});  // user 2 first logs in 2 days before the end
  const auto c = compute_retention(log, 1, 6);
  CHECK(c.eligible[2] == 2);
  CHECK(c.eligible[3] == 1);  // user 2 unobservable from offset 3 on
  CHECK(c.eligible[6] == 1);
}

TEST_CASE("windowed retention restricts the cohort") {
  ActivityLog log(DayRange{0, 30});
  log.add_events(1, {{1, 2}, {1, 6}, {2, 12}, {2, 13}, {3, 25}});
  const auto c = compute_retention(log, 1, 5, DayRange{10, 20});
  CHECK(c.n0 == 1);  // only user 2 enters within the window
  CHECK(c.returned[0] == 1);
  CHECK(c.returned[1] == 1);
}

TEST_CASE("fit_exponential recovers closed-form curves") {
  const auto c1 = analytic_curve(40, [](double t) { return std::exp(-0.1 * t); });
  const auto f1 = fit_exponential(c1);
  CHECK(f1.amplitude == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f1.x0 == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(f1.rmse < 1e-9);

  const auto c2 = analytic_curve(40, [](double t) { return 0.5 * std::exp(-0.2 * t); });
  const auto f2 = fit_exponential(c2);
  CHECK(f2.amplitude == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(f2.x0 == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("fit_exponential recovers a generated cohort rate within 10%") {
  // exponential lifetimes are the a=0 case of the planted survival law
  const auto c = planted_cohort(100000, 0.0, 0.1, 40, 2024);
  const auto f = fit_exponential(c);
  CHECK(std::abs(f.x0 - 0.1) <= 0.01);
}

TEST_CASE("fit_timedep recovers closed-form parameters") {
  const auto c = analytic_curve(60, [](double t) { return std::exp(-0.4 * std::sqrt(t)); });
  const auto f = fit_timedep(c);
  CHECK(std::abs(f.a - 0.5) <= 1e-3);
  CHECK(std::abs(f.xa - 0.2) <= 1e-3);
  CHECK(f.converged);
}

TEST_CASE("fit_timedep pinned to a=0 matches the exponential slope") {
  const auto c = analytic_curve(50, [](double t) { return std::exp(-0.13 * t); });
  const auto pinned = fit_timedep(c, 0.0);
  const auto expo = fit_exponential(c);
  CHECK(std::abs(pinned.xa - expo.x0) < 1e-9);
}

TEST_CASE("fit_timedep recovers a planted cohort within 5%") {
  const auto c = planted_cohort(100000, 0.4, 0.3, 60, 99);
  const auto f = fit_timedep(c);
  CHECK(std::abs(f.a - 0.4) / 0.4 <= 0.05);
  CHECK(std::abs(f.xa - 0.3) / 0.3 <= 0.05);
}

TEST_CASE("timedep residual never exceeds the amplitude-free exponential") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = rng.uniform(0.1, 0.8);
    const double xa = rng.uniform(0.05, 0.5);
    const auto c = planted_cohort(20000, a, xa, 45, rng.u64());
    const auto timedep = fit_timedep(c);
    const auto pinned = fit_timedep(c, 0.0);  // amplitude-free exponential
    CHECK(timedep.rmse <= pinned.rmse + 1e-12);
  }
}

TEST_CASE("fitters demand enough signal") {
  RetentionCurve tiny;
  tiny.n0 = 3;
  for (int t = 0; t <= 10; ++t) {
    tiny.returned.push_back(1);
    tiny.eligible.push_back(3);
    tiny.probability.push_back(1.0 / 3.0);
  }
  CHECK_THROWS_AS(fit_exponential(tiny), std::invalid_argument);
  CHECK_THROWS_AS(fit_timedep(tiny), std::invalid_argument);
}

TEST_CASE("zero probabilities trigger the flagged nonlinear fallback") {
  auto c = analytic_curve(30, [](double t) { return std::exp(-0.3 * t); });
  c.probability[25] = 0.0;
  c.returned[25] = 0;
  const auto f = fit_exponential(c);
  CHECK_FALSE(f.log_space);
  CHECK(f.x0 == doctest::Approx(0.3).epsilon(0.05));
  const auto td = fit_timedep(c);
  CHECK_FALSE(td.log_space);
}

TEST_CASE("predict_retention closed-form values") {
  RetentionFit expo;
  expo.model = RetentionModel::exponential;
  expo.amplitude = 1.0;
  expo.x0 = 0.0;
  CHECK(predict_retention(expo, 0.0) == 1.0);
  CHECK(predict_retention(expo, 50.0) == 1.0);

  RetentionFit td;
  td.model = RetentionModel::timedep;
  td.a = 0.0;
  td.xa = 0.1;
  CHECK(predict_retention(td, 10.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  td.a = 0.5;
  td.xa = 0.2;
  CHECK(predict_retention(td, 100.0) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
  CHECK(predict_retention(td, 0.0) == 1.0);
}

TEST_CASE("predictions strictly decrease for positive rates") {
  RetentionFit expo;
  expo.model = RetentionModel::exponential;
  expo.amplitude = 0.9;
  expo.x0 = 0.05;
  RetentionFit td;
  td.model = RetentionModel::timedep;
  td.a = 0.6;
  td.xa = 0.15;
  for (int t = 0; t < 80; ++t) {
    CHECK(predict_retention(expo, double(t + 1)) < predict_retention(expo, double(t)));
    CHECK(predict_retention(td, double(t + 1)) < predict_retention(td, double(t)));
  }
}

TEST_CASE("recovery over random planted parameters has low median error") {
  Rng rng(7);
  std::vector<double> err_a, err_xa;
  for (int trial = 0; trial < 12; ++trial) {
    const double a = rng.uniform(0.1, 0.8);
    const double xa = rng.uniform(0.05, 0.5);
    const auto c = planted_cohort(50000, a, xa, 60, rng.u64());
    const auto f = fit_timedep(c);
    err_a.push_back(std::abs(f.a - a) / a);
    err_xa.push_back(std::abs(f.xa - xa) / xa);
  }
  std::sort(err_a.begin(), err_a.end());
  std::sort(err_xa.begin(), err_xa.end());
  CHECK(err_a[err_a.size() / 2] <= 0.10);
  CHECK(err_xa[err_xa.size() / 2] <= 0.10);
}
