#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "appeco/rng.hpp"
#include "appeco/stats.hpp"

using namespace appeco;

namespace {

// independent oracle: direct ECDF sweep over the merged sample grid
double ks_d_oracle(std::vector<double> a, std::vector<double> b) {
  std::vector<double> grid = a;
  grid.insert(grid.end(), b.begin(), b.end());
  std::sort(grid.begin(), grid.end());
  double d = 0.0;
  for (const double x : grid) {
    double fa = 0.0, fb = 0.0;
    for (const double v : a) fa += v <= x ? 1.0 : 0.0;
    for (const double v : b) fb += v <= x ? 1.0 : 0.0;
    d = std::max(d, std::abs(fa / double(a.size()) - fb / double(b.size())));
  }
  return d;
}

}  // namespace

TEST_CASE("ks_test on identical samples") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto res = ks_test(xs, xs);
  CHECK(res.d == 0.0);
  CHECK(res.p_value == 1.0);
}

TEST_CASE("ks_test on disjoint point masses") {
  const std::vector<double> a{0.0, 0.0, 0.0};
  const std::vector<double> b{1.0, 1.0, 1.0};
  CHECK(ks_test(a, b).d == 1.0);
}

TEST_CASE("ks_test separates shifted normals") {
  Rng rng(123);
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) {
    a.push_back(rng.normal());
    b.push_back(rng.normal() + 0.5);
  }
  const auto res = ks_test(a, b);
  CHECK(res.d == doctest::Approx(ks_d_oracle(a, b)).epsilon(1e-12));
  CHECK(res.p_value < 0.01);
}

TEST_CASE("ks_test agrees with the brute-force D on random data") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a, b;
    const int na = 3 + int(rng.below(40));
    const int nb = 3 + int(rng.below(40));
    for (int i = 0; i < na; ++i) a.push_back(rng.uniform01());
    for (int i = 0; i < nb; ++i) b.push_back(std::floor(rng.uniform01() * 8.0));  // with ties
    CHECK(ks_test(a, b).d == doctest::Approx(ks_d_oracle(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("ks_test is symmetric and monotone-invariant") {
  Rng rng(77);
  std::vector<double> a, b;
  for (int i = 0; i < 200; ++i) {
    a.push_back(rng.uniform01());
    b.push_back(rng.uniform01() * rng.uniform01());
  }
  const auto r1 = ks_test(a, b);
  const auto r2 = ks_test(b, a);
  CHECK(r1.d == r2.d);
  CHECK(r1.p_value == r2.p_value);
  auto squash = [](std::vector<double> v) {
    for (double& x : v) x = std::exp(3.0 * x);  // strictly monotone
    return v;
  };
  const auto r3 = ks_test(squash(a), squash(b));
  CHECK(r3.d == doctest::Approx(r1.d).epsilon(1e-12));
}

TEST_CASE("ks_test rejects empty samples") {
  const std::vector<double> xs{1.0};
  const std::vector<double> empty;
  CHECK_THROWS_AS(ks_test(xs, empty), std::invalid_argument);
}

TEST_CASE("bootstrap bands on a constant sample collapse") {
  const std::vector<double> xs(50, 4.25);
  const auto bands = bootstrap_mean_ci(xs, 500, 1);
  CHECK(bands.center == 4.25);
  CHECK(bands.lo997 == 4.25);
  CHECK(bands.hi997 == 4.25);
}

TEST_CASE("bootstrap is deterministic and nested") {
  Rng rng(9);
  std::vector<double> xs;
  for (int i = 0; i < 200; ++i) xs.push_back(rng.uniform01());
  const auto b1 = bootstrap_mean_ci(xs, 400, 31);
  const auto b2 = bootstrap_mean_ci(xs, 400, 31);
  CHECK(b1.lo68 == b2.lo68);
  CHECK(b1.hi997 == b2.hi997);
  CHECK(b1.lo997 <= b1.lo95);
  CHECK(b1.lo95 <= b1.lo68);
  CHECK(b1.hi68 <= b1.hi95);
  CHECK(b1.hi95 <= b1.hi997);
}

TEST_CASE("bootstrap 95% half-width matches the CLT oracle on uniforms") {
  Rng rng(4242);
  std::vector<double> xs;
  for (int i = 0; i < 10000; ++i) xs.push_back(rng.uniform01());
  const auto bands = bootstrap_mean_ci(xs, 2000, 8);
  const double half = 0.5 * (bands.hi95 - bands.lo95);
  const double clt = 1.96 / std::sqrt(12.0 * 10000.0);
  CHECK(std::abs(half - clt) <= 0.2 * clt);
}

TEST_CASE("binomial_band uses the 4.4172 constant") {
  CHECK(binomial_band(0.5, 10000) == 4.4172 * std::sqrt(0.25 / 10000.0));
  CHECK(binomial_band(0.5, 10000) == doctest::Approx(0.022086).epsilon(1e-9));
  CHECK(binomial_band(0.0, 100) == 0.0);
  CHECK(binomial_band(1.0, 100) == 0.0);
  CHECK(binomial_band(0.5, 1) == doctest::Approx(2.2086).epsilon(1e-9));
}

TEST_CASE("entropy_bits formula values") {
  const std::vector<double> half{0.5, 0.5};
  CHECK(entropy_bits(half) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> point{1.0};
  CHECK(entropy_bits(point) == 0.0);
  const std::vector<double> skew{0.25, 0.75};
  CHECK(entropy_bits(skew) == doctest::Approx(0.811278).epsilon(1e-6));
  const std::vector<double> with_zero{0.5, 0.5, 0.0};
  CHECK(entropy_bits(with_zero) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy is maximized by the uniform distribution") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 2 + rng.below(8);
    std::vector<double> p(k);
    double total = 0.0;
    for (double& x : p) {
      x = rng.uniform01() + 1e-9;
      total += x;
    }
    for (double& x : p) x /= total;
    CHECK(entropy_bits(p) <= std::log2(double(k)) + 1e-12);
  }
}

TEST_CASE("entropy rejects bad distributions") {
  const std::vector<double> negative{1.2, -0.2};
  CHECK_THROWS_AS(entropy_bits(negative), std::invalid_argument);
  const std::vector<double> short_mass{0.3, 0.3};
  CHECK_THROWS_AS(entropy_bits(short_mass), std::invalid_argument);
}
