#include "appeco/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "appeco/rng.hpp"
#include "appeco/util.hpp"

namespace appeco {

double kolmogorov_q(double lambda) {
  if (lambda <= 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * double(j) * double(j) * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16 * std::abs(sum) || term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> sample_a, std::span<const double> sample_b) {
  if (sample_a.empty() || sample_b.empty()) {
    throw std::invalid_argument("ks_test: samples must be non-empty");
  }
  std::vector<double> a(sample_a.begin(), sample_a.end());
  std::vector<double> b(sample_b.begin(), sample_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size());
  const double nb = double(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  return {d, kolmogorov_q(lambda)};
}

BootstrapBands bootstrap_mean_ci(std::span<const double> sample, int n_boot, std::uint64_t seed) {
  if (sample.empty()) throw std::invalid_argument("bootstrap_mean_ci: empty sample");
  if (n_boot < 100) throw std::invalid_argument("bootstrap_mean_ci: n_boot must be >= 100");
  Rng rng(seed);
  const std::size_t n = sample.size();
  std::vector<double> means(static_cast<std::size_t>(n_boot), 0.0);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sample[std::size_t(rng.below(n))];
    m = s / double(n);
  }
  std::sort(means.begin(), means.end());
  BootstrapBands bands;
  bands.n_boot = n_boot;
  bands.center = quantile_sorted(means, 0.5);
  auto band = [&](double coverage) {
    const double tail = (1.0 - coverage) / 2.0;
    return std::pair{quantile_sorted(means, tail), quantile_sorted(means, 1.0 - tail)};
  };
  std::tie(bands.lo68, bands.hi68) = band(0.68);
  std::tie(bands.lo95, bands.hi95) = band(0.95);
  std::tie(bands.lo997, bands.hi997) = band(0.997);
  return bands;
}

double binomial_band(double p_hat, std::uint64_t n) {
  if (p_hat < 0.0 || p_hat > 1.0) throw std::invalid_argument("binomial_band: p out of range");
  if (n < 1) throw std::invalid_argument("binomial_band: n must be >= 1");
  return 4.4172 * std::sqrt(p_hat * (1.0 - p_hat) / double(n));
}

double entropy_bits(std::span<const double> distribution) {
  double total = 0.0;
  double h = 0.0;
  for (double p : distribution) {
    if (p < 0.0) throw std::invalid_argument("entropy_bits: negative probability");
    total += p;
    if (p > 0.0) h -= p * std::log2(p);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("entropy_bits: probabilities must sum to 1");
  }
  return h;
}

}  // namespace appeco
