#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace appeco {

struct KsResult {
  double d = 0.0;
  double p_value = 1.0;
};

// Two-sample two-sided Kolmogorov-Smirnov test. D is the sup distance
// between the empirical CDFs; the p-value uses the asymptotic Kolmogorov
// distribution with the usual small-sample correction
//   lambda = (sqrt(n_e) + 0.12 + 0.11/sqrt(n_e)) * D,
//   n_e = n_a*n_b/(n_a+n_b).
KsResult ks_test(std::span<const double> sample_a, std::span<const double> sample_b);

// Q(lambda) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2), clamped to [0,1].
double kolmogorov_q(double lambda);

struct BootstrapBands {
  double center = 0.0;  // median of the bootstrap means
  double lo68 = 0.0, hi68 = 0.0;
  double lo95 = 0.0, hi95 = 0.0;
  double lo997 = 0.0, hi997 = 0.0;
  int n_boot = 0;
};

// Percentile bootstrap of the sample mean at 68/95/99.7%. Bands are nested
// by construction. Deterministic for a fixed seed.
BootstrapBands bootstrap_mean_ci(std::span<const double> sample, int n_boot, std::uint64_t seed);

// Half-width of the 99.999% binomial confidence band, 4.4172*sqrt(p(1-p)/n).
double binomial_band(double p_hat, std::uint64_t n);

// Shannon entropy in bits; 0*log(0) == 0. Probabilities must sum to 1
// within 1e-9 and be non-negative.
double entropy_bits(std::span<const double> distribution);

}  // namespace appeco
