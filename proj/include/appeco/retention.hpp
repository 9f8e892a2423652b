#pragma once

#include <optional>
#include <string>
#include <vector>

#include "appeco/core.hpp"

namespace appeco {

// Cohort-aggregated return probabilities with right-censoring: a user whose
// first login is fewer than t days before the end of the horizon cannot
// contribute to offset t and is excluded from its denominator.
struct RetentionCurve {
  std::uint64_t n0 = 0;                  // users entering the curve
  std::vector<std::uint64_t> returned;   // N(t): users active t days after first login
  std::vector<std::uint64_t> eligible;   // censoring denominator per offset
  std::vector<double> probability;       // P(t) = N(t)/eligible(t); NaN when eligible = 0

  std::size_t max_offset() const { return returned.empty() ? 0 : returned.size() - 1; }
};

// When a window is given, the cohort is restricted to users whose first
// event falls inside it and censoring runs against the window end instead of
// the horizon end.
RetentionCurve compute_retention(const ActivityLog& log, AppId app, int max_offset,
                                 std::optional<DayRange> window = {});

enum class RetentionModel { exponential, timedep };

struct RetentionFit {
  RetentionModel model = RetentionModel::exponential;
  double amplitude = 1.0;  // A (exponential only)
  double x0 = 0.0;         // exponential decay rate
  double a = 0.0;          // timedep exponent, [0, 0.99]
  double xa = 0.0;         // timedep rate
  double rmse = 0.0;       // weighted RMSE on the fitted objective
  int fit_first = 0;       // offset range used
  int fit_last = 0;
  bool log_space = true;   // false when the zero-probability fallback ran
  bool converged = true;
};

// Weighted least squares of log P(t) against log A - x0 t over t in
// [2, max_offset], weights = eligible(t). Offsets with P(t) = 0 trigger a
// flagged nonlinear fallback on P itself.
RetentionFit fit_exponential(const RetentionCurve& curve);

// Weighted least squares of log P(t) against -x_a t^(1-a)/(1-a) over t in
// [1, max_offset]: coarse grid on a with the closed-form optimal x_a per grid
// point, then Nelder-Mead refinement box-constrained to a in [0, 0.99].
// pin_a fixes the exponent (the closed-form rate is still fitted).
RetentionFit fit_timedep(const RetentionCurve& curve, std::optional<double> pin_a = {});

double predict_retention(const RetentionFit& fit, double t);

void save_retention_fits_csv(const std::string& path, std::span<const AppId> apps,
                             std::span<const RetentionFit> exponential,
                             std::span<const RetentionFit> timedep);

}  // namespace appeco
