#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "appeco/core.hpp"

namespace appeco {

struct SirsParams {
  double s0 = 1.0;      // susceptible pool size
  double alpha = 0.0;   // daily non-social adoption probability
  double beta = 0.0;    // daily social adoption coefficient
  double gamma = 0.0;   // daily deactivation probability
  double epsilon = 0.0; // daily reactivation coefficient

  void validate() const;
};

struct SirsState {
  double u = 0.0;  // unexposed susceptible
  double a = 0.0;  // active
  double i = 0.0;  // inactive
};

// Deterministic mean-field rollout of the active-user count. Per step, with
// adoption rate r = min(1, alpha + beta*A/S0) and reactivation flow
// min(eps*I*A/S0, I):
//   U' = U(1-r),  A' = A + U r - gamma A + flow,  I' = I + gamma A - flow.
// U+A+I = S0 is checked every step.
std::vector<double> simulate_sirs(const SirsParams& params, int horizon, double a0, double i0);

// Continues the rollout from an explicit state; used for holdout prediction.
std::vector<double> simulate_sirs_from(const SirsParams& params, SirsState state, int horizon);

SirsState sirs_state_after(const SirsParams& params, int horizon, double a0, double i0);

struct SirsFit {
  SirsParams params;
  DayRange window;
  double rmse = 0.0;
  bool converged = false;  // rmse <= 5% of the observed window peak
  std::vector<double> fitted;  // model values over the window
};

// Monte Carlo random search (log-uniform S0 in [peak, 1000*peak], uniform
// alpha/beta/gamma in [0,1], epsilon in [0,10]) followed by Nelder-Mead
// refinement of the best draw. A0 is pinned to the first observed value and
// I0 to 0. Nonconvergence is a flagged result, not an error.
SirsFit fit_sirs(std::span<const double> observed, DayRange window, int budget,
                 std::uint64_t seed);

// Rolls the fitted model past its window. Forcing an unconverged fit is the
// caller's choice; predictions from it are low-confidence by definition.
std::vector<double> predict_sirs(const SirsFit& fit, int horizon);

void save_sirs_fits_csv(const std::string& path, std::span<const AppId> apps,
                        std::span<const SirsFit> fits);

}  // namespace appeco
