#include "appeco/sirs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "appeco/optim.hpp"
#include "appeco/rng.hpp"
#include "appeco/util.hpp"

namespace appeco {

void SirsParams::validate() const {
  if (s0 <= 0.0) throw std::invalid_argument("sirs: S0 must be > 0");
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0 || epsilon < 0.0) {
    throw std::invalid_argument("sirs: rates must be >= 0");
  }
  if (gamma > 1.0) throw std::invalid_argument("sirs: gamma must be <= 1");
}

namespace {

SirsState step(const SirsParams& p, const SirsState& s) {
  const double rate = std::min(1.0, p.alpha + p.beta * s.a / p.s0);
  const double adopted = s.u * rate;
  const double deactivated = p.gamma * s.a;
  const double reactivated = std::min(p.epsilon * s.i * s.a / p.s0, s.i);
  SirsState next;
  next.u = s.u - adopted;
  next.a = s.a + adopted - deactivated + reactivated;
  next.i = s.i + deactivated - reactivated;
  return next;
}

void check_state(const SirsParams& p, const SirsState& s) {
  if (s.u < -1e-9 * p.s0 || s.a < -1e-9 * p.s0 || s.i < -1e-9 * p.s0) {
    throw std::runtime_error("sirs: negative compartment");
  }
  if (std::abs(s.u + s.a + s.i - p.s0) > 1e-6 * p.s0) {
    throw std::runtime_error("sirs: conservation violated");
  }
}

std::vector<double> rollout(const SirsParams& p, SirsState s, int horizon, bool checked) {
  std::vector<double> active;
  active.reserve(std::size_t(std::max(horizon, 0)));
  for (int t = 0; t < horizon; ++t) {
    active.push_back(s.a);
    s = step(p, s);
    if (checked) check_state(p, s);
  }
  return active;
}

}  // namespace

std::vector<double> simulate_sirs(const SirsParams& params, int horizon, double a0, double i0) {
  params.validate();
  if (a0 < 0.0 || i0 < 0.0 || a0 + i0 > params.s0) {
    throw std::invalid_argument("sirs: initial compartments must be >= 0 and sum to <= S0");
  }
  return rollout(params, {params.s0 - a0 - i0, a0, i0}, horizon, true);
}

std::vector<double> simulate_sirs_from(const SirsParams& params, SirsState state, int horizon) {
  params.validate();
  return rollout(params, state, horizon, true);
}

SirsState sirs_state_after(const SirsParams& params, int horizon, double a0, double i0) {
  params.validate();
  SirsState s{params.s0 - a0 - i0, a0, i0};
  for (int t = 0; t < horizon; ++t) s = step(params, s);
  return s;
}

namespace {

double window_rmse(const SirsParams& p, std::span<const double> observed) {
  SirsState s{p.s0 - observed.front(), observed.front(), 0.0};
  double sse = 0.0;
  for (std::size_t t = 0; t < observed.size(); ++t) {
    const double r = s.a - observed[t];
    sse += r * r;
    s = step(p, s);
  }
  return std::sqrt(sse / double(observed.size()));
}

}  // namespace

SirsFit fit_sirs(std::span<const double> observed, DayRange window, int budget,
                 std::uint64_t seed) {
  if (int(observed.size()) != window.length()) {
    throw std::invalid_argument("fit_sirs: observed length must match window");
  }
  if (window.length() < 30) throw std::invalid_argument("fit_sirs: window must cover >= 30 days");
  if (budget < 1000) throw std::invalid_argument("fit_sirs: budget must be >= 1000");

  double peak = 0.0;
  for (const double v : observed) peak = std::max(peak, v);

  SirsFit fit;
  fit.window = window;
  if (peak <= 0.0) {
    // nothing ever happened; the empty model reproduces it exactly
    fit.params = SirsParams{1.0, 0.0, 0.0, 0.0, 0.0};
    fit.rmse = 0.0;
    fit.converged = true;
    fit.fitted.assign(observed.size(), 0.0);
    return fit;
  }

  const double a0 = observed.front();
  Rng rng(mix_seed(seed, 0x5152));
  SirsParams best;
  double best_rmse = std::numeric_limits<double>::infinity();
  const double log_lo = std::log(std::max(peak, a0 + 1e-9));
  const double log_hi = std::log(1000.0 * std::max(peak, 1.0));
  for (int i = 0; i < budget; ++i) {
    SirsParams cand;
    cand.s0 = std::exp(rng.uniform(log_lo, log_hi));
    cand.alpha = rng.uniform01();
    cand.beta = rng.uniform01();
    cand.gamma = rng.uniform01();
    cand.epsilon = rng.uniform(0.0, 10.0);
    const double rmse = window_rmse(cand, observed);
    if (rmse < best_rmse) {
      best_rmse = rmse;
      best = cand;
    }
  }

  // simplex refinement in (log S0, alpha, beta, gamma, epsilon)
  auto objective = [&](const std::vector<double>& x) {
    SirsParams p;
    p.s0 = std::exp(x[0]);
    p.alpha = x[1];
    p.beta = x[2];
    p.gamma = x[3];
    p.epsilon = x[4];
    if (p.s0 < a0 || p.alpha < 0.0 || p.alpha > 1.0 || p.beta < 0.0 || p.beta > 1.0 ||
        p.gamma < 0.0 || p.gamma > 1.0 || p.epsilon < 0.0 || p.epsilon > 10.0) {
      return std::numeric_limits<double>::infinity();
    }
    return window_rmse(p, observed);
  };
  const auto refined = nelder_mead(
      objective, {std::log(best.s0), best.alpha, best.beta, best.gamma, best.epsilon},
      {0.2, 0.02, 0.02, 0.02, 0.1}, 4000);
  if (refined.value < best_rmse) {
    best.s0 = std::exp(refined.x[0]);
    best.alpha = refined.x[1];
    best.beta = refined.x[2];
    best.gamma = refined.x[3];
    best.epsilon = refined.x[4];
    best_rmse = refined.value;
  }

  fit.params = best;
  fit.rmse = best_rmse;
  fit.converged = best_rmse <= 0.05 * peak;
  SirsState s{best.s0 - a0, a0, 0.0};
  fit.fitted = rollout(best, s, window.length(), false);
  return fit;
}

std::vector<double> predict_sirs(const SirsFit& fit, int horizon) {
  if (horizon <= 0) return {};
  const double a0 = fit.fitted.empty() ? 0.0 : fit.fitted.front();
  SirsState s{fit.params.s0 - a0, a0, 0.0};
  for (int t = 0; t < fit.window.length(); ++t) s = step(fit.params, s);
  return rollout(fit.params, s, horizon, false);
}

void save_sirs_fits_csv(const std::string& path, std::span<const AppId> apps,
                        std::span<const SirsFit> fits) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write sirs file: " + path);
  out << "app_id,S0,alpha,beta,gamma,epsilon,rmse,converged\n";
  for (std::size_t i = 0; i < apps.size(); ++i) {
    const auto& f = fits[i];
    out << apps[i] << ',' << format_double(f.params.s0) << ',' << format_double(f.params.alpha)
        << ',' << format_double(f.params.beta) << ',' << format_double(f.params.gamma) << ','
        << format_double(f.params.epsilon) << ',' << format_double(f.rmse) << ','
        << (f.converged ? 1 : 0) << '\n';
  }
}

}  // namespace appeco
