#include "appeco/retention.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "appeco/optim.hpp"
#include "appeco/util.hpp"

namespace appeco {

RetentionCurve compute_retention(const ActivityLog& log, AppId app, int max_offset,
                                 std::optional<DayRange> window) {
  const DayRange range = window.value_or(log.horizon());
  if (max_offset < 0) throw std::invalid_argument("compute_retention: negative max_offset");
  if (max_offset >= range.length()) {
    throw std::invalid_argument("compute_retention: max_offset exceeds observation range");
  }
  if (!log.horizon().contains(range)) {
    throw std::invalid_argument("compute_retention: window outside log horizon");
  }
  const auto users = log.event_users(app);
  const auto days = log.event_days(app);

  RetentionCurve curve;
  curve.returned.assign(std::size_t(max_offset) + 1, 0);
  curve.eligible.assign(std::size_t(max_offset) + 1, 0);

  std::size_t i = 0;
  while (i < users.size()) {
    const UserId u = users[i];
    // events are sorted by (user, day); the run starts at the first login
    const Day first = days[i];
    const std::size_t run_start = i;
    for (; i < users.size() && users[i] == u; ++i) {
    }
    if (!range.contains(first)) continue;  // cohort entry outside the window
    for (std::size_t e = run_start; e < i; ++e) {
      if (days[e] > range.last) continue;
      const Day offset = days[e] - first;
      if (offset <= Day(max_offset)) ++curve.returned[std::size_t(offset)];
    }
    ++curve.n0;
    const Day observable = range.last - first;  // largest offset this user can show
    const Day cap = std::min(observable, Day(max_offset));
    for (Day t = 0; t <= cap; ++t) ++curve.eligible[std::size_t(t)];
  }

  curve.probability.assign(std::size_t(max_offset) + 1, std::nan(""));
  for (std::size_t t = 0; t < curve.probability.size(); ++t) {
    if (curve.eligible[t] > 0) {
      curve.probability[t] = double(curve.returned[t]) / double(curve.eligible[t]);
    }
  }
  return curve;
}

namespace {

struct FitPoints {
  std::vector<double> t;
  std::vector<double> p;
  std::vector<double> w;
  bool has_zero = false;
};

FitPoints collect_points(const RetentionCurve& curve, int first_offset) {
  FitPoints pts;
  for (std::size_t t = std::size_t(first_offset); t < curve.probability.size(); ++t) {
    if (curve.eligible[t] == 0) continue;
    const double p = curve.probability[t];
    if (std::isnan(p)) continue;
    pts.t.push_back(double(t));
    pts.p.push_back(p);
    pts.w.push_back(double(curve.eligible[t]));
    if (p <= 0.0) pts.has_zero = true;
  }
  return pts;
}

void require_enough_signal(const RetentionCurve& curve) {
  int strong = 0;
  for (std::size_t t = 0; t < curve.eligible.size(); ++t) {
    if (curve.eligible[t] >= 30) ++strong;
  }
  if (strong < 5) {
    throw std::invalid_argument("retention fit: need >= 5 offsets with eligible >= 30");
  }
}

double weighted_rmse(const std::vector<double>& residuals, const std::vector<double>& w) {
  double sse = 0.0, sw = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    sse += w[i] * residuals[i] * residuals[i];
    sw += w[i];
  }
  return sw > 0.0 ? std::sqrt(sse / sw) : 0.0;
}

double timedep_g(double t, double a) { return std::pow(t, 1.0 - a) / (1.0 - a); }

// weighted SSE of log P against -x_a * g(t; a)
double timedep_log_sse(const FitPoints& pts, double a, double xa) {
  double sse = 0.0;
  for (std::size_t i = 0; i < pts.t.size(); ++i) {
    const double r = std::log(pts.p[i]) + xa * timedep_g(pts.t[i], a);
    sse += pts.w[i] * r * r;
  }
  return sse;
}

double timedep_closed_form_rate(const FitPoints& pts, double a) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < pts.t.size(); ++i) {
    const double g = timedep_g(pts.t[i], a);
    num -= pts.w[i] * g * std::log(pts.p[i]);
    den += pts.w[i] * g * g;
  }
  return den > 0.0 ? std::max(0.0, num / den) : 0.0;
}

}  // namespace

RetentionFit fit_exponential(const RetentionCurve& curve) {
  require_enough_signal(curve);
  const auto pts = collect_points(curve, 2);
  if (pts.t.size() < 2) throw std::invalid_argument("fit_exponential: too few usable offsets");

  RetentionFit fit;
  fit.model = RetentionModel::exponential;
  fit.fit_first = 2;
  fit.fit_last = int(curve.max_offset());

  if (!pts.has_zero) {
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < pts.t.size(); ++i) {
      const double y = std::log(pts.p[i]);
      sw += pts.w[i];
      sx += pts.w[i] * pts.t[i];
      sy += pts.w[i] * y;
      sxx += pts.w[i] * pts.t[i] * pts.t[i];
      sxy += pts.w[i] * pts.t[i] * y;
    }
    const double det = sw * sxx - sx * sx;
    if (det == 0.0) throw std::invalid_argument("fit_exponential: degenerate design");
    const double slope = (sw * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / sw;
    fit.x0 = -slope;
    fit.amplitude = std::exp(intercept);
    std::vector<double> res(pts.t.size());
    for (std::size_t i = 0; i < pts.t.size(); ++i) {
      res[i] = std::log(pts.p[i]) - (intercept + slope * pts.t[i]);
    }
    fit.rmse = weighted_rmse(res, pts.w);
    return fit;
  }

  // zero probabilities in range: fit P directly (flagged via log_space)
  fit.log_space = false;
  double p_hi = 0.0;
  for (const double p : pts.p) p_hi = std::max(p_hi, p);
  auto objective = [&](const std::vector<double>& x) {
    const double amp = x[0], rate = x[1];
    if (amp <= 0.0 || rate < 0.0) return std::numeric_limits<double>::infinity();
    double sse = 0.0;
    for (std::size_t i = 0; i < pts.t.size(); ++i) {
      const double r = pts.p[i] - amp * std::exp(-rate * pts.t[i]);
      sse += pts.w[i] * r * r;
    }
    return sse;
  };
  const auto res = nelder_mead(objective, {std::max(p_hi, 1e-6), 0.1}, {0.1, 0.05}, 4000);
  fit.amplitude = res.x[0];
  fit.x0 = res.x[1];
  std::vector<double> residuals(pts.t.size());
  for (std::size_t i = 0; i < pts.t.size(); ++i) {
    residuals[i] = pts.p[i] - fit.amplitude * std::exp(-fit.x0 * pts.t[i]);
  }
  fit.rmse = weighted_rmse(residuals, pts.w);
  fit.converged = res.converged;
  return fit;
}

RetentionFit fit_timedep(const RetentionCurve& curve, std::optional<double> pin_a) {
  require_enough_signal(curve);
  const auto pts = collect_points(curve, 1);
  if (pts.t.size() < 2) throw std::invalid_argument("fit_timedep: too few usable offsets");
  if (pin_a && (*pin_a < 0.0 || *pin_a > 0.99)) {
    throw std::invalid_argument("fit_timedep: pinned a outside [0, 0.99]");
  }

  RetentionFit fit;
  fit.model = RetentionModel::timedep;
  fit.fit_first = 1;
  fit.fit_last = int(curve.max_offset());

  if (!pts.has_zero) {
    double best_a = pin_a.value_or(0.0);
    double best_xa = timedep_closed_form_rate(pts, best_a);
    double best_sse = timedep_log_sse(pts, best_a, best_xa);
    if (!pin_a) {
      for (int step = 1; step < 20; ++step) {
        const double a = 0.05 * double(step);
        const double xa = timedep_closed_form_rate(pts, a);
        const double sse = timedep_log_sse(pts, a, xa);
        if (sse < best_sse) {
          best_sse = sse;
          best_a = a;
          best_xa = xa;
        }
      }
      auto objective = [&](const std::vector<double>& x) {
        if (x[0] < 0.0 || x[0] > 0.99 || x[1] < 0.0) {
          return std::numeric_limits<double>::infinity();
        }
        return timedep_log_sse(pts, x[0], x[1]);
      };
      const auto refined = nelder_mead(objective, {best_a, best_xa},
                                       {0.025, std::max(0.05 * best_xa, 1e-4)}, 4000);
      if (refined.value <= best_sse) {
        best_a = refined.x[0];
        best_xa = refined.x[1];
        best_sse = refined.value;
      } else {
        fit.converged = false;
      }
    }
    fit.a = best_a;
    fit.xa = best_xa;
    double sw = 0.0;
    for (const double w : pts.w) sw += w;
    fit.rmse = sw > 0.0 ? std::sqrt(best_sse / sw) : 0.0;
    return fit;
  }

  // zero probabilities: linear-space fallback, grid then refinement
  fit.log_space = false;
  auto linear_sse = [&](double a, double xa) {
    double sse = 0.0;
    for (std::size_t i = 0; i < pts.t.size(); ++i) {
      const double r = pts.p[i] - std::exp(-xa * timedep_g(pts.t[i], a));
      sse += pts.w[i] * r * r;
    }
    return sse;
  };
  double best_a = pin_a.value_or(0.0);
  double best_xa = 0.1;
  double best_sse = linear_sse(best_a, best_xa);
  for (int step = 0; step < 20; ++step) {
    const double a = pin_a.value_or(0.05 * double(step));
    for (const double xa : {0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
      const double sse = linear_sse(a, xa);
      if (sse < best_sse) {
        best_sse = sse;
        best_a = a;
        best_xa = xa;
      }
    }
    if (pin_a) break;
  }
  if (pin_a) {
    auto objective = [&](const std::vector<double>& x) {
      if (x[0] < 0.0) return std::numeric_limits<double>::infinity();
      return linear_sse(*pin_a, x[0]);
    };
    const auto refined = nelder_mead(objective, {best_xa}, {0.05}, 4000);
    if (refined.value <= best_sse) {
      best_xa = refined.x[0];
      best_sse = refined.value;
    } else {
      fit.converged = false;
    }
  } else {
    auto objective = [&](const std::vector<double>& x) {
      if (x[0] < 0.0 || x[0] > 0.99 || x[1] < 0.0) {
        return std::numeric_limits<double>::infinity();
      }
      return linear_sse(x[0], x[1]);
    };
    const auto refined = nelder_mead(objective, {best_a, best_xa}, {0.025, 0.05}, 4000);
    if (refined.value <= best_sse) {
      best_a = refined.x[0];
      best_xa = refined.x[1];
      best_sse = refined.value;
    } else {
      fit.converged = false;
    }
  }
  fit.a = best_a;
  fit.xa = best_xa;
  double sw = 0.0;
  for (const double w : pts.w) sw += w;
  fit.rmse = sw > 0.0 ? std::sqrt(best_sse / sw) : 0.0;
  return fit;
}

double predict_retention(const RetentionFit& fit, double t) {
  if (t < 0.0) throw std::invalid_argument("predict_retention: negative offset");
  double value;
  if (fit.model == RetentionModel::exponential) {
    value = fit.amplitude * std::exp(-fit.x0 * t);
  } else {
    value = std::exp(-fit.xa * std::pow(t, 1.0 - fit.a) / (1.0 - fit.a));
  }
  return std::clamp(value, 0.0, 1.0);
}

void save_retention_fits_csv(const std::string& path, std::span<const AppId> apps,
                             std::span<const RetentionFit> exponential,
                             std::span<const RetentionFit> timedep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write retention file: " + path);
  out << "app_id,model,A,x0,a,x_a,rmse,converged\n";
  for (std::size_t i = 0; i < apps.size(); ++i) {
    const auto& e = exponential[i];
    out << apps[i] << ",exponential," << format_double(e.amplitude) << ','
        << format_double(e.x0) << ",nan,nan," << format_double(e.rmse) << ','
        << (e.converged ? 1 : 0) << '\n';
    const auto& d = timedep[i];
    out << apps[i] << ",timedep,nan,nan," << format_double(d.a) << ',' << format_double(d.xa)
        << ',' << format_double(d.rmse) << ',' << (d.converged ? 1 : 0) << '\n';
  }
}

}  // namespace appeco
