#include "appeco/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace appeco {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, std::vector<double> step, int max_evals,
                          double tol) {
  const std::size_t n = start.size();
  if (n == 0 || step.size() != n) throw std::invalid_argument("nelder_mead: bad dimensions");

  struct Vertex {
    std::vector<double> x;
    double fx;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  simplex.push_back({start, eval(start)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = start;
    x[i] += step[i] != 0.0 ? step[i] : 1e-4;
    simplex.push_back({x, eval(x)});
  }

  // stable sort keeps index order on ties, making the path deterministic
  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
  };
  order();

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  while (evals < max_evals) {
    const Vertex& best = simplex.front();
    const Vertex& worst = simplex.back();
    double spread = std::abs(worst.fx - best.fx);
    if (spread <= tol * (std::abs(best.fx) + tol)) {
      return {best.x, best.fx, evals, true};
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < simplex.size() - 1; ++j) centroid[i] += simplex[j].x[i];
      centroid[i] /= double(n);
    }

    auto blend = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (centroid[i] - worst.x[i]);
      return x;
    };

    std::vector<double> xr = blend(alpha);
    const double fr = eval(xr);
    if (fr < best.fx) {
      std::vector<double> xe = blend(gamma);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex.back() = {std::move(xe), fe};
      } else {
        simplex.back() = {std::move(xr), fr};
      }
    } else if (fr < simplex[simplex.size() - 2].fx) {
      simplex.back() = {std::move(xr), fr};
    } else {
      std::vector<double> xc = blend(fr < worst.fx ? rho : -rho);
      const double fc = eval(xc);
      if (fc < std::min(fr, worst.fx)) {
        simplex.back() = {std::move(xc), fc};
      } else {
        // shrink toward the best vertex
        for (std::size_t j = 1; j < simplex.size(); ++j) {
          for (std::size_t i = 0; i < n; ++i) {
            simplex[j].x[i] = simplex[0].x[i] + sigma * (simplex[j].x[i] - simplex[0].x[i]);
          }
          simplex[j].fx = eval(simplex[j].x);
        }
      }
    }
    order();
  }
  return {simplex.front().x, simplex.front().fx, evals, false};
}

}  // namespace appeco
