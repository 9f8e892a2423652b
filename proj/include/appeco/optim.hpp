#pragma once

#include <functional>
#include <vector>

namespace appeco {

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;  // simplex collapsed below tolerance before max_evals
};

// Derivative-free Nelder-Mead minimization. Deterministic: the initial
// simplex is built from `start` plus one per-coordinate step, and all
// tie-breaks are by index. Objectives may return +inf to encode box
// constraints.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, std::vector<double> step,
                          int max_evals = 2000, double tol = 1e-10);

}  // namespace appeco
