#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace appeco {

// Dense row-major matrix used for histograms and count grids.
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
  double sum() const;
};

// Shortest round-trip decimal representation (std::to_chars). Used for every
// numeric value we serialize so reruns are byte-identical.
std::string format_double(double x);

std::string join(const std::vector<std::string>& parts, char sep);

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks over the
// worker pool; any exception is rethrown on the calling thread. threads == 0
// uses hardware concurrency. Callers must keep fn(i) independent of execution
// order for results to stay worker-count independent.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

double median_of(std::vector<double> values);  // by value: sorts its copy
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace appeco
