#include "appeco/rng.hpp"

namespace appeco {

std::vector<std::uint32_t> Rng::sample_indices(std::uint32_t n, std::uint32_t k) {
  if (k > n) k = n;
  std::vector<std::uint32_t> pool(n);
  for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    std::uint32_t j = i + std::uint32_t(below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace appeco
