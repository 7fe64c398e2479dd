#include "scav/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace scav {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = 0x5ca7f00dULL;  // arbitrary nonzero tag
  for (std::uint64_t p : parts) s = mix64(s ^ mix64(p));
  return s;
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - lo + 1;
  // rejection sampling over the top multiple of `range`
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + static_cast<int>(x % range);
}

double Rng::exponential() {
  // 1 - u is in (0, 1], so the log is finite
  return -std::log(1.0 - uniform01());
}

int Rng::categorical(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("categorical: empty support");
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (total <= 0.0) throw std::invalid_argument("categorical: zero total mass");
  const double u = uniform01() * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return last_positive;
  }
  // float residue lands here; return the last positive cell
  return last_positive;
}

std::vector<int> Rng::sample_without_replacement(int population, int count) {
  if (count > population)
    throw std::invalid_argument("sample_without_replacement: count > population");
  std::vector<int> pool(population);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = uniform_int(i, population - 1);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

std::vector<double> Rng::dirichlet_flat(int count) {
  std::vector<double> w(count);
  double total = 0.0;
  for (auto& x : w) {
    x = exponential();
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace scav
