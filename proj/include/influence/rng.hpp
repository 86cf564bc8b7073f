#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace influence {

// All randomness in the project flows through these helpers so that runs
// are reproducible bit-for-bit from a seed. std::* distributions are
// avoided on purpose: their output is implementation-defined.

/// Uniform double in (0,1), 53-bit resolution, never returns 0.
inline double uniform01(std::mt19937_64& gen) {
  while (true) {
    double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

/// Uniform integer in [0, n), rejection-sampled so every value is equally
/// likely regardless of n.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % n;
}

/// One draw from the flat Dirichlet (uniform on the simplex): normalized
/// unit-rate exponentials.
inline Eigen::VectorXd dirichlet_flat(std::mt19937_64& gen, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = -std::log(uniform01(gen));
  return v / v.sum();
}

/// Stable seed for a named subtask: FNV-1a over the label, mixed with the
/// root seed through splitmix64.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view task,
                                 std::string_view detail = {}) {
  std::uint64_t h = 1469598103934665603ull;
  auto eat = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  eat(task);
  eat(detail);
  std::uint64_t z = root + h + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace influence
