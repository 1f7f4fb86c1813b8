#pragma once

#include <cstdint>
#include <vector>

#include "tspbench/errors.hpp"
#include "tspbench/tsp.hpp"

namespace tspbench {

/// SplitMix64 (Steele, Lea and Flood). Fixed so that generated instances are
/// identical on every platform and in every language that implements it.
/// Seed 1234567 yields 6457827717110365317, 3203168211198807973, ...
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline constexpr std::int64_t kMinGeneratedCost = 1;
inline constexpr std::int64_t kMaxGeneratedCost = 1000;

/// Random instance with costs 1 + (draw mod 1000). Symmetric instances draw the
/// upper triangle row by row and mirror it; asymmetric ones draw every
/// off-diagonal entry row by row.
inline CostMatrix generate_instance(int n, std::uint64_t seed, bool symmetric) {
  if (n < 2 || n > kMaxCities) {
    throw ValidationError("city count " + std::to_string(n) + " outside [2, " + std::to_string(kMaxCities) + "]");
  }
  SplitMix64 rng(seed);
  const auto span = static_cast<std::uint64_t>(kMaxGeneratedCost - kMinGeneratedCost + 1);
  auto draw = [&] { return kMinGeneratedCost + static_cast<std::int64_t>(rng.next() % span); };
  const auto size = static_cast<std::size_t>(n);
  std::vector<std::vector<std::int64_t>> rows(size, std::vector<std::int64_t>(size, 0));
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = symmetric ? i + 1 : 0; j < size; ++j) {
      if (i == j) continue;
      rows[i][j] = draw();
      if (symmetric) rows[j][i] = rows[i][j];
    }
  }
  return CostMatrix(rows);
}

}  // namespace tspbench
