#pragma once

/**
 * @file perm.hpp
 * @brief Permutation arithmetic: factorials, lexicographic successor,
 * ranking/unranking and splitting of the permutation space among workers.
 *
 * Indices are 128-bit so that (N-1)! is representable for every N up to 34.
 */

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tspbench/errors.hpp"

namespace tspbench {

/// Position of a permutation in lexicographic order.
using PermIndex = unsigned __int128;

/// Largest n for which n! fits in a PermIndex (34! < 2^128 < 35!).
inline constexpr int kMaxFactorialArg = 34;

inline PermIndex factorial(int n) {
  if (n < 0) throw ValidationError("factorial of a negative number");
  if (n > kMaxFactorialArg) {
    throw CapacityError(std::to_string(n) + "! does not fit in 128 bits (max " +
                        std::to_string(kMaxFactorialArg) + ")");
  }
  PermIndex result = 1;
  for (int k = 2; k <= n; ++k) result *= static_cast<PermIndex>(k);
  return result;
}

inline std::string to_string(PermIndex value) {
  if (value == 0) return "0";
  std::string digits;
  while (value != 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

/// Parses an unsigned decimal string; rejects signs, blanks and overflow.
inline PermIndex parse_perm_index(std::string_view text) {
  if (text.empty()) throw ValidationError("empty permutation index");
  constexpr PermIndex kMax = ~PermIndex{0};
  PermIndex value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw ValidationError("permutation index is not a decimal integer: '" +
                            std::string(text) + "'");
    }
    const auto digit = static_cast<PermIndex>(c - '0');
    if (value > (kMax - digit) / 10) {
      throw ValidationError("permutation index exceeds 128 bits: '" +
                            std::string(text) + "'");
    }
    value = value * 10 + digit;
  }
  return value;
}

/// Advances `seq` to its lexicographic successor. Returns false and leaves
/// `seq` sorted ascending when it already was the last permutation.
template <std::ranges::bidirectional_range R>
bool next_permutation(R&& seq) {
  return std::next_permutation(std::ranges::begin(seq), std::ranges::end(seq));
}

/// Permutation of `items` (sorted, distinct) at lexicographic position `index`.
/// Decodes the factorial number system digit by digit.
template <std::totally_ordered T>
std::vector<T> unrank(PermIndex index, std::span<const T> items) {
  if (std::ranges::adjacent_find(items, std::ranges::greater_equal{}) != items.end()) {
    throw ValidationError("unrank requires strictly ascending items");
  }
  const int k = static_cast<int>(items.size());
  if (index >= factorial(k)) {
    throw RangeError("permutation index " + to_string(index) + " out of range for " +
                     std::to_string(k) + " items");
  }
  std::vector<T> remaining(items.begin(), items.end());
  std::vector<T> out;
  out.reserve(items.size());
  for (int pos = k - 1; pos >= 0; --pos) {
    const PermIndex block = factorial(pos);
    const auto digit = static_cast<std::ptrdiff_t>(index / block);
    index %= block;
    out.push_back(remaining[static_cast<std::size_t>(digit)]);
    remaining.erase(remaining.begin() + digit);
  }
  return out;
}

template <std::totally_ordered T>
std::vector<T> unrank(PermIndex index, const std::vector<T>& items) {
  return unrank(index, std::span<const T>(items));
}

/// Inverse of unrank: lexicographic position of `perm` among the
/// permutations of its own (sorted) label set.
template <std::totally_ordered T>
PermIndex rank(std::span<const T> perm) {
  std::vector<T> sorted(perm.begin(), perm.end());
  std::ranges::sort(sorted);
  if (std::ranges::adjacent_find(sorted) != sorted.end()) {
    throw ValidationError("rank requires distinct labels");
  }
  const int k = static_cast<int>(perm.size());
  PermIndex index = 0;
  for (int i = 0; i < k; ++i) {
    PermIndex smaller_after = 0;
    for (int j = i + 1; j < k; ++j) {
      if (perm[static_cast<std::size_t>(j)] < perm[static_cast<std::size_t>(i)]) ++smaller_after;
    }
    index += smaller_after * factorial(k - 1 - i);
  }
  return index;
}

template <std::totally_ordered T>
PermIndex rank(const std::vector<T>& perm) {
  return rank(std::span<const T>(perm));
}

/// Half-open interval [start, end) of permutation indices owned by one worker.
struct WorkRange {
  PermIndex start = 0;
  PermIndex end = 0;

  PermIndex size() const { return end - start; }
  bool empty() const { return start == end; }
  friend bool operator==(const WorkRange&, const WorkRange&) = default;
  friend auto operator<=>(const WorkRange&, const WorkRange&) = default;
};

/// Splits [0, total) into `workers` contiguous ranges. With q = total / workers
/// and r = total % workers, the first r ranges hold q + 1 indices and the rest
/// hold q. Surplus workers get empty ranges at the tail.
inline std::vector<WorkRange> partition(PermIndex total, std::size_t workers) {
  if (workers == 0) throw ValidationError("partition needs at least one worker");
  const PermIndex quotient = total / workers;
  const PermIndex remainder = total % workers;
  std::vector<WorkRange> ranges;
  ranges.reserve(workers);
  PermIndex cursor = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const PermIndex length = quotient + (w < remainder ? 1 : 0);
    ranges.push_back({cursor, cursor + length});
    cursor += length;
  }
  return ranges;
}

/// partition() applied to an arbitrary range instead of [0, total).
inline std::vector<WorkRange> partition(WorkRange range, std::size_t workers) {
  auto ranges = partition(range.size(), workers);
  for (auto& r : ranges) {
    r.start += range.start;
    r.end += range.start;
  }
  return ranges;
}

}  // namespace tspbench
