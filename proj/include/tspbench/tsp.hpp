#pragma once

#include <atomic>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tspbench/errors.hpp"
#include "tspbench/perm.hpp"

namespace tspbench {

/// City label. City 0 is the fixed start and end of every tour.
using City = int;
using Cost = std::uint64_t;

inline constexpr int kMaxCities = kMaxFactorialArg;
/// Entries above this bound are rejected so that a 64-bit sum over at most
/// kMaxCities legs can never overflow.
inline constexpr std::int64_t kMaxEntryCost = 1'000'000'000;
/// Cost of an empty search; the identity of the best-result reduction.
inline constexpr Cost kNoTour = std::numeric_limits<Cost>::max();

/// Dense n x n matrix of non-negative trip costs, immutable once built.
/// Asymmetric instances are allowed.
class CostMatrix {
 public:
  explicit CostMatrix(const std::vector<std::vector<std::int64_t>>& rows) {
    const auto n = rows.size();
    if (n < 2) throw ValidationError("cost matrix needs at least 2 cities, got " + std::to_string(n));
    n_ = static_cast<int>(n);
    costs_.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) {
        throw ValidationError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                              " entries, expected " + std::to_string(n));
      }
      for (std::size_t j = 0; j < n; ++j) {
        const auto v = rows[i][j];
        if (v < 0) {
          throw ValidationError("negative cost at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
        if (v > kMaxEntryCost) {
          throw ValidationError("cost at (" + std::to_string(i) + "," + std::to_string(j) +
                                ") exceeds " + std::to_string(kMaxEntryCost));
        }
        if (i == j && v != 0) throw ValidationError("nonzero diagonal at city " + std::to_string(i));
        costs_.push_back(static_cast<Cost>(v));
      }
    }
  }

  int size() const { return n_; }

  Cost operator()(City from, City to) const {
    return costs_[static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
                  static_cast<std::size_t>(to)];
  }

  std::vector<std::vector<std::int64_t>> rows() const {
    std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(i)].push_back(static_cast<std::int64_t>((*this)(i, j)));
    }
    return out;
  }

  bool symmetric() const {
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        if ((*this)(i, j) != (*this)(j, i)) return false;
      }
    }
    return true;
  }

  Cost min_off_diagonal() const {
    Cost best = kNoTour;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        if (i != j) best = std::min(best, (*this)(i, j));
      }
    }
    return best;
  }

  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<Cost> costs_;
};

/// Best tour found over some set of permutations.
struct SolveResult {
  Cost cost = kNoTour;
  /// Closed tour 0 -> ... -> 0, or empty when nothing was evaluated.
  std::vector<City> path;
  PermIndex evaluated = 0;

  bool found() const { return !path.empty(); }
  friend bool operator==(const SolveResult&, const SolveResult&) = default;
};

namespace detail {

// Unchecked cost of the closed tour 0 -> order... -> 0.
inline Cost tour_cost(std::span<const City> order, const CostMatrix& m) {
  Cost total = m(0, order.front());
  for (std::size_t i = 1; i < order.size(); ++i) total += m(order[i - 1], order[i]);
  return total + m(order.back(), 0);
}

inline std::vector<City> close_tour(std::span<const City> order) {
  std::vector<City> path;
  path.reserve(order.size() + 2);
  path.push_back(0);
  path.insert(path.end(), order.begin(), order.end());
  path.push_back(0);
  return path;
}

inline std::vector<City> tour_labels(int n) {
  std::vector<City> labels(static_cast<std::size_t>(n - 1));
  std::iota(labels.begin(), labels.end(), 1);
  return labels;
}

}  // namespace detail

/// Cost of visiting `order` (a permutation of 1..n-1) starting and ending at city 0.
inline Cost path_cost(std::span<const City> order, const CostMatrix& m) {
  const int n = m.size();
  if (order.size() != static_cast<std::size_t>(n - 1)) {
    throw ValidationError("tour has " + std::to_string(order.size()) + " cities, expected " +
                          std::to_string(n - 1));
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (City c : order) {
    if (c < 1 || c >= n) throw ValidationError("city label " + std::to_string(c) + " out of range");
    if (seen[static_cast<std::size_t>(c)]) throw ValidationError("city " + std::to_string(c) + " repeated");
    seen[static_cast<std::size_t>(c)] = true;
  }
  return detail::tour_cost(order, m);
}

inline Cost path_cost(const std::vector<City>& order, const CostMatrix& m) {
  return path_cost(std::span<const City>(order), m);
}

/// Number of candidate tours, (n-1)!.
inline PermIndex tour_count(const CostMatrix& m) { return factorial(m.size() - 1); }

/// Minimum over the permutations with lexicographic index in [range.start, range.end).
/// Strict improvement while scanning in lexicographic order keeps the
/// lexicographically smallest optimum within the range.
inline SolveResult solve_range(const CostMatrix& m, WorkRange range) {
  if (m.size() > kMaxCities) {
    throw CapacityError(std::to_string(m.size()) + " cities exceeds the limit of " + std::to_string(kMaxCities));
  }
  const PermIndex total = tour_count(m);
  if (range.start > range.end || range.end > total) {
    throw RangeError("work range [" + to_string(range.start) + ", " + to_string(range.end) +
                     ") outside [0, " + to_string(total) + ")");
  }
  SolveResult result;
  result.evaluated = range.size();
  if (range.empty()) return result;

  const auto labels = detail::tour_labels(m.size());
  auto order = unrank(range.start, labels);
  auto best = order;
  Cost best_cost = kNoTour;
  for (PermIndex left = range.size();;) {
    const Cost c = detail::tour_cost(order, m);
    if (c < best_cost) {
      best_cost = c;
      best = order;
    }
    if (--left == 0) break;
    next_permutation(order);
  }
  result.cost = best_cost;
  result.path = detail::close_tour(best);
  return result;
}

/// Exhaustive search over all (n-1)! tours.
inline SolveResult solve_serial(const CostMatrix& m) {
  if (m.size() > kMaxCities) {
    throw CapacityError(std::to_string(m.size()) + " cities exceeds the limit of " + std::to_string(kMaxCities));
  }
  return solve_range(m, {0, tour_count(m)});
}

namespace fault_injection {
/// Test hook: when set, the cross-worker reduction prefers the worse result.
inline std::atomic<bool> invert_reduction{false};
}  // namespace fault_injection

/// Canonical ordering: lower cost wins, ties go to the lexicographically
/// smaller tour. Sentinel (empty) results lose to any found tour.
inline bool preferred(const SolveResult& a, const SolveResult& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.path < b.path;
}

/// Associative, commutative merge of two partial results.
inline SolveResult combine(SolveResult a, const SolveResult& b) {
  const bool keep_a = fault_injection::invert_reduction.load(std::memory_order_relaxed)
                          ? !preferred(a, b)
                          : !preferred(b, a);
  const PermIndex evaluated = a.evaluated + b.evaluated;
  if (!keep_a) a = b;
  a.evaluated = evaluated;
  return a;
}

inline SolveResult reduce(std::span<const SolveResult> parts) {
  SolveResult acc;
  for (const auto& part : parts) acc = combine(std::move(acc), part);
  return acc;
}

// ---------------------------------------------------------------------------
// Instance files: line 1 holds n, then n lines of n comma-separated
// non-negative integers with a zero diagonal.

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::int64_t parse_int(std::string_view field, std::size_t line_no) {
  field = trim(field);
  std::int64_t v = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw ValidationError("line " + std::to_string(line_no) + ": not an integer: '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace detail

inline CostMatrix read_instance(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!detail::trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw ValidationError("instance file is empty");
  const auto n = detail::parse_int(line, line_no);
  if (n < 2 || n > kMaxCities) {
    throw ValidationError("city count " + std::to_string(n) + " outside [2, " + std::to_string(kMaxCities) + "]");
  }
  std::vector<std::vector<std::int64_t>> rows;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!next_line()) throw ValidationError("expected " + std::to_string(n) + " matrix rows, got " + std::to_string(i));
    std::vector<std::int64_t> row;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(detail::parse_int(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (static_cast<std::int64_t>(row.size()) != n) {
      throw ValidationError("line " + std::to_string(line_no) + ": ragged row with " + std::to_string(row.size()) +
                            " entries, expected " + std::to_string(n));
    }
    rows.push_back(std::move(row));
  }
  if (next_line()) throw ValidationError("line " + std::to_string(line_no) + ": unexpected content after matrix");
  return CostMatrix(rows);
}

inline CostMatrix read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file '" + path + "'");
  return read_instance(in);
}

inline void write_instance(std::ostream& out, const CostMatrix& m) {
  out << m.size() << '\n';
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

}  // namespace tspbench
