#pragma once

// Speedup, efficiency and the Karp-Flatt experimentally determined serial
// fraction, computed from mean wall times.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "tspbench/errors.hpp"

namespace tspbench {

inline double speedup(double t_serial, double t_parallel) {
  if (!(t_serial > 0.0) || !(t_parallel > 0.0)) throw ValidationError("speedup needs positive times");
  return t_serial / t_parallel;
}

inline double efficiency(double psi, int p) {
  if (!(psi > 0.0)) throw ValidationError("efficiency needs a positive speedup");
  if (p < 1) throw ValidationError("efficiency needs p >= 1");
  return psi / p;
}

/// e = (1/psi - 1/p) / (1 - 1/p). Undefined for p < 2.
inline double karp_flatt(double psi, int p) {
  if (p < 2) throw ValidationError("Karp-Flatt metric is undefined for p < 2");
  if (!(psi > 0.0)) throw ValidationError("Karp-Flatt metric needs a positive speedup");
  const double inv_p = 1.0 / p;
  return (1.0 / psi - inv_p) / (1.0 - inv_p);
}

/// Wall times of one (backend, n, p) configuration.
struct TimingRecord {
  std::string backend;
  int n = 0;
  int p = 1;
  std::vector<double> runs;
  double mean_time = 0.0;
  double min_time = 0.0;
  double median_time = 0.0;

  static TimingRecord from_runs(std::string backend, int n, int p, std::vector<double> runs) {
    if (runs.empty()) throw ValidationError("timing record needs at least one run");
    for (double t : runs) {
      if (!(t > 0.0)) throw ValidationError("timing runs must be positive");
    }
    TimingRecord r{std::move(backend), n, p, std::move(runs)};
    auto sorted = r.runs;
    std::ranges::sort(sorted);
    r.min_time = sorted.front();
    const auto mid = sorted.size() / 2;
    r.median_time = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    // Summation rounding must not push the mean outside the observed range.
    r.mean_time = std::clamp(mean, sorted.front(), sorted.back());
    return r;
  }

  friend bool operator==(const TimingRecord&, const TimingRecord&) = default;
};

struct MetricsRow {
  std::string backend;
  int n = 0;
  int p = 1;
  double mean_time = 0.0;
  double speedup = 0.0;
  double efficiency = 0.0;
  /// Absent when p == 1.
  std::optional<double> karp_flatt;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

inline MetricsRow metrics_row(const TimingRecord& record, double serial_time) {
  MetricsRow row;
  row.backend = record.backend;
  row.n = record.n;
  row.p = record.p;
  row.mean_time = record.mean_time;
  row.speedup = speedup(serial_time, record.mean_time);
  row.efficiency = efficiency(row.speedup, record.p);
  if (record.p >= 2) row.karp_flatt = karp_flatt(row.speedup, record.p);
  return row;
}

/// One row per record, sorted by (backend, n, p).
inline std::vector<MetricsRow> build_metrics_table(std::span<const TimingRecord> records,
                                                   const std::map<int, double>& serial_baseline) {
  std::vector<MetricsRow> rows;
  rows.reserve(records.size());
  for (const auto& record : records) {
    const auto it = serial_baseline.find(record.n);
    if (it == serial_baseline.end()) {
      throw ValidationError("no serial baseline for n = " + std::to_string(record.n));
    }
    rows.push_back(metrics_row(record, it->second));
  }
  std::ranges::sort(rows, {}, [](const MetricsRow& r) { return std::tie(r.backend, r.n, r.p); });
  return rows;
}

}  // namespace tspbench
