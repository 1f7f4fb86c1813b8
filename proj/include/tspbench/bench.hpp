#pragma once

/**
 * @file bench.hpp
 * @brief Benchmark sweeps over (n, backend) with warm-up and repetitions,
 * plus the JSON report and CSV tables they produce.
 *
 * Report JSON (schema_version "1"):
 *
 *     {
 *       "schema_version": "1",
 *       "environment": "...",
 *       "plan": {"n_values": [...], "backends": ["serial", "threads:4", ...],
 *                "repetitions": 5, "warmup": 1, "seed": 42, "symmetric": true},
 *       "instances": [{"n": 8, "matrix": [[...]], "optimal_cost": 123, "optimal_path": [...]}],
 *       "records": [{"backend": "threads:4", "n": 8, "p": 4, "runs": [...],
 *                    "mean_seconds": ..., "min_seconds": ..., "median_seconds": ...}],
 *       "metrics": [{"backend": "threads:4", "n": 8, "p": 4, "mean_seconds": ...,
 *                    "speedup": ..., "efficiency": ..., "karp_flatt": ... | null}]
 *     }
 *
 * Raw CSV:     backend,n,p,run_index,seconds            (seconds to 9 decimals)
 * Metrics CSV: backend,n,p,mean_seconds,speedup,efficiency,karp_flatt
 *              (mean_seconds to 9 decimals, the ratios to 3; karp_flatt empty when p = 1)
 */

#include <sys/utsname.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tspbench/backends.hpp"
#include "tspbench/errors.hpp"
#include "tspbench/instance.hpp"
#include "tspbench/metrics.hpp"
#include "tspbench/tsp.hpp"

namespace tspbench {

inline constexpr const char* kReportSchemaVersion = "1";

struct BenchPlan {
  std::vector<int> n_values;
  std::vector<BackendSpec> backends;
  int repetitions = 5;
  int warmup = 1;
  std::uint64_t seed = 42;
  bool symmetric = true;

  void validate() const {
    if (n_values.empty()) throw ValidationError("bench plan has no city counts");
    for (int n : n_values) {
      if (n < 2 || n > kMaxCities) {
        throw ValidationError("city count " + std::to_string(n) + " outside [2, " + std::to_string(kMaxCities) + "]");
      }
    }
    if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
    if (warmup < 0) throw ValidationError("warmup must be non-negative");
    for (const auto& b : backends) {
      if (b.threads < 1 || b.processes < 1) throw ValidationError("backend '" + b.label() + "' has a zero count");
    }
  }

  friend bool operator==(const BenchPlan&, const BenchPlan&) = default;
};

/// The instance a sweep used for one n, and its optimum.
struct InstanceSummary {
  int n = 0;
  std::vector<std::vector<std::int64_t>> matrix;
  Cost optimal_cost = 0;
  std::vector<City> optimal_path;

  friend bool operator==(const InstanceSummary&, const InstanceSummary&) = default;
};

struct ReportFile {
  std::string schema_version = kReportSchemaVersion;
  std::string environment;
  BenchPlan plan;
  std::vector<InstanceSummary> instances;
  std::vector<TimingRecord> records;
  std::vector<MetricsRow> metrics;

  friend bool operator==(const ReportFile&, const ReportFile&) = default;
};

/// Metrics for every non-serial record against the serial mean of the same n.
inline std::vector<MetricsRow> report_metrics(std::span<const TimingRecord> records) {
  std::map<int, double> baseline;
  std::vector<TimingRecord> parallel;
  for (const auto& r : records) {
    if (r.backend == "serial") {
      baseline[r.n] = r.mean_time;
    } else {
      parallel.push_back(r);
    }
  }
  return build_metrics_table(parallel, baseline);
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json to_json(const ReportFile& report) {
  using nlohmann::ordered_json;
  ordered_json plan;
  plan["n_values"] = report.plan.n_values;
  ordered_json backends = ordered_json::array();
  for (const auto& b : report.plan.backends) backends.push_back(b.label());
  plan["backends"] = backends;
  plan["repetitions"] = report.plan.repetitions;
  plan["warmup"] = report.plan.warmup;
  plan["seed"] = report.plan.seed;
  plan["symmetric"] = report.plan.symmetric;

  ordered_json instances = ordered_json::array();
  for (const auto& inst : report.instances) {
    ordered_json j;
    j["n"] = inst.n;
    j["matrix"] = inst.matrix;
    j["optimal_cost"] = inst.optimal_cost;
    j["optimal_path"] = inst.optimal_path;
    instances.push_back(std::move(j));
  }

  ordered_json records = ordered_json::array();
  for (const auto& r : report.records) {
    ordered_json j;
    j["backend"] = r.backend;
    j["n"] = r.n;
    j["p"] = r.p;
    j["runs"] = r.runs;
    j["mean_seconds"] = r.mean_time;
    j["min_seconds"] = r.min_time;
    j["median_seconds"] = r.median_time;
    records.push_back(std::move(j));
  }

  ordered_json metrics = ordered_json::array();
  for (const auto& m : report.metrics) {
    ordered_json j;
    j["backend"] = m.backend;
    j["n"] = m.n;
    j["p"] = m.p;
    j["mean_seconds"] = m.mean_time;
    j["speedup"] = m.speedup;
    j["efficiency"] = m.efficiency;
    j["karp_flatt"] = m.karp_flatt ? ordered_json(*m.karp_flatt) : ordered_json(nullptr);
    metrics.push_back(std::move(j));
  }

  ordered_json out;
  out["schema_version"] = report.schema_version;
  out["environment"] = report.environment;
  out["plan"] = std::move(plan);
  out["instances"] = std::move(instances);
  out["records"] = std::move(records);
  out["metrics"] = std::move(metrics);
  return out;
}

inline std::string emit_report(const ReportFile& report) { return to_json(report).dump(2) + "\n"; }

namespace detail {

template <class T>
T get_field(const nlohmann::ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("report: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("report: field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline ReportFile parse_report(std::string_view text) {
  using nlohmann::ordered_json;
  using detail::get_field;
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("report is not valid JSON: ") + e.what());
  }
  ReportFile report;
  report.schema_version = get_field<std::string>(j, "schema_version");
  if (report.schema_version != kReportSchemaVersion) {
    throw ValidationError("unsupported report schema_version '" + report.schema_version + "'");
  }
  report.environment = get_field<std::string>(j, "environment");

  const auto plan = get_field<ordered_json>(j, "plan");
  report.plan.n_values = get_field<std::vector<int>>(plan, "n_values");
  for (const auto& b : get_field<std::vector<std::string>>(plan, "backends")) {
    report.plan.backends.push_back(BackendSpec::parse(b));
  }
  report.plan.repetitions = get_field<int>(plan, "repetitions");
  report.plan.warmup = get_field<int>(plan, "warmup");
  report.plan.seed = get_field<std::uint64_t>(plan, "seed");
  report.plan.symmetric = get_field<bool>(plan, "symmetric");

  for (const auto& inst : get_field<ordered_json>(j, "instances")) {
    report.instances.push_back({get_field<int>(inst, "n"),
                                get_field<std::vector<std::vector<std::int64_t>>>(inst, "matrix"),
                                get_field<Cost>(inst, "optimal_cost"),
                                get_field<std::vector<City>>(inst, "optimal_path")});
  }
  for (const auto& r : get_field<ordered_json>(j, "records")) {
    TimingRecord rec;
    rec.backend = get_field<std::string>(r, "backend");
    rec.n = get_field<int>(r, "n");
    rec.p = get_field<int>(r, "p");
    rec.runs = get_field<std::vector<double>>(r, "runs");
    rec.mean_time = get_field<double>(r, "mean_seconds");
    rec.min_time = get_field<double>(r, "min_seconds");
    rec.median_time = get_field<double>(r, "median_seconds");
    report.records.push_back(std::move(rec));
  }
  for (const auto& m : get_field<ordered_json>(j, "metrics")) {
    MetricsRow row;
    row.backend = get_field<std::string>(m, "backend");
    row.n = get_field<int>(m, "n");
    row.p = get_field<int>(m, "p");
    row.mean_time = get_field<double>(m, "mean_seconds");
    row.speedup = get_field<double>(m, "speedup");
    row.efficiency = get_field<double>(m, "efficiency");
    const auto kf = get_field<ordered_json>(m, "karp_flatt");
    if (!kf.is_null()) row.karp_flatt = kf.get<double>();
    report.metrics.push_back(std::move(row));
  }
  return report;
}

inline ReportFile read_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open report '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_report(buffer.str());
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

inline void write_raw_csv(std::ostream& out, std::span<const TimingRecord> records) {
  out << "backend,n,p,run_index,seconds\n";
  for (const auto& r : records) {
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      out << r.backend << ',' << r.n << ',' << r.p << ',' << i << ',' << format_fixed(r.runs[i], 9) << '\n';
    }
  }
}

inline void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "backend,n,p,mean_seconds,speedup,efficiency,karp_flatt\n";
  for (const auto& r : rows) {
    out << r.backend << ',' << r.n << ',' << r.p << ',' << format_fixed(r.mean_time, 9) << ','
        << format_fixed(r.speedup, 3) << ',' << format_fixed(r.efficiency, 3) << ','
        << (r.karp_flatt ? format_fixed(*r.karp_flatt, 3) : std::string()) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sweeps

inline std::string describe_environment() {
  std::ostringstream out;
  utsname u{};
  if (::uname(&u) == 0) out << u.sysname << ' ' << u.release << ' ' << u.machine << "; host " << u.nodename << "; ";
  out << "logical cpus " << std::thread::hardware_concurrency();
#ifdef __VERSION__
  out << "; compiler " << __VERSION__;
#endif
  return out.str();
}

struct BenchOptions {
  ProcessOptions process;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

inline std::string describe_result(const SolveResult& r) {
  std::string s = "cost " + (r.found() ? std::to_string(r.cost) : std::string("none")) + " path [";
  for (std::size_t i = 0; i < r.path.size(); ++i) s += (i ? "," : "") + std::to_string(r.path[i]);
  return s + "]";
}

/// Runs `warmup` untimed and `repetitions` timed end-to-end solves for every
/// (n, backend). The serial backend always runs first and is the reference:
/// any run that disagrees with it aborts the sweep with a CorrectnessError.
inline ReportFile run_bench(const BenchPlan& plan, const BenchOptions& options = {}) {
  plan.validate();
  std::vector<BackendSpec> backends{BackendSpec::serial()};
  for (const auto& b : plan.backends) {
    if (std::ranges::find(backends, b) == backends.end()) backends.push_back(b);
  }

  ReportFile report;
  report.plan = plan;
  report.environment = describe_environment();
  using clock = std::chrono::steady_clock;

  for (int n : plan.n_values) {
    const CostMatrix matrix = generate_instance(n, plan.seed, plan.symmetric);
    std::optional<SolveResult> reference;
    for (const auto& backend : backends) {
      auto check = [&](const SolveResult& r) {
        if (!reference) {
          reference = r;
        } else if (r.cost != reference->cost || r.path != reference->path) {
          throw CorrectnessError("backend " + backend.label() + " disagrees with serial at n=" + std::to_string(n) +
                                 ": " + describe_result(r) + " vs " + describe_result(*reference));
        }
      };
      for (int w = 0; w < plan.warmup; ++w) check(solve(matrix, backend, options.process));
      std::vector<double> runs;
      for (int rep = 0; rep < plan.repetitions; ++rep) {
        const auto start = clock::now();
        const auto result = solve(matrix, backend, options.process);
        const std::chrono::duration<double> elapsed = clock::now() - start;
        check(result);
        // steady_clock granularity can round a trivially small solve to zero.
        runs.push_back(std::max(elapsed.count(), 1e-9));
      }
      auto record = TimingRecord::from_runs(backend.label(), n, backend.parallel_elements(), std::move(runs));
      if (options.log != nullptr) {
        *options.log << "n=" << n << " " << record.backend << " mean " << format_fixed(record.mean_time, 6) << " s\n";
      }
      report.records.push_back(std::move(record));
    }
    report.instances.push_back({n, matrix.rows(), reference->cost, reference->path});
  }
  report.metrics = report_metrics(report.records);
  return report;
}

}  // namespace tspbench
