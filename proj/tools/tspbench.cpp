// tspbench: generate instances, solve them with any backend, run benchmark
// sweeps and turn their reports into metrics tables.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 execution or
// correctness failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tspbench/tspbench.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitExecution = 2;
constexpr int kBigThreshold = 13;

// Writes to `path`, or to stdout when path is "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw tspbench::ValidationError("cannot write '" + path + "'");
  fn(out);
  if (!out) throw tspbench::ExecutionError("failed writing '" + path + "'");
}

tspbench::BackendSpec backend_from_flags(const std::string& kind, int procs, int threads) {
  using tspbench::BackendSpec;
  if (kind == "serial") return BackendSpec::serial();
  if (kind == "threads" || kind == "shared_memory") return BackendSpec::shared_memory(threads);
  if (kind == "procs" || kind == "message_passing") return BackendSpec::message_passing(procs);
  if (kind == "hybrid") return BackendSpec::hybrid(procs, threads);
  return BackendSpec::parse(kind);
}

}  // namespace

int main(int argc, char** argv) {
  if (auto code = tspbench::maybe_run_worker(argc, argv)) return *code;

  CLI::App app{"Exact brute-force TSP solver and parallel benchmark harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random instance file");
  int gen_n = 0;
  std::uint64_t gen_seed = 42;
  bool gen_symmetric = false;
  std::string gen_out = "-";
  gen->add_option("--n", gen_n, "Number of cities")->required();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_flag("--symmetric", gen_symmetric, "Mirror the upper triangle");
  gen->add_option("--out", gen_out, "Output file ('-' for stdout)")->capture_default_str();

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance file");
  std::string solve_input;
  std::string solve_backend = "serial";
  int solve_procs = 1;
  int solve_threads = 1;
  solve->add_option("--input", solve_input, "Instance file")->required();
  solve->add_option("--backend", solve_backend, "serial | threads | procs | hybrid")->capture_default_str();
  solve->add_option("--procs", solve_procs, "Worker processes")->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--threads", solve_threads, "Threads per worker")->check(CLI::PositiveNumber)->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep");
  std::vector<int> bench_n{8, 9, 10, 11, 12};
  std::vector<std::string> bench_backends{"serial", "threads:2", "threads:4", "procs:2", "procs:4"};
  tspbench::BenchPlan plan;
  bool bench_asymmetric = false;
  bool bench_big = false;
  std::string bench_out;
  std::string bench_csv;
  std::string bench_metrics_csv;
  bench->add_option("--n", bench_n, "City counts, comma separated")->delimiter(',')->capture_default_str();
  bench->add_option("--backends", bench_backends, "serial, threads:T, procs:P, hybrid:PxT")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--reps", plan.repetitions, "Timed repetitions")->capture_default_str();
  bench->add_option("--warmup", plan.warmup, "Untimed warm-up runs")->capture_default_str();
  bench->add_option("--seed", plan.seed, "Instance seed")->capture_default_str();
  bench->add_flag("--asymmetric", bench_asymmetric, "Use asymmetric instances");
  bench->add_flag("--big", bench_big, "Allow n >= 13 (long runs)");
  bench->add_option("--out", bench_out, "JSON report file");
  bench->add_option("--csv", bench_csv, "Raw timings CSV file");
  bench->add_option("--metrics-csv", bench_metrics_csv, "Metrics CSV file");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Speedup, efficiency and Karp-Flatt table from a report");
  std::string metrics_input;
  std::string metrics_out = "-";
  metrics->add_option("--input", metrics_input, "JSON report")->required();
  metrics->add_option("--out", metrics_out, "Metrics CSV ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*gen) {
      const auto m = tspbench::generate_instance(gen_n, gen_seed, gen_symmetric);
      with_output(gen_out, [&](std::ostream& out) { tspbench::write_instance(out, m); });
    } else if (*solve) {
      const auto m = tspbench::read_instance_file(solve_input);
      const auto spec = backend_from_flags(solve_backend, solve_procs, solve_threads);
      const auto start = std::chrono::steady_clock::now();
      const auto result = tspbench::solve(m, spec);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      std::cout << "cost: " << result.cost << "\npath:";
      for (auto c : result.path) std::cout << ' ' << c;
      std::cout << "\nbackend: " << spec.label() << "\nseconds: " << tspbench::format_fixed(elapsed.count(), 6)
                << '\n';
    } else if (*bench) {
      plan.n_values = bench_n;
      plan.symmetric = !bench_asymmetric;
      for (const auto& b : bench_backends) plan.backends.push_back(tspbench::BackendSpec::parse(b));
      for (int n : plan.n_values) {
        if (n >= kBigThreshold && !bench_big) {
          throw tspbench::ValidationError("n = " + std::to_string(n) + " takes a long time; pass --big to confirm");
        }
      }
      tspbench::BenchOptions options;
      options.log = &std::cerr;
      const auto report = tspbench::run_bench(plan, options);
      if (!bench_out.empty()) with_output(bench_out, [&](std::ostream& out) { out << tspbench::emit_report(report); });
      if (!bench_csv.empty()) {
        with_output(bench_csv, [&](std::ostream& out) { tspbench::write_raw_csv(out, report.records); });
      }
      if (!bench_metrics_csv.empty()) {
        with_output(bench_metrics_csv, [&](std::ostream& out) { tspbench::write_metrics_csv(out, report.metrics); });
      }
      if (bench_out.empty() && bench_csv.empty() && bench_metrics_csv.empty()) {
        tspbench::write_metrics_csv(std::cout, report.metrics);
      }
    } else if (*metrics) {
      const auto report = tspbench::read_report_file(metrics_input);
      const auto rows = tspbench::report_metrics(report.records);
      with_output(metrics_out, [&](std::ostream& out) { tspbench::write_metrics_csv(out, rows); });
    }
  } catch (const tspbench::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const tspbench::RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const tspbench::CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const tspbench::CorrectnessError& e) {
    std::cerr << "correctness failure: " << e.what() << '\n';
    return kExitExecution;
  } catch (const std::exception& e) {
    std::cerr << "execution failure: " << e.what() << '\n';
    return kExitExecution;
  }
  return 0;
}
