#pragma once

/**
 * @file backends.hpp
 * @brief Serial, shared-memory, message-passing and hybrid executors.
 *
 * Every backend splits [0, (n-1)!) with partition(), evaluates the pieces
 * independently and reduces them with combine(). Because combine() breaks
 * cost ties towards the lexicographically smallest tour, all backends return
 * bit-identical results for the same instance.
 */

#include <charconv>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

#include "tspbench/errors.hpp"
#include "tspbench/perm.hpp"
#include "tspbench/process.hpp"
#include "tspbench/protocol.hpp"
#include "tspbench/tsp.hpp"

namespace tspbench {

enum class BackendKind { serial, shared_memory, message_passing, hybrid };

/// Backend plus its degree of parallelism. Textual form:
/// `serial`, `threads:T`, `procs:P`, `hybrid:PxT`.
struct BackendSpec {
  BackendKind kind = BackendKind::serial;
  int threads = 1;
  int processes = 1;

  static BackendSpec serial() { return {}; }
  static BackendSpec shared_memory(int threads) { return {BackendKind::shared_memory, threads, 1}; }
  static BackendSpec message_passing(int processes) { return {BackendKind::message_passing, 1, processes}; }
  static BackendSpec hybrid(int processes, int threads) { return {BackendKind::hybrid, threads, processes}; }

  int parallel_elements() const { return threads * processes; }

  std::string label() const {
    switch (kind) {
      case BackendKind::serial: return "serial";
      case BackendKind::shared_memory: return "threads:" + std::to_string(threads);
      case BackendKind::message_passing: return "procs:" + std::to_string(processes);
      case BackendKind::hybrid: return "hybrid:" + std::to_string(processes) + "x" + std::to_string(threads);
    }
    return "?";
  }

  static BackendSpec parse(std::string_view text) {
    auto positive = [&](std::string_view digits) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || v < 1) {
        throw ValidationError("bad backend '" + std::string(text) + "': counts must be positive integers");
      }
      return v;
    };
    if (text == "serial") return serial();
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw ValidationError("unknown backend '" + std::string(text) + "'");
    const auto name = text.substr(0, colon);
    const auto arg = text.substr(colon + 1);
    if (name == "threads") return shared_memory(positive(arg));
    if (name == "procs") return message_passing(positive(arg));
    if (name == "hybrid") {
      const auto x = arg.find('x');
      if (x == std::string_view::npos) throw ValidationError("hybrid backend needs PxT, got '" + std::string(text) + "'");
      return hybrid(positive(arg.substr(0, x)), positive(arg.substr(x + 1)));
    }
    throw ValidationError("unknown backend '" + std::string(text) + "'");
  }

  friend bool operator==(const BackendSpec&, const BackendSpec&) = default;
};

/// What one worker (thread or process) was assigned and what it found.
struct WorkerReport {
  int worker_id = 0;
  WorkRange range;
  SolveResult local_best;
};

/// Reduced result plus the per-worker reports it was built from.
struct Execution {
  SolveResult result;
  std::vector<WorkerReport> reports;
};

struct ProcessOptions {
  /// Program started in `--worker` mode. Empty means $TSPBENCH_WORKER_BIN,
  /// falling back to the running executable.
  std::string worker_binary;
};

inline std::string resolve_worker_binary(const ProcessOptions& options) {
  if (!options.worker_binary.empty()) return options.worker_binary;
  if (const char* env = std::getenv("TSPBENCH_WORKER_BIN"); env != nullptr && *env != '\0') return env;
  std::error_code ec;
  auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (ec) throw ExecutionError("cannot locate own executable for worker mode: " + ec.message());
  return self.string();
}

/// Process-level assignment for hybrid runs: one flat partition into
/// processes * threads ranges, grouped `threads` at a time per process.
inline std::vector<std::vector<WorkRange>> hybrid_assignment(PermIndex total, int processes, int threads) {
  if (processes < 1 || threads < 1) throw ValidationError("processes and threads must be positive");
  const auto flat = partition(total, static_cast<std::size_t>(processes) * static_cast<std::size_t>(threads));
  std::vector<std::vector<WorkRange>> grouped(static_cast<std::size_t>(processes));
  for (std::size_t i = 0; i < flat.size(); ++i) grouped[i / static_cast<std::size_t>(threads)].push_back(flat[i]);
  return grouped;
}

/// Threads over an arbitrary sub-range; workers own disjoint ranges and only
/// read the matrix, results are reduced after all threads joined.
inline Execution run_shared_memory(const CostMatrix& m, WorkRange range, int threads) {
  if (threads < 1) throw ValidationError("thread count must be positive");
  const auto ranges = partition(range, static_cast<std::size_t>(threads));
  std::vector<SolveResult> local(ranges.size());
  std::vector<std::exception_ptr> failures(ranges.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(ranges.size());
    try {
      for (std::size_t w = 0; w < ranges.size(); ++w) {
        pool.emplace_back([&, w] {
          try {
            local[w] = solve_range(m, ranges[w]);
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
    } catch (const std::system_error& e) {
      const auto started = pool.size();
      pool.clear();
      throw ExecutionError("cannot start worker thread " + std::to_string(started) + ": " + e.what());
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  Execution exec;
  exec.result = reduce(local);
  for (std::size_t w = 0; w < ranges.size(); ++w) {
    exec.reports.push_back({static_cast<int>(w), ranges[w], std::move(local[w])});
  }
  return exec;
}

inline Execution run_shared_memory(const CostMatrix& m, int threads) {
  return run_shared_memory(m, {0, tour_count(m)}, threads);
}

namespace detail {

inline void check_worker_result(const CostMatrix& m, const WorkRange& range, const SolveResult& r,
                                const std::string& who) {
  if (r.evaluated != range.size()) {
    throw ProtocolError(who + " evaluated " + to_string(r.evaluated) + " permutations, assigned " +
                        to_string(range.size()));
  }
  if (range.empty()) {
    if (r.found()) throw ProtocolError(who + " returned a tour for an empty range");
    return;
  }
  const auto n = static_cast<std::size_t>(m.size());
  if (r.path.size() != n + 1 || r.path.front() != 0 || r.path.back() != 0) {
    throw ProtocolError(who + " returned a malformed tour");
  }
  try {
    const std::span<const City> inner(r.path.data() + 1, n - 1);
    if (path_cost(inner, m) != r.cost) throw ProtocolError(who + " reported a cost that does not match its tour");
  } catch (const ValidationError& e) {
    throw ProtocolError(who + " returned an invalid tour: " + e.what());
  }
}

// Pure-master coordinator: one child per entry of `ranges`, each told to run
// its range on `threads` threads. The coordinator evaluates nothing itself.
inline Execution run_workers(const CostMatrix& m, const std::vector<WorkRange>& ranges, int threads,
                             const ProcessOptions& options) {
  const auto binary = resolve_worker_binary(options);
  std::vector<ChildProcess> workers;
  workers.reserve(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    try {
      workers.push_back(ChildProcess::spawn(binary, {"--worker"}));
    } catch (const ExecutionError& e) {
      throw ExecutionError("worker " + std::to_string(i) + ": " + e.what());
    }
  }
  const auto rows = m.rows();
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    try {
      workers[i].write_line(protocol::encode(protocol::Task{rows, ranges[i], threads}));
    } catch (const ExecutionError& e) {
      throw ExecutionError("worker " + std::to_string(i) + ": " + e.what());
    }
  }

  Execution exec;
  std::vector<SolveResult> parts;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const std::string who = "worker " + std::to_string(i);
    std::optional<std::string> line;
    try {
      line = workers[i].read_line();
    } catch (const ExecutionError& e) {
      throw ExecutionError(who + ": " + e.what());
    }
    if (!line) throw ExecutionError(who + " exited without sending a result");
    protocol::Message msg;
    try {
      msg = protocol::decode(*line);
    } catch (const ProtocolError& e) {
      throw ProtocolError(who + ": " + e.what());
    }
    if (const auto* err = std::get_if<protocol::Error>(&msg)) {
      throw ExecutionError(who + " reported an error: " + err->message);
    }
    const auto* res = std::get_if<protocol::Result>(&msg);
    if (res == nullptr) throw ProtocolError(who + " sent an unexpected message instead of a result");
    auto local = protocol::to_solve_result(*res);
    check_worker_result(m, ranges[i], local, who);
    parts.push_back(local);
    exec.reports.push_back({static_cast<int>(i), ranges[i], std::move(local)});
  }

  for (std::size_t i = 0; i < workers.size(); ++i) {
    try {
      workers[i].write_line(protocol::encode(protocol::Shutdown{}));
    } catch (const ExecutionError& e) {
      throw ExecutionError("worker " + std::to_string(i) + ": " + e.what());
    }
    workers[i].close_stdin();
    if (const int code = workers[i].wait(); code != 0) {
      throw ExecutionError("worker " + std::to_string(i) + " exited with status " + std::to_string(code));
    }
  }
  exec.result = reduce(parts);
  return exec;
}

}  // namespace detail

inline Execution run_message_passing(const CostMatrix& m, int processes, const ProcessOptions& options = {}) {
  if (processes < 1) throw ValidationError("process count must be positive");
  return detail::run_workers(m, partition(tour_count(m), static_cast<std::size_t>(processes)), 1, options);
}

/// Each process receives the union of its `threads` consecutive flat ranges.
/// Re-partitioning that union into `threads` pieces inside the worker yields
/// exactly the flat sub-ranges, since longer ranges always come first.
inline Execution run_hybrid(const CostMatrix& m, int processes, int threads, const ProcessOptions& options = {}) {
  const auto groups = hybrid_assignment(tour_count(m), processes, threads);
  std::vector<WorkRange> per_process;
  for (const auto& g : groups) per_process.push_back({g.front().start, g.back().end});
  return detail::run_workers(m, per_process, threads, options);
}

inline SolveResult solve_shared_memory(const CostMatrix& m, int threads) {
  return run_shared_memory(m, threads).result;
}

inline SolveResult solve_message_passing(const CostMatrix& m, int processes, const ProcessOptions& options = {}) {
  return run_message_passing(m, processes, options).result;
}

inline SolveResult solve_hybrid(const CostMatrix& m, int processes, int threads, const ProcessOptions& options = {}) {
  return run_hybrid(m, processes, threads, options).result;
}

inline SolveResult solve(const CostMatrix& m, const BackendSpec& spec, const ProcessOptions& options = {}) {
  switch (spec.kind) {
    case BackendKind::serial: return solve_serial(m);
    case BackendKind::shared_memory: return solve_shared_memory(m, spec.threads);
    case BackendKind::message_passing: return solve_message_passing(m, spec.processes, options);
    case BackendKind::hybrid: return solve_hybrid(m, spec.processes, spec.threads, options);
  }
  throw ValidationError("unknown backend kind");
}

/// Worker side of the protocol: answers tasks on `out` until a shutdown
/// message or end of input. Returns the process exit code.
inline int run_worker(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    protocol::Message reply;
    try {
      const auto msg = protocol::decode(line);
      if (std::holds_alternative<protocol::Shutdown>(msg)) return 0;
      const auto* task = std::get_if<protocol::Task>(&msg);
      if (task == nullptr) throw ProtocolError("worker expects a task or shutdown message");
      const CostMatrix m(task->matrix);
      reply = protocol::to_message(run_shared_memory(m, task->range, task->threads).result);
    } catch (const std::exception& e) {
      reply = protocol::Error{e.what()};
    }
    out << protocol::encode(reply) << '\n' << std::flush;
  }
  return 0;
}

/// Hook for executables that may be started as workers: returns the worker's
/// exit code if `--worker` is among the arguments.
inline std::optional<int> maybe_run_worker(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::string_view(argv[i]) == "--worker") return run_worker(std::cin, std::cout);
  }
  return std::nullopt;
}

}  // namespace tspbench
