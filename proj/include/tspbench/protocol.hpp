#pragma once

/**
 * @file protocol.hpp
 * @brief Line-delimited JSON messages exchanged between the coordinator and
 * its worker processes.
 *
 * One message per line, UTF-8. Every message carries `"v":1` and a `"type"`.
 * Permutation indices travel as decimal strings since they can exceed 64 bits.
 *
 *     coordinator -> worker  {"v":1,"type":"task","n":4,"matrix":[[...]],"start":"0","end":"6","threads":1}
 *     coordinator -> worker  {"v":1,"type":"shutdown"}
 *     worker -> coordinator  {"v":1,"type":"result","cost":80,"path":[0,1,3,2,0],"evaluated":"6"}
 *     worker -> coordinator  {"v":1,"type":"error","message":"..."}
 */

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tspbench/errors.hpp"
#include "tspbench/perm.hpp"
#include "tspbench/tsp.hpp"

namespace tspbench::protocol {

inline constexpr int kVersion = 1;

struct Task {
  std::vector<std::vector<std::int64_t>> matrix;
  WorkRange range;
  int threads = 1;
  friend bool operator==(const Task&, const Task&) = default;
};

struct Result {
  Cost cost = kNoTour;
  std::vector<City> path;
  PermIndex evaluated = 0;
  friend bool operator==(const Result&, const Result&) = default;
};

struct Error {
  std::string message;
  friend bool operator==(const Error&, const Error&) = default;
};

struct Shutdown {
  friend bool operator==(const Shutdown&, const Shutdown&) = default;
};

using Message = std::variant<Task, Result, Error, Shutdown>;

inline Result to_message(const SolveResult& r) { return {r.cost, r.path, r.evaluated}; }
inline SolveResult to_solve_result(const Result& r) { return {r.cost, r.path, r.evaluated}; }

/// Serializes a message as a single line without the trailing newline.
inline std::string encode(const Message& message) {
  nlohmann::ordered_json j;
  j["v"] = kVersion;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Task>) {
          j["type"] = "task";
          j["n"] = m.matrix.size();
          j["matrix"] = m.matrix;
          j["start"] = to_string(m.range.start);
          j["end"] = to_string(m.range.end);
          j["threads"] = m.threads;
        } else if constexpr (std::is_same_v<M, Result>) {
          j["type"] = "result";
          j["cost"] = m.cost;
          j["path"] = m.path;
          j["evaluated"] = to_string(m.evaluated);
        } else if constexpr (std::is_same_v<M, Error>) {
          j["type"] = "error";
          j["message"] = m.message;
        } else {
          j["type"] = "shutdown";
        }
      },
      message);
  return j.dump();
}

namespace detail {

template <class T>
T field(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError(std::string("field '") + key + "' has the wrong type");
  }
}

inline PermIndex index_field(const nlohmann::json& j, const char* key) {
  const auto text = field<std::string>(j, key);
  try {
    return parse_perm_index(text);
  } catch (const ValidationError& e) {
    throw ProtocolError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Parses one line. Throws ProtocolError on malformed JSON, an unknown type
/// or a version other than kVersion.
inline Message decode(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("malformed message: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message is not a JSON object");
  const auto v = j.find("v");
  if (v == j.end() || !v->is_number_integer()) throw ProtocolError("message has no protocol version");
  if (v->get<std::int64_t>() != kVersion) {
    throw ProtocolError("unsupported protocol version " + v->dump() + " (expected " + std::to_string(kVersion) + ")");
  }
  const auto type = detail::field<std::string>(j, "type");
  if (type == "task") {
    Task t;
    const auto n = detail::field<std::int64_t>(j, "n");
    t.matrix = detail::field<std::vector<std::vector<std::int64_t>>>(j, "matrix");
    if (n < 0 || static_cast<std::size_t>(n) != t.matrix.size()) {
      throw ProtocolError("task 'n' does not match the matrix size");
    }
    t.range = {detail::index_field(j, "start"), detail::index_field(j, "end")};
    t.threads = detail::field<int>(j, "threads");
    if (t.threads < 1) throw ProtocolError("task 'threads' must be positive");
    return t;
  }
  if (type == "result") {
    Result r;
    r.cost = detail::field<Cost>(j, "cost");
    r.path = detail::field<std::vector<City>>(j, "path");
    r.evaluated = detail::index_field(j, "evaluated");
    return r;
  }
  if (type == "error") return Error{detail::field<std::string>(j, "message")};
  if (type == "shutdown") return Shutdown{};
  throw ProtocolError("unknown message type '" + type + "'");
}

}  // namespace tspbench::protocol
