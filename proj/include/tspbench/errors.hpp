#pragma once

#include <stdexcept>
#include <string>

namespace tspbench {

// Caller supplied malformed input (bad file, bad argument, bad label).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A permutation index or work range lies outside the permutation space.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A factorial does not fit the 128-bit index type.
class CapacityError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Something went wrong while running a solve: thread or process failure,
// a worker that died, or a broken conversation with a worker.
class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public ExecutionError {
 public:
  using ExecutionError::ExecutionError;
};

// A parallel backend disagreed with the serial reference.
class CorrectnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tspbench
