#include <gtest/gtest.h>

#include "tspbench/backends.hpp"

// The message-passing tests re-launch this binary as their worker.
int main(int argc, char** argv) {
  if (auto code = tspbench::maybe_run_worker(argc, argv)) return *code;
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
