#include <gtest/gtest.h>

#include <sys/stat.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "test_support.hpp"
#include "tspbench/backends.hpp"
#include "tspbench/protocol.hpp"

namespace tspbench {
namespace {

namespace fs = std::filesystem;
using testing::example4;
using testing::random_rows;

const PermIndex kTwoTo64 = PermIndex{1} << 64;

TEST(Protocol, RoundTripsEveryMessage) {
  const protocol::Message messages[] = {
      protocol::Task{example4(), {2, 5}, 3},
      protocol::Result{80, {0, 1, 3, 2, 0}, 6},
      protocol::Result{kNoTour, {}, 0},
      protocol::Error{"bad \"thing\"\n happened"},
      protocol::Shutdown{},
  };
  for (const auto& m : messages) {
    const auto line = protocol::encode(m);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(protocol::decode(line), m) << line;
  }
}

TEST(Protocol, WireFormat) {
  EXPECT_EQ(protocol::encode(protocol::Task{{{0, 7}, {7, 0}}, {0, 1}, 1}),
            R"({"v":1,"type":"task","n":2,"matrix":[[0,7],[7,0]],"start":"0","end":"1","threads":1})");
  EXPECT_EQ(protocol::encode(protocol::Result{14, {0, 1, 0}, 1}),
            R"({"v":1,"type":"result","cost":14,"path":[0,1,0],"evaluated":"1"})");
  EXPECT_EQ(protocol::encode(protocol::Error{"x"}), R"({"v":1,"type":"error","message":"x"})");
  EXPECT_EQ(protocol::encode(protocol::Shutdown{}), R"({"v":1,"type":"shutdown"})");
}

TEST(Protocol, RejectsUnknownVersions) {
  for (const char* line : {R"({"v":2,"type":"shutdown"})", R"({"v":0,"type":"shutdown"})",
                           R"({"type":"shutdown"})", R"({"v":"1","type":"shutdown"})"}) {
    try {
      protocol::decode(line);
      FAIL() << line;
    } catch (const ProtocolError& e) {
      EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
    }
  }
}

TEST(Protocol, RejectsMalformedMessages) {
  for (const char* line : {
           "not json",
           "[1,2]",
           R"({"v":1,"type":"bogus"})",
           R"({"v":1,"type":"result","cost":1,"path":[0,1,0]})",
           R"({"v":1,"type":"result","cost":1,"path":[0,1,0],"evaluated":7})",
           R"({"v":1,"type":"result","cost":1,"path":[0,1,0],"evaluated":"-7"})",
           R"({"v":1,"type":"task","n":3,"matrix":[[0,1],[1,0]],"start":"0","end":"1","threads":1})",
           R"({"v":1,"type":"task","n":2,"matrix":[[0,1],[1,0]],"start":"0","end":"1","threads":0})",
       }) {
    EXPECT_THROW(protocol::decode(line), ProtocolError) << line;
  }
}

TEST(Protocol, IndicesAbove64BitsAreExact) {
  const WorkRange range{kTwoTo64 + 5, factorial(30) - 1};
  const auto line = protocol::encode(protocol::Task{example4(), range, 1});
  EXPECT_NE(line.find(R"("start":"18446744073709551621")"), std::string::npos) << line;
  EXPECT_NE(line.find(R"("end":"265252859812191058636308479999999")"), std::string::npos) << line;
  const auto task = std::get<protocol::Task>(protocol::decode(line));
  EXPECT_TRUE(task.range == range);

  const auto result = std::get<protocol::Result>(
      protocol::decode(R"({"v":1,"type":"result","cost":3,"path":[],"evaluated":"340282366920938463463374607431768211455"})"));
  EXPECT_TRUE(result.evaluated == ~PermIndex{0});
}

// Speaks to a real worker (this test binary in --worker mode).
class RealWorker : public ::testing::Test {
 protected:
  ChildProcess start() { return ChildProcess::spawn(resolve_worker_binary({}), {"--worker"}); }
};

TEST_F(RealWorker, SolvesRangeBeyond64Bits) {
  const CostMatrix m(random_rows(23, 1, true));
  ASSERT_TRUE(tour_count(m) > kTwoTo64);
  const WorkRange range{kTwoTo64, kTwoTo64 + 50};
  auto worker = start();
  worker.write_line(protocol::encode(protocol::Task{m.rows(), range, 2}));
  const auto line = worker.read_line();
  ASSERT_TRUE(line);
  EXPECT_NE(line->find(R"("evaluated":"50")"), std::string::npos) << *line;
  const auto result = protocol::to_solve_result(std::get<protocol::Result>(protocol::decode(*line)));
  EXPECT_EQ(result, solve_range(m, range));
  worker.write_line(protocol::encode(protocol::Shutdown{}));
  EXPECT_EQ(worker.wait(), 0);
}

TEST_F(RealWorker, ReportsErrorsAndKeepsServing) {
  auto worker = start();
  worker.write_line(R"({"v":9,"type":"task"})");
  auto reply = protocol::decode(worker.read_line().value());
  ASSERT_TRUE(std::holds_alternative<protocol::Error>(reply));
  EXPECT_NE(std::get<protocol::Error>(reply).message.find("version"), std::string::npos);

  // Out-of-range work is reported, not fatal.
  worker.write_line(protocol::encode(protocol::Task{example4(), {0, 7}, 1}));
  reply = protocol::decode(worker.read_line().value());
  ASSERT_TRUE(std::holds_alternative<protocol::Error>(reply));

  worker.write_line(protocol::encode(protocol::Task{example4(), {0, 6}, 1}));
  reply = protocol::decode(worker.read_line().value());
  ASSERT_TRUE(std::holds_alternative<protocol::Result>(reply));
  EXPECT_EQ(std::get<protocol::Result>(reply).cost, 80u);

  worker.write_line(protocol::encode(protocol::Shutdown{}));
  EXPECT_EQ(worker.wait(), 0);
}

TEST_F(RealWorker, ExitsCleanlyOnEndOfInput) {
  auto worker = start();
  worker.close_stdin();
  EXPECT_EQ(worker.wait(), 0);
}

// Coordinator against scripted fake workers.
class FakeWorker : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("tspbench-fake-" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string script(const std::string& name, const std::string& body) {
    const auto path = dir_ / name;
    std::ofstream(path) << "#!/bin/sh\n" << body;
    fs::permissions(path, fs::perms::owner_all);
    return path.string();
  }

  std::string run_expecting_failure(const std::string& worker, int processes = 1) {
    try {
      solve_message_passing(CostMatrix(example4()), processes, {worker});
    } catch (const ExecutionError& e) {
      return e.what();
    }
    ADD_FAILURE() << "coordinator accepted the fake worker";
    return {};
  }

  fs::path dir_;
};

TEST_F(FakeWorker, WellBehavedWorkerIsAcceptedAndShutDown) {
  const auto worker = script("good.sh",
                             "read task\n"
                             "echo '{\"v\":1,\"type\":\"result\",\"cost\":80,\"path\":[0,1,3,2,0],\"evaluated\":\"6\"}'\n"
                             "read msg\n"
                             "case \"$msg\" in *'\"type\":\"shutdown\"'*) exit 0 ;; *) exit 3 ;; esac\n");
  const auto r = solve_message_passing(CostMatrix(example4()), 1, {worker});
  EXPECT_EQ(r.cost, 80u);
  EXPECT_EQ(r.path, (std::vector<City>{0, 1, 3, 2, 0}));
}

TEST_F(FakeWorker, VersionMismatchRejected) {
  const auto msg = run_expecting_failure(script(
      "v2.sh", "read task\necho '{\"v\":2,\"type\":\"result\",\"cost\":80,\"path\":[0,1,3,2,0],\"evaluated\":\"6\"}'\nread x\n"));
  EXPECT_NE(msg.find("worker 0"), std::string::npos) << msg;
  EXPECT_NE(msg.find("version 2"), std::string::npos) << msg;
}

TEST_F(FakeWorker, ErrorMessagePropagates) {
  const auto msg = run_expecting_failure(
      script("err.sh", "read task\necho '{\"v\":1,\"type\":\"error\",\"message\":\"out of cheese\"}'\nread x\n"), 2);
  EXPECT_NE(msg.find("worker 0"), std::string::npos) << msg;
  EXPECT_NE(msg.find("out of cheese"), std::string::npos) << msg;
}

TEST_F(FakeWorker, SilentExitDetected) {
  const auto msg = run_expecting_failure(script("quit.sh", "read task\nexit 0\n"));
  EXPECT_NE(msg.find("exited without sending a result"), std::string::npos) << msg;
}

TEST_F(FakeWorker, WrongWorkCountRejected) {
  const auto msg = run_expecting_failure(script(
      "short.sh", "read task\necho '{\"v\":1,\"type\":\"result\",\"cost\":80,\"path\":[0,1,3,2,0],\"evaluated\":\"5\"}'\n"));
  EXPECT_NE(msg.find("evaluated 5"), std::string::npos) << msg;
}

TEST_F(FakeWorker, InconsistentCostRejected) {
  const auto msg = run_expecting_failure(script(
      "liar.sh", "read task\necho '{\"v\":1,\"type\":\"result\",\"cost\":1,\"path\":[0,1,3,2,0],\"evaluated\":\"6\"}'\n"));
  EXPECT_NE(msg.find("does not match"), std::string::npos) << msg;
}

TEST_F(FakeWorker, NonzeroExitAfterShutdownRejected) {
  const auto msg = run_expecting_failure(script(
      "crash.sh",
      "read task\necho '{\"v\":1,\"type\":\"result\",\"cost\":80,\"path\":[0,1,3,2,0],\"evaluated\":\"6\"}'\nread x\nexit 4\n"));
  EXPECT_NE(msg.find("exited with status 4"), std::string::npos) << msg;
}

TEST_F(FakeWorker, EnvironmentOverride) {
  const auto worker = script("env.sh", "read task\necho '{\"v\":1,\"type\":\"error\",\"message\":\"from env\"}'\n");
  ::setenv("TSPBENCH_WORKER_BIN", worker.c_str(), 1);
  const auto msg = run_expecting_failure("");
  ::unsetenv("TSPBENCH_WORKER_BIN");
  EXPECT_NE(msg.find("from env"), std::string::npos) << msg;
}

}  // namespace
}  // namespace tspbench
