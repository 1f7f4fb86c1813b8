#pragma once

// POSIX child process with its standard input and output attached to pipes.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "tspbench/errors.hpp"

extern char** environ;

namespace tspbench {

namespace detail {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

inline std::string errno_text(int err) { return std::system_category().message(err); }

}  // namespace detail

class ChildProcess {
 public:
  /// Starts `program` with `args` (argv[0] is filled in). Throws ExecutionError
  /// if the pipes cannot be created or the program cannot be executed.
  static ChildProcess spawn(const std::string& program, const std::vector<std::string>& args) {
    // A worker that dies must surface as EPIPE on write, not kill the coordinator.
    ::signal(SIGPIPE, SIG_IGN);

    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
      throw ExecutionError("pipe: " + detail::errno_text(errno));
    }
    detail::Fd child_in(to_child[0]), parent_out(to_child[1]);
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      throw ExecutionError("pipe: " + detail::errno_text(errno));
    }
    detail::Fd parent_in(from_child[0]), child_out(from_child[1]);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, child_in.get(), STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, child_out.get(), STDOUT_FILENO);

    std::vector<std::string> argv_storage;
    argv_storage.push_back(program);
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());
    argv.push_back(nullptr);

    pid_t pid = -1;
    const int rc = ::posix_spawn(&pid, program.c_str(), &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
      throw ExecutionError("cannot start '" + program + "': " + detail::errno_text(rc));
    }
    ChildProcess child;
    child.pid_ = pid;
    child.stdin_ = std::move(parent_out);
    child.stdout_ = std::move(parent_in);
    return child;
  }

  ChildProcess(ChildProcess&& other) noexcept
      : pid_(std::exchange(other.pid_, -1)),
        stdin_(std::move(other.stdin_)),
        stdout_(std::move(other.stdout_)),
        buffer_(std::move(other.buffer_)) {}
  ChildProcess& operator=(ChildProcess&& other) noexcept {
    if (this != &other) {
      terminate();
      pid_ = std::exchange(other.pid_, -1);
      stdin_ = std::move(other.stdin_);
      stdout_ = std::move(other.stdout_);
      buffer_ = std::move(other.buffer_);
    }
    return *this;
  }
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  /// Kills and reaps the child if it is still running.
  ~ChildProcess() { terminate(); }

  pid_t pid() const { return pid_; }

  void write_line(std::string_view line) {
    std::string data(line);
    data.push_back('\n');
    std::size_t done = 0;
    while (done < data.size()) {
      const auto n = ::write(stdin_.get(), data.data() + done, data.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ExecutionError("write to worker failed: " + detail::errno_text(errno));
      }
      done += static_cast<std::size_t>(n);
    }
  }

  /// Next line from the child's stdout without the newline; nullopt at EOF.
  std::optional<std::string> read_line() {
    while (true) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[4096];
      const auto n = ::read(stdout_.get(), chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ExecutionError("read from worker failed: " + detail::errno_text(errno));
      }
      if (n == 0) {
        if (buffer_.empty()) return std::nullopt;
        return std::exchange(buffer_, {});
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void close_stdin() { stdin_.reset(); }

  /// Waits for exit. Returns the exit code, or 128 + signal number.
  int wait() {
    if (pid_ < 0) throw ExecutionError("process already reaped");
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0) {
      if (errno != EINTR) throw ExecutionError("waitpid: " + detail::errno_text(errno));
    }
    pid_ = -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
    return -1;
  }

 private:
  ChildProcess() = default;

  void terminate() noexcept {
    stdin_.reset();
    stdout_.reset();
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      int status = 0;
      while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
      }
    }
    pid_ = -1;
  }

  pid_t pid_ = -1;
  detail::Fd stdin_;
  detail::Fd stdout_;
  std::string buffer_;
};

}  // namespace tspbench
