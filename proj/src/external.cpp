#include "cobo/objectives.hpp"

#include "json.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace cobo {

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }

  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) throw ExternalError(std::string("pipe failed: ") + std::strerror(errno));
  return {Fd(fds[0]), Fd(fds[1])};
}

// A write to a child that already exited must surface as an error, not
// kill the process.
void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

class Child {
 public:
  explicit Child(const std::string& command) {
    auto [in_read, in_write] = make_pipe();
    auto [out_read, out_write] = make_pipe();

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_read.get(), STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_write.get(), STDOUT_FILENO);
    const char* argv[] = {"sh", "-c", command.c_str(), nullptr};
    // Own process group, so a kill also reaches whatever the shell started.
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);
    const int rc = posix_spawn(&pid_, "/bin/sh", &actions, &attr, const_cast<char* const*>(argv), environ);
    posix_spawnattr_destroy(&attr);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) throw ExternalError(std::string("cannot start external objective: ") + std::strerror(rc));

    stdin_ = std::move(in_write);
    stdout_ = std::move(out_read);
  }

  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  ~Child() {
    if (pid_ > 0) {
      kill();
      wait();
    }
  }

  int input() const { return stdin_.get(); }
  int output() const { return stdout_.get(); }
  void close_input() { stdin_.reset(); }

  void kill() {
    if (pid_ > 0) ::kill(-pid_, SIGKILL);
  }

  // Reaps the child if it ends before the deadline.
  std::optional<int> wait_until(std::chrono::steady_clock::time_point deadline) {
    while (true) {
      int status = 0;
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_) {
        pid_ = -1;
        return status;
      }
      if (r < 0 && errno != EINTR) {
        pid_ = -1;
        return 0;
      }
      if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
  }

  int wait() {
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
    return status;
  }

 private:
  pid_t pid_ = -1;
  Fd stdin_;
  Fd stdout_;
};

void write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return;  // child closed its input; its exit status reports the failure
    }
    done += static_cast<std::size_t>(n);
  }
}

enum class ReadOutcome { line, eof, timeout };

ReadOutcome read_line(int fd, std::chrono::steady_clock::time_point deadline, std::string& line) {
  char buf[4096];
  while (true) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return ReadOutcome::timeout;
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ExternalError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (rc == 0) return ReadOutcome::timeout;
    const ssize_t n = ::read(fd, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ExternalError(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) return ReadOutcome::eof;
    line.append(buf, static_cast<std::size_t>(n));
    if (const auto nl = line.find('\n'); nl != std::string::npos) {
      line.resize(nl);
      return ReadOutcome::line;
    }
  }
}

std::string describe_status(int status) {
  if (WIFEXITED(status)) return "exited with status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status)) return "killed by signal " + std::to_string(WTERMSIG(status));
  return "ended abnormally";
}

double parse_reply(const std::string& line) {
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw ExternalMalformedReply("external objective reply is not JSON: " + line);
  }
  if (!reply.is_object() || !reply.contains("y") || !reply["y"].is_number())
    throw ExternalMalformedReply("external objective reply lacks a numeric \"y\": " + line);
  const double y = reply["y"].get<double>();
  if (!std::isfinite(y)) throw ExternalMalformedReply("external objective returned a non-finite value");
  return y;
}

}  // namespace

double external_eval(const std::string& command, const Point& x, std::chrono::milliseconds timeout,
                     Direction direction) {
  ignore_sigpipe();
  const auto deadline = std::chrono::steady_clock::now() + timeout;

  nlohmann::json request;
  request["x"] = std::vector<double>(x.coords.data(), x.coords.data() + x.coords.size());

  Child child(command);
  write_all(child.input(), request.dump() + "\n");
  child.close_input();

  std::string line;
  const ReadOutcome outcome = read_line(child.output(), deadline, line);
  if (outcome == ReadOutcome::timeout) {
    child.kill();
    child.wait();
    throw ExternalTimeout("external objective timed out after " + std::to_string(timeout.count()) + " ms");
  }

  const std::optional<int> reaped = child.wait_until(deadline);
  if (!reaped) {
    child.kill();
    child.wait();
    throw ExternalTimeout("external objective did not exit within " + std::to_string(timeout.count()) + " ms");
  }
  const int status = *reaped;
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw ExternalChildExit("external objective " + describe_status(status),
                            WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status));
  if (outcome == ReadOutcome::eof && line.empty())
    throw ExternalMalformedReply("external objective exited without replying");

  const double y = parse_reply(line);
  return direction == Direction::minimize ? -y : y;
}

}  // namespace cobo
