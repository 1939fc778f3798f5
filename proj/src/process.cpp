#include "warpdiff/process.hpp"

#include <cctype>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <time.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

namespace warpdiff {

std::vector<std::string> split_command(const std::string& command) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < command.size()) {
    while (i < command.size() && std::isspace(static_cast<unsigned char>(command[i]))) ++i;
    std::size_t start = i;
    while (i < command.size() && !std::isspace(static_cast<unsigned char>(command[i]))) ++i;
    if (i > start) tokens.push_back(command.substr(start, i - start));
  }
  return tokens;
}

double monotonic_now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

namespace {

struct Pipe {
  int fds[2] = {-1, -1};

  Pipe() {
    if (::pipe(fds) != 0) {
      raise(errc::spawn_failure, std::string("pipe: ") + std::strerror(errno));
    }
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  int read_fd() const { return fds[0]; }
  int write_fd() const { return fds[1]; }
  void close_read() {
    if (fds[0] >= 0) ::close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) ::close(fds[1]);
    fds[1] = -1;
  }
};

void set_nonblocking(int fd) {
  int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

void ignore_sigpipe_once() {
  static bool done = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

}  // namespace

ProcessResult run_process(const ProcessRequest& request) {
  if (request.argv.empty()) {
    raise(errc::spawn_failure, "empty argv");
  }
  ignore_sigpipe_once();

  Pipe child_stdin;
  Pipe child_stdout;
  Pipe child_stderr;
  Pipe exec_err;  // child reports exec failure errno through this
  ::fcntl(exec_err.write_fd(), F_SETFD, FD_CLOEXEC);

  std::vector<char*> argv;
  argv.reserve(request.argv.size() + 1);
  for (const auto& a : request.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  const double start_s = monotonic_now_s();
  pid_t pid = ::fork();
  if (pid < 0) {
    raise(errc::spawn_failure, std::string("fork: ") + std::strerror(errno));
  }

  if (pid == 0) {
    ::dup2(child_stdin.read_fd(), STDIN_FILENO);
    ::dup2(child_stdout.write_fd(), STDOUT_FILENO);
    ::dup2(child_stderr.write_fd(), STDERR_FILENO);
    for (Pipe* p : {&child_stdin, &child_stdout, &child_stderr}) {
      p->close_read();
      p->close_write();
    }
    exec_err.close_read();
    for (const auto& [key, value] : request.extra_env) {
      ::setenv(key.c_str(), value.c_str(), 1);
    }
    ::execvp(argv[0], argv.data());
    int err = errno;
    ssize_t ignored = ::write(exec_err.write_fd(), &err, sizeof(err));
    (void)ignored;
    ::_exit(127);
  }

  child_stdin.close_read();
  child_stdout.close_write();
  child_stderr.close_write();
  exec_err.close_write();

  const std::string empty;
  const std::string& stdin_data = request.stdin_data ? *request.stdin_data : empty;
  std::size_t stdin_written = 0;
  if (stdin_data.empty()) {
    child_stdin.close_write();
  } else {
    set_nonblocking(child_stdin.write_fd());
  }
  set_nonblocking(child_stdout.read_fd());
  set_nonblocking(child_stderr.read_fd());

  ProcessResult result;
  result.mono_start_s = start_s;
  const double deadline_s = start_s + request.timeout_s;
  bool killed = false;
  char buf[64 * 1024];

  auto drain = [&](int fd, std::string& into, bool is_stdout) -> bool {
    // Returns false on EOF.
    while (true) {
      ssize_t got = ::read(fd, buf, sizeof(buf));
      if (got > 0) {
        if (is_stdout && request.stdout_sink) request.stdout_sink(buf, std::size_t(got));
        std::size_t room = request.capture_limit > into.size()
                               ? request.capture_limit - into.size()
                               : 0;
        into.append(buf, std::min(std::size_t(got), room));
        continue;
      }
      if (got == 0) return false;
      if (errno == EAGAIN || errno == EWOULDBLOCK) return true;
      if (errno == EINTR) continue;
      return false;
    }
  };

  bool stdout_open = true;
  bool stderr_open = true;
  bool child_reaped = false;
  int status = 0;
  struct rusage usage {};

  auto enforce_deadline = [&] {
    if (!killed && monotonic_now_s() >= deadline_s) {
      ::kill(pid, SIGKILL);
      killed = true;
      result.timed_out = true;
    }
  };
  auto try_reap = [&]() -> bool {
    struct rusage u {};
    if (::wait4(pid, &status, WNOHANG, &u) == pid) {
      usage = u;
      child_reaped = true;
      result.mono_end_s = monotonic_now_s();
    }
    return child_reaped;
  };

  while (stdout_open || stderr_open || stdin_written < stdin_data.size()) {
    // Reap first: a dead child ends the measurement even when a grandchild
    // inherited the pipes and keeps them open.
    if (try_reap()) {
      if (stdout_open) drain(child_stdout.read_fd(), result.stdout_data, true);
      if (stderr_open) drain(child_stderr.read_fd(), result.stderr_data, false);
      stdout_open = stderr_open = false;
      break;
    }

    struct pollfd fds[3];
    int nfds = 0;
    int stdout_slot = -1, stderr_slot = -1, stdin_slot = -1;
    if (stdout_open) {
      stdout_slot = nfds;
      fds[nfds++] = {child_stdout.read_fd(), POLLIN, 0};
    }
    if (stderr_open) {
      stderr_slot = nfds;
      fds[nfds++] = {child_stderr.read_fd(), POLLIN, 0};
    }
    if (stdin_written < stdin_data.size()) {
      stdin_slot = nfds;
      fds[nfds++] = {child_stdin.write_fd(), POLLOUT, 0};
    }

    enforce_deadline();
    // Bounded poll so reap checks and the deadline stay responsive.
    double remaining_s = deadline_s - monotonic_now_s();
    int timeout_ms = 50;
    if (!killed && remaining_s * 1000.0 < timeout_ms) {
      timeout_ms = std::max(1, int(remaining_s * 1000.0) + 1);
    }
    int rc = ::poll(fds, nfds, timeout_ms);
    if (rc < 0 && errno != EINTR) break;

    if (stdout_slot >= 0 && (fds[stdout_slot].revents & (POLLIN | POLLHUP | POLLERR))) {
      stdout_open = drain(child_stdout.read_fd(), result.stdout_data, true);
    }
    if (stderr_slot >= 0 && (fds[stderr_slot].revents & (POLLIN | POLLHUP | POLLERR))) {
      stderr_open = drain(child_stderr.read_fd(), result.stderr_data, false);
    }
    if (stdin_slot >= 0 && (fds[stdin_slot].revents & (POLLOUT | POLLHUP | POLLERR))) {
      ssize_t wrote = ::write(child_stdin.write_fd(), stdin_data.data() + stdin_written,
                              stdin_data.size() - stdin_written);
      if (wrote > 0) {
        stdin_written += std::size_t(wrote);
      } else if (wrote < 0 && errno != EAGAIN && errno != EINTR) {
        stdin_written = stdin_data.size();  // child closed its end
      }
      if (stdin_written >= stdin_data.size()) child_stdin.close_write();
    }
  }
  child_stdin.close_write();

  // Streams can close while the child lives on; keep the deadline armed
  // until the real exit.
  while (!child_reaped) {
    if (try_reap()) break;
    enforce_deadline();
    struct timespec nap {0, 200000};  // 200 us
    ::nanosleep(&nap, nullptr);
  }
  result.wall_s = result.mono_end_s - result.mono_start_s;
  result.cpu_s = double(usage.ru_utime.tv_sec) + double(usage.ru_utime.tv_usec) * 1e-6 +
                 double(usage.ru_stime.tv_sec) + double(usage.ru_stime.tv_usec) * 1e-6;

  int exec_errno = 0;
  if (::read(exec_err.read_fd(), &exec_errno, sizeof(exec_errno)) == sizeof(exec_errno)) {
    raise(errc::spawn_failure,
          "cannot exec '" + request.argv[0] + "': " + std::strerror(exec_errno));
  }

  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.term_signal = WTERMSIG(status);
    result.exit_code = 128 + result.term_signal;
  }
  return result;
}

}  // namespace warpdiff
