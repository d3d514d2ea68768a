#include "mobo/harness/external.hpp"

#include "mobo/harness/format.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>

namespace mobo::harness {

namespace {

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

// Parse the first line the child wrote.
ExternalOutcome interpret(const std::string& line) {
  ExternalOutcome out;
  out.raw_output = line;
  out.status = ExternalOutcome::Status::Malformed;
  const auto doc = nlohmann::json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return out;
  const auto feasible = doc.find("feasible");
  if (feasible == doc.end() || !feasible->is_boolean()) return out;
  if (!feasible->get<bool>()) {
    out.status = ExternalOutcome::Status::Infeasible;
    return out;
  }
  const auto objectives = doc.find("objectives");
  if (objectives == doc.end() || !objectives->is_array() || objectives->empty()) return out;
  Vector y(static_cast<Eigen::Index>(objectives->size()));
  for (std::size_t i = 0; i < objectives->size(); ++i) {
    if (!(*objectives)[i].is_number()) return out;
    y[static_cast<Eigen::Index>(i)] = (*objectives)[i].get<double>();
  }
  if (!y.allFinite()) return out;
  out.status = ExternalOutcome::Status::Feasible;
  out.result = EvaluationResult::success(std::move(y));
  return out;
}

}  // namespace

std::string_view to_string(ExternalOutcome::Status status) {
  switch (status) {
    case ExternalOutcome::Status::Feasible: return "feasible";
    case ExternalOutcome::Status::Infeasible: return "infeasible";
    case ExternalOutcome::Status::NonzeroExit: return "nonzero-exit";
    case ExternalOutcome::Status::Timeout: return "timeout";
    case ExternalOutcome::Status::Malformed: return "malformed";
    case ExternalOutcome::Status::LaunchFailure: return "launch-failure";
  }
  return "?";
}

ExternalOutcome external_evaluate(const std::string& command, const Vector& x, double timeout_seconds) {
  // A child that exits without reading its input must not kill us on write.
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

  std::string request = "{\"x\":[";
  for (Eigen::Index i = 0; i < x.size(); ++i) request += (i ? "," : "") + format_double(x[i]);
  request += "]}\n";

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) return {};
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    return {};
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    return {};
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  int child_in = in_pipe[1];
  int child_out = out_pipe[0];
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);

  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                           std::chrono::duration<double>(timeout_seconds));
  std::size_t written = 0;
  std::string output;
  bool timed_out = false;
  ::fcntl(child_in, F_SETFL, O_NONBLOCK);
  while (child_out >= 0) {
    pollfd fds[2];
    int count = 0;
    fds[count++] = {child_out, POLLIN, 0};
    if (child_in >= 0) fds[count++] = {child_in, POLLOUT, 0};
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    if (remaining <= 0) {
      timed_out = true;
      break;
    }
    const int ready = ::poll(fds, static_cast<nfds_t>(count), static_cast<int>(std::min<long long>(remaining, 1000)));
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    if (count == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::write(child_in, request.data() + written, request.size() - written);
      if (n > 0) written += static_cast<std::size_t>(n);
      if (n < 0 && errno != EAGAIN && errno != EINTR) written = request.size();
      if (written == request.size()) close_fd(child_in);
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      char buffer[4096];
      const ssize_t n = ::read(child_out, buffer, sizeof buffer);
      if (n > 0) {
        output.append(buffer, static_cast<std::size_t>(n));
      } else if (n == 0 || (errno != EAGAIN && errno != EINTR)) {
        close_fd(child_out);
      }
    }
  }
  close_fd(child_in);
  close_fd(child_out);

  int status = 0;
  if (timed_out) {
    ::kill(-pid, SIGKILL);
    ::waitpid(pid, &status, 0);
    ExternalOutcome out;
    out.status = ExternalOutcome::Status::Timeout;
    out.raw_output = output.substr(0, output.find('\n'));
    return out;
  }
  // stdout closed; give the child until the deadline to exit.
  while (true) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) break;
    if (clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      ExternalOutcome out;
      out.status = ExternalOutcome::Status::Timeout;
      out.raw_output = output.substr(0, output.find('\n'));
      return out;
    }
    ::usleep(1000);
  }

  const std::string line = output.substr(0, output.find('\n'));
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  if (code != 0) {
    ExternalOutcome out;
    out.status = WIFEXITED(status) && code == 127 && output.empty() ? ExternalOutcome::Status::LaunchFailure
                                                                    : ExternalOutcome::Status::NonzeroExit;
    out.raw_output = line;
    out.exit_code = code;
    return out;
  }
  ExternalOutcome out = interpret(line);
  out.exit_code = 0;
  return out;
}

}  // namespace mobo::harness
