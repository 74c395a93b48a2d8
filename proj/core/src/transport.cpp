#include "paretonas/transport.hpp"

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <utility>

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace paretonas {

namespace {

std::string errno_message(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

LineChannel::LineChannel(int read_fd, int write_fd, pid_t child, bool socket)
    : read_fd_(read_fd), write_fd_(write_fd), child_(child), socket_(socket) {}

LineChannel::LineChannel(LineChannel&& other) noexcept
    : read_fd_(std::exchange(other.read_fd_, -1)),
      write_fd_(std::exchange(other.write_fd_, -1)),
      child_(std::exchange(other.child_, -1)),
      socket_(other.socket_),
      buffer_(std::move(other.buffer_)) {}

LineChannel& LineChannel::operator=(LineChannel&& other) noexcept {
  if (this != &other) {
    close();
    read_fd_ = std::exchange(other.read_fd_, -1);
    write_fd_ = std::exchange(other.write_fd_, -1);
    child_ = std::exchange(other.child_, -1);
    socket_ = other.socket_;
    buffer_ = std::move(other.buffer_);
  }
  return *this;
}

LineChannel::~LineChannel() { close(); }

void LineChannel::close() {
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
  if (read_fd_ >= 0) ::close(read_fd_);
  read_fd_ = write_fd_ = -1;
  if (child_ > 0) {
    ::kill(child_, SIGTERM);
    ::waitpid(child_, nullptr, 0);
    child_ = -1;
  }
}

LineChannel LineChannel::spawn(const std::string& command) {
  // A dead evaluator must surface as a write error, not kill the search.
  std::signal(SIGPIPE, SIG_IGN);

  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw TransportError(errno_message("pipe"));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw TransportError(errno_message("pipe"));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
    throw TransportError(errno_message("fork"));
  }
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  return LineChannel(from_child[0], to_child[1], pid, false);
}

LineChannel LineChannel::connect(std::string_view address) {
  const auto colon = address.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == address.size()) {
    throw TransportError("address must be host:port, got \"" + std::string(address) + "\"");
  }
  const std::string host(address.substr(0, colon));
  const std::string port(address.substr(colon + 1));

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found); rc != 0) {
    throw TransportError("resolve " + std::string(address) + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) throw TransportError("cannot connect to " + std::string(address));
  return LineChannel(fd, fd, -1, true);
}

void LineChannel::write_line(std::string_view line) {
  if (write_fd_ < 0) throw TransportError("channel closed");
  std::string data(line);
  data.push_back('\n');
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = socket_ ? ::send(write_fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL)
                              : ::write(write_fd_, data.data() + sent, data.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_message("write to evaluator"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

LineChannel::ReadStatus LineChannel::read_line(std::string& line, Clock::time_point deadline) {
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return ReadStatus::line;
    }
    if (read_fd_ < 0) return ReadStatus::closed;

    const auto now = Clock::now();
    if (now >= deadline) return ReadStatus::timeout;
    const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd pfd{read_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(wait + 1, 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_message("poll"));
    }
    if (rc == 0) continue;

    char chunk[4096];
    const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_message("read from evaluator"));
    }
    if (n == 0) {
      // Peer closed; a trailing unterminated fragment is dropped.
      return ReadStatus::closed;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace paretonas
