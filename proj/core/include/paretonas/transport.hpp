#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>
#include <sys/types.h>

namespace paretonas {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bidirectional newline-delimited text channel to an evaluator: either a
/// child process talking over its standard streams or a TCP stream.
class LineChannel {
 public:
  using Clock = std::chrono::steady_clock;

  /// Runs `command` through /bin/sh with stdin/stdout piped to the channel.
  static LineChannel spawn(const std::string& command);
  /// Connects to "host:port".
  static LineChannel connect(std::string_view address);

  LineChannel(LineChannel&& other) noexcept;
  LineChannel& operator=(LineChannel&& other) noexcept;
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;
  ~LineChannel();

  /// Writes `line` plus a newline. Throws TransportError if the peer is gone.
  void write_line(std::string_view line);

  enum class ReadStatus { line, timeout, closed };
  ReadStatus read_line(std::string& line, Clock::time_point deadline);

  bool is_open() const { return read_fd_ >= 0; }

 private:
  LineChannel(int read_fd, int write_fd, pid_t child, bool socket);
  void close();

  int read_fd_ = -1;
  int write_fd_ = -1;
  pid_t child_ = -1;
  bool socket_ = false;
  std::string buffer_;
};

}  // namespace paretonas
