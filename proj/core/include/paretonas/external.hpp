#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paretonas/protocol.hpp"
#include "paretonas/transport.hpp"

namespace paretonas {

struct ExternalSettings {
  /// Shell command spawned as a child process; used when non-empty.
  std::string command;
  /// "host:port" of a socket evaluator; used when `command` is empty.
  std::string address;
  double timeout_seconds = 3600.0;
  int retries = 2;

  bool configured() const { return !command.empty() || !address.empty(); }
};

/// Client side of the evaluator protocol. Requests are pipelined with at most
/// `parallelism` outstanding; responses are matched by id in any order.
/// A request that times out or returns an error is re-sent up to `retries`
/// times before an error response is synthesized for it.
class ExternalEvaluator {
 public:
  explicit ExternalEvaluator(ExternalSettings settings);

  /// Fresh request id; ids are unique for the lifetime of the evaluator.
  std::uint64_t next_id() { return next_id_++; }

  /// One response per request, in request order.
  std::vector<EvaluationResponse> evaluate(std::span<const EvaluationRequest> batch,
                                           std::size_t parallelism);

  std::size_t garbage_lines() const { return garbage_lines_; }
  std::size_t resends() const { return resends_; }
  std::size_t sent() const { return sent_; }

 private:
  void ensure_channel();

  ExternalSettings settings_;
  std::optional<LineChannel> channel_;
  std::uint64_t next_id_ = 0;
  std::size_t garbage_lines_ = 0;
  std::size_t resends_ = 0;
  std::size_t sent_ = 0;
};

}  // namespace paretonas
