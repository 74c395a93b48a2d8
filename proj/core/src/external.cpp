#include "paretonas/external.hpp"

#include <deque>
#include <map>

#include <spdlog/spdlog.h>

namespace paretonas {

ExternalEvaluator::ExternalEvaluator(ExternalSettings settings) : settings_(std::move(settings)) {
  if (!settings_.configured()) throw TransportError("external evaluator needs a command or an address");
  if (settings_.timeout_seconds <= 0) throw TransportError("evaluator timeout must be positive");
  if (settings_.retries < 0) throw TransportError("evaluator retry count must be >= 0");
}

void ExternalEvaluator::ensure_channel() {
  if (channel_ && channel_->is_open()) return;
  channel_.reset();
  if (!settings_.command.empty()) {
    spdlog::info("spawning evaluator: {}", settings_.command);
    channel_.emplace(LineChannel::spawn(settings_.command));
  } else {
    spdlog::info("connecting to evaluator at {}", settings_.address);
    channel_.emplace(LineChannel::connect(settings_.address));
  }
}

std::vector<EvaluationResponse> ExternalEvaluator::evaluate(std::span<const EvaluationRequest> batch,
                                                            std::size_t parallelism) {
  using Clock = LineChannel::Clock;
  const std::size_t n = batch.size();
  std::vector<std::optional<EvaluationResponse>> done(n);
  std::size_t remaining = n;
  auto finish = [&](std::size_t i, EvaluationResponse r) {
    r.id = batch[i].id;
    done[i] = std::move(r);
    --remaining;
  };
  auto fail = [&](std::size_t i, const std::string& why) { finish(i, {0, std::nullopt, why}); };

  std::deque<std::size_t> pending;
  for (std::size_t i = 0; i < n; ++i) pending.push_back(i);
  std::vector<int> attempts(n, 0);
  struct InFlight {
    std::size_t index;
    Clock::time_point deadline;
  };
  std::map<std::uint64_t, InFlight> in_flight;
  const auto timeout = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(settings_.timeout_seconds));

  auto abandon_all = [&](const std::string& why) {
    for (const auto& [id, f] : in_flight) fail(f.index, why);
    in_flight.clear();
    for (std::size_t i : pending) fail(i, why);
    pending.clear();
    channel_.reset();
  };

  try {
    if (n > 0) ensure_channel();
  } catch (const TransportError& e) {
    spdlog::error("evaluator unavailable: {}", e.what());
    abandon_all(e.what());
  }

  const std::size_t window = std::max<std::size_t>(parallelism, 1);
  while (remaining > 0) {
    while (in_flight.size() < window && !pending.empty()) {
      const std::size_t i = pending.front();
      try {
        channel_->write_line(encode_request(batch[i]));
      } catch (const TransportError& e) {
        spdlog::error("evaluator transport failed: {}", e.what());
        abandon_all(e.what());
        break;
      }
      pending.pop_front();
      ++sent_;
      ++attempts[i];
      in_flight[batch[i].id] = {i, Clock::now() + timeout};
    }
    if (remaining == 0) break;

    auto earliest = Clock::time_point::max();
    for (const auto& [id, f] : in_flight) earliest = std::min(earliest, f.deadline);

    std::string line;
    const auto status = channel_->read_line(line, earliest);
    if (status == LineChannel::ReadStatus::closed) {
      spdlog::error("evaluator closed the connection with {} requests outstanding", remaining);
      abandon_all("evaluator closed the connection");
      continue;
    }
    if (status == LineChannel::ReadStatus::timeout) {
      const auto now = Clock::now();
      for (auto it = in_flight.begin(); it != in_flight.end();) {
        const std::size_t i = it->second.index;
        if (it->second.deadline > now) {
          ++it;
          continue;
        }
        if (attempts[i] <= settings_.retries) {
          spdlog::warn("evaluation request {} timed out; retrying", it->first);
          ++resends_;
          pending.push_back(i);
        } else {
          spdlog::error("evaluation request {} timed out after {} attempts", it->first, attempts[i]);
          fail(i, "timeout");
        }
        it = in_flight.erase(it);
      }
      continue;
    }

    EvaluationResponse response;
    try {
      response = decode_response(line);
    } catch (const ProtocolError& e) {
      ++garbage_lines_;
      spdlog::warn("skipping malformed evaluator line: {}", e.what());
      continue;
    }
    const auto it = in_flight.find(response.id);
    if (it == in_flight.end()) {
      ++garbage_lines_;
      spdlog::warn("skipping response for unknown request id {}", response.id);
      continue;
    }
    const std::size_t i = it->second.index;
    in_flight.erase(it);
    if (response.error && attempts[i] <= settings_.retries) {
      spdlog::warn("evaluation request {} failed ({}); retrying", response.id, *response.error);
      ++resends_;
      pending.push_back(i);
      continue;
    }
    if (response.error) response.objectives.reset();
    finish(i, std::move(response));
  }

  std::vector<EvaluationResponse> out;
  out.reserve(n);
  for (auto& r : done) out.push_back(std::move(*r));
  return out;
}

}  // namespace paretonas
