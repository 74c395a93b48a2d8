#pragma once

// Line-delimited JSON protocol spoken with out-of-process evaluators.
//
//   request:  {"id":7,"genome":{...canonical...},"macro":{"template":"cifar10","n":2,"f":32,"resolution":32,"classes":10}}
//   response: {"id":7,"objectives":[0.91],"error":null}
//             {"id":7,"objectives":null,"error":"msg"}
//
// One object per line, newline-terminated. Response objectives cover the
// external slots only, in declared order.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "paretonas/genome.hpp"
#include "paretonas/network.hpp"

namespace paretonas {

struct EvaluationRequest {
  std::uint64_t id = 0;
  Genome genome;
  MacroConfig macro;
};

struct EvaluationResponse {
  std::uint64_t id = 0;
  std::optional<std::vector<double>> objectives;
  std::optional<std::string> error;

  friend bool operator==(const EvaluationResponse&, const EvaluationResponse&) = default;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Encodes without the trailing newline.
std::string encode_request(const EvaluationRequest& request);
EvaluationRequest decode_request(std::string_view line);

std::string encode_response(const EvaluationResponse& response);
/// Throws ProtocolError on malformed input, including non-finite objectives
/// and responses carrying neither objectives nor an error.
EvaluationResponse decode_response(std::string_view line);

nlohmann::ordered_json macro_to_json(const MacroConfig& m);
MacroConfig macro_from_json(const nlohmann::json& j);

}  // namespace paretonas
