#pragma once

// Run configuration file:
//
// {
//   "search":  {"population_size": 32, "mu_cross": 0.1, "mu_mut": 0.1,
//               "max_generations": 50, "plateau_window": 10,
//               "plateau_epsilon": 1e-4, "seed": 0, "parallelism": 1,
//               "reference": [0, 0]},
//   "problem": {"kind": "nas", "blocks": 5,
//               "macro": {"template": "cifar10", "n": 2, "f": 32,
//                         "resolution": 32, "classes": 10, "batchnorm": true},
//               "objectives": ["surrogate", "speed"],
//               "evaluator": {"command": "...", "address": "host:port",
//                             "timeout": 3600, "retries": 2}}
// }
//
// or "problem": {"kind": "zdt1", "variables": 8}. Every field is optional;
// unknown keys are rejected.

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "paretonas/eval.hpp"
#include "paretonas/evolution.hpp"
#include "paretonas/external.hpp"
#include "paretonas/network.hpp"

namespace paretonas {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ProblemKind { nas, zdt1 };

struct RunConfig {
  SearchConfig search;
  ProblemKind problem = ProblemKind::nas;

  std::size_t block_count = kDefaultBlockCount;
  MacroConfig macro;
  std::vector<ObjectiveSpec> objectives{{ObjectiveKind::surrogate, "accuracy"},
                                        {ObjectiveKind::speed, "speed"}};
  ExternalSettings evaluator;

  std::size_t benchmark_variables = 8;

  std::vector<std::string> objective_names() const;
  /// Normalized configuration with every default filled in.
  nlohmann::ordered_json to_json() const;
  /// Hash of the normalized configuration, excluding settings that cannot
  /// change results (parallelism).
  std::string hash() const;
};

/// Parses and validates; throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

}  // namespace paretonas
