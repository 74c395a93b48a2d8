#include "paretonas/eval.hpp"

#include <cmath>
#include <exception>
#include <mutex>

#include "paretonas/external.hpp"

namespace paretonas {

void parallel_for(std::size_t n, std::size_t parallelism, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(parallelism, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// --- objectives ------------------------------------------------------------------

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::surrogate: return "surrogate";
    case ObjectiveKind::speed: return "speed";
    case ObjectiveKind::params_inverse: return "params_inverse";
    case ObjectiveKind::external: return "external";
  }
  return "?";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  for (auto kind : {ObjectiveKind::surrogate, ObjectiveKind::speed, ObjectiveKind::params_inverse,
                    ObjectiveKind::external}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown objective kind \"" + std::string(name) + "\"");
}

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double surrogate_accuracy(std::int64_t mult_adds, std::string_view canonical_text) {
  const double unit = static_cast<double>(stable_hash(canonical_text) >> 11) * 0x1.0p-53;
  const double perturbation = 0.02 * (2.0 * unit - 1.0);
  return 0.50 + 0.45 * (1.0 - std::exp(-static_cast<double>(mult_adds) / 3.0e8)) + perturbation;
}

double surrogate_accuracy(const Genome& g, const MacroConfig& m) {
  return surrogate_accuracy(network_cost(g, m).mult_adds, serialize(g));
}

ObjectiveVector compose_objectives(const Genome& g, std::span<const ObjectiveSpec> objectives,
                                   const MacroConfig& macro, std::span<const double> external_values) {
  std::optional<CostReport> cost;
  auto cost_of = [&]() -> const CostReport& {
    if (!cost) cost = network_cost(g, macro);
    return *cost;
  };
  std::vector<double> values;
  values.reserve(objectives.size());
  std::size_t next_external = 0;
  for (const ObjectiveSpec& spec : objectives) {
    switch (spec.kind) {
      case ObjectiveKind::surrogate:
        values.push_back(surrogate_accuracy(cost_of().mult_adds, serialize(g)));
        break;
      case ObjectiveKind::speed:
        values.push_back(speed(cost_of()));
        break;
      case ObjectiveKind::params_inverse:
        values.push_back(1.0e6 / static_cast<double>(cost_of().params));
        break;
      case ObjectiveKind::external:
        if (next_external >= external_values.size()) {
          throw std::invalid_argument("missing value for external objective \"" + spec.name + "\"");
        }
        values.push_back(external_values[next_external++]);
        break;
    }
  }
  return ObjectiveVector(std::move(values));
}

NasEvaluator::NasEvaluator(std::vector<ObjectiveSpec> objectives, MacroConfig macro,
                           ExternalEvaluator* external)
    : objectives_(std::move(objectives)), macro_(macro), external_(external) {
  if (external_count() > 0 && external_ == nullptr) {
    throw std::invalid_argument("external objectives declared but no evaluator configured");
  }
}

std::size_t NasEvaluator::external_count() const {
  return static_cast<std::size_t>(std::count_if(objectives_.begin(), objectives_.end(), [](const auto& s) {
    return s.kind == ObjectiveKind::external;
  }));
}

std::vector<EvalOutcome> NasEvaluator::evaluate(std::span<const Genome> batch, std::size_t parallelism) {
  std::vector<EvalOutcome> out(batch.size());
  std::vector<std::vector<double>> external_values(batch.size());

  if (const std::size_t slots = external_count(); slots > 0) {
    std::vector<EvaluationRequest> requests;
    requests.reserve(batch.size());
    for (const Genome& g : batch) requests.push_back({external_->next_id(), g, macro_});
    const std::vector<EvaluationResponse> responses = external_->evaluate(requests, parallelism);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const EvaluationResponse& r = responses[i];
      if (r.error) {
        out[i].error = *r.error;
      } else if (!r.objectives || r.objectives->size() != slots) {
        out[i].error = "evaluator returned " + std::to_string(r.objectives ? r.objectives->size() : 0) +
                       " objectives, expected " + std::to_string(slots);
      } else {
        external_values[i] = *r.objectives;
      }
    }
  }

  parallel_for(batch.size(), parallelism, [&](std::size_t i) {
    if (!out[i].error.empty()) return;
    try {
      out[i].objectives = compose_objectives(batch[i], objectives_, macro_, external_values[i]);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

// --- benchmark problem -------------------------------------------------------------

ObjectiveVector benchmark_objectives(const BenchmarkGenome& v) {
  const std::size_t n = v.values.size();
  if (n == 0) throw std::invalid_argument("benchmark genome must not be empty");
  const double x1 = v.values[0];
  double tail = 0.0;
  for (std::size_t i = 1; i < n; ++i) tail += v.values[i];
  const double g = n > 1 ? 1.0 + 9.0 * tail / static_cast<double>(n - 1) : 1.0;
  return ObjectiveVector{1.0 - x1, 1.0 - g * (1.0 - std::sqrt(x1 / g))};
}

double zdt1_front_distance(const ObjectiveVector& point) {
  // Front parameterized by t = x1 in [0, 1]: (1 - t, sqrt(t)).
  auto dist2 = [&](double t) {
    const double dx = point[0] - (1.0 - t);
    const double dy = point[1] - std::sqrt(t);
    return dx * dx + dy * dy;
  };
  constexpr int kGrid = 2000;
  int best = 0;
  for (int k = 1; k <= kGrid; ++k) {
    if (dist2(static_cast<double>(k) / kGrid) < dist2(static_cast<double>(best) / kGrid)) best = k;
  }
  // Golden-section refinement inside the neighbouring grid cells.
  double lo = std::max(0.0, static_cast<double>(best - 1) / kGrid);
  double hi = std::min(1.0, static_cast<double>(best + 1) / kGrid);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double a = hi - ratio * (hi - lo);
    const double b = lo + ratio * (hi - lo);
    if (dist2(a) < dist2(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return std::sqrt(std::min({dist2(0.5 * (lo + hi)), dist2(static_cast<double>(best) / kGrid)}));
}

}  // namespace paretonas
