#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "paretonas/genome.hpp"
#include "paretonas/network.hpp"
#include "paretonas/pareto.hpp"

namespace paretonas {

/// Raised when an entire batch fails to evaluate.
class EvaluatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result of evaluating one genotype: objectives, or an error message.
struct EvalOutcome {
  std::optional<ObjectiveVector> objectives;
  std::string error;

  bool ok() const { return objectives.has_value(); }
  friend bool operator==(const EvalOutcome&, const EvalOutcome&) = default;
};

/// Evaluates batches of genotypes. Implementations may run up to
/// `parallelism` evaluations concurrently but must return outcomes in batch
/// order.
template <class G>
class BatchEvaluator {
 public:
  virtual ~BatchEvaluator() = default;
  virtual std::size_t objective_count() const = 0;
  virtual std::vector<EvalOutcome> evaluate(std::span<const G> batch, std::size_t parallelism) = 0;
};

/// Runs fn(i) for i in [0, n) on at most `parallelism` threads.
void parallel_for(std::size_t n, std::size_t parallelism, const std::function<void(std::size_t)>& fn);

/// Wraps a per-genotype objective function as a parallel batch evaluator.
/// Exceptions thrown by the function become error outcomes.
template <class G>
class FunctionEvaluator final : public BatchEvaluator<G> {
 public:
  using Fn = std::function<ObjectiveVector(const G&)>;
  FunctionEvaluator(std::size_t objective_count, Fn fn) : count_(objective_count), fn_(std::move(fn)) {}

  std::size_t objective_count() const override { return count_; }

  std::vector<EvalOutcome> evaluate(std::span<const G> batch, std::size_t parallelism) override {
    std::vector<EvalOutcome> out(batch.size());
    parallel_for(batch.size(), parallelism, [&](std::size_t i) {
      try {
        out[i].objectives = fn_(batch[i]);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    });
    return out;
  }

 private:
  std::size_t count_;
  Fn fn_;
};

/// Canonical genotype key -> outcome. Touched only by the joining thread.
using EvalCache = std::map<std::string, EvalOutcome>;

struct DispatchStats {
  std::size_t cache_hits = 0;
  std::size_t dispatched = 0;
};

/// Fills outcomes for `genotypes` (with canonical `keys`), answering repeated
/// keys from the cache and dispatching each distinct miss exactly once.
template <class G>
std::vector<EvalOutcome> dispatch(std::span<const G> genotypes, std::span<const std::string> keys,
                                  BatchEvaluator<G>& evaluator, std::size_t parallelism,
                                  EvalCache& cache, DispatchStats* stats = nullptr) {
  if (parallelism == 0) throw std::invalid_argument("dispatch: parallelism must be >= 1");
  std::vector<G> misses;
  std::vector<std::string> miss_keys;
  for (std::size_t i = 0; i < genotypes.size(); ++i) {
    if (cache.contains(keys[i])) continue;
    if (std::find(miss_keys.begin(), miss_keys.end(), keys[i]) != miss_keys.end()) continue;
    misses.push_back(genotypes[i]);
    miss_keys.push_back(keys[i]);
  }
  if (!misses.empty()) {
    std::vector<EvalOutcome> fresh = evaluator.evaluate(std::span<const G>(misses), parallelism);
    if (fresh.size() != misses.size()) throw std::logic_error("evaluator returned a short batch");
    for (std::size_t k = 0; k < misses.size(); ++k) cache.emplace(miss_keys[k], std::move(fresh[k]));
  }
  if (stats) {
    stats->dispatched += misses.size();
    stats->cache_hits += genotypes.size() - misses.size();
  }
  std::vector<EvalOutcome> out;
  out.reserve(genotypes.size());
  for (std::size_t i = 0; i < genotypes.size(); ++i) out.push_back(cache.at(keys[i]));
  return out;
}

// --- NAS objectives ------------------------------------------------------------

enum class ObjectiveKind { surrogate, speed, params_inverse, external };

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::surrogate;
  /// Display name; external slots use it as their column label.
  std::string name;
};

std::string_view to_string(ObjectiveKind kind);
ObjectiveKind parse_objective_kind(std::string_view name);

/// Deterministic stand-in for proxy-training accuracy:
///   0.50 + 0.45 * (1 - exp(-mult_adds / 3e8)) + eps(genome),
/// with eps in [-0.02, 0.02] derived from a hash of the canonical text.
double surrogate_accuracy(const Genome& g, const MacroConfig& m);
double surrogate_accuracy(std::int64_t mult_adds, std::string_view canonical_text);

/// 64-bit FNV-1a.
std::uint64_t stable_hash(std::string_view text);

/// Objective vector in declared order. `external_values` holds the values
/// of the external slots, in the order those slots are declared.
ObjectiveVector compose_objectives(const Genome& g, std::span<const ObjectiveSpec> objectives,
                                   const MacroConfig& macro, std::span<const double> external_values);

class ExternalEvaluator;

/// Evaluator for NAS genomes: builtin slots are computed in process, external
/// slots are requested from an out-of-process evaluator.
class NasEvaluator final : public BatchEvaluator<Genome> {
 public:
  NasEvaluator(std::vector<ObjectiveSpec> objectives, MacroConfig macro,
               ExternalEvaluator* external = nullptr);

  std::size_t objective_count() const override { return objectives_.size(); }
  std::size_t external_count() const;
  std::vector<EvalOutcome> evaluate(std::span<const Genome> batch, std::size_t parallelism) override;

 private:
  std::vector<ObjectiveSpec> objectives_;
  MacroConfig macro_;
  ExternalEvaluator* external_;
};

// --- benchmark problem -----------------------------------------------------------

struct BenchmarkGenome {
  std::vector<double> values;
  friend bool operator==(const BenchmarkGenome&, const BenchmarkGenome&) = default;
};

/// ZDT1 in maximization form: (1 - f1, 1 - f2) of the classic problem, so
/// f1 = 1 - x1 and f2 = 1 - g * (1 - sqrt(x1 / g)). The true front is
/// f2 = sqrt(1 - f1) for f1 in [0, 1].
ObjectiveVector benchmark_objectives(const BenchmarkGenome& v);

/// Hypervolume of the analytic front against reference (0, 0).
inline constexpr double kZdt1FrontHypervolume = 2.0 / 3.0;

/// Euclidean distance from an objective point to the analytic front curve.
double zdt1_front_distance(const ObjectiveVector& point);

}  // namespace paretonas
