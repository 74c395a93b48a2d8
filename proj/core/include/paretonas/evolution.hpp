#pragma once

// Generational multi-objective search: binary-tournament mating selection,
// uniform crossover and mutation, cached evaluation, survival selection over
// parents and offspring, and a hall-of-fame archive whose hypervolume is
// tracked every generation.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "paretonas/eval.hpp"
#include "paretonas/pareto.hpp"
#include "paretonas/representation.hpp"
#include "paretonas/rng.hpp"

namespace paretonas {

struct SearchConfig {
  std::size_t population_size = 32;
  double mu_cross = 0.1;
  double mu_mut = 0.1;
  std::size_t max_generations = 50;
  /// Plateau detection window in generations; 0 disables it.
  std::size_t plateau_window = 10;
  double plateau_epsilon = 1e-4;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  /// Hypervolume reference point; empty means the origin.
  std::vector<double> reference;

  /// Throws std::invalid_argument describing the first bad field.
  void validate(std::size_t objective_count) const;
  ObjectiveVector reference_point(std::size_t objective_count) const;
};

/// Objective value assigned to every slot of an individual whose evaluation
/// failed after all retries. Finite, so the Pareto machinery stays total.
inline constexpr double kFailedObjective = -1.0e30;

template <class G>
struct Individual {
  G genome;
  std::optional<ObjectiveVector> objectives;
  std::uint64_t id = 0;
  std::size_t birth_generation = 0;
  bool failed = false;

  friend bool operator==(const Individual&, const Individual&) = default;
};

template <class G>
struct SearchState {
  std::size_t generation = 0;
  std::vector<Individual<G>> population;
  std::vector<Individual<G>> archive;
  Rng rng;
  std::uint64_t next_id = 0;
  /// Archive hypervolume after initialization and after every step.
  std::vector<double> hypervolume_history;
  /// Per generation, the best archive value of every objective.
  std::vector<std::vector<double>> best_history;
  EvalCache eval_cache;

  friend bool operator==(const SearchState&, const SearchState&) = default;
};

/// True once the archive hypervolume gained less than `plateau_epsilon`
/// (relative) over the last `plateau_window` generations, or once
/// `max_generations` is reached.
bool converged(std::span<const double> hypervolume_history, std::size_t generation,
               const SearchConfig& config);

/// Adds evaluated, non-failed newcomers to the archive and keeps its
/// non-dominated subset. Genotypes with an equal key are kept once.
template <class G, class KeyFn>
std::vector<Individual<G>> update_archive(std::vector<Individual<G>> archive,
                                          std::span<const Individual<G>> newcomers, KeyFn&& key) {
  std::vector<std::string> keys;
  keys.reserve(archive.size());
  for (const Individual<G>& a : archive) keys.push_back(key(a.genome));
  for (const Individual<G>& n : newcomers) {
    if (!n.objectives || n.failed) continue;
    std::string k = key(n.genome);
    if (std::find(keys.begin(), keys.end(), k) != keys.end()) continue;
    if (std::any_of(archive.begin(), archive.end(),
                    [&](const Individual<G>& a) { return dominates(*a.objectives, *n.objectives); })) {
      continue;
    }
    std::size_t kept = 0;
    for (std::size_t i = 0; i < archive.size(); ++i) {
      if (dominates(*n.objectives, *archive[i].objectives)) continue;
      if (kept != i) {
        archive[kept] = std::move(archive[i]);
        keys[kept] = std::move(keys[i]);
      }
      ++kept;
    }
    archive.resize(kept);
    keys.resize(kept);
    archive.push_back(n);
    keys.push_back(std::move(k));
  }
  return archive;
}

template <Representation R>
class Search {
 public:
  using Genotype = typename R::Genotype;
  using State = SearchState<Genotype>;
  /// Called after initialization and after every step; returning false stops
  /// the run early (the state stays resumable).
  using GenerationHook = std::function<bool(const State&)>;

  Search(SearchConfig config, R representation, BatchEvaluator<Genotype>& evaluator)
      : config_(std::move(config)), rep_(std::move(representation)), evaluator_(evaluator) {
    config_.validate(evaluator_.objective_count());
    reference_ = config_.reference_point(evaluator_.objective_count());
  }

  const SearchConfig& config() const { return config_; }
  const R& representation() const { return rep_; }
  const DispatchStats& dispatch_stats() const { return stats_; }

  State initialize() {
    State s;
    s.rng = Rng(config_.seed);
    std::vector<Genotype> genotypes;
    genotypes.reserve(config_.population_size);
    for (std::size_t i = 0; i < config_.population_size; ++i) genotypes.push_back(rep_.random(s.rng));
    s.population = evaluate(s, std::move(genotypes), 0);
    s.archive = update_archive(std::vector<Individual<Genotype>>{},
                               std::span<const Individual<Genotype>>(s.population), key_fn());
    record(s);
    return s;
  }

  /// Binary tournaments under the crowded order: two uniform picks with
  /// replacement per tournament, N tournaments. Returns population indices.
  std::vector<std::size_t> mating_select(const State& s, Rng& rng) const {
    const std::size_t n = s.population.size();
    std::vector<ObjectiveVector> objectives;
    objectives.reserve(n);
    for (const auto& ind : s.population) objectives.push_back(*ind.objectives);
    const FrontLevels levels = non_dominated_sort(objectives);
    auto key = [&](std::size_t i) {
      return CrowdedKey{levels.rank[i], levels.crowding[i], s.population[i].id};
    };
    std::vector<std::size_t> parents;
    parents.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      const auto a = static_cast<std::size_t>(rng.uniform_index(n));
      const auto b = static_cast<std::size_t>(rng.uniform_index(n));
      parents.push_back(crowded_less(key(b), key(a)) ? b : a);
    }
    return parents;
  }

  /// One generation. The input state is never modified, so a failure leaves
  /// the caller holding the last completed generation.
  State step(const State& current) {
    State s = current;
    const std::vector<std::size_t> parents = mating_select(s, s.rng);
    std::vector<Genotype> children;
    children.reserve(parents.size());
    for (std::size_t i = 0; i + 1 < parents.size(); i += 2) {
      auto [first, second] = rep_.crossover(s.population[parents[i]].genome,
                                            s.population[parents[i + 1]].genome, config_.mu_cross, s.rng);
      children.push_back(rep_.mutate(first, config_.mu_mut, s.rng));
      children.push_back(rep_.mutate(second, config_.mu_mut, s.rng));
    }
    const std::vector<Individual<Genotype>> offspring = evaluate(s, std::move(children), s.generation + 1);

    s.population = select<Individual<Genotype>>(s.population, offspring, config_.population_size);
    s.archive = update_archive(std::move(s.archive), std::span<const Individual<Genotype>>(offspring), key_fn());
    ++s.generation;
    record(s);
    return s;
  }

  bool converged(const State& s) const {
    return paretonas::converged(s.hypervolume_history, s.generation, config_);
  }

  /// Initializes (or continues `resume`) and steps until converged.
  State run(std::optional<State> resume = std::nullopt, const GenerationHook& hook = {}) {
    State s;
    if (resume) {
      s = std::move(*resume);
    } else {
      s = initialize();
      if (hook && !hook(s)) return s;
    }
    while (!converged(s)) {
      s = step(s);
      if (hook && !hook(s)) break;
    }
    return s;
  }

  double archive_hypervolume(const State& s) const {
    std::vector<ObjectiveVector> points;
    for (const auto& a : s.archive) points.push_back(*a.objectives);
    return hypervolume_2d(points, reference_);
  }

 private:
  auto key_fn() const {
    return [this](const Genotype& g) { return rep_.key(g); };
  }

  std::vector<Individual<Genotype>> evaluate(State& s, std::vector<Genotype> genotypes, std::size_t birth) {
    std::vector<std::string> keys;
    keys.reserve(genotypes.size());
    for (const auto& g : genotypes) keys.push_back(rep_.key(g));
    const std::vector<EvalOutcome> outcomes =
        dispatch<Genotype>(genotypes, keys, evaluator_, config_.parallelism, s.eval_cache, &stats_);

    if (!outcomes.empty() && std::none_of(outcomes.begin(), outcomes.end(),
                                          [](const EvalOutcome& o) { return o.ok(); })) {
      throw EvaluatorError("every evaluation of the batch failed: " + outcomes.front().error);
    }

    const std::size_t k = evaluator_.objective_count();
    std::vector<Individual<Genotype>> out;
    out.reserve(genotypes.size());
    for (std::size_t i = 0; i < genotypes.size(); ++i) {
      Individual<Genotype> ind;
      ind.genome = std::move(genotypes[i]);
      ind.id = s.next_id++;
      ind.birth_generation = birth;
      if (outcomes[i].ok() && outcomes[i].objectives->size() == k) {
        ind.objectives = outcomes[i].objectives;
      } else {
        spdlog::warn("evaluation of individual {} failed: {}", ind.id,
                     outcomes[i].ok() ? "wrong objective count" : outcomes[i].error);
        ind.objectives = ObjectiveVector(std::vector<double>(k, kFailedObjective));
        ind.failed = true;
      }
      out.push_back(std::move(ind));
    }
    return out;
  }

  void record(State& s) const {
    s.hypervolume_history.push_back(archive_hypervolume(s));
    std::vector<double> best;
    if (!s.archive.empty()) {
      best.assign(evaluator_.objective_count(), kFailedObjective);
      for (const auto& a : s.archive) {
        for (std::size_t m = 0; m < best.size(); ++m) best[m] = std::max(best[m], (*a.objectives)[m]);
      }
    }
    s.best_history.push_back(std::move(best));
  }

  SearchConfig config_;
  R rep_;
  BatchEvaluator<Genotype>& evaluator_;
  ObjectiveVector reference_;
  DispatchStats stats_;
};

// --- checkpoints -------------------------------------------------------------------

inline constexpr const char* kCheckpointFormat = "paretonas-checkpoint/1";

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::ordered_json objectives_to_json(const std::optional<ObjectiveVector>& v);
std::optional<ObjectiveVector> objectives_from_json(const nlohmann::json& j);

template <Representation R>
nlohmann::ordered_json individual_to_json(const R& rep, const Individual<typename R::Genotype>& ind) {
  nlohmann::ordered_json j;
  j["id"] = ind.id;
  j["birth_generation"] = ind.birth_generation;
  j["objectives"] = objectives_to_json(ind.objectives);
  j["failed"] = ind.failed;
  j["genome"] = rep.to_json(ind.genome);
  return j;
}

template <Representation R>
Individual<typename R::Genotype> individual_from_json(const R& rep, const nlohmann::json& j) {
  Individual<typename R::Genotype> ind;
  ind.id = j.at("id").get<std::uint64_t>();
  ind.birth_generation = j.at("birth_generation").get<std::size_t>();
  ind.objectives = objectives_from_json(j.at("objectives"));
  ind.failed = j.at("failed").get<bool>();
  ind.genome = rep.from_json(j.at("genome"));
  return ind;
}

template <Representation R>
nlohmann::ordered_json checkpoint_to_json(const R& rep, const SearchState<typename R::Genotype>& s,
                                          const std::string& config_hash,
                                          const std::vector<std::string>& objective_names) {
  nlohmann::ordered_json j;
  j["format"] = kCheckpointFormat;
  j["config_hash"] = config_hash;
  j["generation"] = s.generation;
  j["next_id"] = s.next_id;
  j["objectives"] = objective_names;
  j["rng"] = s.rng.save();
  j["hypervolume_history"] = s.hypervolume_history;
  j["best_history"] = s.best_history;
  auto& population = j["population"] = nlohmann::ordered_json::array();
  for (const auto& ind : s.population) population.push_back(individual_to_json(rep, ind));
  auto& archive = j["archive"] = nlohmann::ordered_json::array();
  for (const auto& ind : s.archive) archive.push_back(individual_to_json(rep, ind));
  auto& cache = j["eval_cache"] = nlohmann::ordered_json::array();
  for (const auto& [key, outcome] : s.eval_cache) {
    cache.push_back({{"key", key}, {"objectives", objectives_to_json(outcome.objectives)},
                     {"error", outcome.error}});
  }
  return j;
}

template <Representation R>
SearchState<typename R::Genotype> checkpoint_from_json(const R& rep, const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) {
      throw CheckpointError("unsupported checkpoint format");
    }
    SearchState<typename R::Genotype> s;
    s.generation = j.at("generation").get<std::size_t>();
    s.next_id = j.at("next_id").get<std::uint64_t>();
    s.rng = Rng::restore(j.at("rng").get<std::string>());
    s.hypervolume_history = j.at("hypervolume_history").get<std::vector<double>>();
    s.best_history = j.at("best_history").get<std::vector<std::vector<double>>>();
    for (const auto& ind : j.at("population")) s.population.push_back(individual_from_json(rep, ind));
    for (const auto& ind : j.at("archive")) s.archive.push_back(individual_from_json(rep, ind));
    for (const auto& entry : j.at("eval_cache")) {
      s.eval_cache.emplace(entry.at("key").get<std::string>(),
                           EvalOutcome{objectives_from_json(entry.at("objectives")),
                                       entry.at("error").get<std::string>()});
    }
    return s;
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace paretonas
