#pragma once

#include <concepts>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "paretonas/eval.hpp"
#include "paretonas/genome.hpp"
#include "paretonas/rng.hpp"

namespace paretonas {

/// What the search engine needs from a genotype encoding.
template <class R>
concept Representation = requires(const R& r, const typename R::Genotype& g, Rng& rng, double p,
                                  const nlohmann::json& j) {
  { r.random(rng) } -> std::same_as<typename R::Genotype>;
  { r.mutate(g, p, rng) } -> std::same_as<typename R::Genotype>;
  { r.crossover(g, g, p, rng) } -> std::same_as<std::pair<typename R::Genotype, typename R::Genotype>>;
  { r.key(g) } -> std::convertible_to<std::string>;
  { r.to_json(g) } -> std::convertible_to<nlohmann::ordered_json>;
  { r.from_json(j) } -> std::same_as<typename R::Genotype>;
};

/// Cell genomes for architecture search.
struct NasRepresentation {
  using Genotype = Genome;
  std::size_t block_count = kDefaultBlockCount;

  Genome random(Rng& rng) const { return random_genome(rng, block_count); }
  Genome mutate(const Genome& g, double mu, Rng& rng) const { return paretonas::mutate(g, mu, rng); }
  std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, double mu, Rng& rng) const {
    return paretonas::crossover(a, b, mu, rng);
  }
  std::string key(const Genome& g) const { return serialize(g); }
  nlohmann::ordered_json to_json(const Genome& g) const { return paretonas::to_json(g); }
  Genome from_json(const nlohmann::json& j) const { return genome_from_json(j); }
};

/// Real vectors in [0, 1]^n for validating the engine on benchmark problems.
/// Variation mirrors the genome operators: per-component uniform resample and
/// per-component swap.
struct BenchmarkRepresentation {
  using Genotype = BenchmarkGenome;
  std::size_t variables = 8;

  BenchmarkGenome random(Rng& rng) const;
  BenchmarkGenome mutate(const BenchmarkGenome& g, double mu, Rng& rng) const;
  std::pair<BenchmarkGenome, BenchmarkGenome> crossover(const BenchmarkGenome& a, const BenchmarkGenome& b,
                                                        double mu, Rng& rng) const;
  std::string key(const BenchmarkGenome& g) const { return to_json(g).dump(); }
  nlohmann::ordered_json to_json(const BenchmarkGenome& g) const { return g.values; }
  BenchmarkGenome from_json(const nlohmann::json& j) const;
};

static_assert(Representation<NasRepresentation>);
static_assert(Representation<BenchmarkRepresentation>);

}  // namespace paretonas
