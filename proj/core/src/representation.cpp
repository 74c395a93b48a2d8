#include "paretonas/representation.hpp"

#include <algorithm>

namespace paretonas {

BenchmarkGenome BenchmarkRepresentation::random(Rng& rng) const {
  if (variables == 0) throw std::invalid_argument("benchmark genome needs at least one variable");
  BenchmarkGenome g;
  g.values.reserve(variables);
  for (std::size_t i = 0; i < variables; ++i) g.values.push_back(rng.uniform01());
  return g;
}

BenchmarkGenome BenchmarkRepresentation::mutate(const BenchmarkGenome& g, double mu, Rng& rng) const {
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu_mut must lie in [0, 1]");
  BenchmarkGenome out = g;
  for (double& v : out.values) {
    if (rng.bernoulli(mu)) v = rng.uniform01();
    v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

std::pair<BenchmarkGenome, BenchmarkGenome> BenchmarkRepresentation::crossover(
    const BenchmarkGenome& a, const BenchmarkGenome& b, double mu, Rng& rng) const {
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("mu_cross must lie in [0, 1]");
  if (a.values.size() != b.values.size()) throw std::invalid_argument("crossover: length mismatch");
  std::pair<BenchmarkGenome, BenchmarkGenome> out{a, b};
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (rng.bernoulli(mu)) std::swap(out.first.values[i], out.second.values[i]);
  }
  return out;
}

BenchmarkGenome BenchmarkRepresentation::from_json(const nlohmann::json& j) const {
  if (!j.is_array()) throw std::invalid_argument("benchmark genome must be an array");
  BenchmarkGenome g;
  for (const auto& v : j) {
    if (!v.is_number()) throw std::invalid_argument("benchmark genome entries must be numbers");
    const double d = v.get<double>();
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("benchmark genome entries must lie in [0, 1]");
    g.values.push_back(d);
  }
  if (g.values.empty()) throw std::invalid_argument("benchmark genome must not be empty");
  return g;
}

}  // namespace paretonas
