#include "paretonas/evolution.hpp"

namespace paretonas {

void SearchConfig::validate(std::size_t objective_count) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (population_size < 2 || population_size % 2 != 0) {
    fail("population_size must be even and >= 2");
  }
  if (!(mu_cross >= 0.0 && mu_cross <= 1.0)) fail("mu_cross must lie in [0, 1]");
  if (!(mu_mut >= 0.0 && mu_mut <= 1.0)) fail("mu_mut must lie in [0, 1]");
  if (!(plateau_epsilon >= 0.0)) fail("plateau_epsilon must be >= 0");
  if (parallelism < 1) fail("parallelism must be >= 1");
  if (objective_count < 2) fail("at least two objectives must be declared");
  // Convergence monitoring uses the two-objective hypervolume.
  if (objective_count != 2) fail("exactly two objectives are supported");
  if (!reference.empty() && reference.size() != objective_count) {
    fail("reference point length must match the objective count");
  }
}

ObjectiveVector SearchConfig::reference_point(std::size_t objective_count) const {
  if (reference.empty()) return ObjectiveVector(std::vector<double>(objective_count, 0.0));
  return ObjectiveVector(reference);
}

bool converged(std::span<const double> history, std::size_t generation, const SearchConfig& config) {
  if (generation >= config.max_generations) return true;
  const std::size_t window = config.plateau_window;
  if (window == 0 || generation < window || history.size() <= window) return false;
  const double last = history.back();
  const double base = history[history.size() - 1 - window];
  if (base <= 0.0) return last <= base;
  return (last - base) / base < config.plateau_epsilon;
}

nlohmann::ordered_json objectives_to_json(const std::optional<ObjectiveVector>& v) {
  if (!v) return nullptr;
  return v->values();
}

std::optional<ObjectiveVector> objectives_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return ObjectiveVector(j.get<std::vector<double>>());
}

}  // namespace paretonas
