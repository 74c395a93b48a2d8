#include "paretonas/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "paretonas/protocol.hpp"

namespace paretonas {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key \"" + key + "\" in " + where);
  }
}

template <class T>
T read(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::size_t read_count(const nlohmann::json& j, const char* key, std::size_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) throw ConfigError(where + "." + key + " must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

std::string default_name(ObjectiveKind kind) {
  return kind == ObjectiveKind::surrogate ? "accuracy" : std::string(to_string(kind));
}

}  // namespace

std::vector<std::string> RunConfig::objective_names() const {
  if (problem == ProblemKind::zdt1) return {"f1", "f2"};
  std::vector<std::string> names;
  for (const auto& o : objectives) names.push_back(o.name);
  return names;
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json s;
  s["population_size"] = search.population_size;
  s["mu_cross"] = search.mu_cross;
  s["mu_mut"] = search.mu_mut;
  s["max_generations"] = search.max_generations;
  s["plateau_window"] = search.plateau_window;
  s["plateau_epsilon"] = search.plateau_epsilon;
  s["seed"] = search.seed;
  s["parallelism"] = search.parallelism;
  s["reference"] = search.reference;

  nlohmann::ordered_json p;
  if (problem == ProblemKind::zdt1) {
    p["kind"] = "zdt1";
    p["variables"] = benchmark_variables;
  } else {
    p["kind"] = "nas";
    p["blocks"] = block_count;
    auto macro_json = macro_to_json(macro);
    macro_json["batchnorm"] = macro.count_batchnorm;
    p["macro"] = std::move(macro_json);
    auto& objs = p["objectives"] = nlohmann::ordered_json::array();
    for (const auto& o : objectives) objs.push_back({{"kind", to_string(o.kind)}, {"name", o.name}});
    if (evaluator.configured()) {
      p["evaluator"] = {{"command", evaluator.command},
                        {"address", evaluator.address},
                        {"timeout", evaluator.timeout_seconds},
                        {"retries", evaluator.retries}};
    }
  }
  nlohmann::ordered_json j;
  j["search"] = std::move(s);
  j["problem"] = std::move(p);
  return j;
}

std::string RunConfig::hash() const {
  nlohmann::ordered_json j = to_json();
  j["search"].erase("parallelism");
  return fmt::format("{:016x}", stable_hash(j.dump()));
}

RunConfig parse_run_config(const nlohmann::json& j) {
  reject_unknown(j, {"search", "problem"}, "config");
  RunConfig c;

  const nlohmann::json search = j.value("search", nlohmann::json::object());
  reject_unknown(search, {"population_size", "mu_cross", "mu_mut", "max_generations", "plateau_window",
                          "plateau_epsilon", "seed", "parallelism", "reference"},
                 "search");
  SearchConfig& s = c.search;
  s.population_size = read_count(search, "population_size", s.population_size, "search");
  s.mu_cross = read(search, "mu_cross", s.mu_cross, "search");
  s.mu_mut = read(search, "mu_mut", s.mu_mut, "search");
  s.max_generations = read_count(search, "max_generations", s.max_generations, "search");
  s.plateau_window = read_count(search, "plateau_window", s.plateau_window, "search");
  s.plateau_epsilon = read(search, "plateau_epsilon", s.plateau_epsilon, "search");
  s.seed = read_count(search, "seed", s.seed, "search");
  s.parallelism = read_count(search, "parallelism", s.parallelism, "search");
  s.reference = read(search, "reference", s.reference, "search");

  const nlohmann::json problem = j.value("problem", nlohmann::json::object());
  reject_unknown(problem, {"kind", "blocks", "macro", "objectives", "evaluator", "variables"}, "problem");
  const std::string kind = read(problem, "kind", std::string("nas"), "problem");
  if (kind == "zdt1") {
    c.problem = ProblemKind::zdt1;
    c.benchmark_variables = read_count(problem, "variables", c.benchmark_variables, "problem");
    if (c.benchmark_variables < 2) throw ConfigError("problem.variables must be >= 2");
  } else if (kind == "nas") {
    c.block_count = read_count(problem, "blocks", c.block_count, "problem");
    if (c.block_count < 1) throw ConfigError("problem.blocks must be >= 1");
    if (problem.contains("macro")) {
      reject_unknown(problem["macro"], {"template", "n", "f", "resolution", "classes", "batchnorm"},
                     "problem.macro");
      try {
        c.macro = macro_from_json(problem["macro"]);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("problem.macro: ") + e.what());
      }
    }
    if (problem.contains("objectives")) {
      if (!problem["objectives"].is_array()) throw ConfigError("problem.objectives must be an array");
      c.objectives.clear();
      for (const auto& o : problem["objectives"]) {
        ObjectiveSpec spec;
        try {
          if (o.is_string()) {
            spec.kind = parse_objective_kind(o.get<std::string>());
            spec.name = default_name(spec.kind);
          } else {
            reject_unknown(o, {"kind", "name"}, "problem.objectives[]");
            spec.kind = parse_objective_kind(o.at("kind").get<std::string>());
            spec.name = o.value("name", default_name(spec.kind));
          }
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception& e) {
          throw ConfigError(std::string("problem.objectives: ") + e.what());
        }
        c.objectives.push_back(spec);
      }
    }
    if (problem.contains("evaluator")) {
      const auto& e = problem["evaluator"];
      reject_unknown(e, {"command", "address", "timeout", "retries"}, "problem.evaluator");
      c.evaluator.command = read(e, "command", std::string(), "problem.evaluator");
      c.evaluator.address = read(e, "address", std::string(), "problem.evaluator");
      c.evaluator.timeout_seconds = read(e, "timeout", c.evaluator.timeout_seconds, "problem.evaluator");
      c.evaluator.retries = read(e, "retries", c.evaluator.retries, "problem.evaluator");
      if (!(c.evaluator.timeout_seconds > 0)) throw ConfigError("problem.evaluator.timeout must be positive");
      if (c.evaluator.retries < 0) throw ConfigError("problem.evaluator.retries must be >= 0");
    }
    const bool wants_external = std::any_of(c.objectives.begin(), c.objectives.end(), [](const auto& o) {
      return o.kind == ObjectiveKind::external;
    });
    if (wants_external && !c.evaluator.configured()) {
      throw ConfigError("external objectives need problem.evaluator.command or .address");
    }
    try {
      // Probe the macro once so bad shapes fail at load time.
      Rng probe(0);
      build_network(random_genome(probe, c.block_count), c.macro);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("problem.macro: ") + e.what());
    }
  } else {
    throw ConfigError("unknown problem.kind \"" + kind + "\"");
  }

  try {
    c.search.validate(c.problem == ProblemKind::zdt1 ? 2 : c.objectives.size());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace paretonas
