#include "paretonas/run.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/spdlog.h>

#include "paretonas/external.hpp"

namespace paretonas {

namespace fs = std::filesystem;

namespace {

/// Mirrors the default logger into <out>/run.log while alive.
class RunLogSink {
 public:
  explicit RunLogSink(const fs::path& file) {
    try {
      sink_ = std::make_shared<spdlog::sinks::basic_file_sink_mt>(file.string());
      spdlog::default_logger()->sinks().push_back(sink_);
    } catch (const spdlog::spdlog_ex& e) {
      throw IoError(std::string("cannot open run log: ") + e.what());
    }
  }
  ~RunLogSink() {
    auto& sinks = spdlog::default_logger()->sinks();
    sinks.erase(std::remove(sinks.begin(), sinks.end(), sink_), sinks.end());
  }
  RunLogSink(const RunLogSink&) = delete;
  RunLogSink& operator=(const RunLogSink&) = delete;

 private:
  std::shared_ptr<spdlog::sinks::sink> sink_;
};

template <Representation R>
RunSummary drive(const RunConfig& config, const R& rep, BatchEvaluator<typename R::Genotype>& evaluator,
                 const fs::path& out_dir, const RunOptions& options) {
  using State = SearchState<typename R::Genotype>;
  Search<R> search(config.search, rep, evaluator);
  const std::string hash = config.hash();
  const std::vector<std::string> names = config.objective_names();

  std::optional<State> resume;
  if (options.resume) {
    const auto latest = latest_checkpoint(out_dir);
    if (!latest) throw CheckpointError("no checkpoint to resume from in " + out_dir.string());
    const nlohmann::json j = read_json_file(*latest);
    if (j.value("config_hash", std::string()) != hash) {
      throw CheckpointError("checkpoint " + latest->string() + " was written with a different config");
    }
    resume = checkpoint_from_json(rep, j);
    spdlog::info("resuming from {} (generation {})", latest->string(), resume->generation);
  }

  nlohmann::ordered_json last;
  const auto hook = [&](const State& s) {
    last = checkpoint_to_json(rep, s, hash, names);
    write_text_file(checkpoint_path(out_dir, s.generation), last.dump(1) + "\n");
    spdlog::info("generation {}: population {}, archive {}, hypervolume {}", s.generation,
                 s.population.size(), s.archive.size(), s.hypervolume_history.back());
    return !(options.stop_after_generation && s.generation >= *options.stop_after_generation);
  };
  const State final_state = search.run(std::move(resume), hook);
  if (last.is_null()) last = checkpoint_to_json(rep, final_state, hash, names);

  RunSummary summary;
  summary.generation = final_state.generation;
  summary.archive_size = final_state.archive.size();
  summary.hypervolume = final_state.hypervolume_history.back();
  summary.completed = search.converged(final_state);
  summary.dispatch = search.dispatch_stats();
  if (summary.completed) {
    const nlohmann::json doc = nlohmann::json::parse(last.dump());
    write_text_file(out_dir / "front.json", front_to_json(front_from_checkpoint(doc)));
    write_text_file(out_dir / "history.csv", history_to_csv(doc));
    spdlog::info("search finished at generation {} with {} archive members", summary.generation,
                 summary.archive_size);
  } else {
    spdlog::info("search stopped after generation {}; resume with --resume", summary.generation);
  }
  return summary;
}

std::string csv_quote(const std::string& field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

fs::path checkpoint_path(const fs::path& out_dir, std::size_t generation) {
  return out_dir / "checkpoints" / fmt::format("gen-{:05d}", generation);
}

std::optional<fs::path> latest_checkpoint(const fs::path& out_dir) {
  const fs::path dir = out_dir / "checkpoints";
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return std::nullopt;
  static const std::regex pattern("gen-([0-9]{5,})");
  std::optional<fs::path> best;
  unsigned long long best_gen = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    const unsigned long long gen = std::stoull(m[1].str());
    if (!best || gen > best_gen) {
      best = entry.path();
      best_gen = gen;
    }
  }
  return best;
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

RunSummary run_search(const RunConfig& config, const fs::path& out_dir, const RunOptions& options) {
  const fs::path snapshot = out_dir / "config.snapshot";
  std::error_code ec;
  if (options.resume) {
    if (!fs::exists(snapshot, ec)) throw CheckpointError("no run to resume in " + out_dir.string());
    const RunConfig previous = parse_run_config(read_json_file(snapshot));
    if (previous.hash() != config.hash()) {
      throw CheckpointError("config differs from the snapshot in " + out_dir.string());
    }
  } else {
    if (fs::exists(out_dir, ec) && !fs::is_empty(out_dir, ec)) {
      throw IoError("output directory " + out_dir.string() + " is not empty (use --resume to continue)");
    }
    fs::create_directories(out_dir / "checkpoints", ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    write_text_file(snapshot, config.to_json().dump(2) + "\n");
  }
  fs::create_directories(out_dir / "checkpoints", ec);
  RunLogSink log(out_dir / "run.log");
  spdlog::info("run directory {} (config {})", out_dir.string(), config.hash());

  if (config.problem == ProblemKind::zdt1) {
    FunctionEvaluator<BenchmarkGenome> evaluator(2, benchmark_objectives);
    return drive(config, BenchmarkRepresentation{config.benchmark_variables}, evaluator, out_dir, options);
  }
  std::optional<ExternalEvaluator> external;
  if (config.evaluator.configured()) external.emplace(config.evaluator);
  NasEvaluator evaluator(config.objectives, config.macro, external ? &*external : nullptr);
  return drive(config, NasRepresentation{config.block_count}, evaluator, out_dir, options);
}

// --- front export ------------------------------------------------------------------

FrontExport front_from_checkpoint(const nlohmann::json& checkpoint) {
  FrontExport front;
  try {
    front.objective_names = checkpoint.at("objectives").get<std::vector<std::string>>();
    for (const auto& a : checkpoint.at("archive")) {
      FrontPoint p;
      p.id = a.at("id").get<std::uint64_t>();
      p.generation = a.at("birth_generation").get<std::size_t>();
      p.objectives = a.at("objectives").get<std::vector<double>>();
      p.genome = a.at("genome");
      front.points.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
  std::sort(front.points.begin(), front.points.end(), [](const FrontPoint& a, const FrontPoint& b) {
    if (a.objectives[0] != b.objectives[0]) return a.objectives[0] > b.objectives[0];
    return a.id < b.id;
  });
  return front;
}

FrontExport load_front(const fs::path& checkpoint_or_run_dir) {
  std::error_code ec;
  fs::path file = checkpoint_or_run_dir;
  if (fs::is_directory(checkpoint_or_run_dir, ec)) {
    const auto latest = latest_checkpoint(checkpoint_or_run_dir);
    if (!latest) throw IoError("no checkpoints in " + checkpoint_or_run_dir.string());
    file = *latest;
  }
  return front_from_checkpoint(read_json_file(file));
}

std::string front_to_json(const FrontExport& front) {
  nlohmann::ordered_json j;
  j["objectives"] = front.objective_names;
  auto& points = j["points"] = nlohmann::ordered_json::array();
  for (const FrontPoint& p : front.points) {
    nlohmann::ordered_json e;
    e["id"] = p.id;
    e["generation"] = p.generation;
    e["objectives"] = p.objectives;
    e["genome"] = p.genome;
    points.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string front_to_csv(const FrontExport& front) {
  std::string out = "id,generation";
  for (const auto& name : front.objective_names) out += "," + name;
  out += ",genome\n";
  for (const FrontPoint& p : front.points) {
    out += fmt::format("{},{}", p.id, p.generation);
    for (double v : p.objectives) out += fmt::format(",{}", v);
    out += "," + csv_quote(p.genome.dump()) + "\n";
  }
  return out;
}

std::string history_to_csv(const nlohmann::json& checkpoint) {
  const auto names = checkpoint.at("objectives").get<std::vector<std::string>>();
  const auto hv = checkpoint.at("hypervolume_history").get<std::vector<double>>();
  const auto best = checkpoint.at("best_history").get<std::vector<std::vector<double>>>();
  std::string out = "generation,hypervolume";
  for (const auto& name : names) out += ",best_" + name;
  out += "\n";
  for (std::size_t g = 0; g < hv.size(); ++g) {
    out += fmt::format("{},{}", g, hv[g]);
    for (std::size_t m = 0; m < names.size(); ++m) {
      if (g < best.size() && m < best[g].size()) {
        out += fmt::format(",{}", best[g][m]);
      } else {
        out += ",";
      }
    }
    out += "\n";
  }
  return out;
}

// --- benchmark -----------------------------------------------------------------------

nlohmann::ordered_json BenchReport::to_json() const {
  nlohmann::ordered_json j;
  j["generations"] = generations;
  j["archive_size"] = archive_size;
  j["hypervolume"] = hypervolume;
  j["analytic_hypervolume"] = analytic_hypervolume;
  j["gap_percent"] = gap_percent;
  j["mean_front_distance"] = mean_front_distance;
  return j;
}

BenchReport run_benchmark(const BenchOptions& options) {
  if (options.problem != "zdt1") throw ConfigError("unsupported benchmark problem \"" + options.problem + "\"");
  if (options.variables < 2) throw ConfigError("benchmark needs at least two variables");

  SearchConfig config;
  config.population_size = options.population;
  config.mu_cross = options.mu_cross;
  config.mu_mut = options.mu_mut;
  config.max_generations = options.generations;
  config.plateau_window = 0;
  config.seed = options.seed;
  try {
    config.validate(2);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  FunctionEvaluator<BenchmarkGenome> evaluator(2, benchmark_objectives);
  Search<BenchmarkRepresentation> search(config, BenchmarkRepresentation{options.variables}, evaluator);
  const auto state = search.run();

  BenchReport report;
  report.generations = state.generation;
  report.archive_size = state.archive.size();
  report.hypervolume = state.hypervolume_history.back();
  report.hypervolume_history = state.hypervolume_history;
  report.analytic_hypervolume = kZdt1FrontHypervolume;
  report.gap_percent = 100.0 * (report.analytic_hypervolume - report.hypervolume) / report.analytic_hypervolume;
  double total = 0.0;
  for (const auto& a : state.archive) total += zdt1_front_distance(*a.objectives);
  report.mean_front_distance = state.archive.empty() ? 0.0 : total / static_cast<double>(state.archive.size());
  return report;
}

}  // namespace paretonas
