// paretonas: command-line front end for the architecture search engine.
//
// Exit codes: 0 success, 1 usage, 2 invalid config or input file,
// 3 I/O failure, 4 evaluator failure, 5 checkpoint mismatch or corruption.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "paretonas/config.hpp"
#include "paretonas/genome.hpp"
#include "paretonas/network.hpp"
#include "paretonas/run.hpp"

namespace {

using namespace paretonas;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInvalidInput = 2,
  kIoFailure = 3,
  kEvaluatorFailure = 4,
  kCheckpointFailure = 5,
};

void setup_logging() {
  auto sink = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("PARETONAS_LOG_LEVEL")) level = spdlog::level::from_str(env);
  sink->set_level(level);
  auto logger = std::make_shared<spdlog::logger>("paretonas", sink);
  // The run log always receives info and above.
  logger->set_level(std::min(level, spdlog::level::info));
  spdlog::set_default_logger(logger);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int fail(int code, const std::string& message) {
  std::cerr << "paretonas: " << message << "\n";
  return code;
}

struct SearchArgs {
  std::string config;
  std::string out_dir;
  bool resume = false;
  std::size_t stop_after = 0;
};

int cmd_search(const SearchArgs& args, bool stop_requested) {
  const RunConfig config = load_run_config(args.config);
  RunOptions options;
  options.resume = args.resume;
  if (stop_requested) options.stop_after_generation = args.stop_after;
  const RunSummary summary = run_search(config, args.out_dir, options);
  nlohmann::ordered_json j;
  j["generation"] = summary.generation;
  j["completed"] = summary.completed;
  j["archive_size"] = summary.archive_size;
  j["hypervolume"] = summary.hypervolume;
  j["evaluations"] = summary.dispatch.dispatched;
  j["cache_hits"] = summary.dispatch.cache_hits;
  std::cout << j.dump() << "\n";
  return kOk;
}

struct CostArgs {
  std::string genome_path;
  std::string template_name = "cifar10";
  int n = 2;
  int f = 32;
  int resolution = 0;
  int classes = 0;
  bool no_batchnorm = false;
};

int cmd_cost(const CostArgs& args) {
  const Genome g = deserialize(read_file(args.genome_path));
  MacroConfig m = parse_template(args.template_name) == MacroTemplate::cifar
                      ? MacroConfig::cifar(args.n, args.f)
                      : MacroConfig::imagenet(args.n, args.f);
  if (args.resolution > 0) m.resolution = args.resolution;
  if (args.classes > 0) m.classes = args.classes;
  m.count_batchnorm = !args.no_batchnorm;
  const CostReport cost = network_cost(g, m);
  nlohmann::ordered_json j;
  j["mult_adds"] = cost.mult_adds;
  j["flops"] = cost.flops;
  j["params"] = cost.params;
  j["speed"] = speed(cost);
  std::cout << j.dump() << "\n";
  return kOk;
}

struct FrontArgs {
  std::string path;
  std::string format = "json";
  std::string output;
};

int cmd_front(const FrontArgs& args) {
  const FrontExport front = load_front(args.path);
  const std::string text = args.format == "csv" ? front_to_csv(front) : front_to_json(front);
  if (args.output.empty()) {
    std::cout << text;
  } else {
    write_text_file(args.output, text);
  }
  return kOk;
}

int cmd_bench(const BenchOptions& options) {
  const BenchReport report = run_benchmark(options);
  std::cout << report.to_json().dump() << "\n";
  return kOk;
}

struct GenomeArgs {
  std::uint64_t seed = 0;
  std::size_t blocks = kDefaultBlockCount;
};

int cmd_genome(const GenomeArgs& args) {
  Rng rng(args.seed);
  std::cout << serialize(random_genome(rng, args.blocks)) << "\n";
  return kOk;
}

int cmd_space(std::size_t blocks, std::size_t ops) {
  const SearchSpaceSize size = search_space_size(blocks, ops);
  nlohmann::ordered_json j;
  j["blocks"] = blocks;
  j["operations"] = ops;
  j["ordered"] = size.ordered.str();
  j["pair_symmetric"] = size.pair_symmetric.str();
  std::cout << j.dump() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Multi-objective evolutionary search over convolutional cell architectures"};
  app.require_subcommand(1);

  SearchArgs search_args;
  auto* search = app.add_subcommand("search", "Run or resume a search into a run directory");
  search->add_option("config", search_args.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  search->add_option("out_dir", search_args.out_dir, "Run directory")->required();
  search->add_flag("--resume", search_args.resume, "Continue from the latest checkpoint");
  auto* stop_opt = search->add_option("--stop-after-generation", search_args.stop_after,
                                      "Stop after writing this generation's checkpoint");

  CostArgs cost_args;
  auto* cost = app.add_subcommand("cost", "Mult-Adds, FLOPS, parameters and speed of a genome");
  cost->add_option("genome", cost_args.genome_path, "Genome file (canonical JSON)")->required();
  cost->add_option("--template", cost_args.template_name, "cifar10 or imagenet")->capture_default_str();
  cost->add_option("--n", cost_args.n, "Normal cells per stack")->capture_default_str();
  cost->add_option("--f", cost_args.f, "Filters of the first stack")->capture_default_str();
  cost->add_option("--resolution", cost_args.resolution, "Input resolution (template default if omitted)");
  cost->add_option("--classes", cost_args.classes, "Class count (template default if omitted)");
  cost->add_flag("--no-batchnorm", cost_args.no_batchnorm, "Exclude batch-norm parameters");

  FrontArgs front_args;
  auto* front = app.add_subcommand("front", "Export the archive of a run directory or checkpoint");
  front->add_option("path", front_args.path, "Run directory or checkpoint file")->required();
  front->add_option("--format", front_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  front->add_option("--output", front_args.output, "Write to a file instead of stdout");

  BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Validate the engine on a benchmark with a known front");
  bench->add_option("--problem", bench_opts.problem, "Benchmark problem")
      ->check(CLI::IsMember({"zdt1"}))
      ->capture_default_str();
  bench->add_option("--n-vars", bench_opts.variables, "Decision variables")->capture_default_str();
  bench->add_option("--generations", bench_opts.generations, "Generations")->capture_default_str();
  bench->add_option("--pop", bench_opts.population, "Population size")->capture_default_str();
  bench->add_option("--seed", bench_opts.seed, "Random seed")->capture_default_str();
  bench->add_option("--mu-cross", bench_opts.mu_cross, "Crossover probability")->capture_default_str();
  bench->add_option("--mu-mut", bench_opts.mu_mut, "Mutation probability")->capture_default_str();

  GenomeArgs genome_args;
  auto* genome = app.add_subcommand("genome", "Print a random genome");
  genome->add_option("--seed", genome_args.seed, "Random seed")->capture_default_str();
  genome->add_option("--blocks", genome_args.blocks, "Blocks per cell")->capture_default_str();

  std::size_t space_blocks = kDefaultBlockCount;
  std::size_t space_ops = kOperationCount;
  auto* space = app.add_subcommand("space", "Size of the search space");
  space->add_option("--blocks", space_blocks, "Blocks per cell")->capture_default_str();
  space->add_option("--ops", space_ops, "Operation count")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*search) return cmd_search(search_args, stop_opt->count() > 0);
    if (*cost) return cmd_cost(cost_args);
    if (*front) return cmd_front(front_args);
    if (*bench) return cmd_bench(bench_opts);
    if (*genome) return cmd_genome(genome_args);
    if (*space) return cmd_space(space_blocks, space_ops);
  } catch (const ConfigError& e) {
    return fail(kInvalidInput, e.what());
  } catch (const GenomeError& e) {
    return fail(kInvalidInput, e.what());
  } catch (const NetworkError& e) {
    return fail(kInvalidInput, e.what());
  } catch (const CheckpointError& e) {
    return fail(kCheckpointFailure, e.what());
  } catch (const IoError& e) {
    return fail(kIoFailure, e.what());
  } catch (const EvaluatorError& e) {
    return fail(kEvaluatorFailure, e.what());
  } catch (const TransportError& e) {
    return fail(kEvaluatorFailure, e.what());
  } catch (const std::exception& e) {
    return fail(kUsage, e.what());
  }
  return kUsage;
}
