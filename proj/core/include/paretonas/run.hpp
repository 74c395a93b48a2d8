#pragma once

// Run directory layout:
//
//   <out>/config.snapshot        normalized config, written once
//   <out>/checkpoints/gen-%05d   one checkpoint per completed generation
//   <out>/front.json             final archive, written on completion
//   <out>/history.csv            hypervolume and best value per objective
//   <out>/run.log                log of the run

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "paretonas/config.hpp"
#include "paretonas/evolution.hpp"

namespace paretonas {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  bool resume = false;
  /// Stop (resumably) once this generation's checkpoint is written.
  std::optional<std::size_t> stop_after_generation;
};

struct RunSummary {
  std::size_t generation = 0;
  std::size_t archive_size = 0;
  double hypervolume = 0.0;
  bool completed = false;
  DispatchStats dispatch;
};

RunSummary run_search(const RunConfig& config, const std::filesystem::path& out_dir,
                      const RunOptions& options = {});

std::filesystem::path checkpoint_path(const std::filesystem::path& out_dir, std::size_t generation);
/// Highest-numbered checkpoint in a run directory.
std::optional<std::filesystem::path> latest_checkpoint(const std::filesystem::path& out_dir);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// --- front export ------------------------------------------------------------------

struct FrontPoint {
  std::uint64_t id = 0;
  std::size_t generation = 0;
  std::vector<double> objectives;
  nlohmann::json genome;
};

struct FrontExport {
  std::vector<std::string> objective_names;
  /// Sorted by the first objective, descending; ties by id.
  std::vector<FrontPoint> points;
};

/// Archive of a checkpoint document.
FrontExport front_from_checkpoint(const nlohmann::json& checkpoint);
/// Accepts a run directory (latest checkpoint) or a checkpoint file.
FrontExport load_front(const std::filesystem::path& checkpoint_or_run_dir);

std::string front_to_json(const FrontExport& front);
std::string front_to_csv(const FrontExport& front);
std::string history_to_csv(const nlohmann::json& checkpoint);

// --- benchmark -----------------------------------------------------------------------

struct BenchOptions {
  std::string problem = "zdt1";
  std::size_t variables = 8;
  std::size_t generations = 100;
  std::size_t population = 32;
  std::uint64_t seed = 0;
  double mu_cross = 0.1;
  double mu_mut = 0.1;
};

struct BenchReport {
  std::size_t generations = 0;
  std::size_t archive_size = 0;
  double hypervolume = 0.0;
  double analytic_hypervolume = 0.0;
  double gap_percent = 0.0;
  double mean_front_distance = 0.0;
  std::vector<double> hypervolume_history;

  nlohmann::ordered_json to_json() const;
};

BenchReport run_benchmark(const BenchOptions& options);

}  // namespace paretonas
