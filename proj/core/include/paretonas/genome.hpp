#pragma once

// Cell-based search space: a genome is a (normal, reduction) pair of cells,
// each made of B blocks. A block reads two sources, applies one operation to
// each and sums the results. Source 0 is the cell input c_{k-2}, source 1 is
// c_{k-1}, and source 2+j is the output of block j.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "paretonas/rng.hpp"

namespace paretonas {

enum class OperationKind : std::uint8_t {
  identity,
  avg_pool_3x3,
  max_pool_3x3,
  sep_conv_3x3,
  sep_conv_5x5,
  sep_conv_7x7,
};

inline constexpr std::size_t kOperationCount = 6;
inline constexpr std::array<OperationKind, kOperationCount> kAllOperations = {
    OperationKind::identity,     OperationKind::avg_pool_3x3, OperationKind::max_pool_3x3,
    OperationKind::sep_conv_3x3, OperationKind::sep_conv_5x5, OperationKind::sep_conv_7x7,
};

std::string_view to_string(OperationKind op);
std::optional<OperationKind> parse_operation(std::string_view name);

/// Kernel size of a separable convolution, 0 for the parameter-free ops.
int kernel_size(OperationKind op);

struct Block {
  int input1 = 0;
  OperationKind op1 = OperationKind::identity;
  int input2 = 0;
  OperationKind op2 = OperationKind::identity;

  friend bool operator==(const Block&, const Block&) = default;
};

struct CellGenome {
  std::vector<Block> blocks;
  /// Sources routed to the output concatenation; ascending, no duplicates.
  std::vector<int> extra_connections;

  std::size_t block_count() const { return blocks.size(); }
  bool has_extra(int source) const;

  friend bool operator==(const CellGenome&, const CellGenome&) = default;
};

struct Genome {
  CellGenome normal;
  CellGenome reduction;

  std::size_t block_count() const { return normal.block_count(); }

  friend bool operator==(const Genome&, const Genome&) = default;
};

inline constexpr std::size_t kDefaultBlockCount = 5;

class GenomeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of legal sources for the inputs of block `position`.
constexpr int source_bound(std::size_t position) { return static_cast<int>(position) + 2; }

// --- randomized operations -------------------------------------------------
//
// Components are enumerated in a fixed order: normal cell first, blocks by
// index with fields (input1, op1, input2, op2), then the B+2 extra-connection
// flags ascending; the reduction cell follows in the same layout.

Genome random_genome(Rng& rng, std::size_t block_count = kDefaultBlockCount);

/// Uniform mutation. Every component consumes one uniform draw; a component
/// selected with probability `mu_mut` is then resampled over its legal range.
Genome mutate(const Genome& g, double mu_mut, Rng& rng);

/// Uniform crossover. Every aligned component pair is swapped between the
/// children with probability `mu_cross` (one uniform draw per component).
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, double mu_cross, Rng& rng);

// --- structure ---------------------------------------------------------------

struct Violation {
  std::string cell;              // "normal" or "reduction"
  std::optional<int> block;      // absent for cell-level problems
  std::string field;
  std::string message;
};

struct ValidityReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

ValidityReport validate(const Genome& g);

/// Blocks whose output is consumed by a later block of the same cell.
std::vector<int> used_blocks(const CellGenome& c);

/// Sources concatenated to form the cell output: unused blocks ascending,
/// then extra connections ascending, each tensor at most once.
std::vector<int> concat_sources(const CellGenome& c);

struct CellGraph {
  enum class NodeKind { prev_prev, prev, block, concat };
  struct Node {
    NodeKind kind;
    int block = -1;
  };
  /// Node i for i < B+2 is InputSource i; node B+2 is the concatenation.
  std::vector<Node> nodes;
  /// In-edge sources per node, in encoding order.
  std::vector<std::vector<int>> inputs;

  std::size_t concat_node() const { return nodes.size() - 1; }
};

CellGraph decode_dag(const CellGenome& c);

struct SearchSpaceSize {
  boost::multiprecision::cpp_int ordered;
  boost::multiprecision::cpp_int pair_symmetric;
};

SearchSpaceSize search_space_size(std::size_t block_count, std::size_t op_count = kOperationCount);

// --- canonical text ----------------------------------------------------------
//
//   {"normal":{"blocks":[[i1,"op1",i2,"op2"],...],"extra":[ints ascending]},
//    "reduction":{...}}
//
// emitted without whitespace. Equal genomes serialize to identical text.

nlohmann::ordered_json to_json(const Genome& g);
Genome genome_from_json(const nlohmann::json& j);

std::string serialize(const Genome& g);
Genome deserialize(std::string_view text);

}  // namespace paretonas
