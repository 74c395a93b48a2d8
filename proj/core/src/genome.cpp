#include "paretonas/genome.hpp"

#include <algorithm>
#include <span>
#include <sstream>

namespace paretonas {

namespace {

constexpr std::array<std::string_view, kOperationCount> kOperationNames = {
    "identity", "avg_pool_3x3", "max_pool_3x3", "sep_conv_3x3", "sep_conv_5x5", "sep_conv_7x7",
};

// A genome flattened into integer components, each with its legal range
// [0, range). Layout per cell: 4 fields per block, then B+2 membership flags.
struct Flat {
  std::vector<int> values;
  std::vector<int> ranges;
};

void flatten_cell(const CellGenome& c, Flat& out) {
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    const Block& b = c.blocks[i];
    const int bound = source_bound(i);
    out.values.insert(out.values.end(), {b.input1, static_cast<int>(b.op1), b.input2,
                                         static_cast<int>(b.op2)});
    out.ranges.insert(out.ranges.end(), {bound, static_cast<int>(kOperationCount), bound,
                                         static_cast<int>(kOperationCount)});
  }
  const int candidates = static_cast<int>(c.blocks.size()) + 2;
  for (int s = 0; s < candidates; ++s) {
    out.values.push_back(c.has_extra(s) ? 1 : 0);
    out.ranges.push_back(2);
  }
}

Flat flatten(const Genome& g) {
  Flat f;
  flatten_cell(g.normal, f);
  flatten_cell(g.reduction, f);
  return f;
}

std::vector<int> layout_ranges(std::size_t block_count) {
  CellGenome cell;
  cell.blocks.resize(block_count);
  Flat f;
  flatten_cell(cell, f);
  flatten_cell(cell, f);
  return f.ranges;
}

CellGenome unflatten_cell(std::span<const int> v, std::size_t block_count) {
  CellGenome c;
  c.blocks.reserve(block_count);
  std::size_t k = 0;
  for (std::size_t i = 0; i < block_count; ++i, k += 4) {
    c.blocks.push_back(Block{v[k], static_cast<OperationKind>(v[k + 1]), v[k + 2],
                             static_cast<OperationKind>(v[k + 3])});
  }
  for (int s = 0; s < static_cast<int>(block_count) + 2; ++s) {
    if (v[k + static_cast<std::size_t>(s)] != 0) c.extra_connections.push_back(s);
  }
  return c;
}

Genome unflatten(const std::vector<int>& values, std::size_t block_count) {
  const std::size_t per_cell = values.size() / 2;
  std::span<const int> all(values);
  return Genome{unflatten_cell(all.first(per_cell), block_count),
                unflatten_cell(all.subspan(per_cell), block_count)};
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(OperationKind op) {
  return kOperationNames.at(static_cast<std::size_t>(op));
}

std::optional<OperationKind> parse_operation(std::string_view name) {
  for (std::size_t i = 0; i < kOperationNames.size(); ++i) {
    if (kOperationNames[i] == name) return static_cast<OperationKind>(i);
  }
  return std::nullopt;
}

int kernel_size(OperationKind op) {
  switch (op) {
    case OperationKind::sep_conv_3x3: return 3;
    case OperationKind::sep_conv_5x5: return 5;
    case OperationKind::sep_conv_7x7: return 7;
    default: return 0;
  }
}

bool CellGenome::has_extra(int source) const {
  return std::find(extra_connections.begin(), extra_connections.end(), source) !=
         extra_connections.end();
}

Genome random_genome(Rng& rng, std::size_t block_count) {
  if (block_count == 0) throw std::invalid_argument("random_genome: block count must be >= 1");
  const std::vector<int> ranges = layout_ranges(block_count);
  std::vector<int> values(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    values[i] = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(ranges[i])));
  }
  return unflatten(values, block_count);
}

Genome mutate(const Genome& g, double mu_mut, Rng& rng) {
  require_probability(mu_mut, "mu_mut");
  Flat f = flatten(g);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (rng.bernoulli(mu_mut)) {
      f.values[i] = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(f.ranges[i])));
    }
  }
  return unflatten(f.values, g.block_count());
}

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, double mu_cross, Rng& rng) {
  require_probability(mu_cross, "mu_cross");
  if (a.block_count() != b.block_count() || a.reduction.block_count() != b.reduction.block_count()) {
    throw GenomeError("crossover: parents have different block counts");
  }
  Flat fa = flatten(a);
  Flat fb = flatten(b);
  for (std::size_t i = 0; i < fa.values.size(); ++i) {
    if (rng.bernoulli(mu_cross)) std::swap(fa.values[i], fb.values[i]);
  }
  return {unflatten(fa.values, a.block_count()), unflatten(fb.values, b.block_count())};
}

// --- validation --------------------------------------------------------------

std::string ValidityReport::describe() const {
  std::ostringstream out;
  for (const Violation& v : violations) {
    out << v.cell;
    if (v.block) out << ".blocks[" << *v.block << "]";
    out << "." << v.field << ": " << v.message << "\n";
  }
  return out.str();
}

namespace {

void validate_cell(const CellGenome& c, std::size_t expected_blocks, const std::string& name,
                   std::vector<Violation>& out) {
  if (c.blocks.size() != expected_blocks || c.blocks.empty()) {
    out.push_back({name, std::nullopt, "blocks",
                   "wrong block count: " + std::to_string(c.blocks.size())});
  }
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    const Block& b = c.blocks[i];
    const int bound = source_bound(i);
    const int block = static_cast<int>(i);
    for (auto [field, value] : {std::pair{"input1", b.input1}, std::pair{"input2", b.input2}}) {
      if (value < 0 || value >= bound) {
        out.push_back({name, block, field,
                       "input exceeds bound: " + std::to_string(value) + " >= " +
                           std::to_string(bound)});
      }
    }
    for (auto [field, op] : {std::pair{"op1", b.op1}, std::pair{"op2", b.op2}}) {
      if (static_cast<std::size_t>(op) >= kOperationCount) {
        out.push_back({name, block, field, "unknown operation"});
      }
    }
  }
  const int candidates = static_cast<int>(c.blocks.size()) + 2;
  std::vector<int> seen;
  for (int s : c.extra_connections) {
    if (s < 0 || s >= candidates) {
      out.push_back({name, std::nullopt, "extra",
                     "extra connection out of range: " + std::to_string(s)});
    }
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) {
      out.push_back({name, std::nullopt, "extra",
                     "duplicate extra connection: " + std::to_string(s)});
    }
    seen.push_back(s);
  }
}

}  // namespace

ValidityReport validate(const Genome& g) {
  ValidityReport report;
  const std::size_t b = g.normal.blocks.size();
  validate_cell(g.normal, b, "normal", report.violations);
  validate_cell(g.reduction, b, "reduction", report.violations);
  return report;
}

// --- structure ---------------------------------------------------------------

std::vector<int> used_blocks(const CellGenome& c) {
  std::vector<bool> used(c.blocks.size(), false);
  for (const Block& b : c.blocks) {
    for (int src : {b.input1, b.input2}) {
      if (src >= 2) used[static_cast<std::size_t>(src - 2)] = true;
    }
  }
  std::vector<int> out;
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (used[j]) out.push_back(static_cast<int>(j));
  }
  return out;
}

std::vector<int> concat_sources(const CellGenome& c) {
  const std::vector<int> used = used_blocks(c);
  std::vector<int> out;
  for (int j = 0; j < static_cast<int>(c.blocks.size()); ++j) {
    if (!std::binary_search(used.begin(), used.end(), j)) out.push_back(j + 2);
  }
  std::vector<int> extra = c.extra_connections;
  std::sort(extra.begin(), extra.end());
  for (int s : extra) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  if (out.empty() && !c.blocks.empty()) out.push_back(static_cast<int>(c.blocks.size()) + 1);
  return out;
}

CellGraph decode_dag(const CellGenome& c) {
  CellGraph graph;
  const std::size_t b = c.blocks.size();
  graph.nodes.push_back({CellGraph::NodeKind::prev_prev});
  graph.nodes.push_back({CellGraph::NodeKind::prev});
  for (std::size_t j = 0; j < b; ++j) {
    graph.nodes.push_back({CellGraph::NodeKind::block, static_cast<int>(j)});
  }
  graph.nodes.push_back({CellGraph::NodeKind::concat});
  graph.inputs.resize(graph.nodes.size());
  for (std::size_t j = 0; j < b; ++j) {
    graph.inputs[j + 2] = {c.blocks[j].input1, c.blocks[j].input2};
  }
  graph.inputs[graph.concat_node()] = concat_sources(c);
  return graph;
}

SearchSpaceSize search_space_size(std::size_t block_count, std::size_t op_count) {
  using boost::multiprecision::cpp_int;
  if (block_count == 0 || op_count == 0) {
    throw std::invalid_argument("search_space_size: block and operation counts must be >= 1");
  }
  cpp_int per_cell = 1;
  for (std::size_t i = 0; i < block_count; ++i) {
    const cpp_int choices = cpp_int(i + 2) * op_count;
    per_cell *= choices * choices;
  }
  SearchSpaceSize size;
  size.ordered = per_cell * per_cell * (cpp_int(1) << (2 * (block_count + 2)));
  size.pair_symmetric = size.ordered >> (2 * block_count);
  return size;
}

// --- canonical text ----------------------------------------------------------

namespace {

nlohmann::ordered_json cell_to_json(const CellGenome& c) {
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const Block& b : c.blocks) {
    blocks.push_back({b.input1, to_string(b.op1), b.input2, to_string(b.op2)});
  }
  std::vector<int> extra = c.extra_connections;
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  nlohmann::ordered_json j;
  j["blocks"] = std::move(blocks);
  j["extra"] = extra;
  return j;
}

OperationKind op_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw GenomeError(where + ": operation must be a string");
  const auto name = j.get<std::string>();
  const auto op = parse_operation(name);
  if (!op) throw GenomeError(where + ": unknown operation \"" + name + "\"");
  return *op;
}

int int_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_integer()) throw GenomeError(where + ": expected an integer");
  return j.get<int>();
}

CellGenome cell_from_json(const nlohmann::json& j, const std::string& name) {
  if (!j.is_object()) throw GenomeError(name + ": expected an object");
  if (!j.contains("blocks") || !j["blocks"].is_array()) {
    throw GenomeError(name + ".blocks: missing or not an array");
  }
  if (!j.contains("extra") || !j["extra"].is_array()) {
    throw GenomeError(name + ".extra: missing or not an array");
  }
  CellGenome c;
  std::size_t i = 0;
  for (const auto& jb : j["blocks"]) {
    const std::string where = name + ".blocks[" + std::to_string(i++) + "]";
    if (!jb.is_array() || jb.size() != 4) throw GenomeError(where + ": expected a 4-tuple");
    c.blocks.push_back(Block{int_from_json(jb[0], where + "[0]"), op_from_json(jb[1], where + "[1]"),
                             int_from_json(jb[2], where + "[2]"), op_from_json(jb[3], where + "[3]")});
  }
  for (const auto& je : j["extra"]) c.extra_connections.push_back(int_from_json(je, name + ".extra"));
  std::sort(c.extra_connections.begin(), c.extra_connections.end());
  return c;
}

}  // namespace

nlohmann::ordered_json to_json(const Genome& g) {
  nlohmann::ordered_json j;
  j["normal"] = cell_to_json(g.normal);
  j["reduction"] = cell_to_json(g.reduction);
  return j;
}

Genome genome_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw GenomeError("genome: expected an object");
  for (const char* key : {"normal", "reduction"}) {
    if (!j.contains(key)) throw GenomeError(std::string("genome: missing \"") + key + "\"");
  }
  Genome g{cell_from_json(j["normal"], "normal"), cell_from_json(j["reduction"], "reduction")};
  const ValidityReport report = validate(g);
  if (!report.ok()) throw GenomeError("invalid genome:\n" + report.describe());
  return g;
}

std::string serialize(const Genome& g) { return to_json(g).dump(); }

Genome deserialize(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw GenomeError(std::string("malformed genome text: ") + e.what());
  }
  return genome_from_json(j);
}

}  // namespace paretonas
