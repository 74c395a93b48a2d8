#include <doctest.h>

#include <set>
#include <string>

#include "paretonas/genome.hpp"

using namespace paretonas;

namespace {

// random_genome(Rng(42), 5), generated once and frozen.
constexpr const char* kGoldenSeed42 =
    R"({"normal":{"blocks":[[0,"max_pool_3x3",0,"identity"],[2,"max_pool_3x3",1,"identity"],)"
    R"([2,"avg_pool_3x3",3,"identity"],[2,"sep_conv_5x5",4,"max_pool_3x3"],[0,"max_pool_3x3",1,"sep_conv_7x7"]],)"
    R"("extra":[0,2,3,4,6]},"reduction":{"blocks":[[0,"sep_conv_5x5",0,"avg_pool_3x3"],)"
    R"([2,"sep_conv_5x5",0,"max_pool_3x3"],[3,"sep_conv_5x5",2,"sep_conv_5x5"],[2,"sep_conv_3x3",4,"avg_pool_3x3"],)"
    R"([5,"max_pool_3x3",3,"max_pool_3x3"]],"extra":[0,1,4,6]}})";

CellGenome uniform_cell(std::size_t b, int in1, int in2, OperationKind op = OperationKind::identity) {
  CellGenome c;
  for (std::size_t i = 0; i < b; ++i) c.blocks.push_back({in1, op, in2, op});
  return c;
}

Genome uniform_genome(std::size_t b) { return {uniform_cell(b, 0, 1), uniform_cell(b, 0, 1)}; }

// Flattened component values in operator enumeration order.
std::vector<int> components(const Genome& g) {
  std::vector<int> out;
  for (const CellGenome* c : {&g.normal, &g.reduction}) {
    for (const Block& b : c->blocks) {
      out.insert(out.end(), {b.input1, static_cast<int>(b.op1), b.input2, static_cast<int>(b.op2)});
    }
    for (int s = 0; s < static_cast<int>(c->blocks.size()) + 2; ++s) out.push_back(c->has_extra(s) ? 1 : 0);
  }
  return out;
}

}  // namespace

TEST_SUITE("genome") {

TEST_CASE("operation names round-trip") {
  CHECK(kAllOperations.size() == 6);
  for (OperationKind op : kAllOperations) CHECK(parse_operation(to_string(op)) == op);
  CHECK_FALSE(parse_operation("conv_9x9").has_value());
}

TEST_CASE("random genome respects positional bounds") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Genome g = random_genome(rng, 5);
    CHECK(validate(g).ok());
    for (const CellGenome* c : {&g.normal, &g.reduction}) {
      CHECK(c->blocks[0].input1 < 2);
      CHECK(c->blocks[0].input2 < 2);
      CHECK(c->blocks[4].input1 < 6);
      CHECK(c->blocks[4].input2 < 6);
    }
  }
}

TEST_CASE("random genome is deterministic and matches the seed-42 fixture") {
  Rng a(42), b(42);
  const Genome ga = random_genome(a, 5);
  CHECK(ga == random_genome(b, 5));
  CHECK(serialize(ga) == kGoldenSeed42);
  Rng c(3);
  CHECK_THROWS_AS(random_genome(c, 0), std::invalid_argument);
}

TEST_CASE("mutate with extreme rates") {
  Rng rng(1);
  const Genome g = random_genome(rng, 5);
  CHECK(mutate(g, 0.0, rng) == g);
  int differing = 0;
  for (int i = 0; i < 20; ++i) differing += mutate(g, 1.0, rng) != g;
  CHECK(differing == 20);
  CHECK_THROWS(mutate(g, 1.5, rng));
}

TEST_CASE("mutate changes a six-valued field at rate mu * 5/6") {
  Rng rng(2024);
  const Genome g = random_genome(rng, 5);
  int changed = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const Genome m = mutate(g, 0.1, rng);
    changed += m.normal.blocks[4].input1 != g.normal.blocks[4].input1;
  }
  CHECK(std::abs(static_cast<double>(changed) / trials - 0.1 * 5.0 / 6.0) <= 0.01);
}

TEST_CASE("crossover identities") {
  Rng rng(5);
  const Genome a = random_genome(rng, 5);
  const Genome b = random_genome(rng, 5);
  CHECK(crossover(a, b, 0.0, rng) == std::pair{a, b});
  CHECK(crossover(a, b, 1.0, rng) == std::pair{b, a});
  CHECK(crossover(a, a, 0.5, rng) == std::pair{a, a});
  CHECK_THROWS_AS(crossover(a, random_genome(rng, 4), 0.5, rng), GenomeError);
}

TEST_CASE("crossover conserves every aligned component pair") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Genome a = random_genome(rng, 5);
    const Genome b = random_genome(rng, 5);
    const auto [c, d] = crossover(a, b, 0.5, rng);
    const auto ca = components(a), cb = components(b), cc = components(c), cd = components(d);
    REQUIRE(ca.size() == cc.size());
    for (std::size_t i = 0; i < ca.size(); ++i) {
      CHECK(std::multiset<int>{ca[i], cb[i]} == std::multiset<int>{cc[i], cd[i]});
    }
    CHECK(validate(c).ok());
    CHECK(validate(d).ok());
  }
}

TEST_CASE("validate names the offending component") {
  CHECK(validate(uniform_genome(5)).ok());

  Genome bad = uniform_genome(5);
  bad.normal.blocks[0].input1 = 3;
  ValidityReport r = validate(bad);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].cell == "normal");
  CHECK(r.violations[0].block == 0);
  CHECK(r.violations[0].field == "input1");
  CHECK(r.violations[0].message.find("input exceeds bound") != std::string::npos);

  bad = uniform_genome(5);
  bad.reduction.extra_connections = {9};
  r = validate(bad);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].cell == "reduction");
  CHECK(r.violations[0].message.find("extra connection out of range") != std::string::npos);

  bad = uniform_genome(5);
  bad.normal.extra_connections = {2, 2};
  CHECK(validate(bad).describe().find("duplicate extra connection") != std::string::npos);

  bad = uniform_genome(5);
  bad.reduction.blocks.pop_back();
  CHECK(validate(bad).describe().find("wrong block count") != std::string::npos);
}

TEST_CASE("used blocks") {
  CHECK(used_blocks(uniform_cell(5, 0, 1)).empty());

  CellGenome single = uniform_cell(5, 0, 1);
  single.blocks[3].input1 = 2;
  CHECK(used_blocks(single) == std::vector<int>{0});

  CellGenome chain = uniform_cell(5, 0, 1);
  for (int i = 1; i < 5; ++i) chain.blocks[static_cast<std::size_t>(i)].input1 = i + 1;
  CHECK(used_blocks(chain) == std::vector<int>{0, 1, 2, 3});

  Rng rng(9);
  for (int t = 0; t < 500; ++t) {
    const Genome g = random_genome(rng, 5);
    const auto used = used_blocks(g.normal);
    CHECK(std::find(used.begin(), used.end(), 4) == used.end());
    CHECK_FALSE(concat_sources(g.normal).empty());
  }
}

TEST_CASE("concat sources ordering") {
  CellGenome chain = uniform_cell(5, 0, 1);
  for (int i = 1; i < 5; ++i) chain.blocks[static_cast<std::size_t>(i)].input1 = i + 1;
  CHECK(concat_sources(chain) == std::vector<int>{6});

  CellGenome open = uniform_cell(5, 0, 1);
  open.extra_connections = {1};
  CHECK(concat_sources(open) == std::vector<int>{2, 3, 4, 5, 6, 1});

  // Extra connections that repeat an unused block are concatenated once.
  open.extra_connections = {0, 3, 6};
  CHECK(concat_sources(open) == std::vector<int>{2, 3, 4, 5, 6, 0});
}

TEST_CASE("decode_dag of the golden normal cell") {
  const Genome g = deserialize(kGoldenSeed42);
  const CellGraph dag = decode_dag(g.normal);
  REQUIRE(dag.nodes.size() == 8);
  CHECK(dag.concat_node() == 7);
  CHECK(dag.nodes[0].kind == CellGraph::NodeKind::prev_prev);
  CHECK(dag.nodes[1].kind == CellGraph::NodeKind::prev);
  CHECK(dag.nodes[4].kind == CellGraph::NodeKind::block);
  CHECK(dag.nodes[4].block == 2);
  const std::vector<std::vector<int>> expected = {
      {}, {}, {0, 0}, {2, 1}, {2, 3}, {2, 4}, {0, 1}, {5, 6, 0, 2, 3, 4},
  };
  CHECK(dag.inputs == expected);
  // Every edge points to an earlier node.
  for (std::size_t n = 0; n + 1 < dag.nodes.size(); ++n) {
    for (int src : dag.inputs[n]) CHECK(static_cast<std::size_t>(src) < n);
  }
}

TEST_CASE("decode_dag of an all-identity open cell") {
  const CellGraph dag = decode_dag(uniform_cell(4, 0, 1));
  CHECK(dag.nodes.size() == 7);
  CHECK(dag.inputs[dag.concat_node()].size() == 4);
}

TEST_CASE("search space size") {
  CHECK(search_space_size(1, 1).ordered == 1024);
  CHECK(search_space_size(1, 1).pair_symmetric == 256);

  const SearchSpaceSize s = search_space_size(5, 6);
  const boost::multiprecision::cpp_int per_cell = boost::multiprecision::cpp_int(144) * 324 * 576 * 900 * 1296;
  CHECK(per_cell == boost::multiprecision::cpp_int("31345665638400"));
  CHECK(s.ordered == per_cell * per_cell * 16384);
  CHECK(s.ordered.str().size() == 32);  // about 1.6e31
  CHECK(s.ordered.str().substr(0, 3) == "160");
  CHECK(s.pair_symmetric * 1024 == s.ordered);
  CHECK_THROWS(search_space_size(0, 6));
}

TEST_CASE("serialization is canonical") {
  const Genome g = deserialize(kGoldenSeed42);
  CHECK(serialize(g) == kGoldenSeed42);
  CHECK(deserialize(serialize(g)) == g);

  std::string shuffled = kGoldenSeed42;
  const std::string from = R"("extra":[0,2,3,4,6])";
  shuffled.replace(shuffled.find(from), from.size(), R"("extra":[6,3,0,4,2])");
  CHECK(serialize(deserialize(shuffled)) == kGoldenSeed42);

  Rng rng(77);
  std::set<std::string> texts;
  std::set<std::vector<int>> comps;
  for (int i = 0; i < 300; ++i) {
    const Genome r = random_genome(rng, 3);
    texts.insert(serialize(r));
    comps.insert(components(r));
  }
  CHECK(texts.size() == comps.size());
}

TEST_CASE("deserialize diagnostics") {
  std::string unknown = kGoldenSeed42;
  unknown.replace(unknown.find("sep_conv_7x7"), 12, "conv_9x9");
  CHECK_THROWS_WITH_AS(deserialize(unknown), doctest::Contains("conv_9x9"), GenomeError);
  CHECK_THROWS_AS(deserialize("{\"normal\":"), GenomeError);
  std::string out_of_bound = kGoldenSeed42;
  out_of_bound.replace(out_of_bound.find("[0,\"max_pool_3x3\",0"), 2, "[3");
  CHECK_THROWS_WITH_AS(deserialize(out_of_bound), doctest::Contains("input exceeds bound"), GenomeError);
}

}  // TEST_SUITE
