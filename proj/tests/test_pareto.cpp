#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "paretonas/pareto.hpp"
#include "paretonas/rng.hpp"

using namespace paretonas;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ObjectiveVector> random_points(Rng& rng, std::size_t n, std::size_t k, int levels = 0) {
  std::vector<ObjectiveVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(k);
    for (double& x : v) {
      // Coarse levels create ties and duplicate vectors.
      x = levels > 0 ? static_cast<double>(rng.uniform_index(static_cast<std::uint64_t>(levels))) : rng.uniform01();
    }
    out.emplace_back(std::move(v));
  }
  return out;
}

std::vector<std::uint64_t> iota_ids(std::size_t n) {
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_SUITE("pareto") {

TEST_CASE("objective vectors reject non-finite values") {
  CHECK_THROWS_AS(ObjectiveVector({1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(ObjectiveVector({kInf, 0.0}), std::invalid_argument);
}

TEST_CASE("dominance examples") {
  CHECK(dominates({0.9, 2.0}, {0.8, 1.0}));
  CHECK_FALSE(dominates({0.9, 1.0}, {0.9, 1.0}));
  CHECK_FALSE(dominates({0.9, 1.0}, {0.8, 2.0}));
  CHECK_FALSE(dominates({0.8, 2.0}, {0.9, 1.0}));
  CHECK(dominates({1.0, 1.0}, {1.0, 0.5}));
  CHECK_THROWS(dominates({1.0, 1.0}, {1.0, 1.0, 1.0}));
}

TEST_CASE("dominance is a strict partial order") {
  Rng rng(3);
  for (int t = 0; t < 2000; ++t) {
    const auto p = random_points(rng, 3, 3, 3);
    CHECK_FALSE(dominates(p[0], p[0]));
    if (dominates(p[0], p[1])) CHECK_FALSE(dominates(p[1], p[0]));
    if (dominates(p[0], p[1]) && dominates(p[1], p[2])) CHECK(dominates(p[0], p[2]));
  }
}

TEST_CASE("non-dominated sort fixtures") {
  const std::vector<ObjectiveVector> one = {{1, 1}};
  CHECK(non_dominated_sort(one).fronts == std::vector<std::vector<std::size_t>>{{0}});

  const std::vector<ObjectiveVector> four = {{2, 2}, {1, 1}, {3, 1}, {1, 3}};
  const FrontLevels f = non_dominated_sort(four);
  CHECK(f.fronts == std::vector<std::vector<std::size_t>>{{0, 2, 3}, {1}});
  CHECK(f.rank == std::vector<std::size_t>{0, 1, 0, 0});

  CHECK_THROWS(non_dominated_sort(std::vector<ObjectiveVector>{}));
  const std::vector<ObjectiveVector> ragged = {{1, 1}, {1, 1, 1}};
  CHECK_THROWS(non_dominated_sort(ragged));
}

TEST_CASE("non-dominated sort equals the brute-force oracle") {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.uniform_index(500);
    const std::size_t k = 2 + rng.uniform_index(2);
    const auto pts = random_points(rng, n, k, t % 2 ? 6 : 0);
    const FrontLevels f = non_dominated_sort(pts);
    REQUIRE(f.rank == oracle::pareto_ranks(oracle::values(pts)));
    std::size_t total = 0;
    for (std::size_t r = 0; r < f.fronts.size(); ++r) {
      total += f.fronts[r].size();
      CHECK(std::is_sorted(f.fronts[r].begin(), f.fronts[r].end()));
      for (std::size_t i : f.fronts[r]) CHECK(f.rank[i] == r);
    }
    CHECK(total == n);
  }
}

TEST_CASE("crowding distance fixtures") {
  const std::vector<ObjectiveVector> three = {{1, 3}, {2, 2}, {3, 1}};
  CHECK(crowding_distance(three) == std::vector<double>{kInf, 2.0, kInf});

  const std::vector<ObjectiveVector> two = {{1, 3}, {3, 1}};
  CHECK(crowding_distance(two) == std::vector<double>{kInf, kInf});

  // Objective 1 range 3, objective 2 range 4:
  //   (2,2):   (3-1)/3 + (5-1.5)/4 = 37/24
  //   (3,1.5): (4-2)/3 + (2-1)/4   = 11/12
  const std::vector<ObjectiveVector> four = {{1, 5}, {2, 2}, {3, 1.5}, {4, 1}};
  const auto d = crowding_distance(four);
  CHECK(d[0] == kInf);
  CHECK(d[1] == doctest::Approx(37.0 / 24.0).epsilon(1e-15));
  CHECK(d[2] == doctest::Approx(11.0 / 12.0).epsilon(1e-15));
  CHECK(d[3] == kInf);

  // A constant objective contributes nothing.
  const std::vector<ObjectiveVector> flat = {{1, 7}, {2, 7}, {4, 7}};
  const auto df = crowding_distance(flat);
  CHECK(df[1] == doctest::Approx(1.0));
}

TEST_CASE("crowding distance is invariant to rescaling one objective") {
  Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    auto pts = random_points(rng, 12, 2);
    std::vector<ObjectiveVector> scaled;
    const double a = 0.1 + 10 * rng.uniform01();
    const double b = rng.uniform01() * 100 - 50;
    for (const auto& p : pts) scaled.push_back({p[0], a * p[1] + b});
    const auto d1 = crowding_distance(pts);
    const auto d2 = crowding_distance(scaled);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::isinf(d1[i])) {
        CHECK(std::isinf(d2[i]));
      } else {
        CHECK(d2[i] == doctest::Approx(d1[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("crowded order") {
  CHECK(crowded_less({0, 1.0, 5}, {1, kInf, 0}));
  CHECK(crowded_less({0, kInf, 5}, {0, 2.0, 0}));
  CHECK(crowded_less({0, 2.0, 1}, {0, 2.0, 2}));
  CHECK_FALSE(crowded_less({0, 2.0, 2}, {0, 2.0, 2}));
}

TEST_CASE("select takes a whole first front that fits exactly") {
  const std::vector<ObjectiveVector> u = {{1, 3}, {3, 1}, {0.5, 0.5}, {0.2, 0.2}};
  CHECK(as_set(select_indices(u, iota_ids(4), 2)) == std::set<std::size_t>{0, 1});
}

TEST_CASE("select splits the first front by crowding") {
  // A, B, C with crowding (inf, 2, inf): the extremes survive.
  const std::vector<ObjectiveVector> stated = {{1, 3}, {2, 2}, {3, 1}};
  CHECK(as_set(select_indices(stated, iota_ids(3), 2)) == std::set<std::size_t>{0, 2});
  const std::vector<ObjectiveVector> padded = {{1, 3}, {2, 2}, {3, 1}, {0, 0}};
  CHECK(as_set(select_indices(padded, iota_ids(4), 2)) == std::set<std::size_t>{0, 2});
}

TEST_CASE("select fills from the second front by crowding") {
  const std::vector<ObjectiveVector> stated = {{5, 10}, {10, 5}, {1, 3}, {2, 2}, {3, 1}};
  const auto s = select_indices(stated, iota_ids(5), 4);
  CHECK(s.size() == 4);
  CHECK(as_set(s) == std::set<std::size_t>{0, 1, 2, 4});

  std::vector<ObjectiveVector> padded = stated;
  for (const ObjectiveVector& v : {ObjectiveVector{0.1, 0.1}, ObjectiveVector{0.2, 0.05}, ObjectiveVector{0.05, 0.2}}) {
    padded.push_back(v);
  }
  CHECK(as_set(select_indices(padded, iota_ids(8), 4)) == std::set<std::size_t>{0, 1, 2, 4});
}

TEST_CASE("select preconditions") {
  const std::vector<ObjectiveVector> u = {{1, 3}, {3, 1}};
  CHECK_THROWS(select_indices(u, iota_ids(2), 0));
  CHECK_THROWS(select_indices(u, iota_ids(2), 3));

  struct Item {
    std::uint64_t id;
    std::optional<ObjectiveVector> objectives;
  };
  const std::vector<Item> parents = {{0, ObjectiveVector{1, 1}}};
  const std::vector<Item> offspring = {{1, std::nullopt}};
  CHECK_THROWS(select<Item>(parents, offspring, 1));
}

TEST_CASE("select never prefers a dominated candidate") {
  Rng rng(99);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + 2 * rng.uniform_index(16);
    const auto pts = random_points(rng, 2 * n, 2, t % 3 == 0 ? 5 : 0);
    const auto chosen = select_indices(pts, iota_ids(2 * n), n);
    REQUIRE(chosen.size() == n);
    const auto ranks = oracle::pareto_ranks(oracle::values(pts));
    const std::set<std::size_t> in(chosen.begin(), chosen.end());
    CHECK(in.size() == n);
    std::size_t worst_selected = 0;
    for (std::size_t i : chosen) worst_selected = std::max(worst_selected, ranks[i]);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (in.count(j)) continue;
      CHECK(ranks[j] >= worst_selected);
      for (std::size_t i : chosen) CHECK_FALSE((dominates(pts[j], pts[i]) && ranks[j] <= ranks[i]));
    }
    CHECK(select_indices(pts, iota_ids(2 * n), n) == chosen);
  }
}

TEST_CASE("hypervolume fixtures") {
  const ObjectiveVector origin{0, 0};
  const std::vector<ObjectiveVector> a = {{1, 1}};
  CHECK(hypervolume_2d(a, origin) == 1.0);
  const std::vector<ObjectiveVector> b = {{1, 2}, {2, 1}};
  CHECK(hypervolume_2d(b, origin) == 3.0);
  const std::vector<ObjectiveVector> c = {{1, 2}, {2, 1}, {0.5, 0.5}};
  CHECK(hypervolume_2d(c, origin) == 3.0);
  const std::vector<ObjectiveVector> below = {{-1, 5}, {2, -0.5}};
  CHECK(hypervolume_2d(below, origin) == 0.0);
  CHECK(hypervolume_2d(std::vector<ObjectiveVector>{}, origin) == 0.0);
  const std::vector<ObjectiveVector> three = {{1, 2, 3}};
  CHECK_THROWS_AS(hypervolume_2d(three, ObjectiveVector{0, 0, 0}), UnsupportedDimension);
}

TEST_CASE("hypervolume properties") {
  Rng rng(41);
  const ObjectiveVector ref{0.1, 0.05};
  for (int t = 0; t < 300; ++t) {
    auto pts = random_points(rng, 1 + rng.uniform_index(40), 2, t % 4 == 0 ? 7 : 0);
    const double hv = hypervolume_2d(pts, ref);
    CHECK(hv == doctest::Approx(oracle::hypervolume(oracle::values(pts), 0.1, 0.05)).epsilon(1e-12));

    std::vector<ObjectiveVector> rev(pts.rbegin(), pts.rend());
    CHECK(hypervolume_2d(rev, ref) == doctest::Approx(hv).epsilon(1e-12));

    std::vector<ObjectiveVector> nd;
    for (std::size_t i : non_dominated_indices(pts)) nd.push_back(pts[i]);
    CHECK(hypervolume_2d(nd, ref) == doctest::Approx(hv).epsilon(1e-12));

    pts.push_back(random_points(rng, 1, 2)[0]);
    CHECK(hypervolume_2d(pts, ref) >= hv);
  }
}

}  // TEST_SUITE
