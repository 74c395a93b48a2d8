#include "paretonas/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace paretonas {

ObjectiveVector::ObjectiveVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("objective values must be finite");
  }
}

bool dominates(const ObjectiveVector& v, const ObjectiveVector& u) {
  if (v.size() != u.size()) throw std::invalid_argument("dominates: length mismatch");
  bool strict = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < u[i]) return false;
    if (v[i] > u[i]) strict = true;
  }
  return strict;
}

FrontLevels non_dominated_sort(std::span<const ObjectiveVector> population) {
  const std::size_t n = population.size();
  if (n == 0) throw std::invalid_argument("non_dominated_sort: empty population");
  for (const auto& v : population) {
    if (v.size() != population[0].size()) {
      throw std::invalid_argument("non_dominated_sort: length mismatch");
    }
  }

  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> dominator_count(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dominates(population[p], population[q])) {
        dominated[p].push_back(q);
        ++dominator_count[q];
      } else if (dominates(population[q], population[p])) {
        dominated[q].push_back(p);
        ++dominator_count[p];
      }
    }
  }

  FrontLevels levels;
  levels.rank.assign(n, 0);
  levels.crowding.assign(n, 0.0);
  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    if (dominator_count[p] == 0) current.push_back(p);
  }
  std::size_t rank = 0;
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : current) {
      levels.rank[p] = rank;
      for (std::size_t q : dominated[p]) {
        if (--dominator_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    levels.fronts.push_back(std::move(current));
    current = std::move(next);
    ++rank;
  }

  for (const auto& front : levels.fronts) {
    std::vector<ObjectiveVector> members;
    members.reserve(front.size());
    for (std::size_t i : front) members.push_back(population[i]);
    const std::vector<double> d = crowding_distance(members);
    for (std::size_t k = 0; k < front.size(); ++k) levels.crowding[front[k]] = d[k];
  }
  return levels;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> front) {
  const std::size_t n = front.size();
  if (n <= 2) return std::vector<double>(n, kBoundaryDistance);

  std::vector<double> distance(n, 0.0);
  std::vector<std::size_t> order(n);
  for (std::size_t m = 0; m < front[0].size(); ++m) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
    const double lo = front[order.front()][m];
    const double hi = front[order.back()][m];
    distance[order.front()] = kBoundaryDistance;
    distance[order.back()] = kBoundaryDistance;
    if (hi == lo) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      distance[order[k]] += (front[order[k + 1]][m] - front[order[k - 1]][m]) / (hi - lo);
    }
  }
  return distance;
}

bool crowded_less(const CrowdedKey& a, const CrowdedKey& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  if (a.distance != b.distance) return a.distance > b.distance;
  return a.id < b.id;
}

std::vector<std::size_t> select_indices(std::span<const ObjectiveVector> objectives,
                                        std::span<const std::uint64_t> ids, std::size_t n) {
  if (n == 0) throw std::invalid_argument("select: N must be positive");
  if (ids.size() != objectives.size()) throw std::invalid_argument("select: ids/objectives mismatch");
  if (objectives.size() < n) throw std::invalid_argument("select: fewer candidates than N");

  const FrontLevels levels = non_dominated_sort(objectives);
  std::vector<std::size_t> selected;
  selected.reserve(n);
  std::size_t remaining = n;
  for (const auto& front : levels.fronts) {
    if (remaining == 0) break;
    std::vector<std::size_t> members = front;
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return crowded_less({levels.rank[a], levels.crowding[a], ids[a]},
                          {levels.rank[b], levels.crowding[b], ids[b]});
    });
    const std::size_t take = std::min(remaining, members.size());
    selected.insert(selected.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    remaining -= take;
  }
  return selected;
}

std::vector<std::size_t> non_dominated_indices(std::span<const ObjectiveVector> points) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      dominated = j != i && dominates(points[j], points[i]);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

double hypervolume_2d(std::span<const ObjectiveVector> points, const ObjectiveVector& reference) {
  if (reference.size() != 2) throw UnsupportedDimension("hypervolume_2d: only two objectives");
  std::vector<std::pair<double, double>> kept;
  for (const auto& p : points) {
    if (p.size() != 2) throw UnsupportedDimension("hypervolume_2d: only two objectives");
    if (p[0] > reference[0] && p[1] > reference[1]) kept.emplace_back(p[0], p[1]);
  }
  // Descending in the first objective; each point adds the strip above the
  // best second-objective value seen so far.
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second > b.second;
  });
  double area = 0.0;
  double ceiling = reference[1];
  for (const auto& [x, y] : kept) {
    if (y > ceiling) {
      area += (x - reference[0]) * (y - ceiling);
      ceiling = y;
    }
  }
  return area;
}

}  // namespace paretonas
