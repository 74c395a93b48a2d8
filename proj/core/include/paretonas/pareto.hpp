#pragma once

// Pareto machinery under the maximization convention: dominance, fast
// non-dominated sorting, crowding distance, crowded ordering, survival
// selection and the two-objective hypervolume.

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace paretonas {

class ObjectiveVector {
 public:
  ObjectiveVector() = default;
  /// Throws std::invalid_argument on NaN or infinite entries.
  explicit ObjectiveVector(std::vector<double> values);
  ObjectiveVector(std::initializer_list<double> values)
      : ObjectiveVector(std::vector<double>(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;

 private:
  std::vector<double> values_;
};

/// True iff v >= u in every coordinate and v > u in at least one.
bool dominates(const ObjectiveVector& v, const ObjectiveVector& u);

inline constexpr double kBoundaryDistance = std::numeric_limits<double>::infinity();

struct FrontLevels {
  /// Member indices per front, rank 0 first, ascending index within a front.
  std::vector<std::vector<std::size_t>> fronts;
  /// Rank of every member.
  std::vector<std::size_t> rank;
  /// Crowding distance of every member within its own front.
  std::vector<double> crowding;
};

FrontLevels non_dominated_sort(std::span<const ObjectiveVector> population);

/// Crowding distance of each member of a front (NSGA-II normalized sum).
std::vector<double> crowding_distance(std::span<const ObjectiveVector> front);

struct CrowdedKey {
  std::size_t rank;
  double distance;
  std::uint64_t id;
};

/// Strict weak order: lower rank, then larger distance, then lower id.
bool crowded_less(const CrowdedKey& a, const CrowdedKey& b);

/// Survival selection over a union of candidates. Whole fronts are taken in
/// rank order while they fit; the first front that does not fit contributes
/// its members with the highest crowding distance. Returns exactly `n`
/// indices into the union, grouped by front in crowded order.
std::vector<std::size_t> select_indices(std::span<const ObjectiveVector> objectives,
                                        std::span<const std::uint64_t> ids, std::size_t n);

/// select_indices over parents followed by offspring. T exposes `id` and an
/// `objectives` optional; every candidate must be evaluated.
template <class T>
std::vector<T> select(std::span<const T> parents, std::span<const T> offspring, std::size_t n) {
  std::vector<const T*> pool;
  for (const T& p : parents) pool.push_back(&p);
  for (const T& o : offspring) pool.push_back(&o);
  std::vector<ObjectiveVector> objectives;
  std::vector<std::uint64_t> ids;
  for (const T* t : pool) {
    if (!t->objectives) throw std::invalid_argument("select: unevaluated individual");
    objectives.push_back(*t->objectives);
    ids.push_back(t->id);
  }
  std::vector<T> out;
  for (std::size_t i : select_indices(objectives, ids, n)) out.push_back(*pool[i]);
  return out;
}

class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Area dominated by `points` and bounded below by `reference`. Points not
/// strictly above the reference in both coordinates contribute nothing.
double hypervolume_2d(std::span<const ObjectiveVector> points, const ObjectiveVector& reference);

/// Indices of the non-dominated members, ascending.
std::vector<std::size_t> non_dominated_indices(std::span<const ObjectiveVector> points);

}  // namespace paretonas
