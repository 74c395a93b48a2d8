#pragma once
// Brute-force reference implementations used by the unit and acceptance
// tests. They are written from the definitions and share no code with the
// library beyond its data types.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "paretonas/genome.hpp"
#include "paretonas/network.hpp"
#include "paretonas/pareto.hpp"
#include "paretonas/rng.hpp"

namespace oracle {

inline bool dominates(const std::vector<double>& v, const std::vector<double>& u) {
  bool strict = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < u[i]) return false;
    if (v[i] > u[i]) strict = true;
  }
  return strict;
}

/// Rank = length of the longest chain of dominators above a point. A
/// dominator always has a strictly larger coordinate sum, so processing in
/// descending sum order visits every dominator first.
inline std::vector<std::size_t> pareto_ranks(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> sum(n);
  for (std::size_t i = 0; i < n; ++i) sum[i] = std::accumulate(pts[i].begin(), pts[i].end(), 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sum[a] > sum[b]; });
  std::vector<std::size_t> rank(n, 0);
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    for (std::size_t oj = 0; oj < oi; ++oj) {
      const std::size_t j = order[oj];
      if (dominates(pts[j], pts[i])) rank[i] = std::max(rank[i], rank[j] + 1);
    }
  }
  return rank;
}

inline std::vector<std::vector<double>> values(const std::vector<paretonas::ObjectiveVector>& v) {
  std::vector<std::vector<double>> out;
  for (const auto& o : v) out.push_back(o.values());
  return out;
}

/// Grid-free exact area of the union of [ref, p] rectangles by inclusion of
/// vertical strips between consecutive distinct x coordinates.
inline double hypervolume(const std::vector<std::vector<double>>& pts, double rx, double ry) {
  std::vector<double> xs{rx};
  for (const auto& p : pts) {
    if (p[0] > rx && p[1] > ry) xs.push_back(p[0]);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double area = 0.0;
  for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
    double top = ry;
    for (const auto& p : pts) {
      if (p[0] >= xs[s + 1] && p[1] > top) top = p[1];
    }
    area += (xs[s + 1] - xs[s]) * (top - ry);
  }
  return area;
}

// --- network cost -----------------------------------------------------------------

struct Shape {
  std::int64_t h, w, c;
};

inline std::int64_t half(std::int64_t v) { return v / 2 + v % 2; }

struct Tally {
  std::int64_t mult_adds = 0;
  std::int64_t params = 0;
  bool bn = true;

  // Pointwise conv at the given output resolution (factorized reduction
  // totals the same as one 1x1 conv evaluated at the halved resolution).
  void pointwise(std::int64_t h, std::int64_t w, std::int64_t cin, std::int64_t cout) {
    mult_adds += h * w * cin * cout;
    params += cin * cout + (bn ? 2 * cout : 0);
  }
  void separable(int k, std::int64_t h, std::int64_t w, std::int64_t cin, std::int64_t cout) {
    mult_adds += h * w * (k * k * cin + cin * cout);
    params += k * k * cin + cin * cout + (bn ? 2 * cout : 0);
  }
};

inline int kernel(paretonas::OperationKind op) {
  switch (op) {
    case paretonas::OperationKind::sep_conv_3x3: return 3;
    case paretonas::OperationKind::sep_conv_5x5: return 5;
    case paretonas::OperationKind::sep_conv_7x7: return 7;
    default: return 0;
  }
}

inline std::vector<int> concatenated(const paretonas::CellGenome& c) {
  const int b = static_cast<int>(c.blocks.size());
  std::vector<bool> consumed(static_cast<std::size_t>(b), false);
  for (const auto& blk : c.blocks) {
    for (int src : {blk.input1, blk.input2}) {
      if (src >= 2) consumed[static_cast<std::size_t>(src - 2)] = true;
    }
  }
  std::vector<int> out;
  for (int j = 0; j < b; ++j) {
    if (!consumed[static_cast<std::size_t>(j)]) out.push_back(j + 2);
  }
  std::vector<int> extra = c.extra_connections;
  std::sort(extra.begin(), extra.end());
  for (int e : extra) {
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
  if (out.empty()) out.push_back(b + 1);
  return out;
}

/// Cost of one cell, enumerating every layer it contains.
inline Shape cell(Tally& t, const paretonas::CellGenome& c, Shape pp, Shape p, std::int64_t width, bool reduce) {
  // Calibration convs.
  if (pp.h == p.h) {
    t.pointwise(pp.h, pp.w, pp.c, width);
  } else {
    t.pointwise(p.h, p.w, pp.c, width);
  }
  t.pointwise(p.h, p.w, p.c, width);
  const std::int64_t oh = reduce ? half(p.h) : p.h;
  const std::int64_t ow = reduce ? half(p.w) : p.w;
  for (const auto& blk : c.blocks) {
    const std::pair<int, paretonas::OperationKind> arms[2] = {{blk.input1, blk.op1}, {blk.input2, blk.op2}};
    for (const auto& [src, op] : arms) {
      const int k = kernel(op);
      const bool from_input = src < 2;
      if (reduce && from_input) {
        if (op == paretonas::OperationKind::identity) t.pointwise(oh, ow, width, width);
        if (k > 0) t.separable(k, oh, ow, width, width);
      } else if (k > 0) {
        // Every hidden state already lives at the output resolution of a
        // normal cell, and block outputs at that of a reduction cell.
        t.separable(k, oh, ow, width, width);
      }
    }
  }
  const std::vector<int> sources = concatenated(c);
  if (reduce) {
    for (int s : sources) {
      if (s < 2) t.pointwise(oh, ow, width, width);
    }
  }
  t.pointwise(oh, ow, static_cast<std::int64_t>(sources.size()) * width, width);
  return {oh, ow, width};
}

inline paretonas::CostReport network_cost(const paretonas::Genome& g, const paretonas::MacroConfig& m) {
  Tally t;
  t.bn = m.count_batchnorm;
  Shape image{m.resolution, m.resolution, 3};
  Shape pp = image, p = image;
  auto push = [&](bool reduce, std::int64_t width) {
    const Shape out = cell(t, reduce ? g.reduction : g.normal, pp, p, width, reduce);
    pp = p;
    p = out;
  };
  if (m.template_kind == paretonas::MacroTemplate::imagenet) {
    const Shape stem{half(m.resolution), half(m.resolution), 32};
    t.mult_adds += stem.h * stem.w * 9 * 3 * 32;
    t.params += 9 * 3 * 32 + (t.bn ? 64 : 0);
    pp = p = stem;
    push(true, std::max(1, m.filters / 4));
    push(true, std::max(1, m.filters / 2));
  }
  std::int64_t width = m.filters;
  for (int i = 0; i < m.repeats; ++i) push(false, width);
  width *= 2;
  push(true, width);
  for (int i = 0; i < m.repeats; ++i) push(false, width);
  width *= 2;
  push(true, width);
  for (int i = 0; i < m.repeats; ++i) push(false, width);
  t.mult_adds += width * m.classes;
  t.params += width * m.classes;
  return {t.mult_adds, 2 * t.mult_adds, t.params};
}

/// Random genome with B blocks drawn from a generator independent of the
/// library's own sampling order.
inline paretonas::Genome random_small_genome(paretonas::Rng& rng, std::size_t blocks) {
  auto cell_of = [&]() {
    paretonas::CellGenome c;
    for (std::size_t i = 0; i < blocks; ++i) {
      const auto bound = static_cast<std::uint64_t>(i + 2);
      c.blocks.push_back({static_cast<int>(rng.uniform_index(bound)),
                          paretonas::kAllOperations[rng.uniform_index(6)],
                          static_cast<int>(rng.uniform_index(bound)),
                          paretonas::kAllOperations[rng.uniform_index(6)]});
    }
    for (int s = 0; s < static_cast<int>(blocks) + 2; ++s) {
      if (rng.uniform_index(3) == 0) c.extra_connections.push_back(s);
    }
    return c;
  };
  paretonas::Genome g;
  g.normal = cell_of();
  g.reduction = cell_of();
  return g;
}

}  // namespace oracle
