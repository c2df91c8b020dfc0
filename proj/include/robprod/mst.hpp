#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "robprod/point_cloud.hpp"

namespace robprod {

struct Edge {
  std::size_t u = 0;  // u < v
  std::size_t v = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Strict total order used for every tie-break on edges: weight first, then
// the lexicographic index pair.
inline bool edge_less(const Edge& a, const Edge& b) noexcept {
  if (a.weight != b.weight) return a.weight < b.weight;
  if (a.u != b.u) return a.u < b.u;
  return a.v < b.v;
}

struct MstResult {
  std::vector<Edge> edges;  // sorted by (u, v)
  double total_weight = 0.0;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept;

// Euclidean minimum spanning tree by dense Prim, O(n^2 p) time, O(n) extra
// memory. Equal weights are resolved by edge_less, so the result is the
// unique MST under that order. Throws DataError on non-finite coordinates.
MstResult build_mst(const PointCloud& cloud);

}  // namespace robprod
