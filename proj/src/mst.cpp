#include "robprod/mst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "robprod/errors.hpp"

namespace robprod {

double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

MstResult build_mst(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  MstResult result;
  if (!cloud.all_finite()) throw DataError("build_mst: point cloud contains non-finite coordinates");
  if (n <= 1) return result;

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const double inf = std::numeric_limits<double>::infinity();

  // best[v] is the lightest known edge (under edge_less) joining v to the tree.
  std::vector<Edge> best(n, Edge{kNone, kNone, inf});
  std::vector<char> in_tree(n, 0);
  result.edges.reserve(n - 1);

  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = kNone;
    const auto from = cloud.point(current);
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const Edge candidate{std::min(current, v), std::max(current, v),
                           euclidean_distance(from, cloud.point(v))};
      if (best[v].u == kNone || edge_less(candidate, best[v])) best[v] = candidate;
      if (next == kNone || edge_less(best[v], best[next])) next = v;
    }
    in_tree[next] = 1;
    result.edges.push_back(best[next]);
    current = next;
  }

  std::sort(result.edges.begin(), result.edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (const Edge& e : result.edges) result.total_weight += e.weight;
  return result;
}

}  // namespace robprod
