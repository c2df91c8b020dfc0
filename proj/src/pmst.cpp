#include "robprod/pmst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "robprod/errors.hpp"
#include "robprod/union_find.hpp"

namespace robprod {

CoreResult prune_to_core(const MstResult& mst, std::size_t n, std::size_t p) {
  if (n == 0) throw std::invalid_argument("prune_to_core: n must be >= 1");
  if (mst.edges.size() + 1 != n)
    throw std::invalid_argument("prune_to_core: tree does not span n points");

  CoreResult out;
  out.bound = breakdown_bound(n, p);
  const std::size_t m = mst.edges.size();

  // Deletion order: longest first, ties in reverse edge_less order.
  std::vector<Edge> order = mst.edges;
  std::sort(order.begin(), order.end(),
            [](const Edge& a, const Edge& b) { return edge_less(b, a); });

  // largest[j]: largest component of the forest made of the j shortest edges,
  // i.e. of the tree after deleting the first m - j edges of `order`.
  std::vector<std::size_t> largest(m + 1);
  {
    UnionFind uf(n);
    largest[0] = 1;
    for (std::size_t j = 1; j <= m; ++j) {
      const Edge& e = order[m - j];
      largest[j] = std::max(largest[j - 1], uf.unite(e.u, e.v));
    }
  }

  std::size_t deletions = 0;
  if (largest[m] >= out.bound) {
    std::size_t j = 0;
    while (largest[j] < out.bound) ++j;
    deletions = m - j;
  }
  out.trace.reserve(deletions);
  for (std::size_t t = 1; t <= deletions; ++t)
    out.trace.push_back({order[t - 1], largest[m - t]});

  UnionFind uf(n);
  for (std::size_t i = deletions; i < m; ++i) uf.unite(order[i].u, order[i].v);

  std::vector<double> internal_weight(n, 0.0);
  std::vector<std::size_t> min_index(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = deletions; i < m; ++i) internal_weight[uf.find(order[i].u)] += order[i].weight;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t r = uf.find(v);
    min_index[r] = std::min(min_index[r], v);
  }

  std::size_t best_root = uf.find(0);
  for (std::size_t v = 1; v < n; ++v) {
    const std::size_t r = uf.find(v);
    if (r != v) continue;
    const std::size_t size_r = uf.component_size(r);
    const std::size_t size_b = uf.component_size(best_root);
    if (size_r > size_b ||
        (size_r == size_b && (internal_weight[r] < internal_weight[best_root] ||
                              (internal_weight[r] == internal_weight[best_root] &&
                               min_index[r] < min_index[best_root])))) {
      best_root = r;
    }
  }

  for (std::size_t v = 0; v < n; ++v)
    if (uf.find(v) == best_root) out.core.push_back(v);
  for (const Edge& e : mst.edges)
    if (uf.find(e.u) == best_root && uf.find(e.v) == best_root) out.core_edges.push_back(e);
  // every tree edge joining two core members survived the pruning
  return out;
}

EdgeStats edge_stats(std::span<const Edge> edges) {
  EdgeStats s;
  s.count = edges.size();
  if (edges.empty()) return s;
  double sum = 0.0;
  for (const Edge& e : edges) sum += e.weight;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (const Edge& e : edges) ss += (e.weight - s.mean) * (e.weight - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

bool reweighting_admissible(std::size_t m, double alpha) noexcept {
  if (!(alpha > 0.0 && alpha < 1.0) || m < 2) return false;
  return static_cast<double>(m) * (1.0 - alpha) > 1.0 + kReweightBoundaryTolerance;
}

double critical_length(const EdgeStats& stats, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("critical_length: alpha must lie in (0, 1)");
  if (!reweighting_admissible(stats.count, alpha))
    throw NumericalError("reweighting undefined for this subsample size / alpha (m = " +
                         std::to_string(stats.count) + ", alpha = " + std::to_string(alpha) +
                         "; need m > 1/(1-alpha))");
  const double m = static_cast<double>(stats.count);
  const double factor = std::sqrt((m * m - 1.0) / (m * m * (1.0 - alpha) - m));
  return stats.mean + factor * stats.stddev;
}

std::vector<std::size_t> reweight(const MstResult& mst, std::size_t n,
                                  std::span<const std::size_t> core,
                                  std::span<const Edge> core_edges, double w_crit) {
  if (core.empty()) throw std::invalid_argument("reweight: empty core");
  UnionFind uf(n);
  for (const Edge& e : core_edges) uf.unite(e.u, e.v);
  for (const Edge& e : mst.edges)
    if (e.weight <= w_crit) uf.unite(e.u, e.v);

  // The core is connected through its own edges, so one root covers it.
  const std::size_t root = uf.find(core.front());
  std::vector<std::size_t> kept;
  for (std::size_t v = 0; v < n; ++v)
    if (uf.find(v) == root) kept.push_back(v);
  return kept;
}

PointCloud standardize_columns(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  const std::size_t p = cloud.dim();
  std::vector<double> coords = cloud.coords();
  for (std::size_t d = 0; d < p; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += cloud.at(i, d);
    mean /= std::max<std::size_t>(n, 1);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (cloud.at(i, d) - mean) * (cloud.at(i, d) - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double& x = coords[i * p + d];
      x -= mean;
      if (sd > 0.0) x /= sd;
    }
  }
  return PointCloud(p, std::move(coords), cloud.ids());
}

DecontaminationResult decontaminate(const PointCloud& cloud, const PruneConfig& config) {
  if (config.standardize) {
    const PointCloud scaled = standardize_columns(cloud);
    return decontaminate(cloud, build_mst(scaled), config);
  }
  return decontaminate(cloud, build_mst(cloud), config);
}

DecontaminationResult decontaminate(const PointCloud& cloud, const MstResult& mst,
                                    const PruneConfig& config) {
  const std::size_t n = cloud.size();
  const std::size_t p = cloud.dim();
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw std::invalid_argument("decontaminate: alpha must lie in (0, 1)");
  if (n < p + 2)
    throw DataError("decontaminate: need at least p + 2 = " + std::to_string(p + 2) +
                    " points, got " + std::to_string(n));

  DecontaminationResult r;
  r.n = n;
  r.p = p;
  r.alpha = config.alpha;

  CoreResult core = prune_to_core(mst, n, p);
  r.bound = core.bound;
  r.core = core.core;
  r.trace = std::move(core.trace);
  r.core_edge_stats = edge_stats(core.core_edges);

  try {
    const double w = critical_length(r.core_edge_stats, config.alpha);
    r.w_crit = w;
    r.non_outliers = reweight(mst, n, r.core, core.core_edges, w);
  } catch (const NumericalError& e) {
    r.reweight_error = e.what();
    r.non_outliers = r.core;
  }

  if (r.core.size() < r.bound)
    throw std::logic_error("decontaminate: core smaller than the breakdown bound");

  std::vector<char> keep(n, 0);
  for (std::size_t v : r.non_outliers) keep[v] = 1;
  for (std::size_t v = 0; v < n; ++v)
    if (!keep[v]) r.outliers.push_back(v);

  auto ids_of = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> ids;
    ids.reserve(idx.size());
    for (std::size_t v : idx) ids.push_back(cloud.id(v));
    return ids;
  };
  r.core_ids = ids_of(r.core);
  r.non_outlier_ids = ids_of(r.non_outliers);
  r.outlier_ids = ids_of(r.outliers);
  return r;
}

}  // namespace robprod
