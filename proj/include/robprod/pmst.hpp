#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robprod/mst.hpp"
#include "robprod/point_cloud.hpp"

namespace robprod {

// floor((n + p + 1) / 2): smallest subsample size with maximal breakdown.
constexpr std::size_t breakdown_bound(std::size_t n, std::size_t p) noexcept {
  return (n + p + 1) / 2;
}

struct PruneStep {
  Edge edge;                       // the deleted edge
  std::size_t largest_component;   // after the deletion
};

struct CoreResult {
  std::vector<std::size_t> core;   // point indices, ascending
  std::vector<Edge> core_edges;    // MST edges internal to the core (E')
  std::vector<PruneStep> trace;    // deletions in order
  std::size_t bound = 0;
};

// Deletes MST edges longest first (reverse edge_less order) and stops right
// before the deletion that would leave every component smaller than
// breakdown_bound(n, p). The core is the largest remaining component; equal
// sizes are resolved by smaller internal weight, then smallest point index.
CoreResult prune_to_core(const MstResult& mst, std::size_t n, std::size_t p);

struct EdgeStats {
  double mean = 0.0;
  double stddev = 0.0;  // m - 1 denominator
  std::size_t count = 0;
};

EdgeStats edge_stats(std::span<const Edge> edges);

// m > 1/(1 - alpha) up to a relative tolerance of this size; the boundary
// itself is inadmissible.
inline constexpr double kReweightBoundaryTolerance = 1e-9;

bool reweighting_admissible(std::size_t m, double alpha) noexcept;

// Finite-sample Chebyshev critical edge length
//   mean + sqrt((m^2 - 1) / (m^2 (1 - alpha) - m)) * stddev.
// Throws NumericalError when m < 2 or m <= 1/(1 - alpha).
double critical_length(const EdgeStats& stats, double alpha);

// Re-attaches every MST edge with weight <= w_crit to the core (core edges
// are always kept) and returns the indices of the component holding the
// core, ascending.
std::vector<std::size_t> reweight(const MstResult& mst, std::size_t n,
                                  std::span<const std::size_t> core,
                                  std::span<const Edge> core_edges, double w_crit);

struct PruneConfig {
  double alpha = 0.95;
  // z-score every coordinate (sample std) before building the tree
  bool standardize = false;
};

struct DecontaminationResult {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t bound = 0;
  double alpha = 0.95;
  std::vector<std::size_t> core;         // point indices (G')
  std::vector<std::size_t> non_outliers; // point indices (G'')
  std::vector<std::size_t> outliers;     // point indices
  std::vector<std::string> core_ids;
  std::vector<std::string> non_outlier_ids;
  std::vector<std::string> outlier_ids;
  EdgeStats core_edge_stats;
  std::optional<double> w_crit;
  // set when the reweighting step was undefined; non_outliers == core then
  std::optional<std::string> reweight_error;
  std::vector<PruneStep> trace;
};

// build_mst -> prune_to_core -> critical_length -> reweight.
// Requires n >= p + 2.
DecontaminationResult decontaminate(const PointCloud& cloud, const PruneConfig& config = {});

// As above but reuses an already built tree of the same cloud.
DecontaminationResult decontaminate(const PointCloud& cloud, const MstResult& mst,
                                    const PruneConfig& config);

PointCloud standardize_columns(const PointCloud& cloud);

}  // namespace robprod
