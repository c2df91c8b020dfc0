#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robprod/point_cloud.hpp"

namespace robprod {

// a >= b in every coordinate and a > b in at least one.
bool dominates(std::span<const double> a, std::span<const double> b) noexcept;

// Frontiers of the non-outlier cloud under the componentwise order.
struct DominanceBoundary {
  PointCloud upper;  // maximal elements: dominated by no other point
  PointCloud lower;  // minimal elements: dominate no other point
};

// Sort-filter skyline in both directions. Throws DataError on an empty cloud.
DominanceBoundary build_boundaries(const PointCloud& non_outliers);

enum class OutlierLabel { Large, Small, Neither };

std::string_view to_string(OutlierLabel label) noexcept;

struct OutlierClassification {
  std::vector<std::string> ids;
  std::vector<OutlierLabel> labels;
  std::size_t small = 0;
  std::size_t large = 0;
  std::size_t neither = 0;
};

// "large": dominates some upper-frontier point, i.e. lies in the union of the
// orthants above the upper frontier. "small": dominated by some lower-frontier
// point. Points equal to a frontier point are "neither".
OutlierClassification classify_outliers(const PointCloud& outliers, const DominanceBoundary& boundary);

}  // namespace robprod
