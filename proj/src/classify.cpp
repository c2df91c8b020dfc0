#include "robprod/classify.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "robprod/errors.hpp"

namespace robprod {

bool dominates(std::span<const double> a, std::span<const double> b) noexcept {
  bool strict = false;
  for (std::size_t d = 0; d < a.size(); ++d) {
    if (a[d] < b[d]) return false;
    if (a[d] > b[d]) strict = true;
  }
  return strict;
}

namespace {

// Indices of the maximal elements of `cloud` after multiplying every
// coordinate by `sign`.
std::vector<std::size_t> skyline(const PointCloud& cloud, double sign) {
  const std::size_t n = cloud.size();
  const std::size_t p = cloud.dim();
  std::vector<double> flipped(cloud.coords());
  for (double& x : flipped) x *= sign;
  auto row = [&](std::size_t i) { return std::span<const double>(flipped.data() + i * p, p); };

  // A dominator always precedes the points it dominates: its coordinate sum
  // is no smaller and, on equal sums, it is lexicographically larger.
  std::vector<double> sums(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = row(i);
    sums[i] = std::accumulate(r.begin(), r.end(), 0.0);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (sums[a] != sums[b]) return sums[a] > sums[b];
    const auto ra = row(a);
    const auto rb = row(b);
    if (std::lexicographical_compare(rb.begin(), rb.end(), ra.begin(), ra.end())) return true;
    if (std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())) return false;
    return a < b;
  });

  std::vector<std::size_t> window;
  for (std::size_t i : order) {
    const bool dominated = std::any_of(window.begin(), window.end(),
                                       [&](std::size_t w) { return dominates(row(w), row(i)); });
    if (!dominated) window.push_back(i);
  }
  std::sort(window.begin(), window.end());
  return window;
}

}  // namespace

DominanceBoundary build_boundaries(const PointCloud& non_outliers) {
  if (non_outliers.empty()) throw DataError("build_boundaries: no non-outliers");
  const auto upper = skyline(non_outliers, 1.0);
  const auto lower = skyline(non_outliers, -1.0);
  return {non_outliers.subset(upper), non_outliers.subset(lower)};
}

std::string_view to_string(OutlierLabel label) noexcept {
  switch (label) {
    case OutlierLabel::Large: return "large";
    case OutlierLabel::Small: return "small";
    case OutlierLabel::Neither: return "neither";
  }
  return "?";
}

OutlierClassification classify_outliers(const PointCloud& outliers,
                                        const DominanceBoundary& boundary) {
  if (outliers.dim() != boundary.upper.dim() || outliers.dim() != boundary.lower.dim())
    throw DataError("classify_outliers: outlier dimension " + std::to_string(outliers.dim()) +
                    " does not match boundary dimension " + std::to_string(boundary.upper.dim()));
  OutlierClassification out;
  out.ids = outliers.ids();
  out.labels.reserve(outliers.size());
  for (std::size_t i = 0; i < outliers.size(); ++i) {
    const auto o = outliers.point(i);
    OutlierLabel label = OutlierLabel::Neither;
    for (std::size_t f = 0; f < boundary.upper.size(); ++f) {
      if (dominates(o, boundary.upper.point(f))) {
        label = OutlierLabel::Large;
        break;
      }
    }
    if (label == OutlierLabel::Neither) {
      for (std::size_t f = 0; f < boundary.lower.size(); ++f) {
        if (dominates(boundary.lower.point(f), o)) {
          label = OutlierLabel::Small;
          break;
        }
      }
    }
    switch (label) {
      case OutlierLabel::Large: ++out.large; break;
      case OutlierLabel::Small: ++out.small; break;
      case OutlierLabel::Neither: ++out.neither; break;
    }
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace robprod
