#include "robprod/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robprod {

PointCloud::PointCloud(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("point cloud dimension must be >= 1");
}

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords, std::vector<std::string> ids)
    : dim_(dim), coords_(std::move(coords)), ids_(std::move(ids)) {
  if (dim_ == 0) throw std::invalid_argument("point cloud dimension must be >= 1");
  if (coords_.size() != ids_.size() * dim_)
    throw std::invalid_argument("point cloud: coordinate count does not match ids x dim");
}

void PointCloud::add(std::string id, std::span<const double> point) {
  if (point.size() != dim_) throw std::invalid_argument("point cloud: wrong point dimension");
  coords_.insert(coords_.end(), point.begin(), point.end());
  ids_.push_back(std::move(id));
}

bool PointCloud::all_finite() const noexcept {
  return std::all_of(coords_.begin(), coords_.end(), [](double x) { return std::isfinite(x); });
}

PointCloud PointCloud::subset(std::span<const std::size_t> rows) const {
  PointCloud out(dim_);
  out.coords_.reserve(rows.size() * dim_);
  out.ids_.reserve(rows.size());
  for (std::size_t r : rows) out.add(ids_.at(r), point(r));
  return out;
}

PointCloud PointCloud::select_dims(std::span<const std::size_t> dims) const {
  PointCloud out(dims.size());
  std::vector<double> row(dims.size());
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t d = 0; d < dims.size(); ++d) {
      if (dims[d] >= dim_) throw std::out_of_range("point cloud: dimension index out of range");
      row[d] = at(i, dims[d]);
    }
    out.add(ids_[i], row);
  }
  return out;
}

}  // namespace robprod
