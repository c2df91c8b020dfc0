#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace robprod {

// n observations in p-dimensional space, stored row-major, each carrying a
// stable record identifier.
class PointCloud {
 public:
  explicit PointCloud(std::size_t dim = 1);
  PointCloud(std::size_t dim, std::vector<double> coords, std::vector<std::string> ids);

  void add(std::string id, std::span<const double> point);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return ids_.empty(); }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  double at(std::size_t i, std::size_t d) const noexcept { return coords_[i * dim_ + d]; }
  const std::string& id(std::size_t i) const noexcept { return ids_[i]; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<double>& coords() const noexcept { return coords_; }

  bool all_finite() const noexcept;

  // Cloud restricted to the given rows, in the given order.
  PointCloud subset(std::span<const std::size_t> rows) const;
  // Cloud restricted to the given coordinates, in the given order.
  PointCloud select_dims(std::span<const std::size_t> dims) const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<std::string> ids_;
};

}  // namespace robprod
