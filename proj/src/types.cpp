#include "dpk/types.hpp"

#include "dpk/error.hpp"

#include <limits>

namespace dpk {

bool is_strictly_increasing(const Eigen::Ref<const Points>& points) {
  for (Eigen::Index j = 0; j + 1 < points.size(); ++j)
    if (!(points[j] < points[j + 1])) return false;
  return true;
}

Configuration::Configuration(Points points) : points_(std::move(points)) {
  if (points_.size() == 0) throw ArgumentError("Configuration: at least one point is required");
  if (!is_strictly_increasing(points_))
    throw ArgumentError("Configuration: points must be strictly increasing");
}

Configuration::Configuration(std::initializer_list<double> points)
    : Configuration(Points(Eigen::Map<const Points>(points.begin(), points.size()))) {}

Configuration::Configuration(const std::vector<double>& points)
    : Configuration(Points(Eigen::Map<const Points>(points.data(), points.size()))) {}

double Configuration::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j + 1 < points_.size(); ++j) gap = std::min(gap, points_[j + 1] - points_[j]);
  return gap;
}

}  // namespace dpk
