#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <vector>

namespace dpk {

using Points = Eigen::VectorXd;

/// A point of the Weyl chamber W_N: strictly increasing coordinates.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(Points points);
  Configuration(std::initializer_list<double> points);
  explicit Configuration(const std::vector<double>& points);

  const Points& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  double operator[](int i) const { return points_[i]; }

  /// Smallest gap between neighbours (+inf for N < 2).
  double min_gap() const;

 private:
  Points points_;
};

bool is_strictly_increasing(const Eigen::Ref<const Points>& points);

}  // namespace dpk
