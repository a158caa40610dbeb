#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace dpk::linalg {

struct SignedLogDet {
  double sign = 1.0;
  double log_abs = 0.0;

  double value() const { return sign == 0.0 ? 0.0 : sign * std::exp(log_abs); }
};

// Determinant in sign/log-magnitude form via partial-pivoting LU.
template <class Derived>
SignedLogDet log_det(const Eigen::MatrixBase<Derived>& m) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.rows() == 0) return {};
  const Eigen::PartialPivLU<Matrix> lu(m);
  const auto& packed = lu.matrixLU();
  SignedLogDet out{static_cast<double>(lu.permutationP().determinant()), 0.0};
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const double d = packed(i, i);
    if (d == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
    if (d < 0.0) out.sign = -out.sign;
    out.log_abs += std::log(std::abs(d));
  }
  return out;
}

template <class Derived>
double det(const Eigen::MatrixBase<Derived>& m) {
  return log_det(m).value();
}

// Cofactor expansion for n <= 3; cross-check for the LU route.
template <class Derived>
double det_cofactor(const Eigen::MatrixBase<Derived>& m) {
  switch (m.rows()) {
    case 0:
      return 1.0;
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return det(m);
  }
}

}  // namespace dpk::linalg
