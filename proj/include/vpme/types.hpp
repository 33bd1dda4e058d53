#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace vpme {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Time-major sample storage: row i is the time slice tau_i, column j the node x_j.
template <typename Scalar>
using SliceMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vector<double>;
using SliceMatrixXd = SliceMatrix<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Reduce a coordinate to the fundamental domain [0,1) of the torus.
template <typename Scalar>
Scalar wrap_unit(Scalar x) {
  Scalar r = x - std::floor(x);
  return r >= Scalar(1) ? Scalar(0) : r;
}

}  // namespace vpme
