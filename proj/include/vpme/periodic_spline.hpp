#pragma once

#include <cmath>

#include "vpme/tridiagonal.hpp"
#include "vpme/types.hpp"

namespace vpme {

/// Second-derivative moments of the periodic cubic spline through uniform samples on [0,1).
template <typename Derived>
Vector<typename Derived::Scalar> periodic_spline_moments(const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = values.size();
  const Scalar h = Scalar(1) / Scalar(n);
  Vector<Scalar> rhs(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar prev = values((j + n - 1) % n);
    const Scalar next = values((j + 1) % n);
    rhs(j) = Scalar(6) * (next - Scalar(2) * values(j) + prev) / (h * h);
  }
  const Vector<Scalar> ones = Vector<Scalar>::Ones(n);
  return solve_cyclic_tridiagonal(ones, Vector<Scalar>::Constant(n, Scalar(4)), ones, rhs);
}

/// Evaluate the periodic cubic spline with the given node values and moments. `values` and
/// `moments` may be rows of a larger matrix.
template <typename DerivedY, typename DerivedM>
typename DerivedY::Scalar periodic_spline_eval(const Eigen::DenseBase<DerivedY>& values,
                                               const Eigen::DenseBase<DerivedM>& moments,
                                               typename DerivedY::Scalar x) {
  using Scalar = typename DerivedY::Scalar;
  const Eigen::Index n = values.size();
  const Scalar scaled = wrap_unit(x) * Scalar(n);
  Eigen::Index j = static_cast<Eigen::Index>(scaled);
  if (j >= n) j = n - 1;
  const Eigen::Index jn = j + 1 == n ? 0 : j + 1;
  const Scalar b = scaled - Scalar(j);
  const Scalar a = Scalar(1) - b;
  const Scalar h = Scalar(1) / Scalar(n);
  return a * values(j) + b * values(jn) +
         ((a * a * a - a) * moments(j) + (b * b * b - b) * moments(jn)) * (h * h) / Scalar(6);
}

}  // namespace vpme
