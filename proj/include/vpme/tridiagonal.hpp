#pragma once

#include <cmath>
#include <string>

#include "vpme/errors.hpp"
#include "vpme/types.hpp"

namespace vpme {

// Thomas algorithm. sub(i) multiplies x(i-1), super(i) multiplies x(i+1);
// sub(0) and super(n-1) are ignored.
template <typename DerivedA, typename DerivedB, typename DerivedC, typename DerivedD>
Vector<typename DerivedD::Scalar> solve_tridiagonal(const Eigen::MatrixBase<DerivedA>& sub,
                                                    const Eigen::MatrixBase<DerivedB>& diag,
                                                    const Eigen::MatrixBase<DerivedC>& super,
                                                    const Eigen::MatrixBase<DerivedD>& rhs) {
  using Scalar = typename DerivedD::Scalar;
  const Eigen::Index n = rhs.size();
  Vector<Scalar> c_prime(n);
  Vector<Scalar> x(n);
  Scalar denom = diag(0);
  if (denom == Scalar(0)) throw DomainError("tridiagonal solve: zero pivot at row 0");
  c_prime(0) = n > 1 ? super(0) / denom : Scalar(0);
  x(0) = rhs(0) / denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = diag(i) - sub(i) * c_prime(i - 1);
    if (denom == Scalar(0)) throw DomainError("tridiagonal solve: zero pivot at row " + std::to_string(i));
    c_prime(i) = i + 1 < n ? super(i) / denom : Scalar(0);
    x(i) = (rhs(i) - sub(i) * x(i - 1)) / denom;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c_prime(i) * x(i + 1);
  return x;
}

// Periodic (cyclic) tridiagonal system via Sherman-Morrison. Same layout as
// solve_tridiagonal, except sub(0) couples row 0 to x(n-1) and super(n-1)
// couples row n-1 to x(0). Requires n >= 3.
template <typename DerivedA, typename DerivedB, typename DerivedC, typename DerivedD>
Vector<typename DerivedD::Scalar> solve_cyclic_tridiagonal(const Eigen::MatrixBase<DerivedA>& sub,
                                                           const Eigen::MatrixBase<DerivedB>& diag,
                                                           const Eigen::MatrixBase<DerivedC>& super,
                                                           const Eigen::MatrixBase<DerivedD>& rhs) {
  using Scalar = typename DerivedD::Scalar;
  const Eigen::Index n = rhs.size();
  if (n < 3) throw ParameterError("cyclic tridiagonal solve needs at least 3 unknowns");

  const Scalar corner_top = sub(0);          // A(0, n-1)
  const Scalar corner_bottom = super(n - 1);  // A(n-1, 0)
  const Scalar gamma = -diag(0);

  Vector<Scalar> modified = diag;
  modified(0) -= gamma;
  modified(n - 1) -= corner_bottom * corner_top / gamma;

  Vector<Scalar> x = solve_tridiagonal(sub, modified, super, rhs);
  Vector<Scalar> u = Vector<Scalar>::Zero(n);
  u(0) = gamma;
  u(n - 1) = corner_bottom;
  Vector<Scalar> z = solve_tridiagonal(sub, modified, super, u);

  const Scalar factor = (x(0) + corner_top * x(n - 1) / gamma) /
                        (Scalar(1) + z(0) + corner_top * z(n - 1) / gamma);
  x -= factor * z;
  return x;
}

}  // namespace vpme
