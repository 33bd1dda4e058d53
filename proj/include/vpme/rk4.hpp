#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace vpme {

/// Phase-space state (X, V) with X kept on the lift (not reduced mod 1).
template <typename Scalar>
using PhaseState = Eigen::Matrix<Scalar, 2, 1>;

/// One classical Runge-Kutta step of X' = V, V' = E(t, X). The step may be negative.
template <typename Scalar, typename Field>
PhaseState<Scalar> rk4_step(const Field& field, Scalar t, const PhaseState<Scalar>& s, Scalar h) {
  auto rhs = [&field](Scalar time, const PhaseState<Scalar>& y) {
    return PhaseState<Scalar>(y(1), field(time, y(0)));
  };
  const Scalar half = h / Scalar(2);
  const PhaseState<Scalar> k1 = rhs(t, s);
  const PhaseState<Scalar> k2 = rhs(t + half, s + half * k1);
  const PhaseState<Scalar> k3 = rhs(t + half, s + half * k2);
  const PhaseState<Scalar> k4 = rhs(t + h, s + h * k3);
  return s + (h / Scalar(6)) * (k1 + Scalar(2) * (k2 + k3) + k4);
}

/// Integrate from t_from to t_to with equal steps no longer than `max_step`.
template <typename Scalar, typename Field>
PhaseState<Scalar> rk4_integrate(const Field& field, Scalar t_from, Scalar t_to,
                                 PhaseState<Scalar> s, Scalar max_step) {
  const Scalar span = t_to - t_from;
  if (span == Scalar(0)) return s;
  // The 1e-9 slack keeps grid-aligned spans from picking up an extra step.
  const auto steps = static_cast<long>(std::ceil(std::abs(span) / max_step - Scalar(1e-9)));
  const long n = steps < 1 ? 1 : steps;
  const Scalar h = span / Scalar(n);
  for (long i = 0; i < n; ++i) s = rk4_step(field, t_from + Scalar(i) * h, s, h);
  return s;
}

}  // namespace vpme
