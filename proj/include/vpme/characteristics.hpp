#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include "vpme/errors.hpp"
#include "vpme/poisson_field.hpp"
#include "vpme/rk4.hpp"
#include "vpme/types.hpp"

namespace vpme {

/// Uniform time nodes tau_0 = t0 < ... < tau_{n-1} = T. `size()` counts nodes.
class TimeGrid {
 public:
  TimeGrid(double t0, double horizon, Eigen::Index nodes);

  double start() const { return t0_; }
  double horizon() const { return horizon_; }
  Eigen::Index size() const { return nodes_; }
  double step() const { return (horizon_ - t0_) / static_cast<double>(nodes_ - 1); }
  double node(Eigen::Index i) const {
    return i + 1 == nodes_ ? horizon_ : t0_ + static_cast<double>(i) * step();
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t0_;
  double horizon_;
  Eigen::Index nodes_;
};

/// Time x space samples of one field iterate. Sampling is a periodic cubic
/// spline in x and linear in t; the field is zero past the horizon.
///
/// The quiet time is the earliest node after which the remaining impulse
/// dt * sum_j sup_x |E(tau_j)| is at most `impulse_floor`; trajectories
/// move freely from there on. With a positive floor the stored field is zeroed
/// from the quiet node on (potentials flattened to their means). With a zero
/// floor nothing is altered.
class FieldHistory {
 public:
  FieldHistory(TimeGrid time, SpatialGrid space, SliceMatrixXd ubar, SliceMatrixXd utilde, SliceMatrixXd ebar,
               SliceMatrixXd etilde, double impulse_floor = 0.0);

  static FieldHistory zero(const TimeGrid& time, const SpatialGrid& space);
  static FieldHistory from_slices(const TimeGrid& time, const SpatialGrid& space,
                                  const std::vector<FieldSlice>& slices, double impulse_floor = 0.0);
  /// Fields only (potentials unknown, stored as zero).
  static FieldHistory from_fields(const TimeGrid& time, const SpatialGrid& space, SliceMatrixXd ebar,
                                  SliceMatrixXd etilde, double impulse_floor = 0.0);

  /// E(t, x). Throws OutOfRangeError for t < t0.
  double operator()(double t, double x) const;

  const TimeGrid& time_grid() const { return time_; }
  const SpatialGrid& spatial_grid() const { return space_; }
  double start_time() const { return time_.start(); }
  double horizon() const { return time_.horizon(); }
  double time_step() const { return time_.step(); }
  Eigen::Index quiet_index() const { return quiet_index_; }
  double quiet_time() const { return time_.node(quiet_index_); }
  bool has_potentials() const { return has_potentials_; }

  const SliceMatrixXd& ubar() const { return ubar_; }
  const SliceMatrixXd& utilde() const { return utilde_; }
  const SliceMatrixXd& ebar() const { return ebar_; }
  const SliceMatrixXd& etilde() const { return etilde_; }
  const SliceMatrixXd& total() const { return total_; }
  FieldSlice slice(Eigen::Index i) const;

 private:
  TimeGrid time_;
  SpatialGrid space_;
  SliceMatrixXd ubar_, utilde_, ebar_, etilde_, total_, moments_;
  Eigen::Index quiet_index_ = 0;
  bool has_potentials_ = true;
};

inline double sample_field(const FieldHistory& history, double t, double x) { return history(t, x); }

/// Asymptotic label (lim X - V t, lim V), x in [0,1).
struct PhaseLabel {
  double x;
  double v;
};

/// Phase-space coordinates at time t, x in [0,1).
struct PhasePoint {
  double t;
  double x;
  double v;
};

struct FlowOptions {
  int substeps = 4;  // RK4 steps per time-grid interval
};

/// Anything that can drive a trajectory: E(t, x) on [start_time, horizon],
/// with a nominal grid step and a time past which the field is treated as zero.
template <typename F>
concept TrajectoryField = requires(const F& f, double t, double x) {
  { f(t, x) } -> std::convertible_to<double>;
  { f.start_time() } -> std::convertible_to<double>;
  { f.horizon() } -> std::convertible_to<double>;
  { f.time_step() } -> std::convertible_to<double>;
  { f.quiet_time() } -> std::convertible_to<double>;
};

namespace detail {

inline void check_time(double t, double start, double horizon) {
  const double slack = 1e-12 * std::max(1.0, std::abs(horizon));
  if (t < start - slack || t > horizon + slack)
    throw OutOfRangeError("time " + std::to_string(t) + " outside [" + std::to_string(start) + ", " +
                          std::to_string(horizon) + "]");
}

inline void check_finite(const PhaseState<double>& s) {
  if (!s.allFinite()) throw IntegrationError("non-finite phase-space state during trajectory integration");
}

}  // namespace detail

/// (X(t), V(t)) of the trajectory with asymptotic label `label`: free flight down
/// from the horizon to the quiet time, then RK4 backward to t.
template <TrajectoryField Field>
PhasePoint flow_from_label(const Field& field, const PhaseLabel& label, double t, const FlowOptions& options = {}) {
  detail::check_time(t, field.start_time(), field.horizon());
  const double quiet = std::min(field.quiet_time(), field.horizon());
  if (t >= quiet) return {t, wrap_unit(label.x + label.v * t), label.v};
  PhaseState<double> s(label.x + label.v * quiet, label.v);
  s = rk4_integrate(field, quiet, t, s, field.time_step() / options.substeps);
  detail::check_finite(s);
  return {t, wrap_unit(s(0)), s(1)};
}

/// Inverse flow: integrate forward from `point` to the horizon and return
/// (X(T) - T V(T) mod 1, V(T)).
template <TrajectoryField Field>
PhaseLabel label_from_point(const Field& field, const PhasePoint& point, const FlowOptions& options = {}) {
  detail::check_time(point.t, field.start_time(), field.horizon());
  const double quiet = std::min(field.quiet_time(), field.horizon());
  if (point.t >= quiet) return {wrap_unit(point.x - point.v * point.t), point.v};
  PhaseState<double> s(point.x, point.v);
  s = rk4_integrate(field, point.t, quiet, s, field.time_step() / options.substeps);
  detail::check_finite(s);
  // Past the quiet time X(T) - T V = X(quiet) - quiet V.
  return {wrap_unit(s(0) - quiet * s(1)), s(1)};
}

}  // namespace vpme
